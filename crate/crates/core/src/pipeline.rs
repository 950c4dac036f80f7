//! Stage orchestration: check, targeted fixes, codefixes, line deletion,
//! with a full snapshot recorded after each stage.
//!
//! Error-free snippets short-circuit after the initial check. Later stages
//! are skipped as soon as no diagnostics remain. All work is bounded by a
//! per-snippet wall-clock timeout and a compile budget; on overrun the
//! result carries the best state reached so far with the `timed_out` flag.
//! `run_guarded` additionally runs the whole pipeline on a watchdogged
//! thread so even a hung analysis cannot stall a corpus run.

use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::ambient::AmbientEnvironment;
use crate::analyzer::{check_budgeted, Analysis};
use crate::budget::Budget;
use crate::deletion::{self, is_emptied};
use crate::fixes::{codefix_stage_full, targeted_fixes_full, CodefixRegistry, FixStyle};
use crate::source::{Diagnostic, Origin, Snippet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash)]
#[serde(rename_all = "lowercase")]
pub enum StageName {
    Initial,
    Targeted,
    Codefix,
    Deletion,
}

impl StageName {
    pub const ALL: [StageName; 4] = [
        StageName::Initial,
        StageName::Targeted,
        StageName::Codefix,
        StageName::Deletion,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StageName::Initial => "initial",
            StageName::Targeted => "targeted",
            StageName::Codefix => "codefix",
            StageName::Deletion => "deletion",
        }
    }
}

/// Which stages run; disabling stages gives ablation/measure-only modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageToggles {
    pub targeted: bool,
    pub codefix: bool,
    pub deletion: bool,
}

impl Default for StageToggles {
    fn default() -> Self {
        StageToggles {
            targeted: true,
            codefix: true,
            deletion: true,
        }
    }
}

impl StageToggles {
    pub fn none() -> Self {
        StageToggles {
            targeted: false,
            codefix: false,
            deletion: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Hard wall-clock limit per snippet.
    pub timeout: Duration,
    /// Maximum analyzer runs per snippet.
    pub max_compiles: u32,
    pub stages: StageToggles,
    pub fix_style: FixStyle,
    /// Compile after each codefix instead of once per batch.
    pub validate_each_codefix: bool,
    /// Extra slack the watchdog grants beyond `timeout` before abandoning a
    /// hung worker.
    pub watchdog_grace: Duration,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            timeout: Duration::from_secs(60),
            max_compiles: 500,
            stages: StageToggles::default(),
            fix_style: FixStyle::default(),
            validate_each_codefix: false,
            watchdog_grace: Duration::from_secs(1),
        }
    }
}

/// A change applied during a stage, compact enough for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub fix_id: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSnapshot {
    pub stage: StageName,
    pub text: String,
    pub diagnostics: Vec<Diagnostic>,
    pub actions: Vec<ActionRecord>,
    pub duration_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PipelineFlags {
    pub emptied: bool,
    pub timed_out: bool,
    pub analyzer_abort: bool,
}

fn origin_inline() -> Origin {
    Origin::Inline
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    pub snippet_id: String,
    #[serde(default = "origin_inline")]
    pub origin: Origin,
    pub stages: Vec<StageSnapshot>,
    pub final_text: String,
    pub final_diagnostics: Vec<Diagnostic>,
    pub flags: PipelineFlags,
    pub lines_commented: u32,
}

impl PipelineResult {
    pub fn stage(&self, name: StageName) -> Option<&StageSnapshot> {
        self.stages.iter().find(|s| s.stage == name)
    }

    /// Latest snapshot at or before the given stage (stages that did not
    /// run carry the previous state forward).
    pub fn snapshot_at(&self, name: StageName) -> Option<&StageSnapshot> {
        self.stages.iter().rev().find(|s| s.stage <= name)
    }

    pub fn changed(&self) -> bool {
        self.stages.iter().any(|s| !s.actions.is_empty())
    }
}

/// Runs the staged pipeline on one snippet, cooperatively bounded by the
/// configured timeout and compile budget.
pub fn run(snippet: &Snippet, config: &PipelineConfig, env: &AmbientEnvironment) -> PipelineResult {
    run_with_sink(snippet, config, env, None)
}

type SnapshotSink = Mutex<Vec<StageSnapshot>>;

fn run_with_sink(
    snippet: &Snippet,
    config: &PipelineConfig,
    env: &AmbientEnvironment,
    sink: Option<&SnapshotSink>,
) -> PipelineResult {
    let deadline = Instant::now() + config.timeout;
    let mut budget = Budget::new(config.max_compiles, Some(deadline));
    let mut snapshots: Vec<StageSnapshot> = Vec::new();
    let mut timed_out = false;

    let record = |snapshots: &mut Vec<StageSnapshot>, snap: StageSnapshot| {
        if let Some(sink) = sink {
            if let Ok(mut guard) = sink.lock() {
                guard.push(snap.clone());
            }
        }
        snapshots.push(snap);
    };

    let started = Instant::now();
    let initial = check_budgeted(snippet, env, &mut budget);
    let mut cur_snippet = snippet.clone();
    let mut cur_analysis: Option<Analysis> = None;
    match initial {
        Ok(analysis) => {
            record(
                &mut snapshots,
                StageSnapshot {
                    stage: StageName::Initial,
                    text: snippet.text().to_string(),
                    diagnostics: analysis.diagnostics.clone(),
                    actions: Vec::new(),
                    duration_ms: started.elapsed().as_millis() as u64,
                },
            );
            cur_analysis = Some(analysis);
        }
        Err(_) => {
            timed_out = true;
            record(
                &mut snapshots,
                StageSnapshot {
                    stage: StageName::Initial,
                    text: snippet.text().to_string(),
                    diagnostics: Vec::new(),
                    actions: Vec::new(),
                    duration_ms: started.elapsed().as_millis() as u64,
                },
            );
        }
    }

    let mut lines_commented = 0u32;

    // targeted fixes
    if !timed_out && config.stages.targeted {
        let analysis = cur_analysis.as_ref().expect("analysis present");
        if !analysis.diagnostics.is_empty() {
            let t = Instant::now();
            let (outcome, new_analysis) =
                targeted_fixes_full(&cur_snippet, analysis, env, &config.fix_style, &mut budget);
            if outcome.exhausted.is_some() {
                timed_out = true;
            }
            let actions = outcome
                .applied
                .iter()
                .map(|a| ActionRecord {
                    fix_id: a.fix_id.clone(),
                    description: a.description.clone(),
                })
                .collect();
            cur_snippet = cur_snippet.with_text(outcome.text_after);
            record(
                &mut snapshots,
                StageSnapshot {
                    stage: StageName::Targeted,
                    text: cur_snippet.text().to_string(),
                    diagnostics: outcome.diagnostics_after.clone(),
                    actions,
                    duration_ms: t.elapsed().as_millis() as u64,
                },
            );
            if let Some(a) = new_analysis {
                cur_analysis = Some(a);
            }
        }
    }

    // registered codefixes, applied as a filtered batch
    if !timed_out && config.stages.codefix {
        let analysis = cur_analysis.as_ref().expect("analysis present");
        if !analysis.diagnostics.is_empty() {
            let t = Instant::now();
            let (outcome, new_analysis) = codefix_stage_full(
                &cur_snippet,
                analysis,
                env,
                &mut budget,
                config.validate_each_codefix,
                &CodefixRegistry::builtin(),
            );
            if outcome.exhausted.is_some() {
                timed_out = true;
            }
            let actions = outcome
                .applied
                .iter()
                .map(|a| ActionRecord {
                    fix_id: a.fix_id.clone(),
                    description: a.description.clone(),
                })
                .collect();
            cur_snippet = cur_snippet.with_text(outcome.text_after);
            record(
                &mut snapshots,
                StageSnapshot {
                    stage: StageName::Codefix,
                    text: cur_snippet.text().to_string(),
                    diagnostics: outcome.diagnostics_after.clone(),
                    actions,
                    duration_ms: t.elapsed().as_millis() as u64,
                },
            );
            if let Some(a) = new_analysis {
                cur_analysis = Some(a);
            }
        }
    }

    // line deletion
    if !timed_out && config.stages.deletion {
        let diags_now = cur_analysis
            .as_ref()
            .map(|a| a.diagnostics.len())
            .unwrap_or(0);
        if diags_now > 0 {
            let t = Instant::now();
            let outcome = deletion::delete_lines(
                &cur_snippet,
                |s, b| check_budgeted(s, env, b).map(|a| a.diagnostics),
                &mut budget,
            );
            if matches!(outcome.stop, deletion::StopReason::BudgetExhausted(_)) {
                timed_out = true;
            }
            lines_commented = outcome.lines_commented;
            let actions = outcome
                .commented_lines
                .iter()
                .map(|l| ActionRecord {
                    fix_id: "comment-line".to_string(),
                    description: format!("Comment out line {l}"),
                })
                .collect();
            cur_snippet = cur_snippet.with_text(outcome.text);
            record(
                &mut snapshots,
                StageSnapshot {
                    stage: StageName::Deletion,
                    text: cur_snippet.text().to_string(),
                    diagnostics: outcome.diagnostics,
                    actions,
                    duration_ms: t.elapsed().as_millis() as u64,
                },
            );
        }
    }

    let last = snapshots.last().expect("at least the initial snapshot");
    let final_text = last.text.clone();
    let final_diagnostics = last.diagnostics.clone();
    PipelineResult {
        snippet_id: snippet.id().to_string(),
        origin: snippet.origin().clone(),
        flags: PipelineFlags {
            emptied: is_emptied(&final_text),
            timed_out,
            analyzer_abort: false,
        },
        final_text,
        final_diagnostics,
        stages: snapshots,
        lines_commented,
    }
}

/// Runs the pipeline on a watchdogged worker thread. If the worker fails to
/// respond within `timeout + watchdog_grace`, it is abandoned and the
/// result is rebuilt from the last completed stage snapshot with
/// `analyzer_abort` set.
pub fn run_guarded(
    snippet: &Snippet,
    config: &PipelineConfig,
    env: &Arc<AmbientEnvironment>,
) -> PipelineResult {
    let (tx, rx) = mpsc::channel();
    let sink = Arc::new(Mutex::new(Vec::<StageSnapshot>::new()));
    let worker = {
        let snippet = snippet.clone();
        let config = config.clone();
        let env = Arc::clone(env);
        let sink = Arc::clone(&sink);
        thread::Builder::new()
            .name("snippet-pipeline".to_string())
            .stack_size(16 * 1024 * 1024)
            .spawn(move || {
                let result = run_with_sink(&snippet, &config, &env, Some(&sink));
                let _ = tx.send(result);
            })
    };
    let Ok(worker) = worker else {
        return run(snippet, config, env);
    };
    match rx.recv_timeout(config.timeout + config.watchdog_grace) {
        Ok(result) => {
            let _ = worker.join();
            result
        }
        Err(_) => {
            // abandon the hung worker; the cooperative deadline inside will
            // eventually stop it, and its late result is discarded
            let stages = sink.lock().map(|g| g.clone()).unwrap_or_default();
            let (final_text, final_diagnostics) = stages
                .last()
                .map(|s| (s.text.clone(), s.diagnostics.clone()))
                .unwrap_or_else(|| (snippet.text().to_string(), Vec::new()));
            let lines_commented = stages
                .iter()
                .find(|s| s.stage == StageName::Deletion)
                .map(|s| s.actions.len() as u32)
                .unwrap_or(0);
            PipelineResult {
                snippet_id: snippet.id().to_string(),
                origin: snippet.origin().clone(),
                flags: PipelineFlags {
                    emptied: is_emptied(&final_text),
                    timed_out: true,
                    analyzer_abort: true,
                },
                final_text,
                final_diagnostics,
                stages,
                lines_commented,
            }
        }
    }
}

/// True when running the pipeline on its own output applies zero changes.
pub fn run_twice_fixed_point(
    snippet: &Snippet,
    config: &PipelineConfig,
    env: &AmbientEnvironment,
) -> bool {
    let first = run(snippet, config, env);
    if first.flags.timed_out {
        return false;
    }
    let second_input = snippet.with_text(&first.final_text);
    let second = run(&second_input, config, env);
    second.final_text == first.final_text && !second.changed()
}
