//! Corpus ingestion, batch execution, and error-landscape analytics:
//! per-stage error-free rates, code histograms, empty-snippet and
//! deleted-line counts.
//!
//! Inputs come from directories of `.js` files, JSON Lines records, or
//! README markdown with `--extract`. Reports serialize under the versioned
//! `ncc-report/1` schema (see `docs/report-format.md`).

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ambient::AmbientEnvironment;
use crate::codes;
use crate::pipeline::{run_guarded, PipelineConfig, PipelineResult, StageName};
use crate::source::{Origin, Snippet};

pub const REPORT_SCHEMA: &str = "ncc-report/1";

/// One ingested snippet, before analysis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestRecord {
    pub id: String,
    #[serde(default = "default_origin")]
    pub origin: Origin,
    pub text: String,
}

fn default_origin() -> Origin {
    Origin::Inline
}

/// Extracts fenced code blocks from README markdown. Blocks tagged with a
/// language other than js/javascript/node (or no tag) are skipped, as are
/// blocks left unclosed by malformed fences. Ids are `<package>#<ordinal>`
/// over the kept blocks.
pub fn extract_markdown(readme: &str, package: &str) -> Vec<IngestRecord> {
    const KEEP: [&str; 4] = ["", "js", "javascript", "node"];
    let mut records = Vec::new();
    let mut fence: Option<(char, String, Vec<&str>)> = None;
    for raw_line in readme.lines() {
        let line = raw_line.trim_start();
        let opener = if line.starts_with("```") {
            Some('`')
        } else if line.starts_with("~~~") {
            Some('~')
        } else {
            None
        };
        match (&mut fence, opener) {
            (Some((ch, lang, lines)), Some(c)) if *ch == c => {
                // closing fence
                if KEEP.contains(&lang.as_str()) {
                    let mut text = lines.join("\n");
                    if !text.is_empty() {
                        text.push('\n');
                    }
                    if !text.trim().is_empty() {
                        records.push((text, ()));
                    }
                }
                fence = None;
            }
            (Some((_, _, lines)), _) => lines.push(raw_line),
            (None, Some(c)) => {
                let info = line.trim_start_matches(c).trim();
                let lang = info
                    .split_whitespace()
                    .next()
                    .unwrap_or("")
                    .to_ascii_lowercase();
                fence = Some((c, lang, Vec::new()));
            }
            (None, None) => {}
        }
    }
    // an unclosed fence at EOF is malformed: its block yields no record
    records
        .into_iter()
        .enumerate()
        .map(|(i, (text, _))| IngestRecord {
            id: format!("{package}#{}", i + 1),
            origin: Origin::MarkdownReadme {
                package: package.to_string(),
            },
            text,
        })
        .collect()
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("input path {0} is neither a file nor a directory")]
    BadInput(PathBuf),
    #[error("invalid JSON on line {line} of {path}: {source}")]
    BadJson {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("reports cover different snippet universes ({before} vs {after} snippets)")]
    MismatchedReports { before: u64, after: u64 },
    #[error("unsupported report schema {found:?}, expected {expected:?}")]
    Schema { found: String, expected: String },
}

/// Loaded records plus per-file errors for inputs that could not be read;
/// a partial failure does not abort the run.
#[derive(Debug, Default)]
pub struct LoadOutcome {
    pub records: Vec<IngestRecord>,
    pub errors: Vec<(PathBuf, String)>,
}

/// Loads snippets from a path: a `.js` file, a `.jsonl` file of records, a
/// `.md` file (with `extract`), or a directory scanned recursively for the
/// same. Duplicate ids are reported as per-file errors and dropped.
pub fn load_inputs(path: &Path, extract: bool) -> Result<LoadOutcome, CorpusError> {
    let mut out = LoadOutcome::default();
    if path.is_dir() {
        let mut files = Vec::new();
        collect_files(path, &mut files, &mut out);
        files.sort();
        for f in files {
            load_file(&f, extract, path, &mut out);
        }
    } else if path.is_file() {
        load_file(path, extract, path.parent().unwrap_or(path), &mut out);
    } else {
        return Err(CorpusError::BadInput(path.to_path_buf()));
    }
    dedupe_ids(&mut out);
    Ok(out)
}

fn collect_files(dir: &Path, files: &mut Vec<PathBuf>, out: &mut LoadOutcome) {
    match fs::read_dir(dir) {
        Ok(entries) => {
            for entry in entries.flatten() {
                let p = entry.path();
                if p.is_dir() {
                    collect_files(&p, files, out);
                } else {
                    files.push(p);
                }
            }
        }
        Err(e) => out.errors.push((dir.to_path_buf(), e.to_string())),
    }
}

fn load_file(path: &Path, extract: bool, root: &Path, out: &mut LoadOutcome) {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    match ext.as_str() {
        "js" => match fs::read_to_string(path) {
            Ok(text) => {
                if text.trim().is_empty() {
                    out.errors
                        .push((path.to_path_buf(), "empty snippet file".to_string()));
                    return;
                }
                out.records.push(IngestRecord {
                    id: relative_id(path, root),
                    origin: Origin::File {
                        path: path.display().to_string(),
                    },
                    text,
                });
            }
            Err(e) => out.errors.push((path.to_path_buf(), e.to_string())),
        },
        "jsonl" => match fs::File::open(path) {
            Ok(f) => {
                for (i, line) in BufReader::new(f).lines().enumerate() {
                    match line {
                        Ok(line) => {
                            if line.trim().is_empty() {
                                continue;
                            }
                            match serde_json::from_str::<IngestRecord>(&line) {
                                Ok(rec) => {
                                    if rec.text.trim().is_empty() {
                                        out.errors.push((
                                            path.to_path_buf(),
                                            format!("line {}: empty snippet text", i + 1),
                                        ));
                                    } else {
                                        out.records.push(rec);
                                    }
                                }
                                Err(e) => out.errors.push((
                                    path.to_path_buf(),
                                    format!("line {}: {e}", i + 1),
                                )),
                            }
                        }
                        Err(e) => out.errors.push((path.to_path_buf(), e.to_string())),
                    }
                }
            }
            Err(e) => out.errors.push((path.to_path_buf(), e.to_string())),
        },
        "md" | "markdown" if extract => match fs::read_to_string(path) {
            Ok(text) => {
                let package = package_name_of(path);
                let records = extract_markdown(&text, &package);
                if records.is_empty() {
                    out.errors.push((
                        path.to_path_buf(),
                        "no js code blocks extracted".to_string(),
                    ));
                }
                out.records.extend(records);
            }
            Err(e) => out.errors.push((path.to_path_buf(), e.to_string())),
        },
        _ => {} // other files are ignored silently
    }
}

/// Package name for a README path: the file stem, or the parent directory
/// name when the stem is just "readme".
fn package_name_of(path: &Path) -> String {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("package");
    if stem.eq_ignore_ascii_case("readme") {
        path.parent()
            .and_then(|p| p.file_name())
            .and_then(|s| s.to_str())
            .unwrap_or(stem)
            .to_string()
    } else {
        stem.to_string()
    }
}

fn relative_id(path: &Path, root: &Path) -> String {
    path.strip_prefix(root)
        .unwrap_or(path)
        .display()
        .to_string()
}

fn dedupe_ids(out: &mut LoadOutcome) {
    let mut seen = std::collections::HashSet::new();
    let mut kept = Vec::with_capacity(out.records.len());
    for rec in out.records.drain(..) {
        if seen.insert(rec.id.clone()) {
            kept.push(rec);
        } else {
            out.errors.push((
                PathBuf::from(&rec.id),
                format!("duplicate snippet id '{}' dropped", rec.id),
            ));
        }
    }
    out.records = kept;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramEntry {
    pub code: u32,
    pub label: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageStats {
    pub stage: StageName,
    pub error_free_count: u64,
    pub total_errors: u64,
    pub avg_errors_per_snippet: f64,
    pub avg_errors_per_erroneous_snippet: f64,
    /// Sorted by count descending, ties by code ascending.
    pub histogram: Vec<HistogramEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub schema: String,
    pub snippet_count: u64,
    pub stages: Vec<StageStats>,
    pub emptied_count: u64,
    pub timed_out_count: u64,
    pub lines_total: u64,
    pub lines_commented: u64,
}

impl CorpusReport {
    pub fn final_stage(&self) -> &StageStats {
        self.stages.last().expect("reports carry all four stages")
    }

    pub fn stage(&self, name: StageName) -> Option<&StageStats> {
        self.stages.iter().find(|s| s.stage == name)
    }
}

/// Aggregates per-snippet results into the corpus report. Stages a snippet
/// skipped carry its last recorded state forward, so every stage's
/// statistics cover the whole corpus.
pub fn build_report(results: &[PipelineResult]) -> CorpusReport {
    let snippet_count = results.len() as u64;
    let mut stages = Vec::new();
    for stage in StageName::ALL {
        let mut error_free = 0u64;
        let mut total_errors = 0u64;
        let mut erroneous = 0u64;
        let mut histogram: BTreeMap<u32, u64> = BTreeMap::new();
        for r in results {
            let Some(snap) = r.snapshot_at(stage) else {
                continue;
            };
            let n = snap.diagnostics.len() as u64;
            total_errors += n;
            if n == 0 {
                error_free += 1;
            } else {
                erroneous += 1;
            }
            for d in &snap.diagnostics {
                *histogram.entry(d.code).or_insert(0) += 1;
            }
        }
        let mut histogram: Vec<HistogramEntry> = histogram
            .into_iter()
            .map(|(code, count)| HistogramEntry {
                code,
                label: codes::label_of(code).unwrap_or("Unknown code").to_string(),
                count,
            })
            .collect();
        histogram.sort_by(|a, b| b.count.cmp(&a.count).then(a.code.cmp(&b.code)));
        stages.push(StageStats {
            stage,
            error_free_count: error_free,
            total_errors,
            avg_errors_per_snippet: ratio(total_errors, snippet_count),
            avg_errors_per_erroneous_snippet: ratio(total_errors, erroneous),
            histogram,
        });
    }
    CorpusReport {
        schema: REPORT_SCHEMA.to_string(),
        snippet_count,
        stages,
        emptied_count: results.iter().filter(|r| r.flags.emptied).count() as u64,
        timed_out_count: results.iter().filter(|r| r.flags.timed_out).count() as u64,
        lines_total: results
            .iter()
            .map(|r| {
                r.stages
                    .first()
                    .map(|s| s.text.lines().count() as u64)
                    .unwrap_or(0)
            })
            .sum(),
        lines_commented: results.iter().map(|r| r.lines_commented as u64).sum(),
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug)]
pub struct CorpusRun {
    pub results: Vec<PipelineResult>,
    pub report: CorpusReport,
}

/// Runs the pipeline over every record, `parallelism` snippets at a time,
/// and aggregates the report. Results are merged in snippet-id order, so
/// the output is identical for any parallelism degree.
pub fn run_corpus(
    records: Vec<IngestRecord>,
    config: &PipelineConfig,
    parallelism: usize,
    env: &Arc<AmbientEnvironment>,
) -> CorpusRun {
    let snippets: Vec<Snippet> = records
        .into_iter()
        .map(|r| Snippet::new(r.id, r.text, r.origin))
        .collect();
    let mut results: Vec<PipelineResult> = if parallelism <= 1 {
        snippets
            .iter()
            .map(|s| run_guarded(s, config, env))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallelism)
            .build()
            .expect("thread pool");
        pool.install(|| {
            use rayon::prelude::*;
            snippets
                .par_iter()
                .map(|s| run_guarded(s, config, env))
                .collect()
        })
    };
    results.sort_by(|a, b| a.snippet_id.cmp(&b.snippet_id));
    let report = build_report(&results);
    CorpusRun { results, report }
}

/// Per-code before/after comparison of two reports over the same corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeDelta {
    pub code: u32,
    pub label: String,
    pub before: u64,
    pub after: u64,
    pub delta: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDelta {
    pub snippet_count: u64,
    pub error_free_before: u64,
    pub error_free_after: u64,
    pub error_free_delta: i64,
    pub total_errors_before: u64,
    pub total_errors_after: u64,
    pub total_errors_delta: i64,
    pub error_free_rate_delta: f64,
    pub per_code: Vec<CodeDelta>,
}

/// Compares the final stages of two reports over the same snippet universe.
pub fn diff_report(before: &CorpusReport, after: &CorpusReport) -> Result<ReportDelta, CorpusError> {
    if before.snippet_count != after.snippet_count {
        return Err(CorpusError::MismatchedReports {
            before: before.snippet_count,
            after: after.snippet_count,
        });
    }
    let b = before.final_stage();
    let a = after.final_stage();
    let mut codes_seen: BTreeMap<u32, (u64, u64, String)> = BTreeMap::new();
    for e in &b.histogram {
        codes_seen
            .entry(e.code)
            .or_insert((0, 0, e.label.clone()))
            .0 = e.count;
    }
    for e in &a.histogram {
        let entry = codes_seen.entry(e.code).or_insert((0, 0, e.label.clone()));
        entry.1 = e.count;
    }
    let mut per_code: Vec<CodeDelta> = codes_seen
        .into_iter()
        .map(|(code, (before, after, label))| CodeDelta {
            code,
            label,
            before,
            after,
            delta: after as i64 - before as i64,
        })
        .collect();
    per_code.sort_by(|x, y| x.delta.cmp(&y.delta).then(x.code.cmp(&y.code)));
    Ok(ReportDelta {
        snippet_count: before.snippet_count,
        error_free_before: b.error_free_count,
        error_free_after: a.error_free_count,
        error_free_delta: a.error_free_count as i64 - b.error_free_count as i64,
        total_errors_before: b.total_errors,
        total_errors_after: a.total_errors,
        total_errors_delta: a.total_errors as i64 - b.total_errors as i64,
        error_free_rate_delta: ratio(a.error_free_count, after.snippet_count)
            - ratio(b.error_free_count, before.snippet_count),
        per_code,
    })
}

// ---- serialization helpers ----

pub fn write_results_jsonl(path: &Path, results: &[PipelineResult]) -> Result<(), CorpusError> {
    let mut f = fs::File::create(path).map_err(|e| CorpusError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    for r in results {
        let line = serde_json::to_string(r).expect("results serialize");
        writeln!(f, "{line}").map_err(|e| CorpusError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
    }
    Ok(())
}

pub fn read_results_jsonl(path: &Path) -> Result<Vec<PipelineResult>, CorpusError> {
    let f = fs::File::open(path).map_err(|e| CorpusError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| CorpusError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let r: PipelineResult =
            serde_json::from_str(&line).map_err(|e| CorpusError::BadJson {
                path: path.to_path_buf(),
                line: i + 1,
                source: e,
            })?;
        out.push(r);
    }
    Ok(out)
}

pub fn read_report_json(path: &Path) -> Result<CorpusReport, CorpusError> {
    let text = fs::read_to_string(path).map_err(|e| CorpusError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let report: CorpusReport =
        serde_json::from_str(&text).map_err(|e| CorpusError::BadJson {
            path: path.to_path_buf(),
            line: 0,
            source: e,
        })?;
    if report.schema != REPORT_SCHEMA {
        return Err(CorpusError::Schema {
            found: report.schema,
            expected: REPORT_SCHEMA.to_string(),
        });
    }
    Ok(report)
}

/// Plain-text table for terminals; the top-K histogram rows per stage echo
/// the shape of the corpus error-landscape figures.
pub fn render_report(report: &CorpusReport, top_k: usize) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "snippets: {}   emptied: {}   timed out: {}\n",
        report.snippet_count, report.emptied_count, report.timed_out_count
    ));
    out.push_str(&format!(
        "lines: {} total, {} commented out\n\n",
        report.lines_total, report.lines_commented
    ));
    out.push_str(&format!(
        "{:<10} {:>11} {:>13} {:>12} {:>12}\n",
        "stage", "error-free", "total errors", "avg/snippet", "avg/errored"
    ));
    for s in &report.stages {
        out.push_str(&format!(
            "{:<10} {:>11} {:>13} {:>12.2} {:>12.2}\n",
            s.stage.as_str(),
            s.error_free_count,
            s.total_errors,
            s.avg_errors_per_snippet,
            s.avg_errors_per_erroneous_snippet
        ));
    }
    for s in &report.stages {
        if s.histogram.is_empty() {
            continue;
        }
        out.push_str(&format!("\ntop errors after {}:\n", s.stage.as_str()));
        for e in s.histogram.iter().take(top_k) {
            out.push_str(&format!("  {:>6}  {:<40} {:>8}\n", e.code, e.label, e.count));
        }
    }
    out
}

pub fn render_delta(delta: &ReportDelta) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "snippets: {}\nerror-free: {} -> {} ({:+})\ntotal errors: {} -> {} ({:+})\nerror-free rate delta: {:+.2}%\n\n",
        delta.snippet_count,
        delta.error_free_before,
        delta.error_free_after,
        delta.error_free_delta,
        delta.total_errors_before,
        delta.total_errors_after,
        delta.total_errors_delta,
        delta.error_free_rate_delta * 100.0
    ));
    out.push_str(&format!(
        "{:>6}  {:<40} {:>8} {:>8} {:>8}\n",
        "code", "label", "before", "after", "delta"
    ));
    for c in &delta.per_code {
        out.push_str(&format!(
            "{:>6}  {:<40} {:>8} {:>8} {:>+8}\n",
            c.code, c.label, c.before, c.after, c.delta
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::pipeline::StageToggles;

    fn env_arc() -> Arc<AmbientEnvironment> {
        Arc::new(AmbientEnvironment::from_json_str(include_str!("../data/ambient.json")).unwrap())
    }

    #[test]
    fn extracts_single_js_block() {
        let md = "# title\n\n```js\nvar x = 1;\n```\n";
        let records = extract_markdown(md, "pkg");
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].id, "pkg#1");
        assert_eq!(records[0].text, "var x = 1;\n");
    }

    #[test]
    fn skips_non_js_blocks() {
        let md = "```python\nprint(1)\n```\n";
        assert!(extract_markdown(md, "pkg").is_empty());
        let md = "```sh\nnpm install\n```\n";
        assert!(extract_markdown(md, "pkg").is_empty());
    }

    #[test]
    fn untagged_blocks_are_kept() {
        let md = "```\nvar x = 1;\n```\n";
        assert_eq!(extract_markdown(md, "pkg").len(), 1);
    }

    #[test]
    fn readme_with_two_js_blocks_yields_two_records() {
        let records = extract_markdown(fixtures::PROMPT_README, "prompt");
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].id, "prompt#1");
        assert_eq!(records[1].id, "prompt#2");
        assert_eq!(records[0].text, fixtures::PROMPT_CALLBACK_SNIPPET);
        assert_eq!(records[1].text, fixtures::PROMPT_AWAIT_SNIPPET);
    }

    #[test]
    fn malformed_fences_yield_zero_records() {
        let md = "```js\nvar x = 1;\n"; // never closed
        assert!(extract_markdown(md, "pkg").is_empty());
        let md = "```js\nvar x = 1;\n~~~\n"; // mismatched fence char never closes
        assert!(extract_markdown(md, "pkg").is_empty());
    }

    #[test]
    fn empty_blocks_are_dropped() {
        let md = "```js\n\n   \n```\n";
        assert!(extract_markdown(md, "pkg").is_empty());
    }

    #[test]
    fn empty_corpus_reports_zero_counts() {
        let run = run_corpus(Vec::new(), &PipelineConfig::default(), 1, &env_arc());
        assert_eq!(run.report.snippet_count, 0);
        assert_eq!(run.report.final_stage().total_errors, 0);
        assert_eq!(run.report.lines_total, 0);
    }

    #[test]
    fn synthetic_corpus_histogram_matches_hand_counts() {
        // measurement mode: stages disabled, so the report reflects the
        // initial check only
        let cfg = PipelineConfig {
            stages: StageToggles::none(),
            ..PipelineConfig::default()
        };
        let records = vec![
            rec("a", "var x = ;"),                     // 1109
            rec("b", "var y = ;"),                     // 1109
            rec("c", "};"),                            // 1128
            rec("d", "qqzzy.log(1);"),                 // 2304
            rec("e", "conzole.log(1);"),               // 2552
            rec("f", "console.log(1);"),               // clean
            rec("g", "await f();\nfunction f() {}"),   // 1375
            rec("h", "return 1;"),                     // 1108
            rec("i", "console.lgo(1);"),               // 2339
            rec("j", "qq(); ww();"),                   // 2304 x2
        ];
        let run = run_corpus(records, &cfg, 1, &env_arc());
        let initial = run.report.stage(StageName::Initial).unwrap();
        assert_eq!(run.report.snippet_count, 10);
        assert_eq!(initial.error_free_count, 1);
        assert_eq!(initial.total_errors, 10);
        assert!((initial.avg_errors_per_snippet - 1.0).abs() < 1e-12);
        assert!((initial.avg_errors_per_erroneous_snippet - 10.0 / 9.0).abs() < 1e-12);
        let counts: BTreeMap<u32, u64> = initial
            .histogram
            .iter()
            .map(|e| (e.code, e.count))
            .collect();
        let expected: BTreeMap<u32, u64> = [
            (codes::EXPRESSION_EXPECTED, 2),
            (codes::DECLARATION_OR_STATEMENT_EXPECTED, 1),
            (codes::CANNOT_FIND_NAME, 3),
            (codes::CANNOT_FIND_NAME_SUGGESTION, 1),
            (codes::TOP_LEVEL_AWAIT, 1),
            (codes::RETURN_OUTSIDE_FUNCTION, 1),
            (codes::PROPERTY_DOES_NOT_EXIST, 1),
        ]
        .into_iter()
        .collect();
        assert_eq!(counts, expected);
        // histogram counts sum to total_errors
        let sum: u64 = initial.histogram.iter().map(|e| e.count).sum();
        assert_eq!(sum, initial.total_errors);
    }

    fn rec(id: &str, text: &str) -> IngestRecord {
        IngestRecord {
            id: id.to_string(),
            origin: Origin::Inline,
            text: text.to_string(),
        }
    }

    #[test]
    fn figure_corpus_ends_error_free() {
        let records: Vec<IngestRecord> = fixtures::example_snippets()
            .into_iter()
            .map(|(id, text)| rec(id, text))
            .collect();
        let run = run_corpus(records, &PipelineConfig::default(), 1, &env_arc());
        assert_eq!(run.report.snippet_count, 4);
        assert_eq!(run.report.final_stage().error_free_count, 4);
    }

    #[test]
    fn determinism_across_parallelism_degrees() {
        let records: Vec<IngestRecord> = fixtures::example_snippets()
            .into_iter()
            .map(|(id, text)| rec(id, text))
            .chain((0..20).map(|i| rec(&format!("s{i}"), "var x = ;\nqq();")))
            .collect();
        let cfg = PipelineConfig::default();
        let env = env_arc();
        let r1 = run_corpus(records.clone(), &cfg, 1, &env);
        let r4 = run_corpus(records.clone(), &cfg, 4, &env);
        let r8 = run_corpus(records, &cfg, 8, &env);
        assert_eq!(r1.report, r4.report);
        assert_eq!(r4.report, r8.report);
        // result content is identical; only wall-clock timings may differ
        assert_eq!(strip_timings(&r1.results), strip_timings(&r4.results));
        assert_eq!(strip_timings(&r4.results), strip_timings(&r8.results));
    }

    fn strip_timings(results: &[PipelineResult]) -> Vec<PipelineResult> {
        results
            .iter()
            .cloned()
            .map(|mut r| {
                for s in &mut r.stages {
                    s.duration_ms = 0;
                }
                r
            })
            .collect()
    }

    #[test]
    fn diff_of_identical_reports_is_zero() {
        let records = vec![rec("a", "var x = ;"), rec("b", "console.log(1);")];
        let cfg = PipelineConfig {
            stages: StageToggles::none(),
            ..PipelineConfig::default()
        };
        let run = run_corpus(records, &cfg, 1, &env_arc());
        let d = diff_report(&run.report, &run.report).unwrap();
        assert_eq!(d.total_errors_delta, 0);
        assert_eq!(d.error_free_delta, 0);
        assert!(d.per_code.iter().all(|c| c.delta == 0));
    }

    #[test]
    fn diff_detects_reductions() {
        let records = vec![
            rec("a", "var x = ;"),
            rec("b", "qq();"),
            rec("c", "Install it with npm"),
        ];
        let env = env_arc();
        let before = run_corpus(
            records.clone(),
            &PipelineConfig {
                stages: StageToggles::none(),
                ..PipelineConfig::default()
            },
            1,
            &env,
        );
        let after = run_corpus(records, &PipelineConfig::default(), 1, &env);
        let d = diff_report(&before.report, &after.report).unwrap();
        assert!(d.total_errors_delta <= 0);
        assert!(d.error_free_delta >= 0);
    }

    #[test]
    fn diff_arithmetic_per_code() {
        fn report_with(code: u32, count: u64) -> CorpusReport {
            let stage = StageStats {
                stage: StageName::Deletion,
                error_free_count: 0,
                total_errors: count,
                avg_errors_per_snippet: 0.0,
                avg_errors_per_erroneous_snippet: 0.0,
                histogram: vec![HistogramEntry {
                    code,
                    label: codes::label_of(code).unwrap().to_string(),
                    count,
                }],
            };
            CorpusReport {
                schema: REPORT_SCHEMA.to_string(),
                snippet_count: 5,
                stages: vec![stage],
                emptied_count: 0,
                timed_out_count: 0,
                lines_total: 0,
                lines_commented: 0,
            }
        }
        let before = report_with(codes::CANNOT_FIND_NAME, 5);
        let after = report_with(codes::CANNOT_FIND_NAME, 2);
        let d = diff_report(&before, &after).unwrap();
        assert_eq!(d.per_code.len(), 1);
        assert_eq!(d.per_code[0].code, codes::CANNOT_FIND_NAME);
        assert_eq!(d.per_code[0].delta, -3);
        assert_eq!(d.total_errors_delta, -3);
    }

    #[test]
    fn duplicate_ids_are_dropped_with_an_error_entry() {
        let dir = tempfile::tempdir().unwrap();
        let jsonl = dir.path().join("c.jsonl");
        fs::write(
            &jsonl,
            "{\"id\":\"same\",\"text\":\"var a = 1;\"}\n{\"id\":\"same\",\"text\":\"var b = 2;\"}\n",
        )
        .unwrap();
        let out = load_inputs(&jsonl, false).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.errors.len(), 1);
        assert!(out.errors[0].1.contains("duplicate"));
    }

    #[test]
    fn diff_rejects_mismatched_universes() {
        let env = env_arc();
        let cfg = PipelineConfig::default();
        let a = run_corpus(vec![rec("a", "var x = 1;")], &cfg, 1, &env);
        let b = run_corpus(
            vec![rec("a", "var x = 1;"), rec("b", "var y = 2;")],
            &cfg,
            1,
            &env,
        );
        assert!(matches!(
            diff_report(&a.report, &b.report),
            Err(CorpusError::MismatchedReports { .. })
        ));
    }

    #[test]
    fn results_roundtrip_through_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.jsonl");
        let records = vec![rec("a", "var x = ;"), rec("b", "console.log(1);")];
        let run = run_corpus(records, &PipelineConfig::default(), 1, &env_arc());
        write_results_jsonl(&path, &run.results).unwrap();
        let back = read_results_jsonl(&path).unwrap();
        assert_eq!(back, run.results);
        assert_eq!(build_report(&back), run.report);
    }

    #[test]
    fn load_inputs_from_mixed_directory() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("one.js"), "var a = 1;\n").unwrap();
        fs::write(dir.path().join("two.js"), "var b = ;\n").unwrap();
        fs::write(dir.path().join("notes.txt"), "ignore me").unwrap();
        let out = load_inputs(dir.path(), false).unwrap();
        assert_eq!(out.records.len(), 2);
        assert!(out.errors.is_empty());

        fs::write(dir.path().join("README.md"), fixtures::PROMPT_README).unwrap();
        let out = load_inputs(dir.path(), true).unwrap();
        assert_eq!(out.records.len(), 4); // 2 js files + 2 extracted blocks
    }

    #[test]
    fn lines_commented_totals_match_per_snippet_sums() {
        let records = vec![
            rec("a", "Install it with npm"),
            rec("b", fixtures::HTTP_CALLBACK_SNIPPET),
            rec("c", "console.log(1);"),
        ];
        let run = run_corpus(records, &PipelineConfig::default(), 1, &env_arc());
        let total: u64 = run.results.iter().map(|r| r.lines_commented as u64).sum();
        assert_eq!(run.report.lines_commented, total);
        assert_eq!(run.report.lines_commented, 2); // one prose line + one brace line
        assert_eq!(run.report.emptied_count, 1);
    }
}
