//! Command-line front end: check snippets, run the repair pipeline, and
//! aggregate or compare corpus reports.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ncc_core::ambient::AmbientEnvironment;
use ncc_core::corpus::{
    self, build_report, diff_report, load_inputs, read_report_json, read_results_jsonl,
    render_delta, render_report, run_corpus, CorpusRun,
};
use ncc_core::pipeline::{PipelineConfig, PipelineResult, StageToggles};
use ncc_core::source::Origin;

#[derive(Parser)]
#[command(
    name = "ncc",
    version,
    about = "Detects and repairs compiler-style errors in Node.js code snippets"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Measure errors only; no fixes are applied
    Check {
        /// A .js file, .jsonl file, .md file (with --extract), or directory
        input: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run the repair pipeline and write corrected snippets
    Fix {
        input: PathBuf,
        /// Directory for corrected snippets (default: `<name>.fixed.js`
        /// alongside file inputs)
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Aggregate saved per-snippet results into a report
    Report {
        /// A results.jsonl written by `check` or `fix`
        results: PathBuf,
        /// Emit the report as JSON instead of a table
        #[arg(long)]
        json: bool,
        /// Histogram rows to print per stage
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Compare two report JSON files over the same corpus
    Diff {
        before: PathBuf,
        after: PathBuf,
        /// Emit the delta as JSON instead of a table
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct RunOpts {
    /// Per-snippet wall-clock timeout in seconds
    #[arg(long, default_value_t = 60)]
    timeout_secs: u64,
    /// Per-snippet compile budget
    #[arg(long, default_value_t = 500)]
    max_compiles: u32,
    /// Stages to enable, comma-separated: targeted,codefix,deletion
    #[arg(long, value_delimiter = ',')]
    stages: Option<Vec<String>>,
    /// Extract fenced js code blocks from markdown inputs
    #[arg(long)]
    extract: bool,
    /// Snippets processed concurrently
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    /// Emit the report as JSON instead of a table
    #[arg(long)]
    json: bool,
    /// Write per-snippet results as JSON Lines to this path
    #[arg(long)]
    results: Option<PathBuf>,
    /// Write the report as JSON to this path
    #[arg(long)]
    report_json: Option<PathBuf>,
    /// Histogram rows to print per stage
    #[arg(long, default_value_t = 10)]
    top: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Check { input, opts } => {
            let run = execute(&input, &opts, Some(StageToggles::none()))?;
            emit_run(&run, &opts)?;
            Ok(exit_for(&run))
        }
        Cmd::Fix {
            input,
            out_dir,
            opts,
        } => {
            let run = execute(&input, &opts, None)?;
            write_fixed(&run, out_dir.as_deref())?;
            emit_run(&run, &opts)?;
            Ok(exit_for(&run))
        }
        Cmd::Report { results, json, top } => {
            let results = read_results_jsonl(&results)?;
            let report = build_report(&results);
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", render_report(&report, top));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Diff { before, after, json } => {
            let before = read_report_json(&before)?;
            let after = read_report_json(&after)?;
            let delta = diff_report(&before, &after)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&delta)?);
            } else {
                print!("{}", render_delta(&delta));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

struct RunData {
    run: CorpusRun,
    all_failed: bool,
}

fn execute(input: &Path, opts: &RunOpts, force_stages: Option<StageToggles>) -> Result<RunData> {
    let stages = match force_stages {
        Some(t) => t,
        None => parse_stages(opts.stages.as_deref())?,
    };
    if opts.timeout_secs == 0 {
        bail!("--timeout-secs must be positive");
    }
    if opts.max_compiles == 0 {
        bail!("--max-compiles must be positive");
    }
    let config = PipelineConfig {
        timeout: Duration::from_secs(opts.timeout_secs),
        max_compiles: opts.max_compiles,
        stages,
        ..PipelineConfig::default()
    };
    let loaded = load_inputs(input, opts.extract)?;
    for (path, err) in &loaded.errors {
        eprintln!("warning: {}: {err}", path.display());
    }
    let all_failed = loaded.records.is_empty() && !loaded.errors.is_empty();
    let env = builtin_env();
    let run = run_corpus(loaded.records, &config, opts.parallel.max(1), &env);
    Ok(RunData { run, all_failed })
}

fn builtin_env() -> Arc<AmbientEnvironment> {
    static ENV: std::sync::OnceLock<Arc<AmbientEnvironment>> = std::sync::OnceLock::new();
    ENV.get_or_init(|| {
        Arc::new(
            AmbientEnvironment::from_json_str(ncc_core::ambient::BUILTIN_AMBIENT_JSON)
                .expect("bundled ambient data parses"),
        )
    })
    .clone()
}

fn parse_stages(stages: Option<&[String]>) -> Result<StageToggles> {
    let Some(stages) = stages else {
        return Ok(StageToggles::default());
    };
    let mut t = StageToggles::none();
    for s in stages {
        match s.trim() {
            "" => {}
            "targeted" => t.targeted = true,
            "codefix" => t.codefix = true,
            "deletion" => t.deletion = true,
            other => bail!("unknown stage '{other}' (expected targeted, codefix, deletion)"),
        }
    }
    Ok(t)
}

fn emit_run(data: &RunData, opts: &RunOpts) -> Result<()> {
    if let Some(path) = &opts.results {
        corpus::write_results_jsonl(path, &data.run.results)?;
    }
    if let Some(path) = &opts.report_json {
        fs::write(path, serde_json::to_string_pretty(&data.run.report)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if opts.json {
        println!("{}", serde_json::to_string_pretty(&data.run.report)?);
    } else {
        print!("{}", render_report(&data.run.report, opts.top));
    }
    Ok(())
}

fn exit_for(data: &RunData) -> ExitCode {
    if data.all_failed {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn write_fixed(data: &RunData, out_dir: Option<&Path>) -> Result<()> {
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut unwritable = 0usize;
    for result in &data.run.results {
        let target = match out_dir {
            Some(dir) => Some(dir.join(sanitized_name(&result.snippet_id))),
            None => fixed_sibling_path(result),
        };
        match target {
            Some(path) => {
                fs::write(&path, &result.final_text)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            None => unwritable += 1,
        }
    }
    if unwritable > 0 {
        eprintln!(
            "note: {unwritable} snippet(s) did not come from files; pass --out-dir to write them"
        );
    }
    Ok(())
}

/// For file-origin snippets without --out-dir: `<original>.fixed.js` next
/// to the input.
fn fixed_sibling_path(result: &PipelineResult) -> Option<PathBuf> {
    match &result.origin {
        Origin::File { path } => Some(PathBuf::from(path).with_extension("fixed.js")),
        _ => None,
    }
}

fn sanitized_name(id: &str) -> String {
    let mut name: String = id
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '.' || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if !name.ends_with(".js") {
        name.push_str(".js");
    }
    name
}
