//! Acceptance suite: one test per release criterion, each printing a
//! PASS line when it holds. Run with
//! `cargo test -p ncc-core --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ncc_core::ambient::AmbientEnvironment;
use ncc_core::analyzer;
use ncc_core::budget::Budget;
use ncc_core::codes;
use ncc_core::corpus::{self, run_corpus, IngestRecord};
use ncc_core::deletion;
use ncc_core::fixes::{self, FixStyle};
use ncc_core::fixtures;
use ncc_core::pipeline::{self, PipelineConfig, StageName, StageToggles};
use ncc_core::source::{
    comment_out_line, Category, Diagnostic, FixAction, Origin, Snippet, Span, TextChange,
};

const GOLDEN_HTTP_CALLBACK: &str = include_str!("fixtures/http_callback.fixed.js");

fn env() -> &'static AmbientEnvironment {
    AmbientEnvironment::builtin()
}

fn env_arc() -> Arc<AmbientEnvironment> {
    static ENV: std::sync::OnceLock<Arc<AmbientEnvironment>> = std::sync::OnceLock::new();
    ENV.get_or_init(|| {
        Arc::new(
            AmbientEnvironment::from_json_str(ncc_core::ambient::BUILTIN_AMBIENT_JSON).unwrap(),
        )
    })
    .clone()
}

fn pass(name: &str) {
    println!("PASS  {name}");
}

// ---------------------------------------------------------------- criterion 1

#[test]
fn criterion_1_worked_example_reproduction() {
    let started = Instant::now();
    let snippet = Snippet::inline("http-callback", fixtures::HTTP_CALLBACK_SNIPPET);
    let result = pipeline::run(&snippet, &PipelineConfig::default(), env());
    let elapsed = started.elapsed();

    assert!(
        result.final_diagnostics.is_empty(),
        "expected zero final diagnostics, got {:?}",
        result.final_diagnostics
    );
    // (i) inserted require for http
    assert!(result.final_text.contains("const http = require(\"http\");"));
    // (ii) url placeholder with a suggested-type comment
    let url_line = result
        .final_text
        .lines()
        .find(|l| l.starts_with("var url"))
        .expect("url placeholder line");
    assert!(url_line.contains("Suggested Type"));
    // (iii) the stray close line is commented out
    assert!(result.final_text.lines().any(|l| l == "//};"));
    // exact golden match
    assert_eq!(result.final_text, GOLDEN_HTTP_CALLBACK);
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    pass("worked-example reproduction (golden match, < 1s)");
}

// ---------------------------------------------------------------- criterion 2

#[test]
fn criterion_2_multi_error_detection() {
    let src = "var x = ;\nvar y = ;\nvar z = ;\nfoo bar\n";
    let n = 4; // four independent syntax errors on four distinct lines
    let snippet = Snippet::inline("multi", src);
    let analysis = analyzer::check(&snippet, env());
    let syntax: Vec<&Diagnostic> = analysis
        .diagnostics
        .iter()
        .filter(|d| d.category == Category::Syntax)
        .collect();
    assert!(
        syntax.len() >= n - 1,
        "expected >= {} syntax diagnostics, got {:?}",
        n - 1,
        syntax
    );
    let lines: std::collections::HashSet<_> = syntax.iter().map(|d| d.line).collect();
    assert!(lines.len() >= n - 1, "errors not on distinct lines");
    pass("multi-error detection (>= N-1 syntax diagnostics)");
}

// ---------------------------------------------------------------- criterion 3

const DELETION_POOL: &[&str] = &[
    "var a = 1;",
    "var b = 'text';",
    "console.log(a);",
    "var x = ;",
    "};",
    "foo bar",
    "if (a) {",
    "}",
    "return 1;",
    "await go();",
    "",
    "// a note",
    "qq();",
    "conzole.log(1);",
    "Install the package",
    "function f() { return 2; }",
];

fn random_snippet(rng: &mut StdRng, max_lines: usize) -> String {
    let lines = rng.gen_range(1..=max_lines);
    let mut out = String::new();
    for _ in 0..lines {
        out.push_str(DELETION_POOL[rng.gen_range(0..DELETION_POOL.len())]);
        out.push('\n');
    }
    out
}

fn check_diags(s: &Snippet) -> Vec<Diagnostic> {
    analyzer::check(s, env()).diagnostics
}

/// Exhaustive minimum over every subset of commented lines.
fn exhaustive_min(snippet: &Snippet) -> usize {
    let lines = snippet.line_count();
    let mut best = usize::MAX;
    for mask in 0u32..(1 << lines) {
        let mut s = snippet.clone();
        for l in 1..=lines {
            if mask & (1 << (l - 1)) != 0 {
                s = comment_out_line(&s, l).unwrap();
            }
        }
        best = best.min(check_diags(&s).len());
    }
    best
}

#[test]
fn criterion_3_deletion_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let cases = 200;
    for i in 0..cases {
        let src = random_snippet(&mut rng, 8);
        let snippet = Snippet::inline(format!("d{i}"), &src);
        let initial = check_diags(&snippet).len();
        let mut budget = Budget::unlimited();
        let out = deletion::delete_lines(
            &snippet,
            |s, b| {
                b.try_compile().map(|_| ())?;
                Ok(check_diags(s))
            },
            &mut budget,
        );
        let min = exhaustive_min(&snippet);
        assert!(
            out.diagnostics.len() >= min,
            "case {i}: greedy {} beat the exhaustive oracle {min} on {src:?}",
            out.diagnostics.len()
        );
        assert!(
            out.diagnostics.len() <= initial,
            "case {i}: final {} > initial {initial} on {src:?}",
            out.diagnostics.len()
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(60), "suite took {elapsed:?}");
    pass("deletion oracle equivalence (200 random snippets, monotone, < 60s)");
}

// ---------------------------------------------------------------- criterion 4

const SYNTH_POOL: &[&str] = &[
    "var a = 1;",
    "console.log(a);",
    "var x = ;",
    "};",
    "undefFn();",
    "conzole.log(1);",
    "var s = 'y';\nvar parts = s.split(',');",
    "await later();",
    "return 1;",
    "Install the package",
    "var list = [1, 2, 3];\nlist.push(4);",
    "function f(cb) { cb(); }\nf(function() { console.log('x'); });",
    "words.join(' ');",
    "http.createServer(handler);",
    "var data = JSON.parse(raw);",
];

fn synthetic_corpus(count: usize) -> Vec<IngestRecord> {
    let mut rng = StdRng::seed_from_u64(0xc0de);
    let mut records: Vec<IngestRecord> = fixtures::example_snippets()
        .into_iter()
        .map(|(id, text)| IngestRecord {
            id: id.to_string(),
            origin: Origin::Inline,
            text: text.to_string(),
        })
        .collect();
    for i in 0..count {
        let lines = rng.gen_range(1..=5);
        let mut text = String::new();
        for _ in 0..lines {
            text.push_str(SYNTH_POOL[rng.gen_range(0..SYNTH_POOL.len())]);
            text.push('\n');
        }
        records.push(IngestRecord {
            id: format!("synth-{i:03}"),
            origin: Origin::Inline,
            text,
        });
    }
    records
}

#[test]
fn criterion_4_idempotence() {
    let cfg = PipelineConfig::default();
    let corpus = synthetic_corpus(50);
    assert!(corpus.len() >= 54);
    let mut timed_out = 0;
    for rec in &corpus {
        let snippet = Snippet::new(&rec.id, &rec.text, rec.origin.clone());
        let first = pipeline::run(&snippet, &cfg, env());
        if first.flags.timed_out {
            timed_out += 1;
            continue;
        }
        assert!(
            pipeline::run_twice_fixed_point(&snippet, &cfg, env()),
            "pipeline output changed on second run for {} ({:?})",
            rec.id,
            rec.text
        );
    }
    assert_eq!(timed_out, 0, "fixture corpus should not time out");
    pass("idempotence (second run applies zero changes over 54 snippets)");
}

// ---------------------------------------------------------------- criterion 5

#[test]
fn criterion_5_non_worsening_stages() {
    let cfg = PipelineConfig::default();
    let mut violations = 0;
    for rec in synthetic_corpus(50) {
        let snippet = Snippet::new(&rec.id, &rec.text, rec.origin);
        let result = pipeline::run(&snippet, &cfg, env());
        let mut prev = usize::MAX;
        for s in &result.stages {
            if s.diagnostics.len() > prev {
                violations += 1;
            }
            prev = s.diagnostics.len();
        }
    }
    assert_eq!(violations, 0);
    pass("non-worsening (per-stage diagnostic counts never increase)");
}

// ---------------------------------------------------------------- criterion 6

#[test]
fn criterion_6_targeted_fix_rules() {
    // the one-line split example gains exactly the string placeholder
    let snippet = Snippet::inline("split", fixtures::STRING_SPLIT_SNIPPET);
    let analysis = analyzer::check(&snippet, env());
    let mut budget = Budget::unlimited();
    let out = fixes::targeted_fixes(&snippet, &analysis, env(), &FixStyle::default(), &mut budget);
    assert_eq!(
        out.text_after,
        format!("var s = \"YOUR VALUE HERE\";\n{}", fixtures::STRING_SPLIT_SNIPPET)
    );

    // the await snippet reports the undeclared name and top-level await
    let snippet = Snippet::inline("await", fixtures::PROMPT_AWAIT_SNIPPET);
    let analysis = analyzer::check(&snippet, env());
    let codes_found: Vec<u32> = analysis.diagnostics.iter().map(|d| d.code).collect();
    assert!(codes_found.contains(&codes::CANNOT_FIND_NAME));
    assert!(codes_found.contains(&codes::TOP_LEVEL_AWAIT));
    let cfn = analysis
        .diagnostics
        .iter()
        .find(|d| d.code == codes::CANNOT_FIND_NAME)
        .unwrap();
    assert!(cfn.message.contains("'prompt'"));

    // undefined function calls receive no targeted fix
    let snippet = Snippet::inline("undef", "undefFn();\n");
    let analysis = analyzer::check(&snippet, env());
    let mut budget = Budget::unlimited();
    let out = fixes::targeted_fixes(&snippet, &analysis, env(), &FixStyle::default(), &mut budget);
    assert!(out.applied.is_empty());
    assert_eq!(out.text_after, "undefFn();\n");
    pass("targeted-fix rules (placeholder, await+name diagnostics, undefined fn ignored)");
}

// ---------------------------------------------------------------- criterion 7

fn arbitrary_actions(rng: &mut StdRng, text: &str) -> Vec<FixAction> {
    let n = rng.gen_range(0..=8);
    (0..n)
        .map(|i| {
            let start = rng.gen_range(0..=text.len());
            let max_len = text.len() - start;
            let length = rng.gen_range(0..=max_len.min(12));
            let repl_len = rng.gen_range(0..=6);
            let new_text: String = (0..repl_len)
                .map(|_| (b'A' + rng.gen_range(0..26u8)) as char)
                .collect();
            FixAction::new(
                format!("edit-{i}"),
                "random edit",
                vec![TextChange::new(Span::new(start, length), new_text)],
                Diagnostic {
                    code: codes::CANNOT_FIND_NAME,
                    category: Category::Semantic,
                    message: "m".to_string(),
                    span: Span::new(rng.gen_range(0..=text.len()), 0),
                    line: Some(1),
                },
            )
        })
        .collect()
}

/// Independent application route: one edit at a time in the given order,
/// shifting each edit by the net growth of previously applied edits that
/// sit before it in the original text.
fn apply_sequential(text: &str, changes: &[&TextChange]) -> String {
    let mut out = text.to_string();
    let mut applied: Vec<(usize, i64)> = Vec::new();
    for c in changes {
        let shift: i64 = applied
            .iter()
            .filter(|(start, _)| *start < c.span.start)
            .map(|(_, delta)| *delta)
            .sum();
        let s = (c.span.start as i64 + shift) as usize;
        out.replace_range(s..s + c.span.length, &c.new_text);
        applied.push((
            c.span.start,
            c.new_text.len() as i64 - c.span.length as i64,
        ));
    }
    out
}

#[test]
fn criterion_7_batch_edit_correctness() {
    let mut rng = StdRng::seed_from_u64(0xba7c4);
    let mut disjoint_cases = 0;
    for case in 0..1000 {
        let len = rng.gen_range(0..60);
        let text: String = (0..len)
            .map(|_| (b'a' + rng.gen_range(0..26u8)) as char)
            .collect();
        let actions = arbitrary_actions(&mut rng, &text);

        let kept = fixes::select_batch(&text, &actions).unwrap();
        // kept spans pairwise disjoint with distinct starts
        for i in 0..kept.len() {
            for j in (i + 1)..kept.len() {
                let (a, b) = (kept[i].0.span, kept[j].0.span);
                assert!(!a.intersects(&b), "case {case}: kept spans overlap");
                assert_ne!(a.start, b.start, "case {case}: kept spans share a start");
            }
        }

        let (batch_text, _) = fixes::apply_batch(&text, &actions).unwrap();
        let changes: Vec<&TextChange> = kept.iter().map(|(c, _)| *c).collect();
        // application is order-independent: forward, reverse, and shuffled
        // sequential application all agree with the batch result
        assert_eq!(apply_sequential(&text, &changes), batch_text);
        let mut reversed = changes.clone();
        reversed.reverse();
        assert_eq!(apply_sequential(&text, &reversed), batch_text);
        let mut shuffled = changes.clone();
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.gen_range(0..=i));
        }
        assert_eq!(apply_sequential(&text, &shuffled), batch_text);

        // for pairwise-disjoint inputs every edit applies and the result
        // equals plain sequential application
        let input_changes: Vec<&TextChange> =
            actions.iter().flat_map(|a| &a.changes).collect();
        let all_disjoint = (0..input_changes.len()).all(|i| {
            ((i + 1)..input_changes.len()).all(|j| {
                !input_changes[i].span.intersects(&input_changes[j].span)
                    && input_changes[i].span.start != input_changes[j].span.start
            })
        });
        if all_disjoint && !input_changes.is_empty() {
            disjoint_cases += 1;
            assert_eq!(kept.len(), input_changes.len(), "case {case}: disjoint edit dropped");
            assert_eq!(apply_sequential(&text, &input_changes), batch_text);
        }
    }
    assert!(disjoint_cases > 50, "generator produced too few disjoint cases");
    pass("batch-edit correctness (1000 random cases, 0 failures)");
}

// ---------------------------------------------------------------- criterion 8

#[test]
fn criterion_8_report_integrity() {
    let cfg = PipelineConfig {
        stages: StageToggles::none(),
        ..PipelineConfig::default()
    };
    let records = vec![
        ("a", "var x = ;"),
        ("b", "var y = ;"),
        ("c", "};"),
        ("d", "qqzzy.log(1);"),
        ("e", "conzole.log(1);"),
        ("f", "console.log(1);"),
        ("g", "await f();\nfunction f() {}"),
        ("h", "return 1;"),
        ("i", "console.lgo(1);"),
        ("j", "qq(); ww();"),
    ];
    let records: Vec<IngestRecord> = records
        .into_iter()
        .map(|(id, text)| IngestRecord {
            id: id.to_string(),
            origin: Origin::Inline,
            text: text.to_string(),
        })
        .collect();

    let run1 = run_corpus(records.clone(), &cfg, 1, &env_arc());
    let initial = run1.report.stage(StageName::Initial).unwrap();

    // hand-counted ground truth
    assert_eq!(run1.report.snippet_count, 10);
    assert_eq!(initial.error_free_count, 1);
    assert_eq!(initial.total_errors, 10);
    assert_eq!(initial.avg_errors_per_snippet, 1.0);
    assert_eq!(initial.avg_errors_per_erroneous_snippet, 10.0 / 9.0);
    let get = |code: u32| {
        initial
            .histogram
            .iter()
            .find(|e| e.code == code)
            .map(|e| e.count)
            .unwrap_or(0)
    };
    assert_eq!(get(codes::EXPRESSION_EXPECTED), 2);
    assert_eq!(get(codes::DECLARATION_OR_STATEMENT_EXPECTED), 1);
    assert_eq!(get(codes::CANNOT_FIND_NAME), 3);
    assert_eq!(get(codes::CANNOT_FIND_NAME_SUGGESTION), 1);
    assert_eq!(get(codes::TOP_LEVEL_AWAIT), 1);
    assert_eq!(get(codes::RETURN_OUTSIDE_FUNCTION), 1);
    assert_eq!(get(codes::PROPERTY_DOES_NOT_EXIST), 1);
    let histogram_total: u64 = initial.histogram.iter().map(|e| e.count).sum();
    assert_eq!(histogram_total, initial.total_errors);

    // determinism across parallelism degrees
    let run4 = run_corpus(records.clone(), &cfg, 4, &env_arc());
    let run8 = run_corpus(records, &cfg, 8, &env_arc());
    assert_eq!(run1.report, run4.report);
    assert_eq!(run4.report, run8.report);
    pass("report integrity (hand-counted histogram, determinism at 1/4/8 threads)");
}

// ---------------------------------------------------------------- criterion 9

#[test]
fn criterion_9_timeout_containment() {
    let timeout = Duration::from_millis(400);
    let cfg = PipelineConfig {
        timeout,
        max_compiles: u32::MAX,
        ..PipelineConfig::default()
    };
    let pathological: String = "if (a) { if (b) { qq(\n".repeat(1500);
    let records = vec![
        IngestRecord {
            id: "0-pathological".to_string(),
            origin: Origin::Inline,
            text: pathological,
        },
        IngestRecord {
            id: "1-normal".to_string(),
            origin: Origin::Inline,
            text: "console.log(1);\n".to_string(),
        },
        IngestRecord {
            id: "2-broken".to_string(),
            origin: Origin::Inline,
            text: "var x = ;\n".to_string(),
        },
    ];
    let started = Instant::now();
    let run = run_corpus(records, &cfg, 1, &env_arc());
    let elapsed = started.elapsed();

    let pathological = &run.results[0];
    assert!(pathological.flags.timed_out, "expected a timeout flag");
    assert!(
        elapsed < timeout + Duration::from_secs(2),
        "corpus run took {elapsed:?}"
    );
    // later snippets in the same run are unaffected
    assert_eq!(run.results[1].snippet_id, "1-normal");
    assert!(run.results[1].final_diagnostics.is_empty());
    assert!(!run.results[1].flags.timed_out);
    assert_eq!(run.results[2].snippet_id, "2-broken");
    assert!(run.results[2].final_diagnostics.is_empty());
    assert_eq!(run.results[2].final_text, "//var x = ;\n");
    pass("timeout containment (flagged within timeout+2s, no poisoning)");
}

// ------------------------------------------------------- corpus round trips

#[test]
fn figure_corpus_is_fully_repaired_and_reports_agree() {
    let records: Vec<IngestRecord> = fixtures::example_snippets()
        .into_iter()
        .map(|(id, text)| IngestRecord {
            id: id.to_string(),
            origin: Origin::Inline,
            text: text.to_string(),
        })
        .collect();
    let run = run_corpus(records, &PipelineConfig::default(), 1, &env_arc());
    assert_eq!(run.report.final_stage().error_free_count, 4);

    // before/after comparison over the same corpus is non-positive in total
    let before_records: Vec<IngestRecord> = fixtures::example_snippets()
        .into_iter()
        .map(|(id, text)| IngestRecord {
            id: id.to_string(),
            origin: Origin::Inline,
            text: text.to_string(),
        })
        .collect();
    let before = run_corpus(
        before_records,
        &PipelineConfig {
            stages: StageToggles::none(),
            ..PipelineConfig::default()
        },
        1,
        &env_arc(),
    );
    let delta = corpus::diff_report(&before.report, &run.report).unwrap();
    assert!(delta.total_errors_delta <= 0);
    assert!(delta.per_code.iter().map(|c| c.delta).sum::<i64>() <= 0);
}
