//! Error-count-guided line deletion.
//!
//! Greedy loop over the current diagnostic list: comment out the line of
//! error number `error_no`, recompile, and adopt the change when the total
//! did not grow (ties are adopted and reset the error cursor). Lines that
//! are already comments are skipped, a diagnostic pointing past the end of
//! the text aborts the whole process, and the compile/wall-clock budget
//! bounds the search, returning the best snippet found so far.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use crate::budget::{Budget, Exhausted};
use crate::source::{
    comment_out_line, line_is_commented, line_of, Diagnostic, Snippet,
};

/// Why the loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Every remaining error was tried (or none remain).
    Converged,
    /// Compile or wall-clock budget ran out; the result is best-so-far.
    BudgetExhausted(Exhausted),
    /// A diagnostic pointed at or past the end of the text.
    SpanOutOfRange,
}

/// Search state: the best snippet found so far, the cursor into its error
/// list, and the compile count.
#[derive(Debug)]
pub struct DeletionState {
    pub best: Snippet,
    pub best_diagnostics: Vec<Diagnostic>,
    pub error_no: usize,
    pub done: bool,
    pub compile_count: u32,
}

#[derive(Debug)]
pub struct DeletionOutcome {
    pub text: String,
    pub diagnostics: Vec<Diagnostic>,
    pub lines_commented: u32,
    /// Which 1-based lines were commented out, in adoption order.
    pub commented_lines: Vec<u32>,
    pub emptied: bool,
    pub stop: StopReason,
    pub compile_count: u32,
}

/// True when every non-blank line of the text is a comment and at least one
/// non-blank line exists.
pub fn is_emptied(text: &str) -> bool {
    let mut any = false;
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        if !line_is_commented(line) {
            return false;
        }
        any = true;
    }
    any
}

fn text_key(text: &str) -> u64 {
    let mut h = DefaultHasher::new();
    text.hash(&mut h);
    h.finish()
}

/// Runs the deletion loop with an injectable check function (the pipeline
/// passes the analyzer; tests may pass oracles). `check` must be
/// deterministic.
pub fn delete_lines<F>(snippet: &Snippet, mut check: F, budget: &mut Budget) -> DeletionOutcome
where
    F: FnMut(&Snippet, &mut Budget) -> Result<Vec<Diagnostic>, Exhausted>,
{
    let mut state = DeletionState {
        best: snippet.clone(),
        best_diagnostics: Vec::new(),
        error_no: 0,
        done: false,
        compile_count: 0,
    };
    match check(&state.best, budget) {
        Ok(d) => {
            state.compile_count += 1;
            state.best_diagnostics = d;
        }
        Err(e) => {
            return outcome_of(state, Vec::new(), StopReason::BudgetExhausted(e));
        }
    }

    // The text only ever grows comment prefixes, so previously seen states
    // cannot recur through this loop's own edits; the memo keeps tie
    // adoption safe even against surprising check functions.
    let mut visited: HashSet<u64> = HashSet::new();
    visited.insert(text_key(state.best.text()));

    let mut commented_lines: Vec<u32> = Vec::new();
    let stop;

    loop {
        if state.error_no >= state.best_diagnostics.len() {
            state.done = true;
            stop = StopReason::Converged;
            break;
        }
        let diag = &state.best_diagnostics[state.error_no];
        let Some(line) = line_of(diag.span, &state.best) else {
            stop = StopReason::SpanOutOfRange;
            break;
        };
        let line_text = state.best.line_text(line).unwrap_or_default();
        if line_is_commented(line_text) {
            state.error_no += 1;
            continue;
        }
        let candidate =
            comment_out_line(&state.best, line).expect("diagnostic line is within the snippet");
        let cand_diags = match check(&candidate, budget) {
            Ok(d) => {
                state.compile_count += 1;
                d
            }
            Err(e) => {
                stop = StopReason::BudgetExhausted(e);
                break;
            }
        };
        if cand_diags.len() <= state.best_diagnostics.len()
            && visited.insert(text_key(candidate.text()))
        {
            state.best = candidate;
            state.best_diagnostics = cand_diags;
            commented_lines.push(line);
            state.error_no = 0;
        } else {
            state.error_no += 1;
        }
    }

    outcome_of(state, commented_lines, stop)
}

fn outcome_of(
    state: DeletionState,
    commented_lines: Vec<u32>,
    stop: StopReason,
) -> DeletionOutcome {
    DeletionOutcome {
        emptied: is_emptied(state.best.text()),
        text: state.best.text().to_string(),
        diagnostics: state.best_diagnostics,
        lines_commented: commented_lines.len() as u32,
        commented_lines,
        stop,
        compile_count: state.compile_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::AmbientEnvironment;
    use crate::analyzer::check_budgeted;
    use crate::codes;
    use crate::source::{Category, Span};

    fn analyzer_check(
        s: &Snippet,
        budget: &mut Budget,
    ) -> Result<Vec<Diagnostic>, Exhausted> {
        check_budgeted(s, AmbientEnvironment::builtin(), budget).map(|a| a.diagnostics)
    }

    fn run(src: &str) -> DeletionOutcome {
        let snippet = Snippet::inline("t", src);
        let mut budget = Budget::unlimited();
        delete_lines(&snippet, analyzer_check, &mut budget)
    }

    /// Exhaustive oracle: the minimum diagnostic count over all subsets of
    /// commented lines. Independent of the greedy loop.
    fn oracle_min(src: &str) -> usize {
        let snippet = Snippet::inline("t", src);
        let lines = snippet.line_count();
        let mut best = usize::MAX;
        for mask in 0..(1u32 << lines) {
            let mut s = snippet.clone();
            for l in 1..=lines {
                if mask & (1 << (l - 1)) != 0 {
                    s = comment_out_line(&s, l).unwrap();
                }
            }
            let mut b = Budget::unlimited();
            let count = analyzer_check(&s, &mut b).unwrap().len();
            best = best.min(count);
        }
        best
    }

    #[test]
    fn hanging_bracket_is_commented_out() {
        // the fixed-up callback snippet still has its stray `};` line
        let src = "const http = require(\"http\");\nhttp.get(\"http://x\", function(res) {\n  res.on('end', function() {});\n});\n};\n";
        let out = run(src);
        assert!(out.diagnostics.is_empty(), "{:?}", out.diagnostics);
        assert!(out.text.ends_with("//};\n"));
        assert_eq!(out.lines_commented, 1);
        assert!(!out.emptied);
        assert_eq!(out.stop, StopReason::Converged);
    }

    #[test]
    fn error_free_input_compiles_once_and_stops() {
        let out = run("var x = 1;\nconsole.log(x);\n");
        assert_eq!(out.compile_count, 1);
        assert_eq!(out.lines_commented, 0);
        assert_eq!(out.text, "var x = 1;\nconsole.log(x);\n");
    }

    #[test]
    fn two_broken_lines_are_both_commented() {
        let out = run("var x = ;\nvar y = ;");
        assert!(out.diagnostics.is_empty());
        assert_eq!(out.text, "//var x = ;\n//var y = ;");
        assert_eq!(out.lines_commented, 2);
        assert_eq!(oracle_min("var x = ;\nvar y = ;"), 0);
    }

    #[test]
    fn interdependent_lines_stay_when_every_deletion_worsens() {
        // each declaration line fixes more errors than it causes: deleting
        // it orphans multiple call sites
        let src = "const qq = zz;\nconst rr = yy;\nqq(); qq(); rr(); rr();\n";
        let out = run(src);
        assert_eq!(out.text, src, "{:?}", out.diagnostics);
        assert_eq!(out.lines_commented, 0);
        assert_eq!(out.diagnostics.len(), 2);
        // initial compile plus one failed attempt per error
        assert_eq!(out.compile_count, 1 + 2);
    }

    #[test]
    fn prose_is_fully_commented_and_emptied() {
        let out = run("Install the package\nThen run it\n");
        assert!(out.diagnostics.is_empty());
        assert!(out.emptied);
        assert_eq!(out.text, "//Install the package\n//Then run it\n");
    }

    #[test]
    fn out_of_range_span_aborts() {
        let bogus = |_: &Snippet, _: &mut Budget| {
            Ok(vec![Diagnostic {
                code: codes::CANNOT_FIND_NAME,
                category: Category::Semantic,
                message: "Cannot find name 'x'.".to_string(),
                span: Span::new(9999, 1),
                line: None,
            }])
        };
        let snippet = Snippet::inline("t", "var a = 1;\nvar b = 2;\n");
        let mut budget = Budget::unlimited();
        let out = delete_lines(&snippet, bogus, &mut budget);
        assert_eq!(out.stop, StopReason::SpanOutOfRange);
        assert_eq!(out.text, snippet.text());
        assert_eq!(out.lines_commented, 0);
    }

    #[test]
    fn already_commented_lines_are_skipped() {
        // a check that always blames line 1, which is already a comment
        let stubborn = |s: &Snippet, _: &mut Budget| {
            Ok(vec![Diagnostic {
                code: codes::CANNOT_FIND_NAME,
                category: Category::Semantic,
                message: "Cannot find name 'x'.".to_string(),
                span: Span::new(0, s.line_text(1).map_or(1, |l| l.len().max(1))),
                line: Some(1),
            }])
        };
        let snippet = Snippet::inline("t", "// a comment\nvar b = 2;\n");
        let mut budget = Budget::unlimited();
        let out = delete_lines(&snippet, stubborn, &mut budget);
        // skipped without an attempt: only the initial compile ran
        assert_eq!(out.compile_count, 1);
        assert_eq!(out.text, snippet.text());
        assert_eq!(out.stop, StopReason::Converged);
    }

    #[test]
    fn budget_exhaustion_returns_best_so_far() {
        let snippet = Snippet::inline("t", "var x = ;\nvar y = ;\nvar z = ;");
        let mut budget = Budget::new(2, None);
        let out = delete_lines(&snippet, analyzer_check, &mut budget);
        assert!(matches!(out.stop, StopReason::BudgetExhausted(_)));
        // initial + one candidate compile happened, so one line adopted
        assert_eq!(out.compile_count, 2);
        assert_eq!(out.lines_commented, 1);
        assert!(out.diagnostics.len() < 3);
    }

    #[test]
    fn greedy_result_never_beats_the_exhaustive_oracle() {
        for src in [
            "var x = ;\nvar y = ;",
            "};\n};",
            "Install it with npm",
            "const qq = zz;\nqq(); qq();\n",
            "var a = 1;\nfoo bar\nconsole.log(a);\n",
        ] {
            let out = run(src);
            let min = oracle_min(src);
            assert!(
                out.diagnostics.len() >= min,
                "greedy {} < oracle {min} on {src:?}",
                out.diagnostics.len()
            );
        }
    }

    #[test]
    fn determinism() {
        let a = run("var x = ;\nfoo bar\nvar y = ;");
        let b = run("var x = ;\nfoo bar\nvar y = ;");
        assert_eq!(a.text, b.text);
        assert_eq!(a.compile_count, b.compile_count);
        assert_eq!(a.commented_lines, b.commented_lines);
    }

    #[test]
    fn adversarial_rotating_check_terminates() {
        // always reports one error on the first not-yet-commented line;
        // every adoption is a tie, so the loop leans on monotone growth
        let rotating = |s: &Snippet, _: &mut Budget| {
            for l in 1..=s.line_count() {
                let text = s.line_text(l).unwrap_or_default();
                if !text.trim().is_empty() && !crate::source::line_is_commented(text) {
                    let rec = s.line_index()[(l - 1) as usize];
                    return Ok(vec![Diagnostic {
                        code: codes::CANNOT_FIND_NAME,
                        category: Category::Semantic,
                        message: "Cannot find name 'x'.".to_string(),
                        span: Span::new(rec.start, 1),
                        line: Some(l),
                    }]);
                }
            }
            Ok(Vec::new())
        };
        let snippet = Snippet::inline("t", "a\nb\nc\nd\ne\nf\ng\nh");
        let mut budget = Budget::new(1000, None);
        let out = delete_lines(&snippet, rotating, &mut budget);
        assert_eq!(out.stop, StopReason::Converged);
        assert!(out.emptied);
        assert!(out.compile_count <= 17);
    }

    #[test]
    fn compile_count_respects_worst_case_bound() {
        for src in [
            "var x = ;\nvar y = ;\nvar z = ;",
            "foo bar\nbaz qux\n};",
            "const qq = zz;\nqq(); qq();\n",
        ] {
            let snippet = Snippet::inline("t", src);
            let mut budget = Budget::unlimited();
            let initial = {
                let mut b = Budget::unlimited();
                analyzer_check(&snippet, &mut b).unwrap().len() as u32
            };
            let lines = snippet.line_count();
            let out = delete_lines(&snippet, analyzer_check, &mut budget);
            let bound = 1 + initial * (initial + 1) * lines;
            assert!(
                out.compile_count <= bound,
                "{} > {bound} for {src:?}",
                out.compile_count
            );
        }
    }
}
