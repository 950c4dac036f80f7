//! The repair stages that act on diagnostics: targeted fixes for undeclared
//! names, the per-code fix registry, and the overlap-filtered batch edit
//! applier.
//!
//! Targeted fixes handle `Cannot find name` two ways: insert a `require`
//! when the name is used as a member-access base and matches a builtin
//! module, or declare a placeholder ahead of the first use, typed from the
//! expected call-argument type when one is known. Candidates are re-checked
//! one at a time and kept only when the total diagnostic count does not
//! grow.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ambient::{AmbientEnvironment, TypeHint};
use crate::analyzer::{check_budgeted, Analysis};
use crate::budget::{Budget, Exhausted};
use crate::codes;
use crate::source::{line_of, Diagnostic, FixAction, Snippet, TextChange};

/// Style knobs for the inserted text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixStyle {
    /// Literal used in placeholder declarations.
    pub placeholder_text: String,
    /// Binding keyword for inserted requires.
    pub require_keyword: String,
    /// Quote used around the module name in inserted requires.
    pub require_quote: char,
}

impl Default for FixStyle {
    fn default() -> Self {
        FixStyle {
            placeholder_text: "YOUR VALUE HERE".to_string(),
            require_keyword: "const".to_string(),
            require_quote: '"',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipReason {
    /// The line also carries expression-expected or unexpected-keyword
    /// syntax errors, so the code there has more problems than the name.
    SameLineSyntaxIssues,
    /// Direct calls of undeclared names are left alone.
    UndefinedFunction,
    /// The candidate edit was applied, re-checked, and reverted.
    WouldIncreaseDiagnostics,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkippedFix {
    pub name: String,
    pub reason: SkipReason,
    pub action: Option<FixAction>,
}

/// The outcome of a fix stage over one snippet.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixOutcome {
    pub applied: Vec<FixAction>,
    pub skipped: Vec<SkippedFix>,
    pub text_after: String,
    pub diagnostics_after: Vec<Diagnostic>,
    /// Set when the stage stopped early on budget/deadline exhaustion;
    /// `text_after` still holds the last adopted state.
    pub exhausted: Option<Exhausted>,
}

impl FixOutcome {
    fn unchanged(analysis: &Analysis, text: &str) -> FixOutcome {
        FixOutcome {
            applied: Vec::new(),
            skipped: Vec::new(),
            text_after: text.to_string(),
            diagnostics_after: analysis.diagnostics.clone(),
            exhausted: None,
        }
    }
}

const CANNOT_FIND: [u32; 2] = [codes::CANNOT_FIND_NAME, codes::CANNOT_FIND_NAME_SUGGESTION];
const SAME_LINE_BLOCKERS: [u32; 2] = [
    codes::EXPRESSION_EXPECTED,
    codes::UNEXPECTED_KEYWORD_OR_IDENTIFIER,
];

/// Applies the two targeted fixes for `Cannot find name` diagnostics, in
/// document order, one re-checked candidate at a time. Each name is
/// attempted at most once per run.
pub fn targeted_fixes(
    snippet: &Snippet,
    analysis: &Analysis,
    env: &AmbientEnvironment,
    style: &FixStyle,
    budget: &mut Budget,
) -> FixOutcome {
    targeted_fixes_full(snippet, analysis, env, style, budget).0
}

/// As [`targeted_fixes`], also returning the analysis of the final text when
/// any change was adopted (saves the caller a re-check).
pub fn targeted_fixes_full(
    snippet: &Snippet,
    analysis: &Analysis,
    env: &AmbientEnvironment,
    style: &FixStyle,
    budget: &mut Budget,
) -> (FixOutcome, Option<Analysis>) {
    let mut applied = Vec::new();
    let mut skipped = Vec::new();
    let mut attempted: HashSet<String> = HashSet::new();

    let mut cur_snippet: Option<Snippet> = None;
    let mut cur_analysis: Option<Analysis> = None;
    let mut exhausted = None;

    loop {
        let a = cur_analysis.as_ref().unwrap_or(analysis);
        let s = cur_snippet.as_ref().unwrap_or(snippet);

        let Some(diag) = a
            .diagnostics
            .iter()
            .find(|d| {
                CANNOT_FIND.contains(&d.code)
                    && !attempted.contains(name_of(d, a).unwrap_or_default().as_str())
            })
            .cloned()
        else {
            break;
        };
        let Some(name) = name_of(&diag, a) else {
            break;
        };
        attempted.insert(name.clone());

        // (a) presume lines with structural errors have deeper problems
        if a.diagnostics.iter().any(|d| {
            d.line.is_some() && d.line == diag.line && SAME_LINE_BLOCKERS.contains(&d.code)
        }) {
            skipped.push(SkippedFix {
                name,
                reason: SkipReason::SameLineSyntaxIssues,
                action: None,
            });
            continue;
        }

        let site = a.scopes.reference_at(diag.span);
        let member_base = site.is_some_and(|r| r.member_base);
        let direct_callee = site.is_some_and(|r| r.direct_callee);

        let action = if member_base && env.is_builtin_module(&name) {
            require_action(s, &name, style, &diag)
        } else if direct_callee {
            // (c) undefined functions are left for other stages
            skipped.push(SkippedFix {
                name,
                reason: SkipReason::UndefinedFunction,
                action: None,
            });
            continue;
        } else {
            let hint = site.and_then(|r| r.arg_hint.clone()).unwrap_or(TypeHint::Unknown);
            placeholder_action(s, a, &name, hint, style, &diag)
        };

        let new_text = apply_changes(s.text(), &action.changes)
            .expect("generated fix edits are always in range");
        let candidate = s.with_text(new_text);
        let candidate_analysis = match check_budgeted(&candidate, env, budget) {
            Ok(an) => an,
            Err(e) => {
                exhausted = Some(e);
                break;
            }
        };
        if candidate_analysis.diagnostics.len() <= a.diagnostics.len() {
            applied.push(action);
            cur_snippet = Some(candidate);
            cur_analysis = Some(candidate_analysis);
        } else {
            skipped.push(SkippedFix {
                name,
                reason: SkipReason::WouldIncreaseDiagnostics,
                action: Some(action),
            });
        }
    }

    let diagnostics_after = cur_analysis
        .as_ref()
        .unwrap_or(analysis)
        .diagnostics
        .clone();
    let text_after = cur_snippet
        .as_ref()
        .unwrap_or(snippet)
        .text()
        .to_string();
    (
        FixOutcome {
            applied,
            skipped,
            text_after,
            diagnostics_after,
            exhausted,
        },
        cur_analysis,
    )
}

/// Name an undeclared-name diagnostic refers to: from the recorded
/// reference at its span, falling back to the quoted name in the message.
fn name_of(diag: &Diagnostic, analysis: &Analysis) -> Option<String> {
    if let Some(r) = analysis.scopes.reference_at(diag.span) {
        return Some(r.name.clone());
    }
    quoted(&diag.message, 0)
}

/// The `n`th single-quoted segment of a message.
fn quoted(message: &str, n: usize) -> Option<String> {
    let mut parts = message.split('\'');
    let mut idx = 0;
    // odd split positions are inside quotes
    let mut seen = 0;
    loop {
        let part = parts.next()?;
        if idx % 2 == 1 {
            if seen == n {
                return Some(part.to_string());
            }
            seen += 1;
        }
        idx += 1;
    }
}

fn require_action(snippet: &Snippet, name: &str, style: &FixStyle, diag: &Diagnostic) -> FixAction {
    let q = style.require_quote;
    let line = format!(
        "{} {} = require({q}{}{q});\n",
        style.require_keyword, name, name
    );
    // inserted at the top, after any shebang line
    let offset = if snippet.text().starts_with("#!") {
        snippet
            .line_index()
            .get(1)
            .map(|r| r.start)
            .unwrap_or(snippet.text().len())
    } else {
        0
    };
    let text = if offset == snippet.text().len() && !snippet.text().ends_with('\n') {
        format!("\n{line}")
    } else {
        line
    };
    FixAction::new(
        "insert-require",
        format!("Insert `require(\"{name}\")` for the builtin module"),
        vec![TextChange::insert(offset, text)],
        diag.clone(),
    )
}

fn placeholder_action(
    snippet: &Snippet,
    analysis: &Analysis,
    name: &str,
    hint: TypeHint,
    style: &FixStyle,
    diag: &Diagnostic,
) -> FixAction {
    let p = &style.placeholder_text;
    let (literal, comment) = match &hint {
        TypeHint::String | TypeHint::Unknown => (format!("\"{p}\""), None),
        TypeHint::Number => ("0".to_string(), None),
        TypeHint::StringArray => (format!("[\"{p}\"]"), None),
        TypeHint::NumberArray => ("[0]".to_string(), None),
        TypeHint::Callable => (format!("\"{p}\""), Some("Function".to_string())),
        TypeHint::Constructable => (format!("\"{p}\""), Some("Constructor".to_string())),
        TypeHint::Complex(desc) => (format!("\"{p}\""), Some(desc.clone())),
    };
    let mut line = format!("var {name} = {literal};");
    if let Some(desc) = &comment {
        line.push_str(&format!(" // Suggested Type: {desc}"));
    }
    line.push('\n');

    // insert ahead of the line holding the first use
    let first_use = analysis
        .scopes
        .references_of(name)
        .map(|r| r.span)
        .min_by_key(|s| s.start)
        .unwrap_or(diag.span);
    let offset = line_of(first_use, snippet)
        .and_then(|l| snippet.line_index().get((l - 1) as usize))
        .map(|r| r.start)
        .unwrap_or(0);
    FixAction::new(
        "insert-placeholder",
        format!("Declare placeholder variable '{name}'"),
        vec![TextChange::insert(offset, line)],
        diag.clone(),
    )
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ApplyError {
    #[error("edit span {start}+{length} is out of range for text of length {text_len}")]
    SpanOutOfRange {
        start: usize,
        length: usize,
        text_len: usize,
    },
}

/// Applies non-overlapping changes, assuming they are sorted by start and
/// pairwise disjoint with distinct starts.
fn apply_disjoint(text: &str, changes: &[&TextChange]) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pos = 0;
    for c in changes {
        out.push_str(&text[pos..c.span.start]);
        out.push_str(&c.new_text);
        pos = c.span.end();
    }
    out.push_str(&text[pos..]);
    out
}

fn apply_changes(text: &str, changes: &[TextChange]) -> Result<String, ApplyError> {
    for c in changes {
        if !c.span.in_range_of(text) {
            return Err(ApplyError::SpanOutOfRange {
                start: c.span.start,
                length: c.span.length,
                text_len: text.len(),
            });
        }
    }
    let mut refs: Vec<&TextChange> = changes.iter().collect();
    refs.sort_by_key(|c| (c.span.start, c.span.length));
    Ok(apply_disjoint(text, &refs))
}

/// The batch selection step on its own: flattens all actions' changes,
/// sorts by earliest start then smallest change (ties broken by the
/// earlier-sorted diagnostic), and greedily drops changes that would
/// overlap an already-kept one (same-start edits count as overlapping).
/// Returns the kept changes in start order, each paired with the index of
/// the action it came from.
pub fn select_batch<'a>(
    text: &str,
    actions: &'a [FixAction],
) -> Result<Vec<(&'a TextChange, usize)>, ApplyError> {
    struct Cand<'a> {
        change: &'a TextChange,
        action: usize,
        diag_start: usize,
        diag_code: u32,
        seq: usize,
    }
    let mut cands = Vec::new();
    for (ai, action) in actions.iter().enumerate() {
        for change in &action.changes {
            if !change.span.in_range_of(text) {
                return Err(ApplyError::SpanOutOfRange {
                    start: change.span.start,
                    length: change.span.length,
                    text_len: text.len(),
                });
            }
            cands.push(Cand {
                change,
                action: ai,
                diag_start: action.target_diagnostic.span.start,
                diag_code: action.target_diagnostic.code,
                seq: cands.len(),
            });
        }
    }
    cands.sort_by_key(|c| {
        (
            c.change.span.start,
            c.change.span.length,
            c.diag_start,
            c.diag_code,
            c.seq,
        )
    });

    let mut kept: Vec<(&TextChange, usize)> = Vec::new();
    for cand in &cands {
        let conflicts = kept.iter().any(|(k, _)| {
            k.span.intersects(&cand.change.span) || k.span.start == cand.change.span.start
        });
        if !conflicts {
            kept.push((cand.change, cand.action));
        }
    }
    Ok(kept)
}

/// Selects per [`select_batch`] and applies the kept set simultaneously.
/// Returns the new text and the actions that contributed at least one kept
/// change.
pub fn apply_batch(
    text: &str,
    actions: &[FixAction],
) -> Result<(String, Vec<FixAction>), ApplyError> {
    let kept = select_batch(text, actions)?;
    let changes: Vec<&TextChange> = kept.iter().map(|(c, _)| *c).collect();
    let new_text = apply_disjoint(text, &changes);
    let kept_actions: HashSet<usize> = kept.iter().map(|(_, a)| *a).collect();
    let applied = actions
        .iter()
        .enumerate()
        .filter(|(i, _)| kept_actions.contains(i))
        .map(|(_, a)| a.clone())
        .collect();
    Ok((new_text, applied))
}

/// Context handed to codefix factories; factories may consult the analysis
/// and ambient environment.
pub struct FixContext<'a> {
    pub analysis: &'a Analysis,
    pub env: &'a AmbientEnvironment,
}

pub type FixFactory = fn(&Diagnostic, &FixContext) -> Vec<FixAction>;

/// Registry mapping diagnostic codes to fix factories. The shipped registry
/// covers spelling corrections (2552) and missing closers (1005); top-level
/// await is deliberately not wrapped, and plain cannot-find-name is left to
/// the targeted stage.
pub struct CodefixRegistry {
    entries: Vec<(u32, FixFactory)>,
}

impl CodefixRegistry {
    pub fn builtin() -> CodefixRegistry {
        CodefixRegistry {
            entries: vec![
                (codes::CANNOT_FIND_NAME_SUGGESTION, fix_spelling as FixFactory),
                (codes::CHARACTER_EXPECTED, fix_missing_closer as FixFactory),
            ],
        }
    }

    /// Extension point: register a factory for a diagnostic code.
    pub fn with_fix(mut self, code: u32, factory: FixFactory) -> CodefixRegistry {
        self.entries.push((code, factory));
        self
    }

    pub fn fixes_for(&self, diag: &Diagnostic, ctx: &FixContext) -> Vec<FixAction> {
        self.entries
            .iter()
            .filter(|(code, _)| *code == diag.code)
            .flat_map(|(_, f)| f(diag, ctx))
            .collect()
    }
}

/// Registry lookup with the shipped registry.
pub fn codefixes_for(diag: &Diagnostic, ctx: &FixContext) -> Vec<FixAction> {
    CodefixRegistry::builtin().fixes_for(diag, ctx)
}

fn fix_spelling(diag: &Diagnostic, _ctx: &FixContext) -> Vec<FixAction> {
    // message shape: Cannot find name 'x'. Did you mean 'y'?
    let Some(suggestion) = quoted(&diag.message, 1) else {
        return Vec::new();
    };
    vec![FixAction::new(
        "fix-spelling",
        format!("Change spelling to '{suggestion}'"),
        vec![TextChange::new(diag.span, suggestion)],
        diag.clone(),
    )]
}

fn fix_missing_closer(diag: &Diagnostic, _ctx: &FixContext) -> Vec<FixAction> {
    let Some(expected) = quoted(&diag.message, 0) else {
        return Vec::new();
    };
    if !matches!(expected.as_str(), ")" | "]" | "}") {
        return Vec::new();
    }
    vec![FixAction::new(
        "insert-missing-token",
        format!("Insert missing '{expected}'"),
        vec![TextChange::insert(diag.span.start, expected)],
        diag.clone(),
    )]
}

/// The batch codefix stage: gather fixes for every current diagnostic,
/// apply them as one overlap-filtered batch, then compile once and revert
/// the whole batch if the total went up. With `validate_each`, every action
/// is instead applied and compiled individually.
pub fn codefix_stage(
    snippet: &Snippet,
    analysis: &Analysis,
    env: &AmbientEnvironment,
    budget: &mut Budget,
    validate_each: bool,
) -> FixOutcome {
    codefix_stage_full(
        snippet,
        analysis,
        env,
        budget,
        validate_each,
        &CodefixRegistry::builtin(),
    )
    .0
}

/// Same stage with a caller-supplied registry.
pub fn codefix_stage_with(
    snippet: &Snippet,
    analysis: &Analysis,
    env: &AmbientEnvironment,
    budget: &mut Budget,
    validate_each: bool,
    registry: &CodefixRegistry,
) -> FixOutcome {
    codefix_stage_full(snippet, analysis, env, budget, validate_each, registry).0
}

/// Full-fat variant returning the analysis of the adopted text.
pub fn codefix_stage_full(
    snippet: &Snippet,
    analysis: &Analysis,
    env: &AmbientEnvironment,
    budget: &mut Budget,
    validate_each: bool,
    registry: &CodefixRegistry,
) -> (FixOutcome, Option<Analysis>) {
    let ctx = FixContext { analysis, env };
    let actions: Vec<FixAction> = analysis
        .diagnostics
        .iter()
        .flat_map(|d| registry.fixes_for(d, &ctx))
        .collect();
    if actions.is_empty() {
        return (FixOutcome::unchanged(analysis, snippet.text()), None);
    }

    if validate_each {
        return codefix_each(snippet, analysis, env, budget, actions);
    }

    let (new_text, applied) = match apply_batch(snippet.text(), &actions) {
        Ok(r) => r,
        Err(_) => return (FixOutcome::unchanged(analysis, snippet.text()), None),
    };
    if applied.is_empty() {
        return (FixOutcome::unchanged(analysis, snippet.text()), None);
    }
    let candidate = snippet.with_text(new_text);
    let candidate_analysis = match check_budgeted(&candidate, env, budget) {
        Ok(a) => a,
        Err(e) => {
            let mut out = FixOutcome::unchanged(analysis, snippet.text());
            out.exhausted = Some(e);
            return (out, None);
        }
    };
    if candidate_analysis.diagnostics.len() > analysis.diagnostics.len() {
        // revert the entire batch
        let skipped = applied
            .into_iter()
            .map(|action| SkippedFix {
                name: action.fix_id.clone(),
                reason: SkipReason::WouldIncreaseDiagnostics,
                action: Some(action),
            })
            .collect();
        return (
            FixOutcome {
                applied: Vec::new(),
                skipped,
                text_after: snippet.text().to_string(),
                diagnostics_after: analysis.diagnostics.clone(),
                exhausted: None,
            },
            None,
        );
    }
    let outcome = FixOutcome {
        applied,
        skipped: Vec::new(),
        text_after: candidate.text().to_string(),
        diagnostics_after: candidate_analysis.diagnostics.clone(),
        exhausted: None,
    };
    (outcome, Some(candidate_analysis))
}

/// Optional per-fix validation mode.
fn codefix_each(
    snippet: &Snippet,
    analysis: &Analysis,
    env: &AmbientEnvironment,
    budget: &mut Budget,
    actions: Vec<FixAction>,
) -> (FixOutcome, Option<Analysis>) {
    let mut applied = Vec::new();
    let mut skipped = Vec::new();
    let mut cur = snippet.clone();
    let mut cur_analysis: Option<Analysis> = None;
    let mut exhausted = None;
    for action in actions {
        let Ok(new_text) = apply_changes(cur.text(), &action.changes) else {
            skipped.push(SkippedFix {
                name: action.fix_id.clone(),
                reason: SkipReason::WouldIncreaseDiagnostics,
                action: Some(action),
            });
            continue;
        };
        let cur_count = cur_analysis
            .as_ref()
            .unwrap_or(analysis)
            .diagnostics
            .len();
        let candidate = cur.with_text(new_text);
        match check_budgeted(&candidate, env, budget) {
            Ok(a) => {
                if a.diagnostics.len() <= cur_count {
                    cur = candidate;
                    cur_analysis = Some(a);
                    applied.push(action);
                } else {
                    skipped.push(SkippedFix {
                        name: action.fix_id.clone(),
                        reason: SkipReason::WouldIncreaseDiagnostics,
                        action: Some(action),
                    });
                }
            }
            Err(e) => {
                exhausted = Some(e);
                break;
            }
        }
    }
    let diagnostics_after = cur_analysis
        .as_ref()
        .unwrap_or(analysis)
        .diagnostics
        .clone();
    (
        FixOutcome {
            applied,
            skipped,
            text_after: cur.text().to_string(),
            diagnostics_after,
            exhausted,
        },
        cur_analysis,
    )
}
