//! Core value types shared by every stage: snippets, spans, diagnostics,
//! text edits, and line-level text manipulation.
//!
//! Offsets are 0-based byte offsets into UTF-8 text; lines are 1-based.
//! Windows line endings are normalized to `\n` when a [`Snippet`] is built,
//! so spans computed anywhere in the engine stay valid.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes;

/// A half-open byte range `[start, start + length)` into some text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub length: usize,
}

impl Span {
    pub fn new(start: usize, length: usize) -> Self {
        Span { start, length }
    }

    /// Zero-length span, used for pure insertions.
    pub fn empty(at: usize) -> Self {
        Span {
            start: at,
            length: 0,
        }
    }

    pub fn end(&self) -> usize {
        self.start + self.length
    }

    /// A span is in range for a text iff it ends at or before the text's end.
    /// Out-of-range spans are representable on purpose: the deletion stage
    /// must detect and abort on them rather than panic.
    pub fn in_range_of(&self, text: &str) -> bool {
        self.end() <= text.len()
    }

    pub fn intersects(&self, other: &Span) -> bool {
        self.start < other.end() && other.start < self.end()
    }
}

/// Where a snippet came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Origin {
    /// Extracted from a fenced code block in a package README.
    MarkdownReadme { package: String },
    /// Read from a file on disk.
    File { path: String },
    /// Constructed in memory.
    Inline,
}

/// One record of a snippet's line index: 1-based line number, byte offset of
/// the line start, and byte length of the line *excluding* its newline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineRecord {
    pub line: u32,
    pub start: usize,
    pub length: usize,
}

impl LineRecord {
    pub fn end(&self) -> usize {
        self.start + self.length
    }
}

/// Builds the 1-based line index for a text. The records partition the text:
/// offsets are contiguous and lengths plus newline bytes sum to the text
/// length. Empty text yields a single empty line; a trailing newline does not
/// open a phantom final line.
pub fn build_line_index(text: &str) -> Vec<LineRecord> {
    let mut records = Vec::new();
    let mut line = 1u32;
    let mut start = 0usize;
    let bytes = text.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'\n' {
            records.push(LineRecord {
                line,
                start,
                length: i - start,
            });
            line += 1;
            start = i + 1;
        }
    }
    if start < text.len() || records.is_empty() {
        records.push(LineRecord {
            line,
            start,
            length: text.len() - start,
        });
    }
    records
}

/// A code fragment with origin metadata and a derived line index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Snippet {
    id: String,
    text: String,
    origin: Origin,
    #[serde(skip)]
    line_index: Vec<LineRecord>,
}

impl<'de> Deserialize<'de> for Snippet {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Repr {
            id: String,
            text: String,
            origin: Origin,
        }
        let r = Repr::deserialize(deserializer)?;
        Ok(Snippet::new(r.id, r.text, r.origin))
    }
}

impl Snippet {
    /// Builds a snippet, normalizing `\r\n` line endings to `\n`.
    pub fn new(id: impl Into<String>, text: impl Into<String>, origin: Origin) -> Self {
        let text: String = text.into();
        let text = if text.contains("\r\n") {
            text.replace("\r\n", "\n")
        } else {
            text
        };
        let line_index = build_line_index(&text);
        Snippet {
            id: id.into(),
            text,
            origin,
            line_index,
        }
    }

    pub fn inline(id: impl Into<String>, text: impl Into<String>) -> Self {
        Snippet::new(id, text, Origin::Inline)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    pub fn line_index(&self) -> &[LineRecord] {
        &self.line_index
    }

    pub fn line_count(&self) -> u32 {
        self.line_index.len() as u32
    }

    /// Same id and origin, new text (with a rebuilt line index).
    pub fn with_text(&self, text: impl Into<String>) -> Self {
        Snippet::new(self.id.clone(), text, self.origin.clone())
    }

    /// The text of a 1-based line, without its newline.
    pub fn line_text(&self, line: u32) -> Option<&str> {
        let rec = self.line_index.get(line.checked_sub(1)? as usize)?;
        Some(&self.text[rec.start..rec.end()])
    }

}

/// Returns the 1-based line containing `span.start`, or `None` when the span
/// starts at or past the end of the text. Callers treat `None` as the
/// out-of-range marker that aborts line deletion.
pub fn line_of(span: Span, snippet: &Snippet) -> Option<u32> {
    line_for_offset(snippet.line_index(), snippet.text().len(), span.start)
}

/// Line lookup against a prebuilt index, for callers that don't hold a
/// [`Snippet`].
pub fn line_for_offset(index: &[LineRecord], text_len: usize, offset: usize) -> Option<u32> {
    if offset >= text_len {
        return None;
    }
    let pos = index.partition_point(|rec| rec.start <= offset);
    Some(index[pos.saturating_sub(1)].line)
}

/// Errors for misuse of the line-level operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SourceError {
    #[error("line {line} is out of range (snippet has {count} lines)")]
    LineOutOfRange { line: u32, count: u32 },
}

/// Prefixes the given 1-based line with `//`, leaving every other line
/// byte-identical. The marker is exactly `//` with no trailing space.
pub fn comment_out_line(snippet: &Snippet, line: u32) -> Result<Snippet, SourceError> {
    let count = snippet.line_count();
    if line == 0 || line > count {
        return Err(SourceError::LineOutOfRange { line, count });
    }
    let rec = snippet.line_index()[(line - 1) as usize];
    let mut text = String::with_capacity(snippet.text().len() + 2);
    text.push_str(&snippet.text()[..rec.start]);
    text.push_str("//");
    text.push_str(&snippet.text()[rec.start..]);
    Ok(snippet.with_text(text))
}

/// Whether a line is already a comment: after leading whitespace it starts
/// with `//`.
pub fn line_is_commented(line_text: &str) -> bool {
    line_text.trim_start().starts_with("//")
}

/// Diagnostic category, mirroring the split between parse-time and
/// analysis-time errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Syntax,
    Semantic,
}

/// One reported error: numeric code, category, message, source span, and the
/// 1-based line derived from the span start (`None` when out of range).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: u32,
    pub category: Category,
    pub message: String,
    pub span: Span,
    pub line: Option<u32>,
}

impl Diagnostic {
    /// Builds a diagnostic, deriving `line` from the snippet's line index.
    /// Panics (debug builds only) if the code is not in the published table.
    pub fn new(code: u32, message: impl Into<String>, span: Span, snippet: &Snippet) -> Self {
        let category = codes::category_of(code)
            .unwrap_or_else(|| panic!("diagnostic code {code} is not in the published table"));
        Diagnostic {
            code,
            category,
            message: message.into(),
            span,
            line: line_of(span, snippet),
        }
    }

    /// Human label for the code, used in histograms.
    pub fn label(&self) -> &'static str {
        codes::label_of(self.code).unwrap_or("Unknown code")
    }
}

/// Sorts diagnostics the way `check` publishes them: ascending span start,
/// ties broken by code, then length, then message.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| {
        (a.span.start, a.code, a.span.length, &a.message).cmp(&(
            b.span.start,
            b.code,
            b.span.length,
            &b.message,
        ))
    });
}

/// A single span-replacement edit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextChange {
    pub span: Span,
    pub new_text: String,
}

impl TextChange {
    pub fn new(span: Span, new_text: impl Into<String>) -> Self {
        TextChange {
            span,
            new_text: new_text.into(),
        }
    }

    pub fn insert(at: usize, new_text: impl Into<String>) -> Self {
        TextChange::new(Span::empty(at), new_text)
    }
}

/// A named group of edits proposed for one diagnostic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixAction {
    pub fix_id: String,
    pub description: String,
    pub changes: Vec<TextChange>,
    pub target_diagnostic: Diagnostic,
}

impl FixAction {
    pub fn new(
        fix_id: impl Into<String>,
        description: impl Into<String>,
        changes: Vec<TextChange>,
        target_diagnostic: Diagnostic,
    ) -> Self {
        debug_assert!(!changes.is_empty(), "a fix action must carry edits");
        FixAction {
            fix_id: fix_id.into(),
            description: description.into(),
            changes,
            target_diagnostic,
        }
    }
}
