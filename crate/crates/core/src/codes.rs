//! The published diagnostic-code table.
//!
//! Codes reuse TypeScript's numbering where a counterpart exists so corpus
//! reports stay comparable with other tooling; engine-specific codes live in
//! a 9xxx private range. The full table, with the message shapes the engine
//! emits, is documented in `docs/diagnostics.md`.

use crate::source::Category;

/// `'{token}' expected.`
pub const CHARACTER_EXPECTED: u32 = 1005;
/// `'*/' expected.` (unterminated block comment)
pub const UNTERMINATED_COMMENT: u32 = 1010;
/// `Unterminated string literal.`
pub const UNTERMINATED_STRING: u32 = 1002;
/// `Identifier expected.`
pub const IDENTIFIER_EXPECTED: u32 = 1003;
/// `A 'return' statement can only be used within a function body.`
pub const RETURN_OUTSIDE_FUNCTION: u32 = 1108;
/// `Expression expected.`
pub const EXPRESSION_EXPECTED: u32 = 1109;
/// `Invalid character.`
pub const INVALID_CHARACTER: u32 = 1127;
/// `Declaration or statement expected.`
pub const DECLARATION_OR_STATEMENT_EXPECTED: u32 = 1128;
/// `Unterminated template literal.`
pub const UNTERMINATED_TEMPLATE: u32 = 1160;
/// `Unterminated regular expression literal.`
pub const UNTERMINATED_REGEX: u32 = 1161;
/// `'await' expressions are only allowed within async functions...`
pub const AWAIT_IN_NON_ASYNC: u32 = 1308;
/// Top-level `await` in a script-mode file.
pub const TOP_LEVEL_AWAIT: u32 = 1375;
/// `Unexpected keyword or identifier.`
pub const UNEXPECTED_KEYWORD_OR_IDENTIFIER: u32 = 1434;
/// `Cannot find name '{name}'.`
pub const CANNOT_FIND_NAME: u32 = 2304;
/// `Property '{name}' does not exist on type '{type}'.`
pub const PROPERTY_DOES_NOT_EXIST: u32 = 2339;
/// `Cannot find name '{name}'. Did you mean '{suggestion}'?`
pub const CANNOT_FIND_NAME_SUGGESTION: u32 = 2552;
/// Nesting deeper than the parser's recovery limit (private range).
pub const NESTING_TOO_DEEP: u32 = 9001;
/// `import` declaration in a script-mode file (private range).
pub const IMPORT_IN_SCRIPT: u32 = 9010;
/// `export` declaration in a script-mode file (private range).
pub const EXPORT_IN_SCRIPT: u32 = 9011;

/// code, category, human label (the label wording follows common usage so
/// histograms line up with other reports).
const TABLE: &[(u32, Category, &str)] = &[
    (UNTERMINATED_STRING, Category::Syntax, "Unterminated string literal"),
    (IDENTIFIER_EXPECTED, Category::Syntax, "Identifier expected"),
    (CHARACTER_EXPECTED, Category::Syntax, "Character expected"),
    (UNTERMINATED_COMMENT, Category::Syntax, "Unterminated comment"),
    (RETURN_OUTSIDE_FUNCTION, Category::Semantic, "Return outside function"),
    (EXPRESSION_EXPECTED, Category::Syntax, "Expression expected"),
    (INVALID_CHARACTER, Category::Syntax, "Invalid character"),
    (
        DECLARATION_OR_STATEMENT_EXPECTED,
        Category::Syntax,
        "Declaration or statement expected",
    ),
    (UNTERMINATED_TEMPLATE, Category::Syntax, "Unterminated template literal"),
    (UNTERMINATED_REGEX, Category::Syntax, "Unterminated regular expression"),
    (AWAIT_IN_NON_ASYNC, Category::Semantic, "Await in non-async function"),
    (TOP_LEVEL_AWAIT, Category::Semantic, "Top-level await"),
    (
        UNEXPECTED_KEYWORD_OR_IDENTIFIER,
        Category::Syntax,
        "Unexpected keyword or identifier",
    ),
    (CANNOT_FIND_NAME, Category::Semantic, "Cannot find name"),
    (
        PROPERTY_DOES_NOT_EXIST,
        Category::Semantic,
        "Property does not exist on type",
    ),
    (
        CANNOT_FIND_NAME_SUGGESTION,
        Category::Semantic,
        "Cannot find name (suggestion)",
    ),
    (NESTING_TOO_DEEP, Category::Syntax, "Nesting too deep"),
    (IMPORT_IN_SCRIPT, Category::Semantic, "Import in script mode"),
    (EXPORT_IN_SCRIPT, Category::Semantic, "Export in script mode"),
];

pub fn category_of(code: u32) -> Option<Category> {
    TABLE.iter().find(|(c, _, _)| *c == code).map(|(_, cat, _)| *cat)
}

pub fn label_of(code: u32) -> Option<&'static str> {
    TABLE.iter().find(|(c, _, _)| *c == code).map(|(_, _, l)| *l)
}

/// All published codes, for docs and report tooling.
pub fn all_codes() -> impl Iterator<Item = (u32, Category, &'static str)> {
    TABLE.iter().copied()
}
