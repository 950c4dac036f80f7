//! Recovering lexer for the JavaScript subset.
//!
//! The token stream tiles the input: every byte belongs to exactly one
//! token's full range (leading whitespace is attached to the following
//! token, trailing whitespace to EOF). Unknown characters and unterminated
//! literals become error tokens instead of aborting, so downstream stages
//! always get a stream to work with.

use crate::source::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kw {
    Var,
    Let,
    Const,
    Function,
    Return,
    If,
    Else,
    For,
    While,
    Do,
    Break,
    Continue,
    New,
    Delete,
    Typeof,
    Instanceof,
    Void,
    In,
    This,
    True,
    False,
    Null,
    Try,
    Catch,
    Finally,
    Throw,
    Switch,
    Case,
    Default,
    Class,
    Extends,
    Super,
    Import,
    Export,
    Await,
    Yield,
    Debugger,
    With,
}

fn keyword_of(text: &str) -> Option<Kw> {
    Some(match text {
        "var" => Kw::Var,
        "let" => Kw::Let,
        "const" => Kw::Const,
        "function" => Kw::Function,
        "return" => Kw::Return,
        "if" => Kw::If,
        "else" => Kw::Else,
        "for" => Kw::For,
        "while" => Kw::While,
        "do" => Kw::Do,
        "break" => Kw::Break,
        "continue" => Kw::Continue,
        "new" => Kw::New,
        "delete" => Kw::Delete,
        "typeof" => Kw::Typeof,
        "instanceof" => Kw::Instanceof,
        "void" => Kw::Void,
        "in" => Kw::In,
        "this" => Kw::This,
        "true" => Kw::True,
        "false" => Kw::False,
        "null" => Kw::Null,
        "try" => Kw::Try,
        "catch" => Kw::Catch,
        "finally" => Kw::Finally,
        "throw" => Kw::Throw,
        "switch" => Kw::Switch,
        "case" => Kw::Case,
        "default" => Kw::Default,
        "class" => Kw::Class,
        "extends" => Kw::Extends,
        "super" => Kw::Super,
        "import" => Kw::Import,
        "export" => Kw::Export,
        "await" => Kw::Await,
        "yield" => Kw::Yield,
        "debugger" => Kw::Debugger,
        "with" => Kw::With,
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexError {
    UnknownChar,
    UnterminatedString,
    UnterminatedTemplate,
    UnterminatedRegex,
    UnterminatedComment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Keyword(Kw),
    Punct(&'static str),
    Str,
    Num,
    Template,
    Regex,
    Comment,
    Error(LexError),
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// The token text proper.
    pub span: Span,
    /// Start of the token's range including leading whitespace.
    pub full_start: usize,
    /// Whether a line terminator appears in the leading trivia. Drives
    /// semicolon insertion in the parser.
    pub newline_before: bool,
}

impl Token {
    pub fn text<'a>(&self, src: &'a str) -> &'a str {
        &src[self.span.start..self.span.end()]
    }

    pub fn is_punct(&self, p: &str) -> bool {
        matches!(self.kind, TokenKind::Punct(q) if q == p)
    }

    pub fn is_keyword(&self, kw: Kw) -> bool {
        self.kind == TokenKind::Keyword(kw)
    }
}

/// Longest-match-first punctuator table.
const PUNCTUATORS: &[&str] = &[
    ">>>=", "===", "!==", "**=", "<<=", ">>=", ">>>", "...", "&&=", "||=", "??=", "=>", "==",
    "!=", "<=", ">=", "&&", "||", "??", "?.", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=",
    "|=", "^=", "<<", ">>", "**", "{", "}", "(", ")", "[", "]", ";", ",", "<", ">", "+", "-",
    "*", "/", "%", "&", "|", "^", "!", "~", "?", ":", "=", ".",
];

pub fn tokenize(text: &str) -> Vec<Token> {
    Lexer::new(text).run()
}

struct Lexer<'s> {
    src: &'s str,
    pos: usize,
    tokens: Vec<Token>,
    trivia_start: usize,
    newline_pending: bool,
    /// Kind of the last non-comment token, for the regex/division split.
    prev_significant: Option<TokenKind>,
}

impl<'s> Lexer<'s> {
    fn new(src: &'s str) -> Self {
        Lexer {
            src,
            pos: 0,
            tokens: Vec::new(),
            trivia_start: 0,
            newline_pending: false,
            prev_significant: None,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn emit(&mut self, kind: TokenKind, start: usize) {
        let token = Token {
            kind,
            span: Span::new(start, self.pos - start),
            full_start: self.trivia_start,
            newline_before: self.newline_pending,
        };
        self.tokens.push(token);
        self.trivia_start = self.pos;
        self.newline_pending = false;
        if kind != TokenKind::Comment {
            self.prev_significant = Some(kind);
        }
    }

    fn run(mut self) -> Vec<Token> {
        // a shebang line is comment trivia
        if self.src.starts_with("#!") {
            let start = self.pos;
            while let Some(c) = self.peek() {
                if c == '\n' {
                    break;
                }
                self.bump();
            }
            self.emit(TokenKind::Comment, start);
        }
        loop {
            let Some(c) = self.peek() else {
                self.emit(TokenKind::Eof, self.pos);
                return self.tokens;
            };
            if c == '\n' {
                self.newline_pending = true;
                self.bump();
                continue;
            }
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            let start = self.pos;
            match c {
                '/' if self.peek2() == Some('/') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                    self.emit(TokenKind::Comment, start);
                }
                '/' if self.peek2() == Some('*') => {
                    self.bump();
                    self.bump();
                    let mut closed = false;
                    while let Some(c) = self.bump() {
                        if c == '*' && self.peek() == Some('/') {
                            self.bump();
                            closed = true;
                            break;
                        }
                    }
                    if closed {
                        self.emit(TokenKind::Comment, start);
                    } else {
                        self.emit(TokenKind::Error(LexError::UnterminatedComment), start);
                    }
                }
                '/' if self.regex_allowed() => self.regex(start),
                '"' | '\'' => self.string(start, c),
                '`' => self.template(start),
                _ if c.is_ascii_digit() => self.number(start),
                '.' if self.peek2().is_some_and(|c| c.is_ascii_digit()) => self.number(start),
                _ if is_ident_start(c) => {
                    self.bump();
                    while let Some(c) = self.peek() {
                        if is_ident_continue(c) {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let text = &self.src[start..self.pos];
                    match keyword_of(text) {
                        Some(kw) => self.emit(TokenKind::Keyword(kw), start),
                        None => self.emit(TokenKind::Ident, start),
                    }
                }
                _ => {
                    if let Some(p) = PUNCTUATORS
                        .iter()
                        .find(|p| self.src[self.pos..].starts_with(**p))
                    {
                        self.pos += p.len();
                        self.emit(TokenKind::Punct(p), start);
                    } else {
                        self.bump();
                        self.emit(TokenKind::Error(LexError::UnknownChar), start);
                    }
                }
            }
        }
    }

    fn regex_allowed(&self) -> bool {
        match self.prev_significant {
            None => true,
            Some(TokenKind::Ident)
            | Some(TokenKind::Num)
            | Some(TokenKind::Str)
            | Some(TokenKind::Template)
            | Some(TokenKind::Regex) => false,
            Some(TokenKind::Keyword(kw)) => !matches!(
                kw,
                Kw::This | Kw::True | Kw::False | Kw::Null | Kw::Super
            ),
            Some(TokenKind::Punct(p)) => !matches!(p, ")" | "]"),
            _ => true,
        }
    }

    fn string(&mut self, start: usize, quote: char) {
        self.bump();
        loop {
            match self.peek() {
                None => {
                    self.emit(TokenKind::Error(LexError::UnterminatedString), start);
                    return;
                }
                Some('\n') => {
                    // token ends before the newline; the next line lexes fresh
                    self.emit(TokenKind::Error(LexError::UnterminatedString), start);
                    return;
                }
                Some('\\') => {
                    self.bump();
                    self.bump();
                }
                Some(c) if c == quote => {
                    self.bump();
                    self.emit(TokenKind::Str, start);
                    return;
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
    }

    /// Lexes a whole template literal, including `${...}` substitutions and
    /// nested templates, as one token.
    fn template(&mut self, start: usize) {
        self.bump();
        // true = inside a template section, false = inside a substitution
        let mut stack = vec![true];
        let mut braces = vec![0u32];
        loop {
            let Some(c) = self.peek() else {
                self.emit(TokenKind::Error(LexError::UnterminatedTemplate), start);
                return;
            };
            let in_template = *stack.last().unwrap();
            match c {
                '\\' if in_template => {
                    self.bump();
                    self.bump();
                }
                '`' => {
                    self.bump();
                    if in_template {
                        stack.pop();
                        braces.pop();
                        if stack.is_empty() {
                            self.emit(TokenKind::Template, start);
                            return;
                        }
                    } else {
                        stack.push(true);
                        braces.push(0);
                    }
                }
                '$' if in_template && self.peek2() == Some('{') => {
                    self.bump();
                    self.bump();
                    stack.push(false);
                    braces.push(0);
                }
                '{' if !in_template => {
                    *braces.last_mut().unwrap() += 1;
                    self.bump();
                }
                '}' if !in_template => {
                    let depth = braces.last_mut().unwrap();
                    if *depth == 0 {
                        stack.pop();
                        braces.pop();
                    } else {
                        *depth -= 1;
                    }
                    self.bump();
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn regex(&mut self, start: usize) {
        self.bump();
        let mut in_class = false;
        loop {
            match self.peek() {
                None | Some('\n') => {
                    self.emit(TokenKind::Error(LexError::UnterminatedRegex), start);
                    return;
                }
                Some('\\') => {
                    self.bump();
                    self.bump();
                }
                Some('[') => {
                    in_class = true;
                    self.bump();
                }
                Some(']') => {
                    in_class = false;
                    self.bump();
                }
                Some('/') if !in_class => {
                    self.bump();
                    while let Some(c) = self.peek() {
                        if is_ident_continue(c) {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.emit(TokenKind::Regex, start);
                    return;
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
    }

    fn number(&mut self, start: usize) {
        if self.peek() == Some('0')
            && self
                .peek2()
                .is_some_and(|c| matches!(c, 'x' | 'X' | 'b' | 'B' | 'o' | 'O'))
        {
            self.bump();
            self.bump();
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    self.bump();
                } else {
                    break;
                }
            }
            self.emit(TokenKind::Num, start);
            return;
        }
        let mut seen_dot = false;
        let mut seen_exp = false;
        while let Some(c) = self.peek() {
            match c {
                '0'..='9' | '_' => {
                    self.bump();
                }
                '.' if !seen_dot && !seen_exp => {
                    // not a dot if it starts a method call on a literal: `1.toFixed` is
                    // invalid JS anyway, keep it simple and take the dot
                    seen_dot = true;
                    self.bump();
                }
                'e' | 'E' if !seen_exp => {
                    seen_exp = true;
                    self.bump();
                    if matches!(self.peek(), Some('+') | Some('-')) {
                        self.bump();
                    }
                }
                'n' => {
                    self.bump();
                    break;
                }
                _ => break,
            }
        }
        self.emit(TokenKind::Num, start);
    }
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphanumeric()
}
