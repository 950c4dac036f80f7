//! Error-recovering parser for the JavaScript subset.
//!
//! Parsing never fails: every input yields a tree plus a (possibly empty)
//! list of syntax diagnostics. Recovery is panic-mode to the next statement
//! boundary (`;`, `}`, or a newline at bracket depth zero), emitting one
//! diagnostic per panic, so independent errors on separate lines are all
//! reported.
//!
//! Supported grammar: statements (var/let/const, expression, if/else,
//! for/for-in/for-of/while/do, return, function declarations, try/catch,
//! throw, switch, labels), expressions (calls, member access, arrow and
//! function expressions, object/array literals, template literals,
//! binary/unary operators, `new`, `await`). Class bodies and generator
//! bodies parse as opaque regions with no diagnostics of their own. JSX and
//! TypeScript syntax are out of scope.

use crate::ast::*;
use crate::codes;
use crate::lexer::{tokenize, Kw, LexError, Token, TokenKind};
use crate::source::{
    build_line_index, line_for_offset, sort_diagnostics, Diagnostic, LineRecord, Span,
};

/// Recursion limit for nested statements/expressions. Deeper input is
/// consumed as an error region so pathological nesting cannot overflow the
/// stack.
const MAX_DEPTH: u32 = 200;

/// Parses `text`, returning the tolerant tree and all syntax diagnostics,
/// sorted by span start.
pub fn parse(text: &str) -> (SyntaxTree, Vec<Diagnostic>) {
    let tokens = tokenize(text);
    let line_index = build_line_index(text);
    let mut diags = Vec::new();
    for t in &tokens {
        if let TokenKind::Error(err) = t.kind {
            let (code, msg) = match err {
                LexError::UnknownChar => (codes::INVALID_CHARACTER, "Invalid character."),
                LexError::UnterminatedString => {
                    (codes::UNTERMINATED_STRING, "Unterminated string literal.")
                }
                LexError::UnterminatedTemplate => {
                    (codes::UNTERMINATED_TEMPLATE, "Unterminated template literal.")
                }
                LexError::UnterminatedRegex => (
                    codes::UNTERMINATED_REGEX,
                    "Unterminated regular expression literal.",
                ),
                LexError::UnterminatedComment => (codes::UNTERMINATED_COMMENT, "'*/' expected."),
            };
            diags.push(raw_diag(code, msg.to_string(), t.span, &line_index, text.len()));
        }
    }

    let sig: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.kind != TokenKind::Comment)
        .map(|(i, _)| i)
        .collect();
    let mut parser = Parser {
        src: text,
        tokens: &tokens,
        sig,
        pos: 0,
        last_end: 0,
        depth: 0,
        stmt_error: false,
        diags: Vec::new(),
        line_index: &line_index,
    };
    let program = parser.parse_program();
    diags.extend(parser.diags);
    sort_diagnostics(&mut diags);
    (
        SyntaxTree {
            tokens,
            program,
            source: text.to_string(),
        },
        diags,
    )
}

fn raw_diag(
    code: u32,
    message: String,
    span: Span,
    index: &[LineRecord],
    text_len: usize,
) -> Diagnostic {
    Diagnostic {
        code,
        category: codes::category_of(code).expect("published code"),
        message,
        span,
        line: line_for_offset(index, text_len, span.start),
    }
}

struct Parser<'s> {
    src: &'s str,
    tokens: &'s [Token],
    /// Indices of significant (non-comment) tokens.
    sig: Vec<usize>,
    pos: usize,
    last_end: usize,
    depth: u32,
    /// Set when the current statement has already reported; suppresses
    /// follow-on diagnostics until recovery completes.
    stmt_error: bool,
    diags: Vec<Diagnostic>,
    line_index: &'s [LineRecord],
}

impl<'s> Parser<'s> {
    fn tok(&self) -> &Token {
        &self.tokens[self.sig[self.pos.min(self.sig.len() - 1)]]
    }

    fn nth(&self, n: usize) -> &Token {
        let i = (self.pos + n).min(self.sig.len() - 1);
        &self.tokens[self.sig[i]]
    }

    fn at_eof(&self) -> bool {
        self.tok().kind == TokenKind::Eof
    }

    fn at_punct(&self, p: &str) -> bool {
        self.tok().is_punct(p)
    }

    fn at_kw(&self, kw: Kw) -> bool {
        self.tok().is_keyword(kw)
    }

    fn at_ident_text(&self, s: &str) -> bool {
        self.tok().kind == TokenKind::Ident && self.tok().text(self.src) == s
    }

    fn advance(&mut self) -> Token {
        let t = *self.tok();
        if t.kind != TokenKind::Eof {
            self.last_end = t.span.end();
            self.pos += 1;
        }
        t
    }

    fn ident_of(&self, t: Token) -> Ident {
        Ident {
            name: t.text(self.src).to_string(),
            span: t.span,
        }
    }

    /// Span to hang a diagnostic on: the token itself, or the previous
    /// token when sitting at EOF so that reported locations never point
    /// past the end of the text.
    fn anchor(&self, t: Token) -> Span {
        if t.kind == TokenKind::Eof {
            self.sig[..self.pos]
                .iter()
                .rev()
                .map(|&i| self.tokens[i].span)
                .next()
                .unwrap_or(Span::empty(0))
        } else {
            t.span
        }
    }

    fn report(&mut self, code: u32, message: impl Into<String>, span: Span) {
        if self.stmt_error {
            return;
        }
        self.stmt_error = true;
        self.diags.push(raw_diag(
            code,
            message.into(),
            span,
            self.line_index,
            self.src.len(),
        ));
    }

    fn report_expected(&mut self, what: &str) {
        let t = *self.tok();
        let span = self.anchor(t);
        self.report(codes::CHARACTER_EXPECTED, format!("'{what}' expected."), span);
    }

    /// Consume the token if present, otherwise report `'{p}' expected.`
    fn expect_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.advance();
            true
        } else {
            self.report_expected(p);
            false
        }
    }

    /// Panic-mode recovery: skip to the next statement boundary. Returns the
    /// span of the skipped run, if anything was consumed.
    fn panic_skip(&mut self) -> Option<Span> {
        let mut depth = 0i32;
        let ws = self.tok().span.start;
        let mut consumed = false;
        loop {
            if self.at_eof() {
                break;
            }
            let t = *self.tok();
            if depth <= 0 {
                if t.is_punct("}") {
                    break;
                }
                if consumed && t.newline_before {
                    break;
                }
            }
            if let TokenKind::Punct(p) = t.kind {
                match p {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => depth -= 1,
                    _ => {}
                }
            }
            self.advance();
            consumed = true;
            if depth <= 0 && t.is_punct(";") {
                break;
            }
        }
        consumed.then(|| Span::new(ws, self.last_end - ws))
    }

    fn parse_program(&mut self) -> Vec<Stmt> {
        let mut stmts = Vec::new();
        while !self.at_eof() {
            self.parse_statement_into(&mut stmts);
        }
        stmts
    }

    fn parse_statement_into(&mut self, out: &mut Vec<Stmt>) {
        self.stmt_error = false;
        let stmt = self.statement_inner();
        out.push(stmt);
        if self.stmt_error {
            if let Some(span) = self.panic_skip() {
                out.push(Stmt::Error(span));
            }
            self.stmt_error = false;
        }
    }

    fn parse_statement(&mut self) -> Stmt {
        self.stmt_error = false;
        let stmt = self.statement_inner();
        if self.stmt_error {
            self.panic_skip();
            self.stmt_error = false;
        }
        stmt
    }

    fn statement_inner(&mut self) -> Stmt {
        let t = *self.tok();
        if self.depth >= MAX_DEPTH {
            self.report(
                codes::NESTING_TOO_DEEP,
                "Nesting depth exceeds the supported limit.",
                self.anchor(t),
            );
            return Stmt::Error(self.anchor(t));
        }
        self.depth += 1;
        let stmt = self.statement_dispatch(t);
        self.depth -= 1;
        stmt
    }

    fn statement_dispatch(&mut self, t: Token) -> Stmt {
        match t.kind {
            TokenKind::Punct(";") => {
                self.advance();
                Stmt::Empty(t.span)
            }
            TokenKind::Punct("{") => Stmt::Block(self.parse_block()),
            TokenKind::Punct(")") | TokenKind::Punct("]") | TokenKind::Punct("}") => {
                self.report(
                    codes::DECLARATION_OR_STATEMENT_EXPECTED,
                    "Declaration or statement expected.",
                    t.span,
                );
                self.advance();
                Stmt::Error(t.span)
            }
            TokenKind::Keyword(Kw::Var) | TokenKind::Keyword(Kw::Let)
            | TokenKind::Keyword(Kw::Const) => Stmt::Var(self.parse_var_decl()),
            TokenKind::Keyword(Kw::Function) => {
                Stmt::Func(Box::new(self.parse_function(false)))
            }
            TokenKind::Ident
                if t.text(self.src) == "async"
                    && self.nth(1).is_keyword(Kw::Function)
                    && !self.nth(1).newline_before =>
            {
                self.advance();
                Stmt::Func(Box::new(self.parse_function(true)))
            }
            TokenKind::Keyword(Kw::If) => self.parse_if(),
            TokenKind::Keyword(Kw::For) => self.parse_for(),
            TokenKind::Keyword(Kw::While) => self.parse_while(),
            TokenKind::Keyword(Kw::Do) => self.parse_do_while(),
            TokenKind::Keyword(Kw::Return) => self.parse_return(),
            TokenKind::Keyword(Kw::Try) => self.parse_try(),
            TokenKind::Keyword(Kw::Throw) => self.parse_throw(),
            TokenKind::Keyword(Kw::Switch) => self.parse_switch(),
            TokenKind::Keyword(Kw::Class) => self.parse_class_decl(),
            TokenKind::Keyword(Kw::Import) => self.parse_import(),
            TokenKind::Keyword(Kw::Export) => self.parse_export(),
            TokenKind::Keyword(Kw::Break) => {
                self.advance();
                if self.tok().kind == TokenKind::Ident && !self.tok().newline_before {
                    self.advance();
                }
                self.eat_terminator();
                Stmt::Break(Span::new(t.span.start, self.last_end - t.span.start))
            }
            TokenKind::Keyword(Kw::Continue) => {
                self.advance();
                if self.tok().kind == TokenKind::Ident && !self.tok().newline_before {
                    self.advance();
                }
                self.eat_terminator();
                Stmt::Continue(Span::new(t.span.start, self.last_end - t.span.start))
            }
            TokenKind::Keyword(Kw::Debugger) => {
                self.advance();
                self.eat_terminator();
                Stmt::Debugger(t.span)
            }
            TokenKind::Keyword(
                Kw::Else | Kw::Catch | Kw::Finally | Kw::Case | Kw::Default | Kw::Extends
                | Kw::In | Kw::Instanceof | Kw::With,
            ) => {
                self.report(
                    codes::UNEXPECTED_KEYWORD_OR_IDENTIFIER,
                    "Unexpected keyword or identifier.",
                    t.span,
                );
                self.advance();
                Stmt::Error(t.span)
            }
            TokenKind::Ident if self.nth(1).is_punct(":") => {
                let label = self.ident_of(t);
                self.advance();
                self.advance();
                let body = Box::new(self.parse_statement());
                Stmt::Labeled {
                    span: Span::new(t.span.start, self.last_end - t.span.start),
                    label,
                    body,
                }
            }
            _ => {
                let start = t.span.start;
                let expr = self.parse_expression(true);
                if !self.stmt_error {
                    self.eat_terminator();
                }
                Stmt::Expr {
                    span: Span::new(start, self.last_end.max(start) - start),
                    expr,
                }
            }
        }
    }

    /// Statement terminator with automatic semicolon insertion: an explicit
    /// `;`, a closing `}`, end of input, or a line break all end the
    /// statement; anything else on the same line is an error.
    fn eat_terminator(&mut self) {
        if self.at_punct(";") {
            self.advance();
            return;
        }
        if self.at_eof() || self.at_punct("}") {
            return;
        }
        if self.tok().newline_before {
            return;
        }
        let t = *self.tok();
        match t.kind {
            TokenKind::Ident | TokenKind::Keyword(_) => self.report(
                codes::UNEXPECTED_KEYWORD_OR_IDENTIFIER,
                "Unexpected keyword or identifier.",
                t.span,
            ),
            _ => self.report_expected(";"),
        }
    }

    fn parse_block(&mut self) -> Block {
        let t = *self.tok();
        let start = t.span.start;
        if !self.expect_punct("{") {
            return Block {
                span: Span::empty(start),
                stmts: Vec::new(),
            };
        }
        let mut stmts = Vec::new();
        loop {
            if self.at_punct("}") {
                self.advance();
                break;
            }
            if self.at_eof() {
                self.report_expected("}");
                break;
            }
            self.parse_statement_into(&mut stmts);
        }
        Block {
            span: Span::new(start, self.last_end - start),
            stmts,
        }
    }

    /// Consumes a balanced `{...}` region without analysis or diagnostics.
    fn parse_opaque_braces(&mut self) -> Span {
        let t = *self.tok();
        if !self.expect_punct("{") {
            return Span::empty(t.span.start);
        }
        let start = t.span.start;
        let mut depth = 1u32;
        while depth > 0 {
            if self.at_eof() {
                self.report_expected("}");
                break;
            }
            let t = *self.tok();
            if let TokenKind::Punct(p) = t.kind {
                match p {
                    "{" => depth += 1,
                    "}" => depth -= 1,
                    _ => {}
                }
            }
            self.advance();
        }
        Span::new(start, self.last_end - start)
    }

    fn parse_var_decl(&mut self) -> VarDecl {
        let kw = self.advance();
        let kind = match kw.kind {
            TokenKind::Keyword(Kw::Var) => DeclKind::Var,
            TokenKind::Keyword(Kw::Let) => DeclKind::Let,
            _ => DeclKind::Const,
        };
        let first = self.parse_binding_pattern();
        let mut decl = self.var_decl_tail(kind, kw.span.start, first);
        if !self.stmt_error {
            self.eat_terminator();
        }
        decl.span = Span::new(kw.span.start, self.last_end - kw.span.start);
        decl
    }

    fn var_decl_tail(&mut self, kind: DeclKind, start: usize, first: Pat) -> VarDecl {
        let mut decls = Vec::new();
        let mut pat = first;
        loop {
            if self.stmt_error {
                decls.push(Declarator { pat, init: None });
                break;
            }
            let init = if self.at_punct("=") {
                self.advance();
                Some(self.parse_assign(true))
            } else {
                None
            };
            decls.push(Declarator { pat, init });
            if self.stmt_error || !self.at_punct(",") {
                break;
            }
            self.advance();
            pat = self.parse_binding_pattern();
        }
        VarDecl {
            span: Span::new(start, self.last_end.max(start) - start),
            kind,
            decls,
        }
    }

    fn parse_binding_pattern(&mut self) -> Pat {
        let t = *self.tok();
        if self.depth >= MAX_DEPTH {
            self.report(
                codes::NESTING_TOO_DEEP,
                "Nesting depth exceeds the supported limit.",
                self.anchor(t),
            );
            if !self.at_eof() {
                self.advance();
            }
            return Pat::Ident(Ident {
                name: String::new(),
                span: self.anchor(t),
            });
        }
        self.depth += 1;
        let pat = self.binding_pattern_inner(t);
        self.depth -= 1;
        pat
    }

    fn binding_pattern_inner(&mut self, t: Token) -> Pat {
        match t.kind {
            TokenKind::Ident => {
                self.advance();
                Pat::Ident(self.ident_of(t))
            }
            TokenKind::Punct("{") => {
                self.advance();
                let mut props = Vec::new();
                loop {
                    if self.at_punct("}") {
                        self.advance();
                        break;
                    }
                    if self.at_eof() || self.stmt_error {
                        self.report_expected("}");
                        break;
                    }
                    if self.at_punct(",") {
                        self.advance();
                        continue;
                    }
                    if self.at_punct("...") {
                        self.advance();
                        let arg = self.parse_binding_pattern();
                        if let Pat::Ident(i) = arg {
                            props.push(ObjectPatProp {
                                key: PropKey::Ident(i),
                                value: None,
                                default: None,
                            });
                        }
                        continue;
                    }
                    let kt = *self.tok();
                    let key = match kt.kind {
                        TokenKind::Ident | TokenKind::Keyword(_) => {
                            self.advance();
                            PropKey::Ident(self.ident_of(kt))
                        }
                        TokenKind::Str => {
                            self.advance();
                            PropKey::Str(kt.span)
                        }
                        TokenKind::Num => {
                            self.advance();
                            PropKey::Num(kt.span)
                        }
                        TokenKind::Punct("[") => {
                            self.advance();
                            let e = self.parse_assign(true);
                            self.expect_punct("]");
                            PropKey::Computed(Box::new(e))
                        }
                        _ => {
                            self.report(
                                codes::IDENTIFIER_EXPECTED,
                                "Identifier expected.",
                                self.anchor(kt),
                            );
                            break;
                        }
                    };
                    let value = if self.at_punct(":") {
                        self.advance();
                        Some(self.parse_binding_pattern())
                    } else {
                        None
                    };
                    let default = if self.at_punct("=") {
                        self.advance();
                        Some(Box::new(self.parse_assign(true)))
                    } else {
                        None
                    };
                    props.push(ObjectPatProp {
                        key,
                        value,
                        default,
                    });
                }
                Pat::Object {
                    span: Span::new(t.span.start, self.last_end - t.span.start),
                    props,
                }
            }
            TokenKind::Punct("[") => {
                self.advance();
                let mut elems = Vec::new();
                loop {
                    if self.at_punct("]") {
                        self.advance();
                        break;
                    }
                    if self.at_eof() || self.stmt_error {
                        self.report_expected("]");
                        break;
                    }
                    if self.at_punct(",") {
                        self.advance();
                        elems.push(None);
                        continue;
                    }
                    let elem = if self.at_punct("...") {
                        let rs = self.advance().span;
                        let arg = self.parse_binding_pattern();
                        Pat::Rest {
                            span: Span::new(rs.start, self.last_end - rs.start),
                            arg: Box::new(arg),
                        }
                    } else {
                        let p = self.parse_binding_pattern();
                        if self.at_punct("=") {
                            self.advance();
                            let d = self.parse_assign(true);
                            Pat::Assign {
                                span: Span::new(p.span().start, self.last_end - p.span().start),
                                pat: Box::new(p),
                                default: Box::new(d),
                            }
                        } else {
                            p
                        }
                    };
                    elems.push(Some(elem));
                    if self.at_punct(",") {
                        self.advance();
                    }
                }
                Pat::Array {
                    span: Span::new(t.span.start, self.last_end - t.span.start),
                    elems,
                }
            }
            _ => {
                self.report(
                    codes::IDENTIFIER_EXPECTED,
                    "Identifier expected.",
                    self.anchor(t),
                );
                Pat::Ident(Ident {
                    name: String::new(),
                    span: Span::empty(t.span.start),
                })
            }
        }
    }

    fn parse_params(&mut self) -> Vec<Pat> {
        let mut params = Vec::new();
        if !self.expect_punct("(") {
            return params;
        }
        loop {
            if self.at_punct(")") {
                self.advance();
                break;
            }
            if self.at_eof() || self.stmt_error {
                self.report_expected(")");
                break;
            }
            let param = if self.at_punct("...") {
                let rs = self.advance().span;
                let arg = self.parse_binding_pattern();
                Pat::Rest {
                    span: Span::new(rs.start, self.last_end - rs.start),
                    arg: Box::new(arg),
                }
            } else {
                let p = self.parse_binding_pattern();
                if self.at_punct("=") {
                    self.advance();
                    let d = self.parse_assign(true);
                    Pat::Assign {
                        span: Span::new(p.span().start, self.last_end - p.span().start),
                        pat: Box::new(p),
                        default: Box::new(d),
                    }
                } else {
                    p
                }
            };
            params.push(param);
            if self.at_punct(",") {
                self.advance();
            } else if !self.at_punct(")") {
                self.report_expected(")");
                break;
            }
        }
        params
    }

    /// Parses a function declaration/expression starting at `function`.
    fn parse_function(&mut self, is_async: bool) -> Func {
        let kw = self.advance();
        let is_generator = if self.at_punct("*") {
            self.advance();
            true
        } else {
            false
        };
        let name = if self.tok().kind == TokenKind::Ident {
            let t = self.advance();
            Some(self.ident_of(t))
        } else {
            None
        };
        let params = self.parse_params();
        let body = if self.stmt_error {
            FuncBody::Opaque(Span::empty(self.last_end))
        } else if is_generator {
            FuncBody::Opaque(self.parse_opaque_braces())
        } else {
            FuncBody::Block(self.parse_block())
        };
        Func {
            span: Span::new(kw.span.start, self.last_end - kw.span.start),
            name,
            params,
            body,
            is_async,
            is_generator,
            is_arrow: false,
        }
    }

    fn parse_if(&mut self) -> Stmt {
        let kw = self.advance();
        let start = kw.span.start;
        self.expect_punct("(");
        if self.stmt_error {
            return self.partial_if(start, Expr::Error(Span::empty(self.last_end)));
        }
        let cond = self.parse_expression(true);
        if self.stmt_error || !self.expect_punct(")") {
            return self.partial_if(start, cond);
        }
        let then = Box::new(self.parse_statement());
        let alt = if self.at_kw(Kw::Else) {
            self.advance();
            Some(Box::new(self.parse_statement()))
        } else {
            None
        };
        Stmt::If {
            span: Span::new(start, self.last_end - start),
            cond,
            then,
            alt,
        }
    }

    fn partial_if(&mut self, start: usize, cond: Expr) -> Stmt {
        Stmt::If {
            span: Span::new(start, self.last_end.max(start) - start),
            cond,
            then: Box::new(Stmt::Empty(Span::empty(self.last_end))),
            alt: None,
        }
    }

    fn parse_while(&mut self) -> Stmt {
        let kw = self.advance();
        let start = kw.span.start;
        self.expect_punct("(");
        let cond = if self.stmt_error {
            Expr::Error(Span::empty(self.last_end))
        } else {
            self.parse_expression(true)
        };
        if !self.stmt_error {
            self.expect_punct(")");
        }
        let body = if self.stmt_error {
            Box::new(Stmt::Empty(Span::empty(self.last_end)))
        } else {
            Box::new(self.parse_statement())
        };
        Stmt::While {
            span: Span::new(start, self.last_end - start),
            cond,
            body,
        }
    }

    fn parse_do_while(&mut self) -> Stmt {
        let kw = self.advance();
        let start = kw.span.start;
        let body = Box::new(self.parse_statement());
        let cond = if self.at_kw(Kw::While) {
            self.advance();
            self.expect_punct("(");
            let c = if self.stmt_error {
                Expr::Error(Span::empty(self.last_end))
            } else {
                self.parse_expression(true)
            };
            if !self.stmt_error {
                self.expect_punct(")");
                if self.at_punct(";") {
                    self.advance();
                }
            }
            c
        } else {
            self.report_expected("while");
            Expr::Error(Span::empty(self.last_end))
        };
        Stmt::DoWhile {
            span: Span::new(start, self.last_end - start),
            body,
            cond,
        }
    }

    fn parse_return(&mut self) -> Stmt {
        let kw = self.advance();
        let arg = if self.at_punct(";")
            || self.at_punct("}")
            || self.at_eof()
            || self.tok().newline_before
        {
            None
        } else {
            Some(self.parse_expression(true))
        };
        if !self.stmt_error {
            self.eat_terminator();
        }
        Stmt::Return {
            span: Span::new(kw.span.start, self.last_end - kw.span.start),
            arg,
        }
    }

    fn parse_throw(&mut self) -> Stmt {
        let kw = self.advance();
        let arg = self.parse_expression(true);
        if !self.stmt_error {
            self.eat_terminator();
        }
        Stmt::Throw {
            span: Span::new(kw.span.start, self.last_end - kw.span.start),
            arg,
        }
    }

    fn parse_try(&mut self) -> Stmt {
        let kw = self.advance();
        let start = kw.span.start;
        let block = self.parse_block();
        let catch = if self.at_kw(Kw::Catch) {
            self.advance();
            let param = if self.at_punct("(") {
                self.advance();
                let p = self.parse_binding_pattern();
                self.expect_punct(")");
                Some(p)
            } else {
                None
            };
            let body = if self.stmt_error {
                Block {
                    span: Span::empty(self.last_end),
                    stmts: Vec::new(),
                }
            } else {
                self.parse_block()
            };
            Some((param, body))
        } else {
            None
        };
        let finally = if self.at_kw(Kw::Finally) {
            self.advance();
            Some(self.parse_block())
        } else {
            None
        };
        if catch.is_none() && finally.is_none() && !self.stmt_error {
            self.report_expected("catch");
        }
        Stmt::Try {
            span: Span::new(start, self.last_end - start),
            block,
            catch,
            finally,
        }
    }

    fn parse_switch(&mut self) -> Stmt {
        let kw = self.advance();
        let start = kw.span.start;
        self.expect_punct("(");
        let disc = if self.stmt_error {
            Expr::Error(Span::empty(self.last_end))
        } else {
            self.parse_expression(true)
        };
        if !self.stmt_error {
            self.expect_punct(")");
        }
        let mut cases = Vec::new();
        if !self.stmt_error && self.expect_punct("{") {
            loop {
                if self.at_punct("}") {
                    self.advance();
                    break;
                }
                if self.at_eof() {
                    self.report_expected("}");
                    break;
                }
                if self.at_kw(Kw::Case) {
                    self.advance();
                    let test = self.parse_expression(true);
                    if !self.stmt_error {
                        self.expect_punct(":");
                    }
                    self.stmt_error = false;
                    cases.push(SwitchCase {
                        test: Some(test),
                        stmts: Vec::new(),
                    });
                } else if self.at_kw(Kw::Default) {
                    self.advance();
                    self.expect_punct(":");
                    self.stmt_error = false;
                    cases.push(SwitchCase {
                        test: None,
                        stmts: Vec::new(),
                    });
                } else if let Some(case) = cases.last_mut() {
                    let mut stmts = std::mem::take(&mut case.stmts);
                    self.parse_statement_into(&mut stmts);
                    case.stmts = stmts;
                } else {
                    self.report_expected("case");
                    self.panic_skip();
                    self.stmt_error = false;
                }
            }
        }
        Stmt::Switch {
            span: Span::new(start, self.last_end - start),
            disc,
            cases,
        }
    }

    fn parse_class_decl(&mut self) -> Stmt {
        let kw = self.advance();
        let start = kw.span.start;
        let name = if self.tok().kind == TokenKind::Ident {
            let t = self.advance();
            Some(self.ident_of(t))
        } else {
            None
        };
        if self.at_kw(Kw::Extends) {
            self.advance();
            if !self.at_punct("{") {
                let base = self.parse_primary();
                let _ = self.parse_call_member(base, true);
            }
        }
        let body_span = if self.stmt_error {
            Span::empty(self.last_end)
        } else {
            self.parse_opaque_braces()
        };
        Stmt::Class {
            span: Span::new(start, self.last_end - start),
            name,
            body_span,
        }
    }

    fn parse_import(&mut self) -> Stmt {
        let kw = self.advance();
        let start = kw.span.start;
        let mut bindings = Vec::new();
        if self.tok().kind == TokenKind::Str {
            self.advance();
        } else {
            if self.tok().kind == TokenKind::Ident {
                let t = self.advance();
                bindings.push(self.ident_of(t));
                if self.at_punct(",") {
                    self.advance();
                }
            }
            if self.at_punct("{") {
                self.advance();
                loop {
                    if self.at_punct("}") {
                        self.advance();
                        break;
                    }
                    if self.at_eof() || self.tok().newline_before && self.at_punct("}") {
                        break;
                    }
                    match self.tok().kind {
                        TokenKind::Ident | TokenKind::Keyword(_) | TokenKind::Str => {
                            let t = self.advance();
                            let mut name = self.ident_of(t);
                            if self.at_ident_text("as") {
                                self.advance();
                                if self.tok().kind == TokenKind::Ident {
                                    let t = self.advance();
                                    name = self.ident_of(t);
                                }
                            }
                            if t.kind != TokenKind::Str {
                                bindings.push(name);
                            } else if self.tok().kind == TokenKind::Ident {
                                // "str" as name
                                let t = self.advance();
                                bindings.push(self.ident_of(t));
                            }
                        }
                        TokenKind::Punct(",") => {
                            self.advance();
                        }
                        _ => break,
                    }
                }
            } else if self.at_punct("*") {
                self.advance();
                if self.at_ident_text("as") {
                    self.advance();
                    if self.tok().kind == TokenKind::Ident {
                        let t = self.advance();
                        bindings.push(self.ident_of(t));
                    }
                }
            }
            if self.at_ident_text("from") {
                self.advance();
                if self.tok().kind == TokenKind::Str {
                    self.advance();
                }
            }
        }
        if self.at_punct(";") {
            self.advance();
        }
        Stmt::Import {
            span: Span::new(start, self.last_end - start),
            bindings,
        }
    }

    fn parse_export(&mut self) -> Stmt {
        let kw = self.advance();
        let start = kw.span.start;
        if self.at_kw(Kw::Default) {
            self.advance();
        }
        let inner = if self.at_punct(";") || self.at_eof() || self.tok().newline_before {
            if self.at_punct(";") {
                self.advance();
            }
            None
        } else {
            Some(Box::new(self.parse_statement()))
        };
        Stmt::Export {
            span: Span::new(start, self.last_end - start),
            inner,
        }
    }

    fn parse_for(&mut self) -> Stmt {
        let kw = self.advance();
        let start = kw.span.start;
        if !self.expect_punct("(") {
            return Stmt::For {
                span: Span::new(start, self.last_end - start),
                init: None,
                cond: None,
                update: None,
                body: Box::new(Stmt::Empty(Span::empty(self.last_end))),
            };
        }
        let mut init = None;
        if self.at_punct(";") {
            self.advance();
        } else if self.at_kw(Kw::Var) || self.at_kw(Kw::Let) || self.at_kw(Kw::Const) {
            let kwt = self.advance();
            let kind = match kwt.kind {
                TokenKind::Keyword(Kw::Var) => DeclKind::Var,
                TokenKind::Keyword(Kw::Let) => DeclKind::Let,
                _ => DeclKind::Const,
            };
            let pat = self.parse_binding_pattern();
            if !self.stmt_error && (self.at_kw(Kw::In) || self.at_ident_text("of")) {
                return self.for_in_of_tail(start, ForTarget::Decl(kind, pat));
            }
            let decl = self.var_decl_tail(kind, kwt.span.start, pat);
            init = Some(ForInit::Decl(decl));
            if !self.stmt_error {
                self.expect_punct(";");
            }
        } else {
            let e = self.parse_expression(false);
            if !self.stmt_error && (self.at_kw(Kw::In) || self.at_ident_text("of")) {
                return self.for_in_of_tail(start, ForTarget::Expr(e));
            }
            init = Some(ForInit::Expr(e));
            if !self.stmt_error {
                self.expect_punct(";");
            }
        }
        let mut cond = None;
        let mut update = None;
        if !self.stmt_error {
            if !self.at_punct(";") {
                cond = Some(self.parse_expression(true));
            }
            if !self.stmt_error {
                self.expect_punct(";");
            }
        }
        if !self.stmt_error {
            if !self.at_punct(")") {
                update = Some(self.parse_expression(true));
            }
            if !self.stmt_error {
                self.expect_punct(")");
            }
        }
        let body = if self.stmt_error {
            Box::new(Stmt::Empty(Span::empty(self.last_end)))
        } else {
            Box::new(self.parse_statement())
        };
        Stmt::For {
            span: Span::new(start, self.last_end - start),
            init,
            cond,
            update,
            body,
        }
    }

    fn for_in_of_tail(&mut self, start: usize, left: ForTarget) -> Stmt {
        let is_of = self.at_ident_text("of");
        self.advance();
        let right = self.parse_assign(true);
        if !self.stmt_error {
            self.expect_punct(")");
        }
        let body = if self.stmt_error {
            Box::new(Stmt::Empty(Span::empty(self.last_end)))
        } else {
            Box::new(self.parse_statement())
        };
        Stmt::ForInOf {
            span: Span::new(start, self.last_end - start),
            is_of,
            left,
            right,
            body,
        }
    }

    // ---- expressions ----

    fn parse_expression(&mut self, allow_in: bool) -> Expr {
        let first = self.parse_assign(allow_in);
        if self.stmt_error || !self.at_punct(",") {
            return first;
        }
        let start = first.span().start;
        let mut exprs = vec![first];
        while self.at_punct(",") && !self.stmt_error {
            self.advance();
            exprs.push(self.parse_assign(allow_in));
        }
        Expr::Seq {
            span: Span::new(start, self.last_end - start),
            exprs,
        }
    }

    fn parse_assign(&mut self, allow_in: bool) -> Expr {
        if self.depth >= MAX_DEPTH {
            let t = *self.tok();
            self.report(
                codes::NESTING_TOO_DEEP,
                "Nesting depth exceeds the supported limit.",
                self.anchor(t),
            );
            if !self.at_eof() {
                self.advance();
            }
            return Expr::Error(self.anchor(t));
        }
        self.depth += 1;
        let e = self.assign_inner(allow_in);
        self.depth -= 1;
        e
    }

    fn assign_inner(&mut self, allow_in: bool) -> Expr {
        let target = self.parse_conditional(allow_in);
        if self.stmt_error {
            return target;
        }
        const ASSIGN_OPS: &[&str] = &[
            "=", "+=", "-=", "*=", "/=", "%=", "**=", "<<=", ">>=", ">>>=", "&=", "|=", "^=",
            "&&=", "||=", "??=",
        ];
        if let TokenKind::Punct(p) = self.tok().kind {
            if ASSIGN_OPS.contains(&p) {
                self.advance();
                let value = self.parse_assign(allow_in);
                let start = target.span().start;
                return Expr::Assign {
                    span: Span::new(start, self.last_end - start),
                    op: p,
                    target: Box::new(target),
                    value: Box::new(value),
                };
            }
        }
        target
    }

    fn parse_conditional(&mut self, allow_in: bool) -> Expr {
        let test = self.parse_binary(1, allow_in);
        if self.stmt_error || !self.at_punct("?") {
            return test;
        }
        self.advance();
        let cons = self.parse_assign(true);
        if !self.stmt_error {
            self.expect_punct(":");
        }
        let alt = if self.stmt_error {
            Expr::Error(Span::empty(self.last_end))
        } else {
            self.parse_assign(allow_in)
        };
        let start = test.span().start;
        Expr::Cond {
            span: Span::new(start, self.last_end - start),
            test: Box::new(test),
            cons: Box::new(cons),
            alt: Box::new(alt),
        }
    }

    fn binary_op(&self, allow_in: bool) -> Option<(&'static str, u8, bool)> {
        let (op, bp): (&'static str, u8) = match self.tok().kind {
            TokenKind::Keyword(Kw::In) if allow_in => ("in", 7),
            TokenKind::Keyword(Kw::Instanceof) => ("instanceof", 7),
            TokenKind::Punct(p) => match p {
                "??" | "||" => (p, 1),
                "&&" => (p, 2),
                "|" => (p, 3),
                "^" => (p, 4),
                "&" => (p, 5),
                "==" | "!=" | "===" | "!==" => (p, 6),
                "<" | ">" | "<=" | ">=" => (p, 7),
                "<<" | ">>" | ">>>" => (p, 8),
                "+" | "-" => (p, 9),
                "*" | "/" | "%" => (p, 10),
                "**" => (p, 11),
                _ => return None,
            },
            _ => return None,
        };
        Some((op, bp, op == "**"))
    }

    fn parse_binary(&mut self, min_bp: u8, allow_in: bool) -> Expr {
        let mut left = self.parse_unary();
        loop {
            if self.stmt_error {
                return left;
            }
            let Some((op, bp, right_assoc)) = self.binary_op(allow_in) else {
                return left;
            };
            if bp < min_bp {
                return left;
            }
            self.advance();
            let next_bp = if right_assoc { bp } else { bp + 1 };
            let right = self.parse_binary(next_bp, allow_in);
            let start = left.span().start;
            left = Expr::Binary {
                span: Span::new(start, self.last_end - start),
                op,
                left: Box::new(left),
                right: Box::new(right),
            };
        }
    }

    fn parse_unary(&mut self) -> Expr {
        let t = *self.tok();
        let prefix_op: Option<&'static str> = match t.kind {
            TokenKind::Punct(p @ ("!" | "~" | "+" | "-" | "++" | "--")) => Some(p),
            TokenKind::Keyword(Kw::Typeof) => Some("typeof"),
            TokenKind::Keyword(Kw::Void) => Some("void"),
            TokenKind::Keyword(Kw::Delete) => Some("delete"),
            _ => None,
        };
        if let Some(op) = prefix_op {
            self.advance();
            let arg = self.parse_unary();
            return Expr::Unary {
                span: Span::new(t.span.start, self.last_end - t.span.start),
                op,
                arg: Box::new(arg),
                prefix: true,
            };
        }
        if t.is_keyword(Kw::Await) {
            self.advance();
            let arg = self.parse_unary();
            return Expr::Await {
                span: Span::new(t.span.start, self.last_end - t.span.start),
                kw_span: t.span,
                arg: Box::new(arg),
            };
        }
        if t.is_keyword(Kw::Yield) {
            self.advance();
            if self.at_punct("*") {
                self.advance();
            }
            let arg = if self.at_punct(";")
                || self.at_punct(")")
                || self.at_punct("]")
                || self.at_punct("}")
                || self.at_punct(",")
                || self.at_punct(":")
                || self.at_eof()
                || self.tok().newline_before
            {
                None
            } else {
                Some(Box::new(self.parse_assign(true)))
            };
            return Expr::Yield {
                span: Span::new(t.span.start, self.last_end - t.span.start),
                arg,
            };
        }
        let base = self.parse_primary();
        let mut e = self.parse_call_member(base, true);
        if !self.stmt_error
            && (self.at_punct("++") || self.at_punct("--"))
            && !self.tok().newline_before
        {
            let opt = self.advance();
            let op: &'static str = if opt.is_punct("++") { "++" } else { "--" };
            let start = e.span().start;
            e = Expr::Unary {
                span: Span::new(start, self.last_end - start),
                op,
                arg: Box::new(e),
                prefix: false,
            };
        }
        e
    }

    fn parse_call_member(&mut self, mut base: Expr, allow_call: bool) -> Expr {
        loop {
            if self.stmt_error {
                return base;
            }
            let start = base.span().start;
            let t = *self.tok();
            match t.kind {
                TokenKind::Punct(".") | TokenKind::Punct("?.") => {
                    let optional = t.is_punct("?.");
                    // a?.() is an optional call
                    if optional && self.nth(1).is_punct("(") && allow_call {
                        self.advance();
                        let args = self.parse_args();
                        base = Expr::Call {
                            span: Span::new(start, self.last_end - start),
                            callee: Box::new(base),
                            args,
                        };
                        continue;
                    }
                    self.advance();
                    let pt = *self.tok();
                    match pt.kind {
                        TokenKind::Ident | TokenKind::Keyword(_) => {
                            self.advance();
                            base = Expr::Member {
                                span: Span::new(start, self.last_end - start),
                                object: Box::new(base),
                                prop: MemberProp::Ident(self.ident_of(pt)),
                                optional,
                            };
                        }
                        TokenKind::Punct("[") if optional => {
                            self.advance();
                            let e = self.parse_expression(true);
                            self.expect_punct("]");
                            base = Expr::Member {
                                span: Span::new(start, self.last_end - start),
                                object: Box::new(base),
                                prop: MemberProp::Computed(Box::new(e)),
                                optional,
                            };
                        }
                        _ => {
                            self.report(
                                codes::IDENTIFIER_EXPECTED,
                                "Identifier expected.",
                                self.anchor(pt),
                            );
                            return base;
                        }
                    }
                }
                TokenKind::Punct("[") => {
                    self.advance();
                    let e = self.parse_expression(true);
                    self.expect_punct("]");
                    base = Expr::Member {
                        span: Span::new(start, self.last_end - start),
                        object: Box::new(base),
                        prop: MemberProp::Computed(Box::new(e)),
                        optional: false,
                    };
                }
                TokenKind::Punct("(") if allow_call => {
                    let args = self.parse_args();
                    base = Expr::Call {
                        span: Span::new(start, self.last_end - start),
                        callee: Box::new(base),
                        args,
                    };
                }
                TokenKind::Template => {
                    self.advance();
                    base = Expr::TaggedTemplate {
                        span: Span::new(start, self.last_end - start),
                        tag: Box::new(base),
                        quasi: t.span,
                    };
                }
                _ => return base,
            }
        }
    }

    fn parse_args(&mut self) -> Vec<Expr> {
        self.advance(); // (
        let mut args = Vec::new();
        loop {
            if self.at_punct(")") {
                self.advance();
                break;
            }
            if self.at_eof() || self.stmt_error {
                self.report_expected(")");
                break;
            }
            if self.at_punct(",") {
                self.advance();
                continue;
            }
            let arg = if self.at_punct("...") {
                let rs = self.advance().span;
                let inner = self.parse_assign(true);
                Expr::Spread {
                    span: Span::new(rs.start, self.last_end - rs.start),
                    arg: Box::new(inner),
                }
            } else {
                self.parse_assign(true)
            };
            args.push(arg);
            if self.at_punct(",") {
                self.advance();
            } else if !self.at_punct(")") {
                self.report_expected(")");
                break;
            }
        }
        args
    }

    /// Index (into `sig`) of the token after the close paren matching the
    /// open paren at `self.pos + offset`, or `None` if unmatched.
    fn after_matching_paren(&self, offset: usize) -> Option<usize> {
        let mut depth = 0i32;
        let mut i = self.pos + offset;
        while i < self.sig.len() {
            let t = &self.tokens[self.sig[i]];
            match t.kind {
                TokenKind::Punct("(") => depth += 1,
                TokenKind::Punct(")") => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(i + 1);
                    }
                }
                TokenKind::Eof => return None,
                _ => {}
            }
            i += 1;
        }
        None
    }

    fn sig_tok(&self, i: usize) -> &Token {
        &self.tokens[self.sig[i.min(self.sig.len() - 1)]]
    }

    fn parse_arrow(&mut self, is_async: bool) -> Expr {
        let start = self.tok().span.start;
        let params = if self.at_punct("(") {
            self.parse_params()
        } else {
            let t = self.advance();
            vec![Pat::Ident(self.ident_of(t))]
        };
        self.expect_punct("=>");
        let body = if self.stmt_error {
            FuncBody::Expr(Box::new(Expr::Error(Span::empty(self.last_end))))
        } else if self.at_punct("{") {
            FuncBody::Block(self.parse_block())
        } else {
            FuncBody::Expr(Box::new(self.parse_assign(true)))
        };
        Expr::Func(Box::new(Func {
            span: Span::new(start, self.last_end - start),
            name: None,
            params,
            body,
            is_async,
            is_generator: false,
            is_arrow: true,
        }))
    }

    fn parse_primary(&mut self) -> Expr {
        let t = *self.tok();
        if self.depth >= MAX_DEPTH {
            self.report(
                codes::NESTING_TOO_DEEP,
                "Nesting depth exceeds the supported limit.",
                self.anchor(t),
            );
            if !self.at_eof() {
                self.advance();
            }
            return Expr::Error(self.anchor(t));
        }
        match t.kind {
            TokenKind::Ident => {
                let text = t.text(self.src);
                if text == "async" && !self.nth(1).newline_before {
                    if self.nth(1).is_keyword(Kw::Function) {
                        self.advance();
                        return Expr::Func(Box::new(self.parse_function(true)));
                    }
                    if self.nth(1).kind == TokenKind::Ident && self.nth(2).is_punct("=>") {
                        self.advance();
                        return self.parse_arrow(true);
                    }
                    if self.nth(1).is_punct("(") {
                        if let Some(after) = self.after_matching_paren(1) {
                            if self.sig_tok(after).is_punct("=>") {
                                self.advance();
                                return self.parse_arrow(true);
                            }
                        }
                    }
                }
                if self.nth(1).is_punct("=>") && !self.nth(1).newline_before {
                    return self.parse_arrow(false);
                }
                self.advance();
                Expr::Ident(self.ident_of(t))
            }
            TokenKind::Num => {
                self.advance();
                Expr::Num(t.span)
            }
            TokenKind::Str => {
                self.advance();
                Expr::Str(t.span)
            }
            TokenKind::Template => {
                self.advance();
                Expr::Template(t.span)
            }
            TokenKind::Regex => {
                self.advance();
                Expr::Regex(t.span)
            }
            TokenKind::Keyword(Kw::True) | TokenKind::Keyword(Kw::False) => {
                self.advance();
                Expr::Bool(t.span)
            }
            TokenKind::Keyword(Kw::Null) => {
                self.advance();
                Expr::Null(t.span)
            }
            TokenKind::Keyword(Kw::This) => {
                self.advance();
                Expr::This(t.span)
            }
            TokenKind::Keyword(Kw::Super) => {
                self.advance();
                Expr::Super(t.span)
            }
            TokenKind::Keyword(Kw::Function) => Expr::Func(Box::new(self.parse_function(false))),
            TokenKind::Keyword(Kw::Class) => {
                let kw = self.advance();
                let name = if self.tok().kind == TokenKind::Ident {
                    let nt = self.advance();
                    Some(self.ident_of(nt))
                } else {
                    None
                };
                if self.at_kw(Kw::Extends) {
                    self.advance();
                    if !self.at_punct("{") {
                        let base = self.parse_primary();
                        let _ = self.parse_call_member(base, true);
                    }
                }
                let body_span = self.parse_opaque_braces();
                Expr::ClassExpr {
                    span: Span::new(kw.span.start, self.last_end - kw.span.start),
                    name,
                    body_span,
                }
            }
            TokenKind::Keyword(Kw::New) => {
                self.advance();
                // new.target
                if self.at_punct(".") {
                    self.advance();
                    if self.tok().kind == TokenKind::Ident {
                        self.advance();
                    }
                    return Expr::Error(Span::new(t.span.start, self.last_end - t.span.start));
                }
                let base = self.parse_primary();
                let callee = self.parse_member_only(base);
                let args = if self.at_punct("(") {
                    self.parse_args()
                } else {
                    Vec::new()
                };
                Expr::New {
                    span: Span::new(t.span.start, self.last_end - t.span.start),
                    callee: Box::new(callee),
                    args,
                }
            }
            TokenKind::Punct("(") => {
                if let Some(after) = self.after_matching_paren(0) {
                    if self.sig_tok(after).is_punct("=>") {
                        return self.parse_arrow(false);
                    }
                }
                self.advance();
                let inner = self.parse_expression(true);
                if !self.stmt_error {
                    self.expect_punct(")");
                }
                Expr::Paren {
                    span: Span::new(t.span.start, self.last_end - t.span.start),
                    inner: Box::new(inner),
                }
            }
            TokenKind::Punct("[") => self.parse_array_literal(),
            TokenKind::Punct("{") => self.parse_object_literal(),
            TokenKind::Error(_) => {
                self.advance();
                Expr::Error(t.span)
            }
            _ => {
                let span = self.anchor(t);
                self.report(codes::EXPRESSION_EXPECTED, "Expression expected.", span);
                Expr::Error(Span::empty(t.span.start))
            }
        }
    }

    /// Member accesses only — the callee of `new` binds parens to the
    /// constructor call, not to calls in the chain.
    fn parse_member_only(&mut self, mut base: Expr) -> Expr {
        loop {
            if self.stmt_error {
                return base;
            }
            let start = base.span().start;
            let t = *self.tok();
            match t.kind {
                TokenKind::Punct(".") => {
                    self.advance();
                    let pt = *self.tok();
                    match pt.kind {
                        TokenKind::Ident | TokenKind::Keyword(_) => {
                            self.advance();
                            base = Expr::Member {
                                span: Span::new(start, self.last_end - start),
                                object: Box::new(base),
                                prop: MemberProp::Ident(self.ident_of(pt)),
                                optional: false,
                            };
                        }
                        _ => {
                            self.report(
                                codes::IDENTIFIER_EXPECTED,
                                "Identifier expected.",
                                self.anchor(pt),
                            );
                            return base;
                        }
                    }
                }
                TokenKind::Punct("[") => {
                    self.advance();
                    let e = self.parse_expression(true);
                    self.expect_punct("]");
                    base = Expr::Member {
                        span: Span::new(start, self.last_end - start),
                        object: Box::new(base),
                        prop: MemberProp::Computed(Box::new(e)),
                        optional: false,
                    };
                }
                _ => return base,
            }
        }
    }

    fn parse_array_literal(&mut self) -> Expr {
        let open = self.advance();
        let mut elems = Vec::new();
        loop {
            if self.at_punct("]") {
                self.advance();
                break;
            }
            if self.at_eof() || self.stmt_error {
                self.report_expected("]");
                break;
            }
            if self.at_punct(",") {
                self.advance();
                continue;
            }
            let elem = if self.at_punct("...") {
                let rs = self.advance().span;
                let inner = self.parse_assign(true);
                Expr::Spread {
                    span: Span::new(rs.start, self.last_end - rs.start),
                    arg: Box::new(inner),
                }
            } else {
                self.parse_assign(true)
            };
            elems.push(elem);
            if self.at_punct(",") {
                self.advance();
            } else if !self.at_punct("]") {
                self.report_expected("]");
                break;
            }
        }
        Expr::Array {
            span: Span::new(open.span.start, self.last_end - open.span.start),
            elems,
        }
    }

    fn parse_object_literal(&mut self) -> Expr {
        let open = self.advance();
        let mut props = Vec::new();
        loop {
            if self.at_punct("}") {
                self.advance();
                break;
            }
            if self.at_eof() || self.stmt_error {
                self.report_expected("}");
                break;
            }
            if self.at_punct(",") {
                self.advance();
                continue;
            }
            if self.at_punct("...") {
                self.advance();
                let e = self.parse_assign(true);
                props.push(ObjectProp::Spread(e));
                continue;
            }
            let kt = *self.tok();
            // get/set accessors
            if kt.kind == TokenKind::Ident {
                let text = kt.text(self.src);
                if (text == "get" || text == "set") && self.accessor_key_follows() {
                    self.advance();
                    if let Some(key) = self.parse_prop_key() {
                        let func = self.parse_method_tail(kt.span.start);
                        props.push(ObjectProp::Method {
                            key,
                            func: Box::new(func),
                        });
                        self.eat_prop_separator();
                        continue;
                    }
                    break;
                }
            }
            let Some(key) = self.parse_prop_key() else {
                break;
            };
            if self.at_punct(":") {
                self.advance();
                let value = self.parse_assign(true);
                props.push(ObjectProp::KeyValue { key, value });
            } else if self.at_punct("(") {
                let func = self.parse_method_tail(kt.span.start);
                props.push(ObjectProp::Method {
                    key,
                    func: Box::new(func),
                });
            } else if self.at_punct("=") {
                self.advance();
                let default = self.parse_assign(true);
                match key {
                    PropKey::Ident(i) => props.push(ObjectProp::ShorthandDefault {
                        key: i,
                        default: Box::new(default),
                    }),
                    _ => {
                        self.report_expected(":");
                        break;
                    }
                }
            } else {
                match key {
                    PropKey::Ident(i) => {
                        if keyword_like(&i.name) {
                            self.report_expected(":");
                            break;
                        }
                        props.push(ObjectProp::Shorthand(i));
                    }
                    _ => {
                        self.report_expected(":");
                        break;
                    }
                }
            }
            self.eat_prop_separator();
        }
        Expr::Object {
            span: Span::new(open.span.start, self.last_end - open.span.start),
            props,
        }
    }

    fn accessor_key_follows(&self) -> bool {
        let n = self.nth(1);
        matches!(
            n.kind,
            TokenKind::Ident | TokenKind::Keyword(_) | TokenKind::Str | TokenKind::Num
        ) || n.is_punct("[")
    }

    fn parse_prop_key(&mut self) -> Option<PropKey> {
        let t = *self.tok();
        match t.kind {
            TokenKind::Ident | TokenKind::Keyword(_) => {
                self.advance();
                Some(PropKey::Ident(self.ident_of(t)))
            }
            TokenKind::Str => {
                self.advance();
                Some(PropKey::Str(t.span))
            }
            TokenKind::Num => {
                self.advance();
                Some(PropKey::Num(t.span))
            }
            TokenKind::Punct("[") => {
                self.advance();
                let e = self.parse_assign(true);
                self.expect_punct("]");
                Some(PropKey::Computed(Box::new(e)))
            }
            _ => {
                self.report(
                    codes::IDENTIFIER_EXPECTED,
                    "Identifier expected.",
                    self.anchor(t),
                );
                None
            }
        }
    }

    fn parse_method_tail(&mut self, start: usize) -> Func {
        let params = self.parse_params();
        let body = if self.stmt_error {
            Block {
                span: Span::empty(self.last_end),
                stmts: Vec::new(),
            }
        } else {
            self.parse_block()
        };
        Func {
            span: Span::new(start, self.last_end - start),
            name: None,
            params,
            body: FuncBody::Block(body),
            is_async: false,
            is_generator: false,
            is_arrow: false,
        }
    }

    fn eat_prop_separator(&mut self) {
        if self.at_punct(",") {
            self.advance();
        } else if !self.at_punct("}") && !self.stmt_error && !self.at_eof() {
            self.report_expected(",");
        }
    }
}

/// Shorthand property names can't be reserved words (`{if}` is an error).
fn keyword_like(name: &str) -> bool {
    crate::lexer::tokenize(name)
        .first()
        .is_some_and(|t| matches!(t.kind, TokenKind::Keyword(_)))
}
