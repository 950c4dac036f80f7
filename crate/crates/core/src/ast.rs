//! Tolerant syntax tree for the JavaScript subset.
//!
//! Every input produces a tree: unparseable token runs are wrapped in
//! `Error` nodes, and class/generator bodies are kept as opaque regions.
//! Nodes carry byte spans; the token stream (kept on [`SyntaxTree`])
//! preserves full fidelity, so reprinting the leaves reproduces the input.

use crate::lexer::Token;
use crate::source::Span;

#[derive(Debug, Clone)]
pub struct SyntaxTree {
    pub tokens: Vec<Token>,
    pub program: Vec<Stmt>,
    pub(crate) source: String,
}

impl SyntaxTree {
    /// Concatenates every leaf token (with its leading trivia) back into the
    /// original text.
    pub fn reprint(&self) -> String {
        let mut out = String::with_capacity(self.source.len());
        for t in &self.tokens {
            out.push_str(&self.source[t.full_start..t.span.end()]);
        }
        out
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeclKind {
    Var,
    Let,
    Const,
}

/// An identifier occurrence: declaration name, reference, property name...
/// which one it is depends on where it sits in the tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum Pat {
    Ident(Ident),
    Object {
        span: Span,
        props: Vec<ObjectPatProp>,
    },
    Array {
        span: Span,
        elems: Vec<Option<Pat>>,
    },
    Rest {
        span: Span,
        arg: Box<Pat>,
    },
    /// Pattern with a default value: `x = 1` in a parameter list.
    Assign {
        span: Span,
        pat: Box<Pat>,
        default: Box<Expr>,
    },
}

impl Pat {
    pub fn span(&self) -> Span {
        match self {
            Pat::Ident(i) => i.span,
            Pat::Object { span, .. }
            | Pat::Array { span, .. }
            | Pat::Rest { span, .. }
            | Pat::Assign { span, .. } => *span,
        }
    }

    /// All names this pattern binds, in source order.
    pub fn bound_names<'a>(&'a self, out: &mut Vec<&'a Ident>) {
        match self {
            Pat::Ident(i) => out.push(i),
            Pat::Object { props, .. } => {
                for p in props {
                    match &p.value {
                        Some(pat) => pat.bound_names(out),
                        None => {
                            if let PropKey::Ident(i) = &p.key {
                                out.push(i);
                            }
                        }
                    }
                }
            }
            Pat::Array { elems, .. } => {
                for e in elems.iter().flatten() {
                    e.bound_names(out);
                }
            }
            Pat::Rest { arg, .. } => arg.bound_names(out),
            Pat::Assign { pat, .. } => pat.bound_names(out),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ObjectPatProp {
    pub key: PropKey,
    /// `None` for shorthand (`{a}`) where the key itself binds.
    pub value: Option<Pat>,
    pub default: Option<Box<Expr>>,
}

#[derive(Debug, Clone)]
pub enum PropKey {
    Ident(Ident),
    Str(Span),
    Num(Span),
    Computed(Box<Expr>),
}

#[derive(Debug, Clone)]
pub struct Func {
    pub span: Span,
    pub name: Option<Ident>,
    pub params: Vec<Pat>,
    pub body: FuncBody,
    pub is_async: bool,
    pub is_generator: bool,
    pub is_arrow: bool,
}

#[derive(Debug, Clone)]
pub enum FuncBody {
    Block(Block),
    /// Arrow function expression body.
    Expr(Box<Expr>),
    /// Generator bodies are consumed without analysis.
    Opaque(Span),
}

#[derive(Debug, Clone)]
pub struct Block {
    pub span: Span,
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone)]
pub struct VarDecl {
    pub span: Span,
    pub kind: DeclKind,
    pub decls: Vec<Declarator>,
}

#[derive(Debug, Clone)]
pub struct Declarator {
    pub pat: Pat,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone)]
pub enum ForInit {
    Decl(VarDecl),
    Expr(Expr),
}

#[derive(Debug, Clone)]
pub enum ForTarget {
    Decl(DeclKind, Pat),
    Expr(Expr),
}

#[derive(Debug, Clone)]
pub struct SwitchCase {
    pub test: Option<Expr>,
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone)]
pub enum Stmt {
    Var(VarDecl),
    Expr {
        span: Span,
        expr: Expr,
    },
    If {
        span: Span,
        cond: Expr,
        then: Box<Stmt>,
        alt: Option<Box<Stmt>>,
    },
    For {
        span: Span,
        init: Option<ForInit>,
        cond: Option<Expr>,
        update: Option<Expr>,
        body: Box<Stmt>,
    },
    ForInOf {
        span: Span,
        is_of: bool,
        left: ForTarget,
        right: Expr,
        body: Box<Stmt>,
    },
    While {
        span: Span,
        cond: Expr,
        body: Box<Stmt>,
    },
    DoWhile {
        span: Span,
        body: Box<Stmt>,
        cond: Expr,
    },
    Return {
        span: Span,
        arg: Option<Expr>,
    },
    Func(Box<Func>),
    Class {
        span: Span,
        name: Option<Ident>,
        body_span: Span,
    },
    Try {
        span: Span,
        block: Block,
        catch: Option<(Option<Pat>, Block)>,
        finally: Option<Block>,
    },
    Throw {
        span: Span,
        arg: Expr,
    },
    Block(Block),
    Switch {
        span: Span,
        disc: Expr,
        cases: Vec<SwitchCase>,
    },
    Labeled {
        span: Span,
        label: Ident,
        body: Box<Stmt>,
    },
    Import {
        span: Span,
        bindings: Vec<Ident>,
    },
    Export {
        span: Span,
        inner: Option<Box<Stmt>>,
    },
    Break(Span),
    Continue(Span),
    Debugger(Span),
    Empty(Span),
    /// Token run consumed by panic-mode recovery.
    Error(Span),
}

impl Stmt {
    pub fn span(&self) -> Span {
        match self {
            Stmt::Var(d) => d.span,
            Stmt::Expr { span, .. }
            | Stmt::If { span, .. }
            | Stmt::For { span, .. }
            | Stmt::ForInOf { span, .. }
            | Stmt::While { span, .. }
            | Stmt::DoWhile { span, .. }
            | Stmt::Return { span, .. }
            | Stmt::Class { span, .. }
            | Stmt::Try { span, .. }
            | Stmt::Throw { span, .. }
            | Stmt::Switch { span, .. }
            | Stmt::Labeled { span, .. }
            | Stmt::Import { span, .. }
            | Stmt::Export { span, .. } => *span,
            Stmt::Func(f) => f.span,
            Stmt::Block(b) => b.span,
            Stmt::Break(s) | Stmt::Continue(s) | Stmt::Debugger(s) | Stmt::Empty(s)
            | Stmt::Error(s) => *s,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ObjectProp {
    /// `key: value`
    KeyValue { key: PropKey, value: Expr },
    /// `{a}` — the key is also a reference.
    Shorthand(Ident),
    /// `{a = 1}` inside patterns re-parsed as expressions.
    ShorthandDefault { key: Ident, default: Box<Expr> },
    /// `m() {}`, `get x() {}`, `set x(v) {}`
    Method { key: PropKey, func: Box<Func> },
    Spread(Expr),
}

#[derive(Debug, Clone)]
pub enum MemberProp {
    Ident(Ident),
    Computed(Box<Expr>),
}

#[derive(Debug, Clone)]
pub enum Expr {
    Ident(Ident),
    Str(Span),
    Num(Span),
    Bool(Span),
    Null(Span),
    Regex(Span),
    Template(Span),
    This(Span),
    Super(Span),
    Array {
        span: Span,
        elems: Vec<Expr>,
    },
    Object {
        span: Span,
        props: Vec<ObjectProp>,
    },
    Member {
        span: Span,
        object: Box<Expr>,
        prop: MemberProp,
        optional: bool,
    },
    Call {
        span: Span,
        callee: Box<Expr>,
        args: Vec<Expr>,
    },
    New {
        span: Span,
        callee: Box<Expr>,
        args: Vec<Expr>,
    },
    Func(Box<Func>),
    ClassExpr {
        span: Span,
        name: Option<Ident>,
        body_span: Span,
    },
    Unary {
        span: Span,
        op: &'static str,
        arg: Box<Expr>,
        prefix: bool,
    },
    Binary {
        span: Span,
        op: &'static str,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    Assign {
        span: Span,
        op: &'static str,
        target: Box<Expr>,
        value: Box<Expr>,
    },
    Cond {
        span: Span,
        test: Box<Expr>,
        cons: Box<Expr>,
        alt: Box<Expr>,
    },
    Seq {
        span: Span,
        exprs: Vec<Expr>,
    },
    Await {
        span: Span,
        kw_span: Span,
        arg: Box<Expr>,
    },
    Yield {
        span: Span,
        arg: Option<Box<Expr>>,
    },
    Spread {
        span: Span,
        arg: Box<Expr>,
    },
    TaggedTemplate {
        span: Span,
        tag: Box<Expr>,
        quasi: Span,
    },
    Paren {
        span: Span,
        inner: Box<Expr>,
    },
    /// Placeholder for unparseable expression positions.
    Error(Span),
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Ident(i) => i.span,
            Expr::Str(s) | Expr::Num(s) | Expr::Bool(s) | Expr::Null(s) | Expr::Regex(s)
            | Expr::Template(s) | Expr::This(s) | Expr::Super(s) | Expr::Error(s) => *s,
            Expr::Array { span, .. }
            | Expr::Object { span, .. }
            | Expr::Member { span, .. }
            | Expr::Call { span, .. }
            | Expr::New { span, .. }
            | Expr::ClassExpr { span, .. }
            | Expr::Unary { span, .. }
            | Expr::Binary { span, .. }
            | Expr::Assign { span, .. }
            | Expr::Cond { span, .. }
            | Expr::Seq { span, .. }
            | Expr::Await { span, .. }
            | Expr::Yield { span, .. }
            | Expr::Spread { span, .. }
            | Expr::TaggedTemplate { span, .. }
            | Expr::Paren { span, .. } => *span,
            Expr::Func(f) => f.span,
        }
    }

    /// Strips parentheses.
    pub fn unwrap_parens(&self) -> &Expr {
        let mut e = self;
        while let Expr::Paren { inner, .. } = e {
            e = inner;
        }
        e
    }
}
