//! Lexical scope construction and the symbol/reference tables the analyzer
//! resolves against.
//!
//! The binder makes one pass over the tree, creating scopes (global,
//! function, block) and declaring every bound name before any reference is
//! resolved — `var` declarations hoist to the nearest function scope, so a
//! use before its declaration line never counts as undeclared.

use std::collections::HashMap;

use crate::ambient::TypeHint;
use crate::ast::*;
use crate::source::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScopeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymbolId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScopeKind {
    Global,
    Function,
    Block,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Var,
    Let,
    Const,
    Function,
    Param,
    CatchParam,
    Class,
    ImportBinding,
}

#[derive(Debug)]
pub struct Scope {
    pub kind: ScopeKind,
    pub parent: Option<ScopeId>,
    pub symbols: HashMap<String, SymbolId>,
}

#[derive(Debug)]
pub struct Symbol {
    pub name: String,
    pub kind: SymbolKind,
    pub decl_span: Span,
    pub scope: ScopeId,
}

/// How a reference site resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    Local(SymbolId),
    Ambient,
    Unresolved,
}

/// One identifier reference with the context the fix stages need: whether
/// the name is the base of a member access, whether it is called directly,
/// and the expected-type hint when it sits in a known call signature's
/// argument position.
#[derive(Debug, Clone)]
pub struct Reference {
    pub name: String,
    pub span: Span,
    pub scope: ScopeId,
    pub resolution: Resolution,
    pub member_base: bool,
    pub direct_callee: bool,
    pub arg_hint: Option<TypeHint>,
}

#[derive(Debug, Default)]
pub struct ScopeTable {
    pub(crate) scopes: Vec<Scope>,
    pub(crate) symbols: Vec<Symbol>,
    pub(crate) refs: Vec<Reference>,
    /// Start offset of a scope-introducing construct → its scope.
    pub(crate) scope_at: HashMap<usize, ScopeId>,
}

impl ScopeTable {
    pub fn global(&self) -> ScopeId {
        ScopeId(0)
    }

    pub fn scope(&self, id: ScopeId) -> &Scope {
        &self.scopes[id.0]
    }

    pub fn scopes(&self) -> impl Iterator<Item = (ScopeId, &Scope)> {
        self.scopes.iter().enumerate().map(|(i, s)| (ScopeId(i), s))
    }

    pub fn symbol(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id.0]
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn references(&self) -> &[Reference] {
        &self.refs
    }

    /// The reference recorded at exactly this span, if any.
    pub fn reference_at(&self, span: Span) -> Option<&Reference> {
        self.refs.iter().find(|r| r.span == span)
    }

    pub fn references_of<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Reference> {
        self.refs.iter().filter(move |r| r.name == name)
    }

    /// Looks a name up through the scope chain.
    pub fn lookup(&self, mut scope: ScopeId, name: &str) -> Option<SymbolId> {
        loop {
            let s = &self.scopes[scope.0];
            if let Some(&sym) = s.symbols.get(name) {
                return Some(sym);
            }
            scope = s.parent?;
        }
    }

    /// Every distinct symbol name visible from `scope`.
    pub fn visible_names(&self, scope: ScopeId) -> Vec<&str> {
        let mut names = Vec::new();
        let mut cur = Some(scope);
        while let Some(id) = cur {
            let s = &self.scopes[id.0];
            names.extend(s.symbols.keys().map(|k| k.as_str()));
            cur = s.parent;
        }
        names.sort_unstable();
        names.dedup();
        names
    }

    pub(crate) fn scope_for(&self, start: usize) -> Option<ScopeId> {
        self.scope_at.get(&start).copied()
    }

    fn new_scope(&mut self, kind: ScopeKind, parent: Option<ScopeId>) -> ScopeId {
        let id = ScopeId(self.scopes.len());
        self.scopes.push(Scope {
            kind,
            parent,
            symbols: HashMap::new(),
        });
        id
    }

    fn declare(&mut self, scope: ScopeId, name: &str, kind: SymbolKind, span: Span) {
        if name.is_empty() {
            return;
        }
        if self.scopes[scope.0].symbols.contains_key(name) {
            return; // first declaration wins; redeclaration checking is out of scope
        }
        let id = SymbolId(self.symbols.len());
        self.symbols.push(Symbol {
            name: name.to_string(),
            kind,
            decl_span: span,
            scope,
        });
        self.scopes[scope.0].symbols.insert(name.to_string(), id);
    }

    /// Nearest enclosing function or global scope, for `var` hoisting.
    fn var_target(&self, mut scope: ScopeId) -> ScopeId {
        loop {
            let s = &self.scopes[scope.0];
            if s.kind != ScopeKind::Block {
                return scope;
            }
            match s.parent {
                Some(p) => scope = p,
                None => return scope,
            }
        }
    }
}

/// Builds the scope tree and symbol table for a program.
pub fn bind(program: &[Stmt]) -> ScopeTable {
    let mut table = ScopeTable::default();
    let global = table.new_scope(ScopeKind::Global, None);
    debug_assert_eq!(global, ScopeId(0));
    let mut binder = Binder { table: &mut table };
    for stmt in program {
        binder.stmt(stmt, global);
    }
    table
}

struct Binder<'a> {
    table: &'a mut ScopeTable,
}

impl<'a> Binder<'a> {
    fn declare_pattern(&mut self, pat: &Pat, kind: SymbolKind, scope: ScopeId) {
        let mut names = Vec::new();
        pat.bound_names(&mut names);
        for ident in names {
            let target = match kind {
                SymbolKind::Var => self.table.var_target(scope),
                _ => scope,
            };
            self.table.declare(target, &ident.name, kind, ident.span);
        }
        // defaults and computed keys hold expressions that may contain
        // functions of their own
        self.pattern_exprs(pat, scope);
    }

    fn pattern_exprs(&mut self, pat: &Pat, scope: ScopeId) {
        match pat {
            Pat::Ident(_) => {}
            Pat::Object { props, .. } => {
                for p in props {
                    if let PropKey::Computed(e) = &p.key {
                        self.expr(e, scope);
                    }
                    if let Some(v) = &p.value {
                        self.pattern_exprs(v, scope);
                    }
                    if let Some(d) = &p.default {
                        self.expr(d, scope);
                    }
                }
            }
            Pat::Array { elems, .. } => {
                for e in elems.iter().flatten() {
                    self.pattern_exprs(e, scope);
                }
            }
            Pat::Rest { arg, .. } => self.pattern_exprs(arg, scope),
            Pat::Assign { pat, default, .. } => {
                self.pattern_exprs(pat, scope);
                self.expr(default, scope);
            }
        }
    }

    fn function(&mut self, f: &Func, outer: ScopeId, name_inside: bool) {
        let fs = self.table.new_scope(ScopeKind::Function, Some(outer));
        self.table.scope_at.insert(f.span.start, fs);
        if name_inside {
            if let Some(name) = &f.name {
                self.table
                    .declare(fs, &name.name, SymbolKind::Function, name.span);
            }
        }
        for p in &f.params {
            self.declare_pattern(p, SymbolKind::Param, fs);
        }
        match &f.body {
            FuncBody::Block(b) => {
                // the body block shares the function scope
                self.table.scope_at.insert(b.span.start, fs);
                for s in &b.stmts {
                    self.stmt(s, fs);
                }
            }
            FuncBody::Expr(e) => self.expr(e, fs),
            FuncBody::Opaque(_) => {}
        }
    }

    fn block(&mut self, b: &Block, outer: ScopeId) {
        let bs = if let Some(existing) = self.table.scope_for(b.span.start) {
            existing
        } else {
            let bs = self.table.new_scope(ScopeKind::Block, Some(outer));
            self.table.scope_at.insert(b.span.start, bs);
            bs
        };
        for s in &b.stmts {
            self.stmt(s, bs);
        }
    }

    fn decl_kind(kind: DeclKind) -> SymbolKind {
        match kind {
            DeclKind::Var => SymbolKind::Var,
            DeclKind::Let => SymbolKind::Let,
            DeclKind::Const => SymbolKind::Const,
        }
    }

    fn var_decl(&mut self, d: &VarDecl, scope: ScopeId) {
        for decl in &d.decls {
            self.declare_pattern(&decl.pat, Self::decl_kind(d.kind), scope);
            if let Some(init) = &decl.init {
                self.expr(init, scope);
            }
        }
    }

    fn stmt(&mut self, stmt: &Stmt, scope: ScopeId) {
        match stmt {
            Stmt::Var(d) => self.var_decl(d, scope),
            Stmt::Expr { expr, .. } => self.expr(expr, scope),
            Stmt::Func(f) => {
                if let Some(name) = &f.name {
                    self.table
                        .declare(scope, &name.name, SymbolKind::Function, name.span);
                }
                self.function(f, scope, false);
            }
            Stmt::Block(b) => self.block(b, scope),
            Stmt::If {
                cond, then, alt, ..
            } => {
                self.expr(cond, scope);
                self.stmt(then, scope);
                if let Some(alt) = alt {
                    self.stmt(alt, scope);
                }
            }
            Stmt::For {
                span,
                init,
                cond,
                update,
                body,
            } => {
                let fs = self.table.new_scope(ScopeKind::Block, Some(scope));
                self.table.scope_at.insert(span.start, fs);
                match init {
                    Some(ForInit::Decl(d)) => self.var_decl(d, fs),
                    Some(ForInit::Expr(e)) => self.expr(e, fs),
                    None => {}
                }
                if let Some(c) = cond {
                    self.expr(c, fs);
                }
                if let Some(u) = update {
                    self.expr(u, fs);
                }
                self.stmt(body, fs);
            }
            Stmt::ForInOf {
                span,
                left,
                right,
                body,
                ..
            } => {
                let fs = self.table.new_scope(ScopeKind::Block, Some(scope));
                self.table.scope_at.insert(span.start, fs);
                match left {
                    ForTarget::Decl(kind, pat) => {
                        self.declare_pattern(pat, Self::decl_kind(*kind), fs)
                    }
                    ForTarget::Expr(e) => self.expr(e, fs),
                }
                self.expr(right, fs);
                self.stmt(body, fs);
            }
            Stmt::While { cond, body, .. } => {
                self.expr(cond, scope);
                self.stmt(body, scope);
            }
            Stmt::DoWhile { body, cond, .. } => {
                self.stmt(body, scope);
                self.expr(cond, scope);
            }
            Stmt::Return { arg, .. } => {
                if let Some(arg) = arg {
                    self.expr(arg, scope);
                }
            }
            Stmt::Class { name, .. } => {
                if let Some(name) = name {
                    self.table
                        .declare(scope, &name.name, SymbolKind::Class, name.span);
                }
            }
            Stmt::Try {
                block,
                catch,
                finally,
                ..
            } => {
                self.block(block, scope);
                if let Some((param, body)) = catch {
                    let cs = self.table.new_scope(ScopeKind::Block, Some(scope));
                    self.table.scope_at.insert(body.span.start, cs);
                    if let Some(p) = param {
                        self.declare_pattern(p, SymbolKind::CatchParam, cs);
                    }
                    for s in &body.stmts {
                        self.stmt(s, cs);
                    }
                }
                if let Some(f) = finally {
                    self.block(f, scope);
                }
            }
            Stmt::Throw { arg, .. } => self.expr(arg, scope),
            Stmt::Switch {
                span, disc, cases, ..
            } => {
                self.expr(disc, scope);
                let ss = self.table.new_scope(ScopeKind::Block, Some(scope));
                self.table.scope_at.insert(span.start, ss);
                for case in cases {
                    if let Some(test) = &case.test {
                        self.expr(test, ss);
                    }
                    for s in &case.stmts {
                        self.stmt(s, ss);
                    }
                }
            }
            Stmt::Labeled { body, .. } => self.stmt(body, scope),
            Stmt::Import { bindings, .. } => {
                for b in bindings {
                    self.table
                        .declare(scope, &b.name, SymbolKind::ImportBinding, b.span);
                }
            }
            Stmt::Export { inner, .. } => {
                if let Some(inner) = inner {
                    self.stmt(inner, scope);
                }
            }
            Stmt::Break(_)
            | Stmt::Continue(_)
            | Stmt::Debugger(_)
            | Stmt::Empty(_)
            | Stmt::Error(_) => {}
        }
    }

    fn expr(&mut self, e: &Expr, scope: ScopeId) {
        match e {
            Expr::Func(f) => self.function(f, scope, true),
            Expr::Array { elems, .. } => {
                for e in elems {
                    self.expr(e, scope);
                }
            }
            Expr::Object { props, .. } => {
                for p in props {
                    match p {
                        ObjectProp::KeyValue { key, value } => {
                            if let PropKey::Computed(k) = key {
                                self.expr(k, scope);
                            }
                            self.expr(value, scope);
                        }
                        ObjectProp::Shorthand(_) => {}
                        ObjectProp::ShorthandDefault { default, .. } => {
                            self.expr(default, scope)
                        }
                        ObjectProp::Method { key, func } => {
                            if let PropKey::Computed(k) = key {
                                self.expr(k, scope);
                            }
                            self.function(func, scope, false);
                        }
                        ObjectProp::Spread(e) => self.expr(e, scope),
                    }
                }
            }
            Expr::Member { object, prop, .. } => {
                self.expr(object, scope);
                if let MemberProp::Computed(c) = prop {
                    self.expr(c, scope);
                }
            }
            Expr::Call { callee, args, .. } | Expr::New { callee, args, .. } => {
                self.expr(callee, scope);
                for a in args {
                    self.expr(a, scope);
                }
            }
            Expr::Unary { arg, .. } => self.expr(arg, scope),
            Expr::Binary { left, right, .. } => {
                self.expr(left, scope);
                self.expr(right, scope);
            }
            Expr::Assign { target, value, .. } => {
                self.expr(target, scope);
                self.expr(value, scope);
            }
            Expr::Cond {
                test, cons, alt, ..
            } => {
                self.expr(test, scope);
                self.expr(cons, scope);
                self.expr(alt, scope);
            }
            Expr::Seq { exprs, .. } => {
                for e in exprs {
                    self.expr(e, scope);
                }
            }
            Expr::Await { arg, .. } => self.expr(arg, scope),
            Expr::Yield { arg, .. } => {
                if let Some(arg) = arg {
                    self.expr(arg, scope);
                }
            }
            Expr::Spread { arg, .. } => self.expr(arg, scope),
            Expr::TaggedTemplate { tag, .. } => self.expr(tag, scope),
            Expr::Paren { inner, .. } => self.expr(inner, scope),
            Expr::Ident(_)
            | Expr::Str(_)
            | Expr::Num(_)
            | Expr::Bool(_)
            | Expr::Null(_)
            | Expr::Regex(_)
            | Expr::Template(_)
            | Expr::This(_)
            | Expr::Super(_)
            | Expr::ClassExpr { .. }
            | Expr::Error(_) => {}
        }
    }
}
