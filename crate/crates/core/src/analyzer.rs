//! Name resolution and semantic diagnostics over the tolerant tree.
//!
//! This is the engine's "compiler": it resolves every identifier reference
//! against lexical scopes and the ambient environment, reports undeclared
//! names (with a spelling suggestion when exactly one near name exists),
//! checks property existence only on values whose type it concretely knows,
//! and enforces script-mode rules (no top-level `await`, no `import`/
//! `export`, `return` only inside functions).
//!
//! A `require("pkg")` of an unknown package is deliberately silent: the
//! result binds as unknown-typed and analysis continues, so missing
//! third-party modules never count as snippet errors.

use crate::ambient::{AmbientEnvironment, GlobalEntry, MemberEntry, TypeHint};
use crate::ast::*;
use crate::budget::{Budget, Exhausted};
use crate::codes;
use crate::parser;
use crate::scopes::{self, Resolution, ScopeId, ScopeTable, SymbolId, SymbolKind};
use crate::source::{sort_diagnostics, Diagnostic, Snippet, Span};

/// Everything one analysis run produces: diagnostics sorted by span start,
/// the tree, and the scope/reference tables.
#[derive(Debug)]
pub struct Analysis {
    pub diagnostics: Vec<Diagnostic>,
    pub tree: SyntaxTree,
    pub scopes: ScopeTable,
}

/// Checks a snippet: parse, bind, resolve. Deterministic for identical text.
pub fn check(snippet: &Snippet, env: &AmbientEnvironment) -> Analysis {
    let (tree, mut diagnostics) = parser::parse(snippet.text());
    let mut table = scopes::bind(&tree.program);
    let mut resolver = Resolver::new(env, &mut table, snippet);
    resolver.program(&tree.program);
    let semantic = resolver.diags;
    diagnostics.extend(semantic);
    sort_diagnostics(&mut diagnostics);
    Analysis {
        diagnostics,
        tree,
        scopes: table,
    }
}

/// Budgeted variant: consumes one compile and honors the deadline.
pub fn check_budgeted(
    snippet: &Snippet,
    env: &AmbientEnvironment,
    budget: &mut Budget,
) -> Result<Analysis, Exhausted> {
    budget.try_compile()?;
    Ok(check(snippet, env))
}

/// Expected type of an identifier use-site, from the signature of the call
/// it is an argument of. `Unknown` when the site is not an argument or the
/// callee has no known signature.
pub fn expected_type_at(analysis: &Analysis, use_site: Span) -> TypeHint {
    analysis
        .scopes
        .reference_at(use_site)
        .and_then(|r| r.arg_hint.clone())
        .unwrap_or(TypeHint::Unknown)
}

/// The unique in-scope or ambient name at Damerau-Levenshtein distance <= 1,
/// if exactly one exists.
pub fn name_suggestion(
    name: &str,
    scope: ScopeId,
    table: &ScopeTable,
    env: &AmbientEnvironment,
) -> Option<String> {
    let mut candidates: Vec<&str> = table.visible_names(scope);
    candidates.extend(env.global_names().iter().map(|s| s.as_str()));
    candidates.sort_unstable();
    candidates.dedup();
    let mut found: Option<&str> = None;
    for cand in candidates {
        if cand == name || !within_damerau_levenshtein_1(name, cand) {
            continue;
        }
        if found.is_some() {
            return None; // ambiguous
        }
        found = Some(cand);
    }
    found.map(str::to_string)
}

/// Damerau-Levenshtein distance <= 1: at most one insertion, deletion,
/// substitution, or adjacent transposition.
pub fn within_damerau_levenshtein_1(a: &str, b: &str) -> bool {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (short, long) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    match long.len() - short.len() {
        0 => {
            let mismatches: Vec<usize> =
                (0..a.len()).filter(|&i| a[i] != b[i]).collect();
            match mismatches.len() {
                0 | 1 => true,
                2 => {
                    let (i, j) = (mismatches[0], mismatches[1]);
                    j == i + 1 && a[i] == b[j] && a[j] == b[i]
                }
                _ => false,
            }
        }
        1 => {
            // one insertion into `short`
            let mut i = 0;
            while i < short.len() && short[i] == long[i] {
                i += 1;
            }
            short[i..] == long[i + 1..]
        }
        _ => false,
    }
}

/// Internal value lattice. Everything the engine cannot concretely know is
/// `Unknown`, and property access on `Unknown` is silent.
#[derive(Debug, Clone, PartialEq)]
enum ValueType {
    Unknown,
    Str,
    Num,
    Bool,
    StrArray,
    NumArray,
    AnyArray,
    /// Namespace of a builtin module bound via `require`.
    Module(String),
    /// Ambient global with a known member table.
    Global(String),
    Callable(Option<MemberEntry>),
}

#[derive(Default, Clone)]
struct RefCtx {
    member_base: bool,
    direct_callee: bool,
    arg_hint: Option<TypeHint>,
}

struct Resolver<'a> {
    env: &'a AmbientEnvironment,
    table: &'a mut ScopeTable,
    snippet: &'a Snippet,
    types: Vec<ValueType>,
    diags: Vec<Diagnostic>,
    /// `is_async` per enclosing function; empty means top level.
    fn_stack: Vec<bool>,
}

impl<'a> Resolver<'a> {
    fn new(env: &'a AmbientEnvironment, table: &'a mut ScopeTable, snippet: &'a Snippet) -> Self {
        let types = table
            .symbols()
            .iter()
            .map(|s| match s.kind {
                SymbolKind::Function => ValueType::Callable(None),
                _ => ValueType::Unknown,
            })
            .collect();
        Resolver {
            env,
            table,
            snippet,
            types,
            diags: Vec::new(),
            fn_stack: Vec::new(),
        }
    }

    fn diag(&mut self, code: u32, message: String, span: Span) {
        self.diags
            .push(Diagnostic::new(code, message, span, self.snippet));
    }

    fn program(&mut self, stmts: &[Stmt]) {
        let global = self.table.global();
        for s in stmts {
            self.stmt(s, global);
        }
    }

    fn scope_of(&self, start: usize, fallback: ScopeId) -> ScopeId {
        self.table.scope_for(start).unwrap_or(fallback)
    }

    fn block(&mut self, b: &Block, outer: ScopeId) {
        let scope = self.scope_of(b.span.start, outer);
        for s in &b.stmts {
            self.stmt(s, scope);
        }
    }

    fn set_symbol_type(&mut self, scope: ScopeId, pat: &Pat, ty: ValueType) {
        if let Pat::Ident(ident) = pat {
            if let Some(SymbolId(i)) = self.table.lookup(scope, &ident.name) {
                self.types[i] = ty;
            }
        }
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

    fn var_decl(&mut self, d: &VarDecl, scope: ScopeId) {
        for decl in &d.decls {
            self.pattern_exprs(&decl.pat, scope);
            if let Some(init) = &decl.init {
                let ty = self.expr(init, scope);
                self.set_symbol_type(scope, &decl.pat, ty);
            }
        }
    }

    fn stmt(&mut self, stmt: &Stmt, scope: ScopeId) {
        match stmt {
            Stmt::Var(d) => self.var_decl(d, scope),
            Stmt::Expr { expr, .. } => {
                self.expr(expr, scope);
            }
            Stmt::Func(f) => {
                self.function(f, scope);
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
                let fs = self.scope_of(span.start, scope);
                match init {
                    Some(ForInit::Decl(d)) => self.var_decl(d, fs),
                    Some(ForInit::Expr(e)) => {
                        self.expr(e, fs);
                    }
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
                let fs = self.scope_of(span.start, scope);
                match left {
                    ForTarget::Decl(_, pat) => self.pattern_exprs(pat, fs),
                    ForTarget::Expr(e) => {
                        self.expr(e, fs);
                    }
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
            Stmt::Return { span, arg } => {
                if self.fn_stack.is_empty() {
                    self.diag(
                        codes::RETURN_OUTSIDE_FUNCTION,
                        "A 'return' statement can only be used within a function body."
                            .to_string(),
                        *span,
                    );
                }
                if let Some(arg) = arg {
                    self.expr(arg, scope);
                }
            }
            Stmt::Class { .. } => {}
            Stmt::Try {
                block,
                catch,
                finally,
                ..
            } => {
                self.block(block, scope);
                if let Some((param, body)) = catch {
                    let cs = self.scope_of(body.span.start, scope);
                    if let Some(p) = param {
                        self.pattern_exprs(p, cs);
                    }
                    for s in &body.stmts {
                        self.stmt(s, cs);
                    }
                }
                if let Some(f) = finally {
                    self.block(f, scope);
                }
            }
            Stmt::Throw { arg, .. } => {
                self.expr(arg, scope);
            }
            Stmt::Switch {
                span, disc, cases, ..
            } => {
                self.expr(disc, scope);
                let ss = self.scope_of(span.start, scope);
                for case in cases {
                    if let Some(t) = &case.test {
                        self.expr(t, ss);
                    }
                    for s in &case.stmts {
                        self.stmt(s, ss);
                    }
                }
            }
            Stmt::Labeled { body, .. } => self.stmt(body, scope),
            Stmt::Import { span, .. } => {
                self.diag(
                    codes::IMPORT_IN_SCRIPT,
                    "'import' declarations are only supported in modules.".to_string(),
                    *span,
                );
            }
            Stmt::Export { span, inner } => {
                self.diag(
                    codes::EXPORT_IN_SCRIPT,
                    "'export' declarations are only supported in modules.".to_string(),
                    *span,
                );
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

    fn function(&mut self, f: &Func, outer: ScopeId) -> ValueType {
        let fs = self.scope_of(f.span.start, outer);
        for p in &f.params {
            self.pattern_exprs(p, fs);
        }
        self.fn_stack.push(f.is_async);
        match &f.body {
            FuncBody::Block(b) => {
                let bs = self.scope_of(b.span.start, fs);
                for s in &b.stmts {
                    self.stmt(s, bs);
                }
            }
            FuncBody::Expr(e) => {
                self.expr(e, fs);
            }
            FuncBody::Opaque(_) => {}
        }
        self.fn_stack.pop();
        ValueType::Callable(None)
    }

    fn expr(&mut self, e: &Expr, scope: ScopeId) -> ValueType {
        self.expr_ctx(e, scope, RefCtx::default())
    }

    fn expr_ctx(&mut self, e: &Expr, scope: ScopeId, ctx: RefCtx) -> ValueType {
        match e {
            Expr::Ident(ident) => self.ident(ident, scope, ctx),
            Expr::Str(_) | Expr::Template(_) => ValueType::Str,
            Expr::Num(_) => ValueType::Num,
            Expr::Bool(_) => ValueType::Bool,
            Expr::Null(_) | Expr::Regex(_) | Expr::This(_) | Expr::Super(_) | Expr::Error(_) => {
                ValueType::Unknown
            }
            Expr::Array { elems, .. } => {
                let mut tys = Vec::with_capacity(elems.len());
                for e in elems {
                    tys.push(self.expr(e, scope));
                }
                if tys.is_empty() {
                    ValueType::AnyArray
                } else if tys.iter().all(|t| *t == ValueType::Str) {
                    ValueType::StrArray
                } else if tys.iter().all(|t| *t == ValueType::Num) {
                    ValueType::NumArray
                } else {
                    ValueType::AnyArray
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
                        ObjectProp::Shorthand(ident) => {
                            self.ident(ident, scope, RefCtx::default());
                        }
                        ObjectProp::ShorthandDefault { key, default } => {
                            self.ident(key, scope, RefCtx::default());
                            self.expr(default, scope);
                        }
                        ObjectProp::Method { key, func } => {
                            if let PropKey::Computed(k) = key {
                                self.expr(k, scope);
                            }
                            self.function(func, scope);
                        }
                        ObjectProp::Spread(e) => {
                            self.expr(e, scope);
                        }
                    }
                }
                ValueType::Unknown
            }
            Expr::Member {
                object,
                prop,
                ..
            } => {
                let obj_ty = self.expr_ctx(
                    object,
                    scope,
                    RefCtx {
                        member_base: matches!(**object, Expr::Ident(_)),
                        ..RefCtx::default()
                    },
                );
                match prop {
                    MemberProp::Ident(p) => self.member_type(&obj_ty, p),
                    MemberProp::Computed(idx) => {
                        self.expr(idx, scope);
                        match obj_ty {
                            ValueType::StrArray => ValueType::Str,
                            ValueType::NumArray => ValueType::Num,
                            _ => ValueType::Unknown,
                        }
                    }
                }
            }
            Expr::Call { callee, args, .. } => self.call(callee, args, scope),
            Expr::New { callee, args, .. } => {
                self.expr_ctx(
                    callee,
                    scope,
                    RefCtx {
                        direct_callee: matches!(callee.unwrap_parens(), Expr::Ident(_)),
                        ..RefCtx::default()
                    },
                );
                for a in args {
                    self.expr(a, scope);
                }
                ValueType::Unknown
            }
            Expr::Func(f) => self.function(f, scope),
            Expr::ClassExpr { .. } => ValueType::Unknown,
            Expr::Unary { op, arg, .. } => {
                self.expr(arg, scope);
                match *op {
                    "typeof" => ValueType::Str,
                    "!" | "delete" => ValueType::Bool,
                    "-" | "+" | "~" | "++" | "--" => ValueType::Num,
                    _ => ValueType::Unknown,
                }
            }
            Expr::Binary {
                op, left, right, ..
            } => {
                let lt = self.expr(left, scope);
                let rt = self.expr(right, scope);
                match *op {
                    "+" => {
                        if lt == ValueType::Str || rt == ValueType::Str {
                            ValueType::Str
                        } else if lt == ValueType::Num && rt == ValueType::Num {
                            ValueType::Num
                        } else {
                            ValueType::Unknown
                        }
                    }
                    "-" | "*" | "/" | "%" | "**" | "<<" | ">>" | ">>>" | "&" | "|" | "^" => {
                        ValueType::Num
                    }
                    "==" | "!=" | "===" | "!==" | "<" | ">" | "<=" | ">=" | "in"
                    | "instanceof" => ValueType::Bool,
                    "&&" | "||" | "??" => {
                        if lt == rt {
                            lt
                        } else {
                            ValueType::Unknown
                        }
                    }
                    _ => ValueType::Unknown,
                }
            }
            Expr::Assign { target, value, .. } => {
                self.expr(target, scope);
                self.expr(value, scope)
            }
            Expr::Cond {
                test, cons, alt, ..
            } => {
                self.expr(test, scope);
                let ct = self.expr(cons, scope);
                let at = self.expr(alt, scope);
                if ct == at {
                    ct
                } else {
                    ValueType::Unknown
                }
            }
            Expr::Seq { exprs, .. } => {
                let mut last = ValueType::Unknown;
                for e in exprs {
                    last = self.expr(e, scope);
                }
                last
            }
            Expr::Await { kw_span, arg, .. } => {
                match self.fn_stack.last() {
                    None => self.diag(
                        codes::TOP_LEVEL_AWAIT,
                        "'await' expressions are only allowed at the top level of a file when that file is a module.".to_string(),
                        *kw_span,
                    ),
                    Some(false) => self.diag(
                        codes::AWAIT_IN_NON_ASYNC,
                        "'await' expressions are only allowed within async functions and at the top levels of modules.".to_string(),
                        *kw_span,
                    ),
                    Some(true) => {}
                }
                self.expr(arg, scope);
                ValueType::Unknown
            }
            Expr::Yield { arg, .. } => {
                if let Some(arg) = arg {
                    self.expr(arg, scope);
                }
                ValueType::Unknown
            }
            Expr::Spread { arg, .. } => {
                self.expr(arg, scope);
                ValueType::Unknown
            }
            Expr::TaggedTemplate { tag, .. } => {
                self.expr(tag, scope);
                ValueType::Unknown
            }
            Expr::Paren { inner, .. } => self.expr(inner, scope),
        }
    }

    fn call(&mut self, callee: &Expr, args: &[Expr], scope: ScopeId) -> ValueType {
        // require("pkg") binds a builtin module namespace; unknown packages
        // bind unknown-typed with no diagnostic at all.
        if let Expr::Ident(id) = callee.unwrap_parens() {
            if id.name == "require" {
                let callee_ty = self.ident(
                    id,
                    scope,
                    RefCtx {
                        direct_callee: true,
                        ..RefCtx::default()
                    },
                );
                let is_ambient_require = self
                    .table
                    .reference_at(id.span)
                    .is_some_and(|r| r.resolution == Resolution::Ambient);
                for a in args {
                    if !matches!(a, Expr::Str(_)) {
                        self.expr(a, scope);
                    }
                }
                if is_ambient_require {
                    if let Some(Expr::Str(s)) = args.first() {
                        let text = &self.snippet.text()[s.start..s.end()];
                        let name = text.trim_matches(|c| c == '"' || c == '\'');
                        if self.env.is_builtin_module(name) {
                            return ValueType::Module(name.to_string());
                        }
                    }
                    return ValueType::Unknown;
                }
                let _ = callee_ty;
                return ValueType::Unknown;
            }
        }
        let callee_ty = self.expr_ctx(
            callee,
            scope,
            RefCtx {
                direct_callee: matches!(callee.unwrap_parens(), Expr::Ident(_)),
                ..RefCtx::default()
            },
        );
        let sig = match &callee_ty {
            ValueType::Callable(Some(sig)) => Some(sig.clone()),
            _ => None,
        };
        for (i, arg) in args.iter().enumerate() {
            match arg {
                Expr::Ident(ident) => {
                    let hint = sig.as_ref().map(|s| s.param_hint(i));
                    self.ident(
                        ident,
                        scope,
                        RefCtx {
                            arg_hint: hint,
                            ..RefCtx::default()
                        },
                    );
                }
                other => {
                    self.expr(other, scope);
                }
            }
        }
        ValueType::Unknown
    }

    fn ident(&mut self, ident: &Ident, scope: ScopeId, ctx: RefCtx) -> ValueType {
        if ident.name.is_empty() {
            return ValueType::Unknown;
        }
        let (resolution, ty) = match self.table.lookup(scope, &ident.name) {
            Some(sym) => (Resolution::Local(sym), self.types[sym.0].clone()),
            None => match self.env.global(&ident.name) {
                Some(entry) => (Resolution::Ambient, global_type(entry, &ident.name)),
                None => {
                    let suggestion =
                        name_suggestion(&ident.name, scope, self.table, self.env);
                    match suggestion {
                        Some(sugg) => self.diag(
                            codes::CANNOT_FIND_NAME_SUGGESTION,
                            format!(
                                "Cannot find name '{}'. Did you mean '{}'?",
                                ident.name, sugg
                            ),
                            ident.span,
                        ),
                        None => self.diag(
                            codes::CANNOT_FIND_NAME,
                            format!("Cannot find name '{}'.", ident.name),
                            ident.span,
                        ),
                    }
                    (Resolution::Unresolved, ValueType::Unknown)
                }
            },
        };
        self.table.refs.push(scopes::Reference {
            name: ident.name.clone(),
            span: ident.span,
            scope,
            resolution,
            member_base: ctx.member_base,
            direct_callee: ctx.direct_callee,
            arg_hint: ctx.arg_hint,
        });
        ty
    }

    fn member_type(&mut self, obj_ty: &ValueType, prop: &Ident) -> ValueType {
        let name = prop.name.as_str();
        match obj_ty {
            ValueType::Module(m) => match self.env.module_member(m, name) {
                Some(me) if me.is_callable() => ValueType::Callable(Some(me.clone())),
                Some(_) => ValueType::Unknown,
                None if self.env.is_universal_member(name) => ValueType::Unknown,
                None => {
                    self.property_missing(name, &format!("typeof import(\"{m}\")"), prop.span);
                    ValueType::Unknown
                }
            },
            ValueType::Global(g) => {
                let entry = self.env.global(g).expect("global type tracked");
                let Some(members) = &entry.members else {
                    return ValueType::Unknown;
                };
                match members.get(name) {
                    Some(me) if me.is_callable() => ValueType::Callable(Some(me.clone())),
                    Some(_) => ValueType::Unknown,
                    None if self.env.is_universal_member(name) => ValueType::Unknown,
                    None => {
                        let display = entry.type_name.clone().unwrap_or_else(|| g.clone());
                        self.property_missing(name, &display, prop.span);
                        ValueType::Unknown
                    }
                }
            }
            ValueType::Str => self.primitive_member(name, "string", prop.span, |e, n| e.string_has(n)),
            ValueType::Num => self.primitive_member(name, "number", prop.span, |e, n| e.number_has(n)),
            ValueType::Bool => {
                self.primitive_member(name, "boolean", prop.span, |e, n| e.boolean_has(n))
            }
            ValueType::StrArray => {
                self.primitive_member(name, "string[]", prop.span, |e, n| e.array_has(n))
            }
            ValueType::NumArray => {
                self.primitive_member(name, "number[]", prop.span, |e, n| e.array_has(n))
            }
            ValueType::AnyArray => {
                self.primitive_member(name, "any[]", prop.span, |e, n| e.array_has(n))
            }
            ValueType::Unknown | ValueType::Callable(_) => ValueType::Unknown,
        }
    }

    fn primitive_member(
        &mut self,
        name: &str,
        display: &str,
        span: Span,
        has: impl Fn(&AmbientEnvironment, &str) -> bool,
    ) -> ValueType {
        if has(self.env, name) {
            ValueType::Unknown
        } else {
            self.property_missing(name, display, span);
            ValueType::Unknown
        }
    }

    fn property_missing(&mut self, prop: &str, ty: &str, span: Span) {
        self.diag(
            codes::PROPERTY_DOES_NOT_EXIST,
            format!("Property '{prop}' does not exist on type '{ty}'."),
            span,
        );
    }
}

fn global_type(entry: &GlobalEntry, name: &str) -> ValueType {
    match entry.type_name.as_deref() {
        Some("string") => return ValueType::Str,
        Some("number") => return ValueType::Num,
        Some("boolean") => return ValueType::Bool,
        _ => {}
    }
    if entry.members.is_some() {
        return ValueType::Global(name.to_string());
    }
    if let Some(sig) = entry.as_signature() {
        return ValueType::Callable(Some(sig));
    }
    ValueType::Unknown
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn check_src(src: &str) -> Analysis {
        let snippet = Snippet::inline("t", src);
        check(&snippet, AmbientEnvironment::builtin())
    }

    fn diag_codes(src: &str) -> Vec<u32> {
        check_src(src).diagnostics.iter().map(|d| d.code).collect()
    }

    #[test]
    fn ambient_global_use_is_clean() {
        assert!(diag_codes("console.log(1)").is_empty());
    }

    #[test]
    fn misspelled_global_gets_a_suggestion() {
        let analysis = check_src("conzole.log(1)");
        assert_eq!(analysis.diagnostics.len(), 1);
        let d = &analysis.diagnostics[0];
        assert_eq!(d.code, codes::CANNOT_FIND_NAME_SUGGESTION);
        assert!(d.message.contains("'console'"), "{}", d.message);
    }

    #[test]
    fn await_snippet_reports_undeclared_name_and_top_level_await() {
        let codes_found = diag_codes(fixtures::PROMPT_AWAIT_SNIPPET);
        assert!(codes_found.contains(&codes::CANNOT_FIND_NAME), "{codes_found:?}");
        assert!(codes_found.contains(&codes::TOP_LEVEL_AWAIT), "{codes_found:?}");
        let analysis = check_src(fixtures::PROMPT_AWAIT_SNIPPET);
        let cfn = analysis
            .diagnostics
            .iter()
            .find(|d| d.code == codes::CANNOT_FIND_NAME)
            .unwrap();
        assert!(cfn.message.contains("'prompt'"));
    }

    #[test]
    fn require_of_unknown_package_is_suppressed() {
        assert!(diag_codes(fixtures::PROMPT_CALLBACK_SNIPPET).is_empty());
        assert!(diag_codes("const x = require(\"totally-unknown-pkg\");\nx.anything(1);").is_empty());
    }

    #[test]
    fn http_callback_snippet_reports_three() {
        let analysis = check_src(fixtures::HTTP_CALLBACK_SNIPPET);
        let codes_found: Vec<u32> = analysis.diagnostics.iter().map(|d| d.code).collect();
        assert_eq!(
            codes_found,
            vec![
                codes::CANNOT_FIND_NAME,
                codes::CANNOT_FIND_NAME,
                codes::DECLARATION_OR_STATEMENT_EXPECTED
            ],
            "{:?}",
            analysis.diagnostics
        );
    }

    #[test]
    fn diagnostics_are_sorted_and_deterministic() {
        let a = check_src(fixtures::HTTP_CALLBACK_SNIPPET);
        let b = check_src(fixtures::HTTP_CALLBACK_SNIPPET);
        assert_eq!(a.diagnostics, b.diagnostics);
        let mut sorted = a.diagnostics.clone();
        crate::source::sort_diagnostics(&mut sorted);
        assert_eq!(sorted, a.diagnostics);
    }

    #[test]
    fn var_hoisting_suppresses_cannot_find_name() {
        assert!(diag_codes("f();\nfunction f() { return 1; }").is_empty());
        assert!(diag_codes("console.log(y);\nvar y = 2;").is_empty());
        assert!(diag_codes("function g() { x = 1; var x; }").is_empty());
    }

    #[test]
    fn return_and_await_context_rules() {
        assert_eq!(diag_codes("return 1;"), vec![codes::RETURN_OUTSIDE_FUNCTION]);
        assert!(diag_codes("function f() { return 1; }").is_empty());
        assert!(diag_codes("async function f() { await g(); }\nfunction g() {}").is_empty());
        assert_eq!(
            diag_codes("function f() { await g(); }\nfunction g() {}"),
            vec![codes::AWAIT_IN_NON_ASYNC]
        );
    }

    #[test]
    fn import_and_export_are_script_mode_errors() {
        assert_eq!(diag_codes("import fs from 'fs';"), vec![codes::IMPORT_IN_SCRIPT]);
        // the import still binds its name
        assert_eq!(
            diag_codes("import fs from 'fs';\nfs.readFileSync('x');"),
            vec![codes::IMPORT_IN_SCRIPT]
        );
        assert_eq!(
            diag_codes("export const x = 1;"),
            vec![codes::EXPORT_IN_SCRIPT]
        );
    }

    #[test]
    fn property_checks_fire_only_on_known_types() {
        // ambient global with member table
        assert_eq!(diag_codes("console.lgo(1)"), vec![codes::PROPERTY_DOES_NOT_EXIST]);
        // builtin module member
        assert_eq!(
            diag_codes("const h = require(\"http\");\nh.gett(1);"),
            vec![codes::PROPERTY_DOES_NOT_EXIST]
        );
        // string-typed placeholder
        assert_eq!(
            diag_codes("var s = \"x\";\ns.spllit(1);"),
            vec![codes::PROPERTY_DOES_NOT_EXIST]
        );
        // unknown-typed values stay silent
        assert!(diag_codes("function f(a) { a.whatever(); }").is_empty());
        assert!(diag_codes("var s = \"x\";\nvar n = s.split(\" \");").is_empty());
    }

    #[test]
    fn expected_type_from_builtin_signature() {
        let src = "const http = require(\"http\");\nhttp.get(url, cb);";
        let analysis = check_src(src);
        let url_ref = analysis
            .scopes
            .references_of("url")
            .next()
            .expect("url reference");
        assert_eq!(
            expected_type_at(&analysis, url_ref.span),
            TypeHint::Complex("string | RequestOptions | URL".to_string())
        );
    }

    #[test]
    fn expected_type_for_number_rest_param() {
        let src = "Math.max(n);";
        let analysis = check_src(src);
        let n_ref = analysis.scopes.references_of("n").next().unwrap();
        assert_eq!(expected_type_at(&analysis, n_ref.span), TypeHint::Number);
    }

    #[test]
    fn expected_type_unknown_for_member_base() {
        let analysis = check_src(fixtures::STRING_SPLIT_SNIPPET);
        let s_ref = analysis.scopes.references_of("s").next().unwrap();
        assert_eq!(expected_type_at(&analysis, s_ref.span), TypeHint::Unknown);
        assert!(s_ref.member_base);
    }

    #[test]
    fn suggestion_rules() {
        let analysis = check_src("consoel.log(1)");
        assert_eq!(analysis.diagnostics[0].code, codes::CANNOT_FIND_NAME_SUGGESTION);
        assert!(analysis.diagnostics[0].message.contains("'console'"));

        let analysis = check_src("xyzzy1234(1)");
        assert_eq!(analysis.diagnostics[0].code, codes::CANNOT_FIND_NAME);

        // ambiguous: both "console" (ambient) and local "consols" are at
        // distance 1 from "consol"
        let analysis = check_src("var consols = 1;\nconsol.log(2);");
        assert_eq!(analysis.diagnostics[0].code, codes::CANNOT_FIND_NAME);
    }

    #[test]
    fn damerau_levenshtein_within_1() {
        assert!(within_damerau_levenshtein_1("consoel", "console")); // transposition
        assert!(within_damerau_levenshtein_1("consol", "console")); // insertion
        assert!(within_damerau_levenshtein_1("conzole", "console")); // substitution
        assert!(within_damerau_levenshtein_1("console", "console"));
        assert!(!within_damerau_levenshtein_1("consl", "console"));
        assert!(!within_damerau_levenshtein_1("xyzzy", "console"));
    }

    #[test]
    fn suppression_soundness() {
        for base in [
            "x.foo();\nx.bar(1);",
            "var a = 1;\nx.use(a);",
            "console.log(x.value);",
        ] {
            let before = check_src(base);
            let with_require =
                check_src(&format!("const x = require(\"totally-unknown-pkg\");\n{base}"));
            let before_non_x: Vec<&Diagnostic> = before
                .diagnostics
                .iter()
                .filter(|d| !d.message.contains("'x'"))
                .collect();
            assert_eq!(with_require.diagnostics.len(), before_non_x.len());
        }
    }

    #[test]
    fn test_globals_are_not_ambient() {
        assert_eq!(
            diag_codes("it('works', function() {});"),
            vec![codes::CANNOT_FIND_NAME]
        );
    }

    #[test]
    fn every_identifier_use_site_is_classified() {
        let analysis = check_src("var a = 1;\nconsole.log(a, b);\nobj.prop = a;");
        // a (x2), console, b, obj are references; prop and log are not
        let names: Vec<&str> = analysis.scopes.references().iter().map(|r| r.name.as_str()).collect();
        assert!(names.contains(&"a"));
        assert!(names.contains(&"console"));
        assert!(names.contains(&"b"));
        assert!(names.contains(&"obj"));
        assert!(!names.contains(&"prop"));
        assert!(!names.contains(&"log"));
    }

    #[test]
    fn budgeted_check_consumes_a_compile() {
        let snippet = Snippet::inline("t", "var x = 1;");
        let mut budget = Budget::new(1, None);
        assert!(check_budgeted(&snippet, AmbientEnvironment::builtin(), &mut budget).is_ok());
        assert!(matches!(
            check_budgeted(&snippet, AmbientEnvironment::builtin(), &mut budget),
            Err(Exhausted::Compiles)
        ));
    }
}
