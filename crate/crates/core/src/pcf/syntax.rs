//! Surface syntax (as written in `.fp` files) and the core language it
//! desugars to.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::rewriting::Symbol;

/// Source location, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

// ---- surface syntax ----

#[derive(Debug, Clone)]
pub struct Module {
    pub types: Vec<TypeDecl>,
    pub items: Vec<Item>,
}

#[derive(Debug, Clone)]
pub struct TypeDecl {
    pub name: String,
    pub params: Vec<String>,
    pub constructors: Vec<ConDecl>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct ConDecl {
    pub name: String,
    /// Argument types, kept as written.
    pub args: Vec<String>,
    pub span: Span,
}

/// `let [rec] name params = body ;;`
#[derive(Debug, Clone)]
pub struct Item {
    pub rec: bool,
    pub name: String,
    pub params: Vec<String>,
    pub body: SExpr,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum SExpr {
    Var(String, Span),
    /// Constructor application, including `[]`.
    Con(String, Vec<SExpr>, Span),
    Num(u64, Span),
    Cons(Box<SExpr>, Box<SExpr>),
    List(Vec<SExpr>, Span),
    App(Box<SExpr>, Box<SExpr>),
    Fun(Vec<String>, Box<SExpr>, Span),
    Let {
        rec: bool,
        name: String,
        params: Vec<String>,
        bound: Box<SExpr>,
        body: Box<SExpr>,
        span: Span,
    },
    Match(Box<SExpr>, Vec<SCase>, Span),
}

impl SExpr {
    pub fn span(&self) -> Span {
        match self {
            SExpr::Var(_, s) | SExpr::Con(_, _, s) | SExpr::Num(_, s) | SExpr::List(_, s) => *s,
            SExpr::Fun(_, _, s) | SExpr::Match(_, _, s) => *s,
            SExpr::Let { span, .. } => *span,
            SExpr::Cons(h, _) => h.span(),
            SExpr::App(f, _) => f.span(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SCase {
    pub pattern: Pattern,
    pub body: SExpr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    /// `C`, `C x`, `C(x,y)`, `[]`, `x::ys`, `0`.
    Con(String, Vec<Option<String>>),
    /// `_` as a whole pattern: every constructor not otherwise listed.
    Wild,
}

// ---- core language ----

/// A bound variable. Ids follow the source order of binders; the name is
/// only for display.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ident {
    pub id: u32,
    pub name: Arc<str>,
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.name, self.id)
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Identifies the source abstraction, fixpoint or match an expression node
/// was produced from. Copies made by inlining top-level definitions share
/// their origin.
pub type Origin = u32;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Var(Ident),
    Con(Symbol, Vec<Expr>),
    Lam(Origin, Ident, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    Fix(Origin, Ident, Box<Expr>),
    Match(Origin, Box<Expr>, Vec<Case>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Case {
    pub con: Symbol,
    pub vars: Vec<Ident>,
    pub body: Expr,
}

impl Expr {
    pub fn app(f: Expr, a: Expr) -> Expr {
        Expr::App(Box::new(f), Box::new(a))
    }

    /// Capture-free since binder ids are unique per source binder.
    pub fn subst(&self, x: &Ident, by: &Expr) -> Expr {
        match self {
            Expr::Var(y) if y.id == x.id => by.clone(),
            Expr::Var(_) => self.clone(),
            Expr::Con(c, args) => Expr::Con(c.clone(), args.iter().map(|a| a.subst(x, by)).collect()),
            Expr::Lam(o, y, b) if y.id == x.id => Expr::Lam(*o, y.clone(), b.clone()),
            Expr::Lam(o, y, b) => Expr::Lam(*o, y.clone(), Box::new(b.subst(x, by))),
            Expr::App(f, a) => Expr::app(f.subst(x, by), a.subst(x, by)),
            Expr::Fix(o, y, b) if y.id == x.id => Expr::Fix(*o, y.clone(), b.clone()),
            Expr::Fix(o, y, b) => Expr::Fix(*o, y.clone(), Box::new(b.subst(x, by))),
            Expr::Match(o, s, cases) => Expr::Match(
                *o,
                Box::new(s.subst(x, by)),
                cases
                    .iter()
                    .map(|c| Case {
                        con: c.con.clone(),
                        vars: c.vars.clone(),
                        body: if c.vars.iter().any(|v| v.id == x.id) { c.body.clone() } else { c.body.subst(x, by) },
                    })
                    .collect(),
            ),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Var(_) => 1,
            Expr::Con(_, args) => 1 + args.iter().map(Expr::size).sum::<usize>(),
            Expr::Lam(_, _, b) | Expr::Fix(_, _, b) => 1 + b.size(),
            Expr::App(f, a) => 1 + f.size() + a.size(),
            Expr::Match(_, s, cs) => 1 + s.size() + cs.iter().map(|c| c.body.size()).sum::<usize>(),
        }
    }
}

/// Free variables in binder order.
pub fn free_vars(e: &Expr) -> Vec<Ident> {
    let mut out = BTreeSet::new();
    fv(e, &mut Vec::new(), &mut out);
    out.into_iter().collect()
}

/// Free variables of a case table (the scrutinee excluded).
pub fn free_vars_cases(cases: &[Case]) -> Vec<Ident> {
    let mut out = BTreeSet::new();
    fv_cases(cases, &mut Vec::new(), &mut out);
    out.into_iter().collect()
}

fn fv(e: &Expr, bound: &mut Vec<u32>, out: &mut BTreeSet<Ident>) {
    match e {
        Expr::Var(x) => {
            if !bound.contains(&x.id) {
                out.insert(x.clone());
            }
        }
        Expr::Con(_, args) => args.iter().for_each(|a| fv(a, bound, out)),
        Expr::Lam(_, x, b) | Expr::Fix(_, x, b) => {
            bound.push(x.id);
            fv(b, bound, out);
            bound.pop();
        }
        Expr::App(f, a) => {
            fv(f, bound, out);
            fv(a, bound, out);
        }
        Expr::Match(_, s, cases) => {
            fv(s, bound, out);
            fv_cases(cases, bound, out);
        }
    }
}

fn fv_cases(cases: &[Case], bound: &mut Vec<u32>, out: &mut BTreeSet<Ident>) {
    for c in cases {
        let n = bound.len();
        bound.extend(c.vars.iter().map(|v| v.id));
        fv(&c.body, bound, out);
        bound.truncate(n);
    }
}

/// A desugared program `λx1…λxn. body`.
#[derive(Debug, Clone)]
pub struct Program {
    pub params: Vec<Ident>,
    pub body: Expr,
    /// Data constructors: declared ones, the builtin list constructors, and
    /// the builtin naturals when used.
    pub data: Vec<Symbol>,
    /// Display name for each origin.
    pub names: BTreeMap<Origin, String>,
    pub spans: BTreeMap<Origin, Span>,
}

impl PartialEq for Program {
    /// Ignores source locations.
    fn eq(&self, other: &Program) -> bool {
        self.params == other.params && self.body == other.body && self.data == other.data && self.names == other.names
    }
}

impl Program {
    pub fn name_of(&self, o: Origin) -> &str {
        self.names.get(&o).map(String::as_str).unwrap_or("lam")
    }
}
