//! Name resolution and desugaring from the surface syntax to core
//! expressions.
//!
//! Top-level definitions, and local `let`s whose right-hand side is a
//! value, are substituted at their use sites; other local `let`s become a
//! β-redex. Each abstraction, fixpoint and match gets an origin with a
//! display name: `fun` abstractions are numbered `C1, C2, …` in source
//! order, abstractions introduced by `let f x y` are named `f, f1`,
//! `let rec f` yields `fix[f]`, and matches inside the definition of `f`
//! are named `match[f], match[f]2, …`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::syntax::{Case, Expr, Ident, Item, Module, Origin, Pattern, Program, SCase, SExpr, Span};
use super::PcfError;
use crate::rewriting::{Symbol, Term, CONS, NIL};

pub const ZERO: &str = "0";
pub const SUCC: &str = "S";

#[derive(Debug, Clone)]
struct ConInfo {
    arity: usize,
    ty: String,
}

#[derive(Clone)]
enum Binding {
    Local(Ident),
    Subst(Expr),
}

struct Desugar {
    next_var: u32,
    next_origin: u32,
    next_anon: u32,
    cons: BTreeMap<String, ConInfo>,
    used_nat: bool,
    names: BTreeMap<Origin, String>,
    spans: BTreeMap<Origin, Span>,
    taken: BTreeSet<String>,
    scope: Vec<(String, Binding)>,
    item: String,
    matches_in_item: usize,
}

type DResult<T> = Result<T, PcfError>;

fn is_value_form(e: &Expr) -> bool {
    match e {
        Expr::Var(_) | Expr::Lam(..) | Expr::Fix(..) => true,
        Expr::Con(_, args) => args.iter().all(is_value_form),
        Expr::App(..) | Expr::Match(..) => false,
    }
}

impl Desugar {
    fn var(&mut self, name: &str) -> Ident {
        let id = self.next_var;
        self.next_var += 1;
        Ident { id, name: Arc::from(name) }
    }

    fn origin(&mut self, name: String, span: Span) -> Origin {
        let o = self.next_origin;
        self.next_origin += 1;
        let mut n = name;
        while !self.taken.insert(n.clone()) {
            n.push('\'');
        }
        self.names.insert(o, n);
        self.spans.insert(o, span);
        o
    }

    fn anon_origin(&mut self, span: Span) -> Origin {
        self.next_anon += 1;
        let n = format!("C{}", self.next_anon);
        self.origin(n, span)
    }

    fn lookup(&self, x: &str, span: Span) -> DResult<Expr> {
        match self.scope.iter().rev().find(|(n, _)| n == x) {
            Some((_, Binding::Local(id))) => Ok(Expr::Var(id.clone())),
            Some((_, Binding::Subst(e))) => Ok(e.clone()),
            None => Err(PcfError::unbound(span, x)),
        }
    }

    fn con(&mut self, c: &str, span: Span) -> DResult<(Symbol, ConInfo)> {
        let info = self
            .cons
            .get(c)
            .cloned()
            .ok_or_else(|| PcfError::unbound(span, &format!("constructor {c}")))?;
        if info.ty == "nat" {
            self.used_nat = true;
        }
        Ok((Symbol::new(c, info.arity), info))
    }

    fn numeral(&mut self, n: u64, span: Span) -> DResult<Expr> {
        let (z, _) = self.con(ZERO, span)?;
        let (s, _) = self.con(SUCC, span)?;
        Ok((0..n).fold(Expr::Con(z, vec![]), |acc, _| Expr::Con(s.clone(), vec![acc])))
    }

    /// `λp1. … λpn. body` with the abstractions named by `name_of(k)`.
    fn lambdas(
        &mut self,
        params: &[String],
        body: &SExpr,
        mut name_of: impl FnMut(&mut Self, usize) -> Origin,
    ) -> DResult<Expr> {
        let mut binders = Vec::new();
        for (k, p) in params.iter().enumerate() {
            let o = name_of(self, k);
            let x = self.var(p);
            self.scope.push((p.clone(), Binding::Local(x.clone())));
            binders.push((o, x));
        }
        let b = self.expr(body);
        self.scope.truncate(self.scope.len() - binders.len());
        let mut e = b?;
        for (o, x) in binders.into_iter().rev() {
            e = Expr::Lam(o, x, Box::new(e));
        }
        Ok(e)
    }

    /// The value bound by `let [rec] name params = bound`.
    fn definition(&mut self, rec: bool, name: &str, params: &[String], bound: &SExpr, span: Span) -> DResult<Expr> {
        let named = |d: &mut Self, k: usize| {
            let n = if k == 0 { name.to_string() } else { format!("{name}{k}") };
            d.origin(n, span)
        };
        if rec {
            let fo = self.origin(format!("fix[{name}]"), span);
            let f = self.var(name);
            self.scope.push((name.to_string(), Binding::Local(f.clone())));
            let body = if params.is_empty() { self.expr(bound) } else { self.lambdas(params, bound, named) };
            self.scope.pop();
            Ok(Expr::Fix(fo, f, Box::new(body?)))
        } else if params.is_empty() {
            self.expr(bound)
        } else {
            self.lambdas(params, bound, named)
        }
    }

    fn expr(&mut self, e: &SExpr) -> DResult<Expr> {
        match e {
            SExpr::Var(x, span) => self.lookup(x, *span),
            SExpr::Num(n, span) => self.numeral(*n, *span),
            SExpr::Con(c, args, span) => {
                let (sym, info) = self.con(c, *span)?;
                if args.len() != info.arity {
                    return Err(PcfError::type_error(
                        *span,
                        &format!("constructor {c} expects {} argument(s), got {}", info.arity, args.len()),
                    ));
                }
                let args = args.iter().map(|a| self.expr(a)).collect::<DResult<Vec<_>>>()?;
                Ok(Expr::Con(sym, args))
            }
            SExpr::Cons(h, t) => {
                let (sym, _) = self.con(CONS, h.span())?;
                let h = self.expr(h)?;
                let t = self.expr(t)?;
                Ok(Expr::Con(sym, vec![h, t]))
            }
            SExpr::List(items, span) => {
                let (nil, _) = self.con(NIL, *span)?;
                let (cons, _) = self.con(CONS, *span)?;
                let items = items.iter().map(|a| self.expr(a)).collect::<DResult<Vec<_>>>()?;
                Ok(items.into_iter().rev().fold(Expr::Con(nil, vec![]), |acc, x| Expr::Con(cons.clone(), vec![x, acc])))
            }
            SExpr::App(f, a) => {
                if let SExpr::Con(c, args, span) = &**f {
                    if args.is_empty() {
                        let (sym, info) = self.con(c, *span)?;
                        if info.arity == 1 {
                            let a = self.expr(a)?;
                            return Ok(Expr::Con(sym, vec![a]));
                        }
                    }
                }
                let f = self.expr(f)?;
                let a = self.expr(a)?;
                Ok(Expr::app(f, a))
            }
            SExpr::Fun(params, body, span) => {
                let span = *span;
                self.lambdas(params, body, |d, _| d.anon_origin(span))
            }
            SExpr::Let { rec, name, params, bound, body, span } => {
                let value = self.definition(*rec, name, params, bound, *span)?;
                if is_value_form(&value) {
                    self.scope.push((name.clone(), Binding::Subst(value)));
                    let b = self.expr(body);
                    self.scope.pop();
                    return b;
                }
                let o = self.origin(format!("let[{name}]"), *span);
                let x = self.var(name);
                self.scope.push((name.clone(), Binding::Local(x.clone())));
                let b = self.expr(body);
                self.scope.pop();
                Ok(Expr::app(Expr::Lam(o, x, Box::new(b?)), value))
            }
            SExpr::Match(scrut, cases, span) => self.match_expr(scrut, cases, *span),
        }
    }

    fn match_expr(&mut self, scrut: &SExpr, cases: &[SCase], span: Span) -> DResult<Expr> {
        self.matches_in_item += 1;
        let name = if self.matches_in_item == 1 {
            format!("match[{}]", self.item)
        } else {
            format!("match[{}]{}", self.item, self.matches_in_item)
        };
        let o = self.origin(name, span);
        let s = self.expr(scrut)?;
        let mut out: Vec<Case> = Vec::new();
        let mut ty: Option<String> = None;
        let mut wild: Option<Expr> = None;
        for case in cases {
            let Pattern::Con(c, vars) = &case.pattern else {
                if wild.is_some() {
                    return Err(PcfError::parse(case.span, "duplicate `_` case"));
                }
                wild = Some(self.expr(&case.body)?);
                continue;
            };
            let (sym, info) = self.con(c, case.span)?;
            if vars.len() != info.arity {
                return Err(PcfError::type_error(
                    case.span,
                    &format!("pattern {c} expects {} variable(s), got {}", info.arity, vars.len()),
                ));
            }
            match &ty {
                Some(t) if *t != info.ty => {
                    return Err(PcfError::type_error(case.span, &format!("constructor {c} is not of type {t}")))
                }
                _ => ty = Some(info.ty.clone()),
            }
            if out.iter().any(|k| k.con == sym) || wild.is_some() {
                return Err(PcfError::parse(case.span, &format!("redundant case for {c}")));
            }
            let idents: Vec<Ident> = vars.iter().map(|v| self.var(v.as_deref().unwrap_or("_"))).collect();
            let n = self.scope.len();
            for (v, id) in vars.iter().zip(&idents) {
                if let Some(v) = v {
                    self.scope.push((v.clone(), Binding::Local(id.clone())));
                }
            }
            let body = self.expr(&case.body);
            self.scope.truncate(n);
            out.push(Case { con: sym, vars: idents, body: body? });
        }
        if let Some(body) = wild {
            let Some(t) = ty else {
                return Err(PcfError::type_error(span, "a match needs at least one constructor case"));
            };
            let rest: Vec<(String, ConInfo)> = self
                .cons
                .iter()
                .filter(|(c, i)| i.ty == t && !out.iter().any(|k| k.con.name() == c.as_str()))
                .map(|(c, i)| (c.clone(), i.clone()))
                .collect();
            for (c, info) in rest {
                let vars = (0..info.arity).map(|_| self.var("_")).collect();
                out.push(Case { con: Symbol::new(&c, info.arity), vars, body: body.clone() });
            }
        }
        Ok(Expr::Match(o, Box::new(s), out))
    }
}

fn builtin_cons() -> BTreeMap<String, ConInfo> {
    let mut m = BTreeMap::new();
    m.insert(NIL.to_string(), ConInfo { arity: 0, ty: "list".into() });
    m.insert(CONS.to_string(), ConInfo { arity: 2, ty: "list".into() });
    m.insert(ZERO.to_string(), ConInfo { arity: 0, ty: "nat".into() });
    m.insert(SUCC.to_string(), ConInfo { arity: 1, ty: "nat".into() });
    m
}

/// Resolves names and desugars a parsed module. The last definition must
/// be `main`; its parameters are the program inputs.
pub fn desugar(m: &Module) -> Result<Program, PcfError> {
    let mut cons = builtin_cons();
    let mut declared = Vec::new();
    for t in &m.types {
        for c in &t.constructors {
            if declared.iter().any(|(n, _)| n == &c.name) {
                return Err(PcfError::parse(c.span, &format!("constructor {} declared twice", c.name)));
            }
            if c.name == SUCC {
                cons.remove(ZERO);
            }
            cons.insert(c.name.clone(), ConInfo { arity: c.args.len(), ty: t.name.clone() });
            declared.push((c.name.clone(), c.args.len()));
        }
    }
    let mut taken: BTreeSet<String> = cons.keys().cloned().collect();
    taken.insert("main".into());
    let mut d = Desugar {
        next_var: 0,
        next_origin: 0,
        next_anon: 0,
        cons,
        used_nat: false,
        names: BTreeMap::new(),
        spans: BTreeMap::new(),
        taken,
        scope: Vec::new(),
        item: String::new(),
        matches_in_item: 0,
    };
    let Some((main, defs)) = m.items.split_last() else {
        return Err(PcfError::parse(Span { line: 1, col: 1 }, "empty program: expected `let main ... ;;`"));
    };
    if main.name != "main" || main.rec {
        return Err(PcfError::parse(main.span, "the last definition must be a non-recursive `let main`"));
    }
    for it in defs {
        if it.name == "main" {
            return Err(PcfError::parse(it.span, "`main` must be the last definition"));
        }
        d.item = it.name.clone();
        d.matches_in_item = 0;
        let v = d.definition(it.rec, &it.name, &it.params, &it.body, it.span)?;
        d.scope.push((it.name.clone(), Binding::Subst(v)));
    }
    d.item = "main".into();
    d.matches_in_item = 0;
    let Item { params, body, .. } = main;
    let idents: Vec<Ident> = params.iter().map(|p| d.var(p)).collect();
    for (p, x) in params.iter().zip(&idents) {
        d.scope.push((p.clone(), Binding::Local(x.clone())));
    }
    let body = d.expr(body)?;
    let mut data = vec![Symbol::new(NIL, 0), Symbol::new(CONS, 2)];
    if d.used_nat && d.cons.get(ZERO).is_some_and(|c| c.ty == "nat") {
        data.push(Symbol::new(ZERO, 0));
        data.push(Symbol::new(SUCC, 1));
    }
    data.extend(declared.iter().map(|(n, a)| Symbol::new(n, *a)));
    Ok(Program { params: idents, body, data, names: d.names, spans: d.spans })
}

/// Reads a data term such as `[1;2]`, `S(0)::[]` or `Node(Leaf, Leaf)`
/// over the constructors of `p`.
pub fn data_term(e: &SExpr, p: &Program) -> Result<Term, PcfError> {
    let arity = |c: &str, span: Span| {
        p.data
            .iter()
            .find(|s| s.name() == c)
            .map(Symbol::arity)
            .ok_or_else(|| PcfError::unbound(span, &format!("constructor {c} is not part of the program's data")))
    };
    let go = |e: &SExpr| data_term(e, p);
    match e {
        SExpr::Con(c, args, span) => {
            let n = arity(c, *span)?;
            if n != args.len() {
                return Err(PcfError::type_error(*span, &format!("constructor {c} expects {n} argument(s)")));
            }
            Ok(Term::fun(c, args.iter().map(go).collect::<Result<_, _>>()?))
        }
        SExpr::Num(n, span) => {
            arity(ZERO, *span)?;
            Ok((0..*n).fold(Term::constant(ZERO), |acc, _| Term::fun(SUCC, vec![acc])))
        }
        SExpr::Cons(h, t) => Ok(Term::fun(CONS, vec![go(h)?, go(t)?])),
        SExpr::List(items, _) => {
            let items = items.iter().map(go).collect::<Result<Vec<_>, _>>()?;
            Ok(crate::rewriting::list_term(items))
        }
        SExpr::App(f, a) => match &**f {
            SExpr::Con(c, args, span) if args.is_empty() && arity(c, *span)? == 1 => Ok(Term::fun(c, vec![go(a)?])),
            _ => Err(PcfError::parse(e.span(), "inputs must be data terms")),
        },
        _ => Err(PcfError::parse(e.span(), "inputs must be data terms")),
    }
}
