//! Monomorphic type inference over a single ground type and arrows.

use std::collections::BTreeMap;
use std::fmt;

use super::syntax::{Expr, Ident, Program, Span};
use super::PcfError;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Ground,
    Arrow(Box<Type>, Box<Type>),
}

impl Type {
    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    /// Number of arguments before a ground result.
    pub fn arity(&self) -> usize {
        match self {
            Type::Ground => 0,
            Type::Arrow(_, r) => 1 + r.arity(),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Ground => f.write_str("Ground"),
            Type::Arrow(a, b) if matches!(**a, Type::Arrow(..)) => write!(f, "({a}) -> {b}"),
            Type::Arrow(a, b) => write!(f, "{a} -> {b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Ty {
    Ground,
    Arrow(Box<Ty>, Box<Ty>),
    Var(usize),
}

/// Types of all variables of a program. Unconstrained type variables
/// default to the ground type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Typing {
    pub vars: BTreeMap<u32, Type>,
}

impl Typing {
    pub fn of(&self, x: &Ident) -> &Type {
        &self.vars[&x.id]
    }
}

struct Infer<'p> {
    bindings: Vec<Option<Ty>>,
    vars: BTreeMap<u32, Ty>,
    program: &'p Program,
    /// Location reported with errors: the innermost enclosing origin.
    at: Span,
}

impl Infer<'_> {
    fn fresh(&mut self) -> Ty {
        self.bindings.push(None);
        Ty::Var(self.bindings.len() - 1)
    }

    fn var(&mut self, x: &Ident) -> Ty {
        if let Some(t) = self.vars.get(&x.id) {
            return t.clone();
        }
        let t = self.fresh();
        self.vars.insert(x.id, t.clone());
        t
    }

    fn resolve(&self, t: &Ty) -> Ty {
        match t {
            Ty::Var(v) => match &self.bindings[*v] {
                Some(b) => self.resolve(b),
                None => t.clone(),
            },
            _ => t.clone(),
        }
    }

    fn occurs(&self, v: usize, t: &Ty) -> bool {
        match self.resolve(t) {
            Ty::Var(w) => v == w,
            Ty::Ground => false,
            Ty::Arrow(a, b) => self.occurs(v, &a) || self.occurs(v, &b),
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> Result<(), PcfError> {
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (&a, &b) {
            (Ty::Ground, Ty::Ground) => Ok(()),
            (Ty::Var(v), Ty::Var(w)) if v == w => Ok(()),
            (Ty::Var(v), t) | (t, Ty::Var(v)) => {
                if self.occurs(*v, t) {
                    return Err(PcfError::type_error(self.at, "occurs check: cannot construct an infinite type"));
                }
                self.bindings[*v] = Some(t.clone());
                Ok(())
            }
            (Ty::Arrow(a1, b1), Ty::Arrow(a2, b2)) => {
                self.unify(a1, a2)?;
                self.unify(b1, b2)
            }
            _ => Err(PcfError::type_error(
                self.at,
                &format!("cannot unify {} with {}", self.show(&a), self.show(&b)),
            )),
        }
    }

    fn show(&self, t: &Ty) -> String {
        self.finish(t).to_string()
    }

    fn finish(&self, t: &Ty) -> Type {
        match self.resolve(t) {
            Ty::Ground | Ty::Var(_) => Type::Ground,
            Ty::Arrow(a, b) => Type::arrow(self.finish(&a), self.finish(&b)),
        }
    }

    fn locate(&mut self, o: u32) -> Span {
        let prev = self.at;
        if let Some(s) = self.program.spans.get(&o) {
            self.at = *s;
        }
        prev
    }

    fn expr(&mut self, e: &Expr) -> Result<Ty, PcfError> {
        match e {
            Expr::Var(x) => Ok(self.var(x)),
            Expr::Con(_, args) => {
                for a in args {
                    let t = self.expr(a)?;
                    self.unify(&t, &Ty::Ground)?;
                }
                Ok(Ty::Ground)
            }
            Expr::Lam(o, x, b) => {
                let prev = self.locate(*o);
                let tx = self.var(x);
                let tb = self.expr(b)?;
                self.at = prev;
                Ok(Ty::Arrow(Box::new(tx), Box::new(tb)))
            }
            Expr::App(f, a) => {
                let tf = self.expr(f)?;
                let ta = self.expr(a)?;
                let r = self.fresh();
                self.unify(&tf, &Ty::Arrow(Box::new(ta), Box::new(r.clone())))?;
                Ok(r)
            }
            Expr::Fix(o, x, b) => {
                let prev = self.locate(*o);
                let tx = self.var(x);
                let tb = self.expr(b)?;
                self.unify(&tx, &tb)?;
                self.at = prev;
                Ok(tb)
            }
            Expr::Match(o, s, cases) => {
                let prev = self.locate(*o);
                let ts = self.expr(s)?;
                self.unify(&ts, &Ty::Ground)?;
                let r = self.fresh();
                for c in cases {
                    for v in &c.vars {
                        let tv = self.var(v);
                        self.unify(&tv, &Ty::Ground)?;
                    }
                    let tb = self.expr(&c.body)?;
                    self.unify(&r, &tb)?;
                }
                self.at = prev;
                Ok(r)
            }
        }
    }
}

/// Infers simple types; the inputs and the result of `main` must be ground.
pub fn infer_types(p: &Program) -> Result<Typing, PcfError> {
    let mut inf = Infer { bindings: Vec::new(), vars: BTreeMap::new(), program: p, at: Span { line: 1, col: 1 } };
    for x in &p.params {
        let t = inf.var(x);
        inf.unify(&t, &Ty::Ground).map_err(|_| PcfError::type_error(inf.at, "main's inputs must be data"))?;
    }
    let t = inf.expr(&p.body)?;
    inf.unify(&t, &Ty::Ground)
        .map_err(|_| PcfError::type_error(inf.at, "main must return data, not a function"))?;
    let vars = inf.vars.iter().map(|(id, t)| (*id, inf.finish(t))).collect();
    Ok(Typing { vars })
}
