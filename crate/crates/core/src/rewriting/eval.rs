//! Call-by-value (innermost) rewriting.
//!
//! A rule fires at a node only when every argument of that node is a value,
//! i.e. contains neither defined symbols nor `@`.

use std::collections::{BTreeMap, BTreeSet};

use super::atrs::{Atrs, Rule};
use super::term::{match_term, Position, Subst, Symbol, Term};

/// Default step budget for normalisation.
pub const DEFAULT_FUEL: usize = 1_000_000;

/// Which call-by-value redex to contract next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Policy {
    /// First redex in post-order (arguments left to right, then the node).
    #[default]
    LeftmostInnermost,
    /// Last redex in the same order. Used to check that step counts do not
    /// depend on the order in which independent redexes are contracted.
    RightmostInnermost,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub rule: usize,
    pub position: Position,
    pub subst: Subst,
    /// Whole term after the step.
    pub result: Term,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub start: Term,
    pub steps: Vec<Step>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn normal_form(&self) -> &Term {
        self.steps.last().map(|s| &s.result).unwrap_or(&self.start)
    }

    /// Term before step `i`.
    pub fn term_before(&self, i: usize) -> &Term {
        if i == 0 {
            &self.start
        } else {
            &self.steps[i - 1].result
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("fuel exhausted after {} steps", .trace.len())]
    FuelExhausted { trace: Box<Trace> },
}

/// A located call-by-value redex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Redex {
    pub position: Position,
    pub rule: usize,
    pub subst: Subst,
}

/// Rule lookup by root symbol.
#[derive(Debug, Clone)]
pub struct Rewriter<'a> {
    rules: &'a [Rule],
    by_root: BTreeMap<Symbol, Vec<usize>>,
}

impl<'a> Rewriter<'a> {
    pub fn new(rules: &'a [Rule]) -> Rewriter<'a> {
        let mut by_root: BTreeMap<Symbol, Vec<usize>> = BTreeMap::new();
        for (i, r) in rules.iter().enumerate() {
            by_root.entry(r.root().clone()).or_default().push(i);
        }
        Rewriter { rules, by_root }
    }

    pub fn for_atrs(a: &'a Atrs) -> Rewriter<'a> {
        Rewriter::new(&a.rules)
    }

    pub fn defined(&self) -> BTreeSet<Symbol> {
        self.by_root.keys().cloned().collect()
    }

    pub fn is_value(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::Fun(f, args) => {
                !f.is_app() && !self.by_root.contains_key(f) && args.iter().all(|a| self.is_value(a))
            }
        }
    }

    fn match_at(&self, t: &Term) -> Option<(usize, Subst)> {
        let f = t.root()?;
        self.by_root
            .get(f)?
            .iter()
            .find_map(|&i| match_term(&self.rules[i].lhs, t).map(|s| (i, s)))
    }

    /// First redex in post-order; also reports whether `t` is a value.
    fn first(&self, t: &Term, pos: &mut Vec<usize>) -> (Option<Redex>, bool) {
        let Term::Fun(f, args) = t else { return (None, true) };
        let mut all_values = true;
        for (i, a) in args.iter().enumerate() {
            pos.push(i + 1);
            let (r, v) = self.first(a, pos);
            pos.pop();
            if r.is_some() {
                return (r, false);
            }
            all_values &= v;
        }
        let is_def = f.is_app() || self.by_root.contains_key(f);
        if all_values && is_def {
            if let Some((rule, subst)) = self.match_at(t) {
                return (Some(Redex { position: Position(pos.clone()), rule, subst }), false);
            }
        }
        (None, all_values && !is_def)
    }

    fn collect(&self, t: &Term, pos: &mut Vec<usize>, out: &mut Vec<Redex>) -> bool {
        let Term::Fun(f, args) = t else { return true };
        let mut all_values = true;
        for (i, a) in args.iter().enumerate() {
            pos.push(i + 1);
            all_values &= self.collect(a, pos, out);
            pos.pop();
        }
        let is_def = f.is_app() || self.by_root.contains_key(f);
        if all_values && is_def {
            if let Some((rule, subst)) = self.match_at(t) {
                out.push(Redex { position: Position(pos.clone()), rule, subst });
            }
        }
        all_values && !is_def
    }

    /// All call-by-value redexes of `t` in post-order.
    pub fn redexes(&self, t: &Term) -> Vec<Redex> {
        let mut out = Vec::new();
        self.collect(t, &mut Vec::new(), &mut out);
        out
    }

    pub fn select(&self, t: &Term, policy: Policy) -> Option<Redex> {
        match policy {
            Policy::LeftmostInnermost => self.first(t, &mut Vec::new()).0,
            Policy::RightmostInnermost => self.redexes(t).pop(),
        }
    }

    pub fn contract(&self, t: &Term, r: &Redex) -> Term {
        let rhs = self.rules[r.rule].rhs.apply(&r.subst);
        t.replace_at(&r.position, rhs).expect("redex position is valid")
    }

    /// Every term reachable from `t` in one call-by-value step.
    pub fn successors(&self, t: &Term) -> Vec<Term> {
        self.redexes(t).iter().map(|r| self.contract(t, r)).collect()
    }

    pub fn normalize(&self, t: &Term, fuel: usize, policy: Policy) -> Result<Trace, EvalError> {
        let mut trace = Trace { start: t.clone(), steps: Vec::new() };
        let mut cur = t.clone();
        while let Some(r) = self.select(&cur, policy) {
            if trace.steps.len() >= fuel {
                return Err(EvalError::FuelExhausted { trace: Box::new(trace) });
            }
            cur = self.contract(&cur, &r);
            trace.steps.push(Step { rule: r.rule, position: r.position, subst: r.subst, result: cur.clone() });
        }
        Ok(trace)
    }

    /// Normal form and step count without recording the trace.
    pub fn count_steps(&self, t: &Term, fuel: usize, policy: Policy) -> Result<(Term, usize), EvalError> {
        let mut cur = t.clone();
        let mut n = 0;
        while let Some(r) = self.select(&cur, policy) {
            if n >= fuel {
                return Err(EvalError::FuelExhausted {
                    trace: Box::new(Trace { start: t.clone(), steps: Vec::new() }),
                });
            }
            cur = self.contract(&cur, &r);
            n += 1;
        }
        Ok((cur, n))
    }
}

/// Normalises `t` in `a` under `policy`.
pub fn normalize(a: &Atrs, t: &Term, fuel: usize, policy: Policy) -> Result<Trace, EvalError> {
    Rewriter::for_atrs(a).normalize(t, fuel, policy)
}

pub fn is_value(a: &Atrs, t: &Term) -> bool {
    Rewriter::for_atrs(a).is_value(t)
}
