//! Inlining by narrowing.

use std::collections::BTreeSet;
use std::fmt;

use super::TransformError;
use crate::rewriting::{match_term, unify, Atrs, ClosureKind, Fresh, InvalidPosition, Position, Rule, Subst, Symbol, Term};

/// When inlining a call is considered worthwhile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InliningPredicate {
    /// The call is to a match closure.
    Match,
    /// The call is `lam(..) @ s` with a λ closure and inlining is a plain
    /// rewrite: no variable of the rule gets instantiated.
    LambdaRewrite,
    /// Every rule used for inlining has a constructor right-hand side.
    Constructor,
    /// The call is the only call site of its function, or every resulting
    /// right-hand side is smaller.
    Decreasing,
}

impl InliningPredicate {
    pub const ALL: [InliningPredicate; 4] = [
        InliningPredicate::Match,
        InliningPredicate::LambdaRewrite,
        InliningPredicate::Constructor,
        InliningPredicate::Decreasing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InliningPredicate::Match => "match",
            InliningPredicate::LambdaRewrite => "lambda-rewrite",
            InliningPredicate::Constructor => "constructor",
            InliningPredicate::Decreasing => "decreasing",
        }
    }

    pub fn parse(s: &str) -> Option<InliningPredicate> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }

    /// Evaluates the predicate at position `p` of the right-hand side of `r`.
    /// False if `p` is not a call site.
    pub fn holds(self, a: &Atrs, r: &Rule, p: &Position) -> bool {
        let defined = a.defined();
        match Site::new(a, &defined, r, p) {
            Ok(site) => self.holds_at(a, &defined, r, &site),
            Err(_) => false,
        }
    }

    fn holds_at(self, a: &Atrs, defined: &BTreeSet<Symbol>, r: &Rule, site: &Site) -> bool {
        let f = site.call.root().expect("call sites are not variables");
        match self {
            InliningPredicate::Match => a.closures.get(f) == Some(&ClosureKind::Match),
            InliningPredicate::LambdaRewrite => {
                let head_is_lam = f.is_app()
                    && matches!(site.call.args()[0].root(), Some(g) if a.closures.get(g) == Some(&ClosureKind::Lam));
                head_is_lam && site.unifiers.iter().all(|u| match_term(&u.rule.lhs, &site.call).is_some())
            }
            InliningPredicate::Constructor => {
                site.unifiers.iter().all(|u| !u.rule.rhs.any_symbol(&|g| is_call(defined, g)))
            }
            InliningPredicate::Decreasing => is_proper(a, r, f) || is_size_decreasing(defined, r, site),
        }
    }
}

impl fmt::Display for InliningPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NarrowError {
    #[error(transparent)]
    Position(#[from] InvalidPosition),
    #[error("{0} is not a call")]
    NotACall(String),
    #[error("no rule unifies with {0}")]
    NoUnifyingRule(String),
}

fn is_call(defined: &BTreeSet<Symbol>, f: &Symbol) -> bool {
    f.is_app() || defined.contains(f)
}

struct Unifier {
    /// The unifying rule, renamed apart.
    rule: Rule,
    mgu: Subst,
}

/// A call site in a rule's right-hand side with all rules unifying there.
struct Site {
    /// The rule being narrowed, renamed apart from the unifying rules.
    rule: Rule,
    position: Position,
    call: Term,
    unifiers: Vec<Unifier>,
}

impl Site {
    fn new(a: &Atrs, defined: &BTreeSet<Symbol>, r: &Rule, p: &Position) -> Result<Site, NarrowError> {
        let mut fresh = Fresh::new();
        let rule = r.rename_apart(&mut fresh);
        let call = rule.rhs.subterm_at(p)?.clone();
        let f = match call.root() {
            Some(f) if is_call(defined, f) => f.clone(),
            _ => return Err(NarrowError::NotACall(r.rhs.subterm_at(p)?.to_string())),
        };
        let unifiers: Vec<Unifier> = a
            .rules
            .iter()
            .filter(|u| u.root() == &f)
            .filter_map(|u| {
                let u = u.rename_apart(&mut fresh);
                unify(&call, &u.lhs).map(|mgu| Unifier { rule: u, mgu })
            })
            .collect();
        if unifiers.is_empty() {
            return Err(NarrowError::NoUnifyingRule(r.rhs.subterm_at(p)?.to_string()));
        }
        Ok(Site { rule, position: p.clone(), call, unifiers })
    }

    fn narrowings(&self) -> Vec<Rule> {
        self.unifiers
            .iter()
            .map(|u| {
                let rhs = self.rule.rhs.replace_at(&self.position, u.rule.rhs.clone()).expect("position was checked");
                Rule::new(self.rule.lhs.apply(&u.mgu), rhs.apply(&u.mgu))
                    .expect("narrowing keeps right-hand side variables bound")
                    .canonical()
            })
            .collect()
    }

    fn redex_preserving(&self, defined: &BTreeSet<Symbol>) -> bool {
        self.unifiers.iter().all(|u| {
            u.rule.lhs.vars().iter().all(|x| {
                let bound = Term::Var(x.clone()).apply(&u.mgu);
                !bound.any_symbol(&|g| is_call(defined, g)) || u.rule.rhs.occurs(x)
            })
        })
    }
}

/// The rules obtained by narrowing the right-hand side of `r` at `p` with
/// every rule of `a`.
pub fn narrowings(a: &Atrs, r: &Rule, p: &Position) -> Result<Vec<Rule>, NarrowError> {
    Ok(Site::new(a, &a.defined(), r, p)?.narrowings())
}

/// True iff inlining at `p` never erases a variable bound to a term with
/// a function call, for every rule that unifies there.
pub fn is_redex_preserving(a: &Atrs, r: &Rule, p: &Position) -> Result<bool, NarrowError> {
    let defined = a.defined();
    Ok(Site::new(a, &defined, r, p)?.redex_preserving(&defined))
}

/// `f` is called exactly once in the whole system, and not from its own
/// rules or as the entry point.
fn is_proper(a: &Atrs, r: &Rule, f: &Symbol) -> bool {
    if f.is_app() || f == &a.main || f == r.root() {
        return false;
    }
    a.rules.iter().map(|s| s.rhs.count_symbols(&|g| g == f)).sum::<usize>() == 1
}

/// Calls first, then nodes.
fn measure(defined: &BTreeSet<Symbol>, t: &Term) -> (usize, usize) {
    (t.count_symbols(&|g| is_call(defined, g)), t.size())
}

fn is_size_decreasing(defined: &BTreeSet<Symbol>, r: &Rule, site: &Site) -> bool {
    let before = measure(defined, &r.rhs);
    site.narrowings().iter().all(|n| measure(defined, &n.rhs) < before)
}

/// Replaces every rule that has a qualifying call site by its narrowings at
/// the leftmost-outermost such site. A site qualifies if `pred` holds and
/// inlining there is redex preserving.
pub fn inline(a: &Atrs, pred: InliningPredicate) -> Result<Atrs, TransformError> {
    let name = format!("inline({pred})");
    if !a.sufficiently_defined {
        return Err(TransformError::inapplicable(&name, "the system is not known to be sufficiently defined"));
    }
    let defined = a.defined();
    let mut changed = false;
    let mut rules = Vec::with_capacity(a.rules.len());
    for r in &a.rules {
        let site = r.rhs.positions().into_iter().find_map(|p| {
            let site = Site::new(a, &defined, r, &p).ok()?;
            (pred.holds_at(a, &defined, r, &site) && site.redex_preserving(&defined)).then_some(site)
        });
        match site {
            Some(site) => {
                changed = true;
                rules.extend(site.narrowings());
            }
            None => rules.push(r.clone()),
        }
    }
    if !changed {
        return Err(TransformError::inapplicable(&name, "no qualifying call site"));
    }
    Ok(a.with_rules(rules))
}
