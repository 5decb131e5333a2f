//! Control-flow analysis by tree grammars approximating the collecting
//! semantics of an ATRS under call-by-value, and the two transformations
//! built on it: dead-code elimination and instantiation of head variables.

mod grammar;

pub use grammar::{GTerm, NonTerminal, TreeGrammar};

use std::collections::{BTreeMap, BTreeSet};

use crate::rewriting::{Atrs, Fresh, Subst, Symbol, Term, Var};
use crate::transforms::{applicative_arity, eta_saturate, instantiate, InstantiationPlan, TransformError, ETA_FUEL};

/// Default bound on the number of productions added by [`build_grammar`].
pub const CFA_FUEL: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CfaError {
    #[error("grammar construction exceeded {fuel} extension steps; partial grammar:\n{grammar}")]
    FuelExhausted { fuel: usize, grammar: String },
    #[error("head variable {var} of rule {rule} `{rule_text}` has no binder")]
    UncoveredHeadVariable { rule: usize, rule_text: String, var: Var },
    #[error(transparent)]
    Transform(#[from] TransformError),
}

impl CfaError {
    pub fn is_inapplicable(&self) -> bool {
        matches!(self, CfaError::Transform(e) if e.is_inapplicable())
    }
}

/// Constructors generating inputs: the recorded data signature, or every
/// constructor of the system if none was recorded.
fn input_constructors(a: &Atrs) -> BTreeSet<Symbol> {
    if !a.data.is_empty() {
        return a.data.clone();
    }
    let defined = a.defined();
    a.symbols().into_iter().filter(|f| !f.is_app() && !defined.contains(f)).collect()
}

/// `S -> main(*,...,*)` and `* -> c(*,...,*)` for every input constructor.
pub fn initial_grammar(a: &Atrs) -> TreeGrammar {
    let star = || GTerm::N(NonTerminal::Any);
    let mut g = TreeGrammar::new();
    g.add(NonTerminal::Start, GTerm::F(a.main.clone(), (0..a.main.arity()).map(|_| star()).collect()));
    for c in input_constructors(a) {
        g.add(NonTerminal::Any, GTerm::F(c.clone(), (0..c.arity()).map(|_| star()).collect()));
    }
    g
}

type Binding = BTreeMap<Var, GTerm>;

struct Builder<'a> {
    a: &'a Atrs,
    defined: BTreeSet<Symbol>,
    g: TreeGrammar,
}

impl Builder<'_> {
    fn is_call(&self, f: &Symbol) -> bool {
        f.is_app() || self.defined.contains(f)
    }

    /// Nonterminals that generate at least one value (least fixpoint).
    fn value_capable(&self) -> BTreeSet<NonTerminal> {
        let mut cap = BTreeSet::new();
        loop {
            let before = cap.len();
            for (n, p) in self.g.iter() {
                if !cap.contains(n) && self.capable(p, &cap) {
                    cap.insert(n.clone());
                }
            }
            if cap.len() == before {
                return cap;
            }
        }
    }

    fn capable(&self, t: &GTerm, cap: &BTreeSet<NonTerminal>) -> bool {
        match t {
            GTerm::N(n) => cap.contains(n),
            GTerm::F(f, args) => !self.is_call(f) && args.iter().all(|a| self.capable(a, cap)),
        }
    }

    /// All minimal ways in which `u` derives an instance of `pattern`.
    /// Nonterminals are expanded only below non-variable pattern nodes.
    fn matches(&self, pattern: &Term, u: &GTerm, visiting: &mut Vec<NonTerminal>) -> Vec<Binding> {
        match (pattern, u) {
            (Term::Var(x), _) => vec![Binding::from([(x.clone(), u.clone())])],
            (Term::Fun(..), GTerm::N(n)) => {
                if visiting.contains(n) {
                    return Vec::new();
                }
                visiting.push(n.clone());
                let mut out = Vec::new();
                for p in self.g.productions(n) {
                    out.extend(self.matches(pattern, p, visiting));
                }
                visiting.pop();
                out
            }
            (Term::Fun(f, ps), GTerm::F(h, us)) => {
                if f != h {
                    return Vec::new();
                }
                let mut acc = vec![Binding::new()];
                for (p, u) in ps.iter().zip(us) {
                    let here = self.matches(p, u, &mut Vec::new());
                    let mut next = Vec::new();
                    for b in &acc {
                        for h in &here {
                            let mut b = b.clone();
                            for (x, t) in h {
                                // a repeated variable keeps its first binding, which
                                // over-approximates
                                b.entry(x.clone()).or_insert_with(|| t.clone());
                            }
                            next.push(b);
                        }
                    }
                    acc = next;
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
        }
    }

    fn run(mut self, fuel: usize) -> Result<TreeGrammar, CfaError> {
        let mut added = 0;
        loop {
            let cap = self.value_capable();
            let snapshot: Vec<(NonTerminal, GTerm)> = self.g.iter().map(|(n, t)| (n.clone(), t.clone())).collect();
            let mut new = Vec::new();
            for (n, t) in &snapshot {
                for (path, u) in t.calls() {
                    let GTerm::F(f, _) = u else { continue };
                    if !self.is_call(f) {
                        continue;
                    }
                    for (i, rule) in self.a.rules_defining(f) {
                        for sigma in self.matches(&rule.lhs, u, &mut Vec::new()) {
                            if !sigma.values().all(|v| self.capable(v, &cap)) {
                                continue;
                            }
                            let ri = NonTerminal::Rule(i);
                            new.push((n.clone(), t.replace_at(&path, GTerm::N(ri.clone()))));
                            new.push((ri, GTerm::from_rule_side(&rule.rhs, i)));
                            for (x, v) in sigma {
                                new.push((NonTerminal::Var(x, i), v));
                            }
                        }
                    }
                }
            }
            let mut changed = false;
            for (n, t) in new {
                if self.g.add(n, t) {
                    changed = true;
                    added += 1;
                    if added > fuel {
                        return Err(CfaError::FuelExhausted { fuel, grammar: self.g.to_string() });
                    }
                }
            }
            if !changed {
                return Ok(self.g);
            }
        }
    }
}

/// The least grammar containing [`initial_grammar`] and closed under the
/// call-by-value extension: for a production `N -> C[u]` and a rule
/// `l_i -> r_i` with `u ⇒* l_iσ` minimal and σ ranging over values, add
/// `N -> C[R_i]`, `R_i -> r_i` and `x_i -> σ(x)`.
pub fn build_grammar(a: &Atrs, fuel: usize) -> Result<TreeGrammar, CfaError> {
    Builder { a, defined: a.defined(), g: initial_grammar(a) }.run(fuel)
}

/// Rules never fired from `main` applied to data, i.e. with no `R_i`
/// production.
pub fn dead_rules(g: &TreeGrammar, a: &Atrs) -> BTreeSet<usize> {
    (0..a.rules.len()).filter(|&i| !g.has_productions(&NonTerminal::Rule(i))).collect()
}

/// Variables of rule `i` that are applied in `r_i` or in one of the
/// η-extensions of rule `i`.
fn head_variables(eta: &Atrs, a: &Atrs, i: usize) -> BTreeSet<Var> {
    let r = &a.rules[i];
    let mut out = BTreeSet::new();
    for (_, s) in r.rhs.subterms() {
        if s.is_app() {
            if let Term::Var(x) = &s.args()[0] {
                out.insert(x.clone());
            }
        }
    }
    if let Term::Var(x) = &r.rhs {
        let (head, args) = r.lhs.spine();
        if let Term::Fun(f, _) = head {
            if applicative_arity(eta, f) > args.len() {
                out.insert(x.clone());
            }
        }
    }
    out
}

/// `c(y1,...,yk)` with fresh `yj`.
fn skeleton(c: &Symbol, fresh: &mut Fresh) -> Term {
    Term::Fun(c.clone(), (0..c.arity()).map(|_| Term::Var(fresh.var("y"))).collect())
}

/// Instantiation plan from an ε-free grammar for `a`.
///
/// A head variable `z` of rule `i` gets one binder per constructor heading
/// a production of `z_i` whose right-hand side is free of calls; another
/// variable gets a binder only if `z_i` has a single production. Binders
/// bind to the constructor applied to fresh variables. Rule `i` is planned
/// with the product of its variables' binder sets.
pub fn binders(g: &TreeGrammar, a: &Atrs) -> Result<InstantiationPlan, CfaError> {
    let eta = eta_saturate(a, ETA_FUEL)?;
    let defined = a.defined();
    let is_call = |f: &Symbol| f.is_app() || defined.contains(f);
    let mut plan = InstantiationPlan::new();
    for (i, r) in a.rules.iter().enumerate() {
        let heads = head_variables(&eta, a, i);
        let mut per_var: Vec<(Var, Vec<Symbol>)> = Vec::new();
        for x in r.lhs.vars() {
            let prods: Vec<&GTerm> = g.productions(&NonTerminal::Var(x.clone(), i)).collect();
            let tops = |ps: &[&GTerm]| -> Vec<Symbol> {
                let mut out: Vec<Symbol> = Vec::new();
                for p in ps {
                    if let GTerm::F(c, _) = p {
                        if !p.any_symbol(&is_call) && !out.contains(c) {
                            out.push(c.clone());
                        }
                    }
                }
                out
            };
            if heads.contains(&x) {
                let cs = tops(&prods);
                if cs.is_empty() {
                    return Err(CfaError::UncoveredHeadVariable { rule: i, rule_text: r.to_string(), var: x });
                }
                per_var.push((x, cs));
            } else if prods.len() == 1 {
                let cs = tops(&prods);
                if !cs.is_empty() {
                    per_var.push((x, cs));
                }
            }
        }
        if per_var.is_empty() {
            continue;
        }
        let taken: BTreeSet<String> = r.vars().iter().map(|v| v.name().to_string()).collect();
        let mut fresh = Fresh::new();
        let mut substs = vec![Subst::new()];
        for (x, cs) in &per_var {
            let mut next = Vec::new();
            for s in &substs {
                for c in cs {
                    let mut s = s.clone();
                    let mut t = skeleton(c, &mut fresh);
                    while t.vars().iter().any(|v| taken.contains(v.name())) {
                        t = skeleton(c, &mut fresh);
                    }
                    s.insert(x.clone(), t);
                    next.push(s);
                }
            }
            substs = next;
        }
        plan.insert(i, substs);
    }
    Ok(plan)
}

fn without(a: &Atrs, dead: &BTreeSet<usize>) -> Atrs {
    let rules = a.rules.iter().enumerate().filter(|(i, _)| !dead.contains(i)).map(|(_, r)| r.clone()).collect();
    a.with_rules(rules)
}

/// Dead-code elimination followed by instantiation of the surviving rules.
/// Inapplicable if the system does not change.
pub fn cfa_transform(a: &Atrs) -> Result<Atrs, CfaError> {
    let g = build_grammar(a, CFA_FUEL)?;
    let dead = dead_rules(&g, a);
    let live = without(a, &dead);
    // grammar nonterminals refer to indices of `a`; reindex to `live`
    let reindex: BTreeMap<usize, usize> =
        (0..a.rules.len()).filter(|i| !dead.contains(i)).enumerate().map(|(new, old)| (old, new)).collect();
    let g = rename_rules(&g.eliminate_epsilon(), &reindex);
    let plan = binders(&g, &live)?;
    let out = instantiate(&live, &plan)?;
    if out.structurally_eq(a) {
        return Err(TransformError::inapplicable("cfa", "no dead rules and nothing to instantiate").into());
    }
    Ok(out)
}

/// Dead-code elimination only. Inapplicable if every rule is live.
pub fn cfa_dce(a: &Atrs) -> Result<Atrs, CfaError> {
    let g = build_grammar(a, CFA_FUEL)?;
    let dead = dead_rules(&g, a);
    if dead.is_empty() {
        return Err(TransformError::inapplicable("cfaDCE", "every rule is reachable").into());
    }
    Ok(without(a, &dead))
}

fn rename_rules(g: &TreeGrammar, map: &BTreeMap<usize, usize>) -> TreeGrammar {
    fn nt(n: &NonTerminal, map: &BTreeMap<usize, usize>) -> Option<NonTerminal> {
        Some(match n {
            NonTerminal::Rule(i) => NonTerminal::Rule(*map.get(i)?),
            NonTerminal::Var(x, i) => NonTerminal::Var(x.clone(), *map.get(i)?),
            other => other.clone(),
        })
    }
    fn term(t: &GTerm, map: &BTreeMap<usize, usize>) -> Option<GTerm> {
        Some(match t {
            GTerm::N(n) => GTerm::N(nt(n, map)?),
            GTerm::F(f, args) => GTerm::F(f.clone(), args.iter().map(|a| term(a, map)).collect::<Option<_>>()?),
        })
    }
    let mut out = TreeGrammar::new();
    for (n, t) in g.iter() {
        if let (Some(n), Some(t)) = (nt(n, map), term(t, map)) {
            out.add(n, t);
        }
    }
    out
}
