//! η-saturation and uncurrying.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::TransformError;
use crate::rewriting::{Atrs, Fresh, Position, Rule, Symbol, Term, Var};

/// Default bound on the number of rules η-saturation may add.
pub const ETA_FUEL: usize = 10_000;

fn record_arities(t: &Term, out: &mut BTreeMap<Symbol, usize>) {
    let (head, args) = t.spine();
    if let Term::Fun(f, _) = head {
        let n = out.entry(f.clone()).or_insert(0);
        *n = (*n).max(args.len());
    }
    for a in t.args() {
        record_arities(a, out);
    }
}

/// Applicative arity of every symbol occurring in `rules`.
fn arities(rules: &[Rule]) -> BTreeMap<Symbol, usize> {
    let mut out = BTreeMap::new();
    for r in rules {
        record_arities(&r.lhs, &mut out);
        record_arities(&r.rhs, &mut out);
    }
    out
}

/// The largest `n` such that `f(..) @ t1 @ ... @ tn` occurs in `a`.
pub fn applicative_arity(a: &Atrs, f: &Symbol) -> usize {
    arities(&a.rules).get(f).copied().unwrap_or(0)
}

fn eta_extension(r: &Rule) -> Rule {
    let mut fresh = Fresh::new();
    let z = Term::Var(fresh.var("z"));
    Rule::new(Term::app(r.lhs.clone(), z.clone()), Term::app(r.rhs.clone(), z))
        .expect("both sides gain the same variable")
        .canonical()
}

/// Adds `l @ z -> r @ z` for every rule `l -> r` whose head is applied to
/// fewer arguments than its applicative arity, until nothing changes. The
/// extension of a rule is placed right after it.
pub fn eta_saturate(a: &Atrs, fuel: usize) -> Result<Atrs, TransformError> {
    let mut rules = a.rules.clone();
    let mut added = 0;
    loop {
        let ar = arities(&rules);
        let mut next = Vec::with_capacity(rules.len());
        let mut changed = false;
        for r in &rules {
            next.push(r.clone());
            let (head, args) = r.lhs.spine();
            let Term::Fun(f, _) = head else { continue };
            if args.len() >= ar.get(f).copied().unwrap_or(0) {
                continue;
            }
            let ext = eta_extension(r);
            if rules.iter().chain(&next).any(|s| s.alpha_eq(&ext)) {
                continue;
            }
            added += 1;
            if added > fuel {
                return Err(TransformError::SaturationDiverged { added: fuel });
            }
            next.push(ext);
            changed = true;
        }
        rules = next;
        if !changed {
            return Ok(a.with_rules(rules));
        }
    }
}

/// An occurrence of `x @ t` with `x` a variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadVariableSite {
    pub rule: usize,
    pub rule_text: String,
    pub position: Position,
    pub lhs: bool,
    pub var: Var,
}

impl fmt::Display for HeadVariableSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = if self.lhs { "lhs" } else { "rhs" };
        write!(f, "{} in {side} of rule {} `{}`", self.var, self.rule, self.rule_text)
    }
}

pub fn head_variable_sites(a: &Atrs) -> Vec<HeadVariableSite> {
    let mut out = Vec::new();
    for (i, r) in a.rules.iter().enumerate() {
        for (side, t) in [(true, &r.lhs), (false, &r.rhs)] {
            for (p, s) in t.subterms() {
                if s.is_app() {
                    if let Term::Var(x) = &s.args()[0] {
                        out.push(HeadVariableSite {
                            rule: i,
                            rule_text: r.to_string(),
                            position: p,
                            lhs: side,
                            var: x.clone(),
                        });
                    }
                }
            }
        }
    }
    out
}

pub fn is_head_variable_free(a: &Atrs) -> bool {
    head_variable_sites(a).is_empty()
}

/// The uncurrying map ⌊·⌋ for a fixed system: `f(t1..tm) @ s1 @ ... @ sn`
/// becomes `f^n(t1..tm, s1..sn)`, where `f^n` is named `f` followed by `n`
/// copies of `u`.
#[derive(Debug, Clone)]
pub struct Uncurrier {
    arity: BTreeMap<Symbol, usize>,
    symbols: BTreeMap<(Symbol, usize), Symbol>,
}

impl Uncurrier {
    pub fn new(a: &Atrs) -> Uncurrier {
        let arity = arities(&a.rules);
        let mut taken: BTreeSet<String> = a.symbols().iter().map(|s| s.name().to_string()).collect();
        let mut symbols = BTreeMap::new();
        for (f, &n) in &arity {
            if f.is_app() {
                continue;
            }
            for k in 1..=n {
                let mut name = format!("{}{}", f.name(), "u".repeat(k));
                while !taken.insert(name.clone()) {
                    name.push('\'');
                }
                symbols.insert((f.clone(), k), Symbol::new(&name, f.arity() + k));
            }
        }
        Uncurrier { arity, symbols }
    }

    /// `f^n`, with `f^0 = f`.
    pub fn symbol(&self, f: &Symbol, n: usize) -> Option<Symbol> {
        if n == 0 {
            return Some(f.clone());
        }
        self.symbols.get(&(f.clone(), n)).cloned()
    }

    pub fn applicative_arity(&self, f: &Symbol) -> usize {
        self.arity.get(f).copied().unwrap_or(0)
    }

    /// ⌊t⌋, or `None` if `t` has a head variable or applies a symbol to more
    /// arguments than its applicative arity.
    pub fn term(&self, t: &Term) -> Option<Term> {
        match t {
            Term::Var(_) => Some(t.clone()),
            Term::Fun(..) => {
                let (head, extra) = t.spine();
                let Term::Fun(f, args) = head else { return None };
                let g = self.symbol(f, extra.len())?;
                let args = args.iter().chain(extra).map(|s| self.term(s)).collect::<Option<Vec<_>>>()?;
                Some(Term::Fun(g, args))
            }
        }
    }
}

/// ⌊η(a)⌋. Fails if η(a) has head variables.
pub fn uncurry(a: &Atrs) -> Result<Atrs, TransformError> {
    let eta = eta_saturate(a, ETA_FUEL)?;
    let sites = head_variable_sites(&eta);
    if !sites.is_empty() {
        return Err(TransformError::HeadVariable { sites });
    }
    let u = Uncurrier::new(&eta);
    let rules = eta
        .rules
        .iter()
        .map(|r| {
            let lhs = u.term(&r.lhs).expect("head-variable free");
            let rhs = u.term(&r.rhs).expect("head-variable free");
            Rule::new(lhs, rhs).expect("uncurrying keeps variables")
        })
        .collect();
    Ok(a.with_rules(rules))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewriting::{parse_rules, parse_term};

    const INSTANTIATED: &str = "C2 @ z -> z
        C1(C2,C3(x)) @ z -> x::z
        C1(C1(f,g),C3(x)) @ z -> C1(f,g) @ (x::z)
        fix[walk] @ [] -> C2
        fix[walk] @ (x::ys) -> C1(fix[walk] @ ys,C3(x))
        main(l) -> fix[walk] @ l @ []";

    fn atrs(src: &str) -> Atrs {
        Atrs::new(parse_rules(src).unwrap(), Symbol::new("main", 1))
    }

    #[test]
    fn arity_of_fix_walk_is_two() {
        let a = atrs(INSTANTIATED);
        assert_eq!(applicative_arity(&a, &Symbol::new("fix[walk]", 0)), 2);
        assert_eq!(applicative_arity(&a, &Symbol::new("C1", 2)), 1);
        assert_eq!(applicative_arity(&a, &Symbol::new("C3", 1)), 0);
        assert_eq!(applicative_arity(&a, &Symbol::new("absent", 0)), 0);
    }

    #[test]
    fn saturation_adds_the_two_fix_rules() {
        let a = atrs(INSTANTIATED);
        let b = eta_saturate(&a, ETA_FUEL).unwrap();
        assert_eq!(b.rules.len(), 8);
        let new: Vec<&Rule> = b.rules.iter().filter(|r| !a.rules.contains(r)).collect();
        let want = parse_rules(
            "fix[walk] @ [] @ z -> C2 @ z
             fix[walk] @ (x::ys) @ z -> C1(fix[walk] @ ys,C3(x)) @ z",
        )
        .unwrap();
        assert_eq!(new.len(), 2);
        for w in &want {
            assert!(new.iter().any(|r| r.alpha_eq(w)), "{w}");
        }
        assert_eq!(eta_saturate(&b, ETA_FUEL).unwrap(), b);
    }

    #[test]
    fn saturation_of_self_application_diverges() {
        let a = Atrs::new(parse_rules("f -> f @ A").unwrap(), Symbol::new("f", 0));
        assert_eq!(eta_saturate(&a, 50), Err(TransformError::SaturationDiverged { added: 50 }));
    }

    #[test]
    fn uncurrying_the_saturated_system() {
        let a = atrs(INSTANTIATED);
        let b = uncurry(&a).unwrap();
        assert!(!b.has_app());
        let want = parse_rules(
            "C2u(z) -> z
             C1u(C2,C3(x),z) -> x::z
             C1u(C1(f,g),C3(x),z) -> C1u(f,g,x::z)
             fix[walk]u([]) -> C2
             fix[walk]u(x::ys) -> C1(fix[walk]u(ys),C3(x))
             fix[walk]uu([],z) -> C2u(z)
             fix[walk]uu(x::ys,z) -> C1u(fix[walk]u(ys),C3(x),z)
             main(l) -> fix[walk]uu(l,[])",
        )
        .unwrap();
        assert_eq!(b.rules.len(), want.len());
        for w in &want {
            assert!(b.rules.iter().any(|r| r.alpha_eq(w)), "{w} not in\n{b}");
        }
    }

    #[test]
    fn head_variables_block_uncurrying() {
        let a = atrs("C1(f,g) @ z -> f @ (g @ z)\nmain(x) -> C1(A,A) @ x");
        let sites = head_variable_sites(&a);
        assert_eq!(sites.len(), 2);
        assert!(sites.iter().all(|s| s.rule == 0 && !s.lhs));
        assert!(matches!(uncurry(&a), Err(TransformError::HeadVariable { .. })));
        assert!(is_head_variable_free(&atrs("main(x) -> x::[]")));
    }

    #[test]
    fn application_free_systems_are_unchanged() {
        let a = atrs("f([]) -> []\nf(x::xs) -> f(xs)\nmain(x) -> f(x)");
        assert_eq!(uncurry(&a).unwrap(), a);
    }

    #[test]
    fn uncurried_names_avoid_clashes() {
        let a = atrs("F @ x -> x\nFu(x) -> x\nmain(x) -> Fu(F @ x)");
        let u = Uncurrier::new(&a);
        assert_eq!(u.symbol(&Symbol::new("F", 0), 1).unwrap().name(), "Fu'");
        let t = parse_term("F @ (F @ []) @ []").unwrap();
        assert_eq!(u.term(&t), None);
        assert_eq!(u.term(&parse_term("F @ []").unwrap()).unwrap().to_string(), "Fu'([])");
    }
}
