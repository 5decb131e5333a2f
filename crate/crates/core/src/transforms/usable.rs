//! Syntactic dead-code elimination by unification with capped
//! right-hand sides.

use std::collections::BTreeSet;

use crate::rewriting::{unify, Atrs, Fresh, Symbol, Term};

/// Approximates the values a call's arguments can evaluate to: variables and
/// subterms rooted in a defined symbol or `@` become fresh variables, while
/// constructors (and the root of `t` itself) are kept.
pub fn cap(t: &Term, defined: &BTreeSet<Symbol>, fresh: &mut Fresh) -> Term {
    fn arg(t: &Term, defined: &BTreeSet<Symbol>, fresh: &mut Fresh) -> Term {
        match t {
            Term::Fun(f, args) if !f.is_app() && !defined.contains(f) => {
                Term::Fun(f.clone(), args.iter().map(|a| arg(a, defined, fresh)).collect())
            }
            _ => Term::Var(fresh.var("c")),
        }
    }
    match t {
        Term::Var(_) => Term::Var(fresh.var("c")),
        Term::Fun(f, args) => Term::Fun(f.clone(), args.iter().map(|a| arg(a, defined, fresh)).collect()),
    }
}

/// Keeps the rules reachable from `main`: a rule is usable if it defines
/// `main` or its left-hand side unifies with the cap of a call in the
/// right-hand side of a usable rule.
pub fn usable_rules_syntactic(a: &Atrs) -> Atrs {
    let defined = a.defined();
    let mut fresh = Fresh::new();
    let mut usable = vec![false; a.rules.len()];
    let mut work: Vec<usize> = Vec::new();
    for (i, r) in a.rules.iter().enumerate() {
        if r.root() == &a.main {
            usable[i] = true;
            work.push(i);
        }
    }
    while let Some(i) = work.pop() {
        for (_, call) in a.rules[i].rhs.subterms() {
            let Some(f) = call.root() else { continue };
            if !f.is_app() && !defined.contains(f) {
                continue;
            }
            let capped = cap(call, &defined, &mut fresh);
            for (j, r) in a.rules.iter().enumerate() {
                if usable[j] || r.root() != f {
                    continue;
                }
                if unify(&capped, &r.rename_apart(&mut fresh).lhs).is_some() {
                    usable[j] = true;
                    work.push(j);
                }
            }
        }
    }
    let rules = a.rules.iter().zip(&usable).filter(|(_, u)| **u).map(|(r, _)| r.clone()).collect();
    a.with_rules(rules)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewriting::parse_rules;

    fn atrs(src: &str) -> Atrs {
        Atrs::new(parse_rules(src).unwrap(), Symbol::new("main", 1))
    }

    #[test]
    fn cap_keeps_constructors_and_the_call_root() {
        let a = atrs("f(x) -> x\nmain(x) -> x");
        let t = parse_rules("g(x,y) -> f(x::f(y), y @ x)").unwrap().remove(0).rhs;
        let c = cap(&t, &a.defined(), &mut Fresh::new());
        let Term::Fun(f, args) = &c else { panic!() };
        assert_eq!(f.name(), "f");
        assert_eq!(args[0].root().unwrap().name(), "::");
        assert!(args[0].args().iter().all(Term::is_var));
        assert!(args[1].is_var());
    }

    #[test]
    fn unreachable_symbols_are_removed() {
        let a = atrs("f(x) -> x\ng(x) -> f(x)\nh(x) -> x\nmain(x) -> g(x)");
        let b = usable_rules_syntactic(&a);
        let roots: Vec<&str> = b.rules.iter().map(|r| r.root().name()).collect();
        assert_eq!(roots, vec!["f", "g", "main"]);
    }

    #[test]
    fn patterns_that_cannot_match_are_removed() {
        let a = atrs("f([]) -> []\nf(x::xs) -> f(xs)\ng(S(x)) -> x\ng(0) -> 0\nmain(x) -> g(S(f(x)))");
        let b = usable_rules_syntactic(&a);
        assert_eq!(b.rules.len(), 4, "{b}");
        assert!(b.rules.iter().all(|r| r.to_string() != "g(0) -> 0"));
    }

    #[test]
    fn head_variables_make_every_application_usable() {
        let a = atrs("C1(f,g) @ z -> f @ (g @ z)\nC2 @ z -> z\nD @ z -> z\nmain(x) -> C1(C2,C2) @ x");
        assert_eq!(usable_rules_syntactic(&a).rules.len(), 4);
    }
}
