use super::*;
use crate::defunc::defunctionalize;
use crate::pcf::parse_program;
use crate::rewriting::{isomorphism, parse_rules, Symbol};

const REV: &str = include_str!("../../tests/fixtures/rev.fp");

const R_REV: &str = "C1u(C2,C3(x),z) -> x::z
    C1u(C1(f,g),C3(x),z) -> C1u(f,g,x::z)
    fix[walk]u([]) -> C2
    fix[walk]u(x::ys) -> C1(fix[walk]u(ys),C3(x))
    main([]) -> []
    main(x::ys) -> C1u(fix[walk]u(ys),C3(x),[])";

fn a_rev() -> Atrs {
    defunctionalize(&parse_program(REV).unwrap())
}

fn prim(p: Prim) -> Strategy {
    Strategy::Prim(p)
}

// usableRules has nothing to remove from the defunctionalized program
fn inapplicable() -> Strategy {
    prim(Prim::Uncurry)
}

#[test]
fn combinators_on_inapplicable_steps() {
    let a = Atrs::new(parse_rules("main(x) -> x").unwrap(), Symbol::new("main", 1));
    assert_eq!(inapplicable().run(&a, &mut Vec::new()).unwrap(), None);
    let seq = Strategy::seq([inapplicable(), prim(Prim::Id)]);
    assert_eq!(seq.run(&a, &mut Vec::new()).unwrap(), Some(a.clone()));
    let seq = Strategy::seq([inapplicable(), inapplicable()]);
    assert_eq!(seq.run(&a, &mut Vec::new()).unwrap(), None);
    let ch = Strategy::choice(inapplicable(), prim(Prim::Id));
    assert_eq!(ch.run(&a, &mut Vec::new()).unwrap(), Some(a.clone()));
    let mut log = Vec::new();
    let ex = Strategy::exhaustive(inapplicable());
    assert_eq!(ex.run(&a, &mut log).unwrap(), Some(a.clone()));
    assert!(log.is_empty());
}

#[test]
fn choice_is_left_biased() {
    let a = a_rev();
    let mut log = Vec::new();
    let ch = Strategy::choice(prim(Prim::Id), prim(Prim::Inline(InliningPredicate::LambdaRewrite)));
    assert_eq!(ch.run(&a, &mut log).unwrap(), Some(a.clone()));
    assert_eq!(log.iter().map(|s| s.label.as_str()).collect::<Vec<_>>(), vec!["id"]);
}

#[test]
fn seq_equals_manual_application() {
    let a = a_rev();
    let s = Strategy::seq([
        prim(Prim::Inline(InliningPredicate::LambdaRewrite)),
        prim(Prim::Inline(InliningPredicate::Match)),
    ]);
    let b = inline(&a, InliningPredicate::LambdaRewrite).unwrap();
    let c = inline(&b, InliningPredicate::Match).unwrap();
    assert_eq!(s.apply(&a).unwrap().output, c);
}

#[test]
fn exhaustive_is_fuel_guarded() {
    let a = a_rev();
    let err = Strategy::exhaustive(prim(Prim::Id)).apply(&a).unwrap_err();
    assert_eq!(err, StrategyError::FuelExhausted { strategy: "id".into(), fuel: EXHAUSTIVE_FUEL });
}

#[test]
fn exhaustive_match_inlining_removes_match_calls() {
    let a = a_rev();
    let is_match = |f: &Symbol| a.closures.get(f) == Some(&crate::rewriting::ClosureKind::Match);
    let occurrences: usize = a.rules.iter().map(|r| r.rhs.count_symbols(&is_match)).sum();
    let mut log = Vec::new();
    let b = Strategy::exhaustive(prim(Prim::Inline(InliningPredicate::Match))).run(&a, &mut log).unwrap().unwrap();
    assert!(log.len() <= occurrences);
    assert!(b.rules.iter().all(|r| !r.rhs.any_symbol(&is_match)));
}

#[test]
fn simplify_rev() {
    let run = simplify(&a_rev()).unwrap();
    let want = parse_rules(R_REV).unwrap();
    assert!(!run.output.has_app());
    assert!(isomorphism(&run.output.rules, &want).is_some(), "{}", run.output);
    let stages: Vec<&str> = run.stages().iter().map(|(l, _)| *l).collect();
    assert_eq!(stages, vec!["input", "simpATRS", "toTRS", "simpTRS"]);
}

#[test]
fn simplify_rev_intermediate_stages() {
    let run = simplify(&a_rev()).unwrap();
    assert_eq!(run.stage("simpATRS").unwrap().rules.len(), 11);
    // after cfa the six live rules remain, with the composition split in two
    assert_eq!(run.stage("cfa").unwrap().rules.len(), 7);
    let uncurried = run.stage("uncurry").unwrap();
    assert!(!uncurried.has_app());
}

#[test]
fn simplify_identity() {
    let a = defunctionalize(&parse_program("let main x = x ;;").unwrap());
    let run = simplify(&a).unwrap();
    assert_eq!(run.output.to_string().trim(), "main(x) -> x");
}

#[test]
fn parse_default_blocks() {
    let src = "exhaustive inline(lambda-rewrite); exhaustive inline(match); exhaustive inline(constructor); usableRules";
    assert_eq!(parse_strategy(src).unwrap(), Strategy::simp_atrs());
    assert_eq!(parse_strategy("cfa; uncurry; usableRules").unwrap(), Strategy::to_trs());
    let src = "exhaustive ((inline(decreasing); usableRules) <> cfaDCE)";
    assert_eq!(parse_strategy(src).unwrap(), Strategy::simp_trs());
    assert_eq!(parse_strategy("simplify").unwrap(), Strategy::simplify());
    for s in [Strategy::simp_atrs(), Strategy::to_trs(), Strategy::simp_trs()] {
        assert_eq!(parse_strategy(&s.to_string()).unwrap(), s);
    }
    assert_eq!(Strategy::simp_trs().to_string(), "exhaustive ((inline(decreasing); usableRules) <> cfaDCE)");
}

#[test]
fn parse_errors() {
    let e = parse_strategy("cfa; inline(bogus)").unwrap_err();
    assert_eq!(e.offset, 12);
    assert!(parse_strategy("cfa;").is_err());
    assert!(parse_strategy("(cfa").is_err());
    assert!(parse_strategy("cfa cfa").is_err());
    assert!(parse_strategy("cfa & uncurry").is_err());
    assert!(parse_strategy("frobnicate").is_err());
}
