//! End-to-end acceptance criteria. Runs without the test harness so that
//! the PASS/FAIL line of every criterion is always printed; exits non-zero
//! if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use defunc_trs::cfa::{build_grammar, dead_rules, NonTerminal, CFA_FUEL};
use defunc_trs::check::before_first_cfa;
use defunc_trs::defunc::defunctionalize;
use defunc_trs::pcf::{pcf_eval, Program};
use defunc_trs::rewriting::{
    check_non_ambiguous, isomorphism, list_term, match_term, normalize, parse_rules, Atrs, Policy, SymbolKind, Term,
    DEFAULT_FUEL,
};
use defunc_trs::strategy::{simplify, Run};
use defunc_trs::transforms::{eta_saturate, uncurry, Uncurrier, ETA_FUEL};
use defunc_trs::trs_io::{emit, parse_trs, OutputFormat};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const A_REV: &str = "C1(f,g) @ z -> f @ (g @ z)
    C2 @ z -> z
    C3(x) @ z -> x::z
    comp1(f) @ g -> C1(f,g)
    comp @ f -> comp1(f)
    match[walk]([]) -> C2
    match[walk](x::ys) -> comp @ (fix[walk] @ ys) @ C3(x)
    walk @ xs -> match[walk](xs)
    fix[walk] @ xs -> walk @ xs
    rev @ l -> fix[walk] @ l @ []
    main(l) -> rev @ l";

const R_REV: &str = "C1u(C2,C3(x),z) -> x::z
    C1u(C1(f,g),C3(x),z) -> C1u(f,g,x::z)
    fix[walk]u([]) -> C2
    fix[walk]u(x::ys) -> C1(fix[walk]u(ys),C3(x))
    main([]) -> []
    main(x::ys) -> C1u(fix[walk]u(ys),C3(x),[])";

const GOLDEN_TIME: Duration = Duration::from_secs(5);
const SIMULATION_TIME: Duration = Duration::from_secs(30);
const MAX_SIZE: usize = 16;
const SAFETY_MAX_SIZE: usize = 12;
const LINEAR_RANGE: std::ops::RangeInclusive<usize> = 2..=24;
const UNCURRY_SAMPLES: usize = 200;
const POLICY_SAMPLES: usize = 50;
const RANDOM_TERM_DEPTH: usize = 3;
const SEED: u64 = 0x5eed;

type Outcome = Result<String, String>;

struct Compiled {
    name: &'static str,
    program: Program,
    run: Run,
}

fn compile_corpus() -> Vec<Compiled> {
    common::CORPUS
        .iter()
        .map(|&name| {
            let (program, _) = common::load(name);
            let run = simplify(&defunctionalize(&program)).unwrap_or_else(|e| panic!("{name}: {e}"));
            Compiled { name, program, run }
        })
        .collect()
}

fn main_call(a: &Atrs, inputs: &[Term]) -> Term {
    Term::Fun(a.main.clone(), inputs.to_vec())
}

fn steps(a: &Atrs, inputs: &[Term]) -> Result<(Term, usize), String> {
    let tr = normalize(a, &main_call(a, inputs), DEFAULT_FUEL, Policy::LeftmostInnermost).map_err(|e| e.to_string())?;
    Ok((tr.normal_form().clone(), tr.len()))
}

/// Input vectors of list length 0..=max, shared by every criterion.
fn inputs(p: &Program, max: usize) -> Vec<Vec<Term>> {
    common::inputs(p, max, SEED)
}

/// Consecutive (before, after) pairs of primitive transformations.
fn prim_steps(run: &Run) -> Vec<(&str, &Atrs, &Atrs)> {
    let mut out = Vec::new();
    let mut before = &run.input;
    for snap in run.log.iter().filter(|s| !s.stage) {
        out.push((snap.label.as_str(), before, &snap.atrs));
        before = &snap.atrs;
    }
    out
}

fn every_system(run: &Run) -> Vec<(&str, &Atrs)> {
    let mut out = vec![("defunc", &run.input)];
    out.extend(run.log.iter().map(|s| (s.label.as_str(), &s.atrs)));
    out.push(("final", &run.output));
    out
}

fn golden_rev() -> Outcome {
    let start = Instant::now();
    let (p, _) = common::load("rev");
    let a = defunctionalize(&p);
    let run = simplify(&a).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let a_rev = parse_rules(A_REV).unwrap();
    let r_rev = parse_rules(R_REV).unwrap();
    if isomorphism(&a.rules, &a_rev).is_none() {
        return Err(format!("defunctionalized rev is not isomorphic to the listing:\n{a}"));
    }
    if run.output.rules.len() != 6 || isomorphism(&run.output.rules, &r_rev).is_none() {
        return Err(format!("final rev is not isomorphic to the listing:\n{}", run.output));
    }
    if elapsed >= GOLDEN_TIME {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{} defunctionalized rules, 6 final rules, {elapsed:?}", a.rules.len()))
}

fn simulation(corpus: &[Compiled]) -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for c in corpus {
        for inp in inputs(&c.program, MAX_SIZE) {
            let (v, n) = pcf_eval(&c.program, &inp, DEFAULT_FUEL).map_err(|e| format!("{}: {e}", c.name))?;
            let (w, m) = steps(&c.run.input, &inp)?;
            if v != w || n != m {
                return Err(format!("{} on {inp:?}: source {v} in {n}, rewriting {w} in {m}", c.name));
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= SIMULATION_TIME {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{checked} runs, equal step counts, {elapsed:?}"))
}

fn preservation(corpus: &[Compiled]) -> Outcome {
    let mut checked = 0;
    for c in corpus {
        let ins = inputs(&c.program, MAX_SIZE);
        let mut pairs: Vec<(&str, &Atrs, &Atrs)> = prim_steps(&c.run);
        let mut before = &c.run.input;
        for snap in c.run.log.iter().filter(|s| s.stage) {
            pairs.push((snap.label.as_str(), before, &snap.atrs));
            before = &snap.atrs;
        }
        for (label, a, b) in pairs {
            for inp in &ins {
                let (v, _) = steps(a, inp)?;
                let (w, _) = steps(b, inp)?;
                if v != w {
                    return Err(format!("{} {label} on {inp:?}: {v} became {w}", c.name));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} stage/input pairs agree"))
}

fn step_relations(corpus: &[Compiled]) -> Outcome {
    let (mut exact, mut bounded) = (0, 0);
    for c in corpus {
        let ins = inputs(&c.program, MAX_SIZE);
        for (label, a, b) in prim_steps(&c.run) {
            for inp in &ins {
                let (_, l) = steps(a, inp)?;
                let (_, l2) = steps(b, inp)?;
                if label.starts_with("inline") {
                    if l > 2 * l2 + 2 {
                        return Err(format!("{} {label} on {inp:?}: {l} > 2*{l2}+2", c.name));
                    }
                    bounded += 1;
                } else {
                    if l != l2 {
                        return Err(format!("{} {label} on {inp:?}: {l} != {l2}", c.name));
                    }
                    exact += 1;
                }
            }
        }
    }
    Ok(format!("{exact} exact, {bounded} inline-bounded"))
}

fn linear_rev(corpus: &[Compiled]) -> Outcome {
    let rev = corpus.iter().find(|c| c.name == "rev").unwrap();
    let counts = LINEAR_RANGE
        .chain(std::iter::once(LINEAR_RANGE.end() + 1))
        .map(|n| {
            let input = list_term((0..n).map(|i| list_term(vec![Term::constant("[]"); i % 2])).collect());
            steps(&rev.run.output, &[input]).map(|(_, k)| k)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let diffs: Vec<usize> = counts.windows(2).map(|w| w[1] - w[0]).collect();
    if diffs.windows(2).any(|w| w[0] != w[1]) {
        return Err(format!("forward differences vary: {diffs:?}"));
    }
    Ok(format!("steps(n+1) - steps(n) = {} for n in {LINEAR_RANGE:?}", diffs[0]))
}

fn grammar_safety(corpus: &[Compiled]) -> Outcome {
    let mut checked = 0;
    for c in corpus {
        let a = before_first_cfa(&c.run);
        let g = build_grammar(a, CFA_FUEL).map_err(|e| format!("{}: {e}", c.name))?;
        let dead = dead_rules(&g, a);
        for inp in inputs(&c.program, SAFETY_MAX_SIZE) {
            let tr = normalize(a, &main_call(a, &inp), DEFAULT_FUEL, Policy::LeftmostInnermost)
                .map_err(|e| e.to_string())?;
            for step in &tr.steps {
                if dead.contains(&step.rule) {
                    return Err(format!("{}: dead rule {} fired", c.name, step.rule));
                }
                for (x, v) in step.subst.iter() {
                    if !g.generates(&NonTerminal::Var(x.clone(), step.rule), v) {
                        return Err(format!("{}: {x} := {v} in rule {} not covered", c.name, step.rule));
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} steps covered"))
}

/// Whether `s -> t` is a step of full (unrestricted) rewriting with `a`.
fn is_full_step(a: &Atrs, s: &Term, t: &Term) -> bool {
    s.subterms().into_iter().any(|(p, u)| {
        a.rules.iter().any(|r| {
            match_term(&r.lhs, u).is_some_and(|sigma| s.replace_at(&p, r.rhs.apply(&sigma)).as_ref() == Ok(t))
        })
    })
}

fn uncurry_simulation(corpus: &[Compiled]) -> Outcome {
    let mut pool = Vec::new();
    for c in corpus {
        // the system uncurry was applied to in the pipeline
        let Some((_, a, _)) = prim_steps(&c.run).into_iter().find(|(l, _, _)| *l == "uncurry") else {
            continue;
        };
        let eta = eta_saturate(a, ETA_FUEL).map_err(|e| e.to_string())?;
        let flat = uncurry(a).map_err(|e| e.to_string())?;
        let u = Uncurrier::new(&eta);
        for inp in inputs(&c.program, MAX_SIZE) {
            let tr = normalize(&eta, &main_call(&eta, &inp), DEFAULT_FUEL, Policy::LeftmostInnermost)
                .map_err(|e| e.to_string())?;
            for i in 0..tr.len() {
                let after = if i + 1 < tr.len() { tr.term_before(i + 1) } else { tr.normal_form() };
                pool.push((c.name, flat.clone(), tr.term_before(i).clone(), after.clone(), u.clone()));
            }
        }
    }
    if pool.len() < UNCURRY_SAMPLES {
        return Err(format!("only {} steps available", pool.len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for (name, flat, s, t, u) in pool.choose_multiple(&mut rng, UNCURRY_SAMPLES) {
        let (Some(fs), Some(ft)) = (u.term(s), u.term(t)) else {
            return Err(format!("{name}: no uncurried image of {s} -> {t}"));
        };
        if !is_full_step(flat, &fs, &ft) {
            return Err(format!("{name}: {fs} -> {ft} is not a step"));
        }
    }
    Ok(format!("{UNCURRY_SAMPLES} of {} steps sampled, all simulated", pool.len()))
}

/// A random constructor term of depth at most `depth`: data, or closures
/// over data.
fn random_value(a: &Atrs, rng: &mut ChaCha8Rng, depth: usize) -> Term {
    let sig = a.signature();
    let cons: Vec<_> = sig.iter().filter(|(f, k)| *k == SymbolKind::Constructor && (depth > 0 || f.arity() == 0)).collect();
    match cons.choose(rng) {
        Some((f, _)) => Term::Fun(f.clone(), (0..f.arity()).map(|_| random_value(a, rng, depth.saturating_sub(1))).collect()),
        None => Term::constant("[]"),
    }
}

/// A call to a defined symbol (or `@`) whose arguments are values or,
/// while `depth` allows, further calls.
fn random_term(p: &Program, a: &Atrs, rng: &mut ChaCha8Rng, depth: usize) -> Term {
    let sig = a.signature();
    let calls: Vec<_> = sig.iter().filter(|(_, k)| *k == SymbolKind::Defined).map(|(f, _)| f).collect();
    let f = if rng.gen_bool(0.3) { &a.main } else { *calls.choose(rng).unwrap() };
    let args = (0..f.arity())
        .map(|_| match rng.gen_range(0..3) {
            0 if depth > 0 => random_term(p, a, rng, depth - 1),
            1 => common::list_input(p, rng.gen_range(0..5), rng),
            _ => random_value(a, rng, 2),
        })
        .collect();
    Term::Fun(f.clone(), args)
}

fn policy_independence(corpus: &[Compiled]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let systems: Vec<(&Compiled, &Atrs)> = corpus.iter().flat_map(|c| [(c, &c.run.input), (c, &c.run.output)]).collect();
    let (mut total, mut nontrivial) = (0, 0);
    for i in 0..POLICY_SAMPLES {
        let (c, a) = systems[i % systems.len()];
        let t = random_term(&c.program, a, &mut rng, RANDOM_TERM_DEPTH);
        let run = |policy| normalize(a, &t, DEFAULT_FUEL, policy).map_err(|e| format!("{} {t}: {e}", c.name));
        let (l, r) = (run(Policy::LeftmostInnermost)?, run(Policy::RightmostInnermost)?);
        if l.len() != r.len() || l.normal_form() != r.normal_form() {
            return Err(format!("{} {t}: {} vs {} steps", c.name, l.len(), r.len()));
        }
        total += l.len();
        nontrivial += usize::from(l.steps != r.steps);
    }
    Ok(format!("{POLICY_SAMPLES} terms, {total} steps, {nontrivial} reduced in a different order, equal lengths"))
}

fn non_ambiguity(corpus: &[Compiled]) -> Outcome {
    let mut checked = 0;
    for c in corpus {
        for (label, a) in every_system(&c.run) {
            let rep = check_non_ambiguous(a);
            if !rep.non_ambiguous {
                return Err(format!("{} {label}: {:?}", c.name, rep.overlaps));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} systems non-ambiguous"))
}

fn round_trip(corpus: &[Compiled]) -> Outcome {
    let mut checked = 0;
    for c in corpus {
        for (label, a) in every_system(&c.run) {
            for format in OutputFormat::ALL {
                if format == OutputFormat::Classic && a.has_app() {
                    continue;
                }
                let text = emit(a, format).map_err(|e| e.to_string())?;
                if emit(a, format).map_err(|e| e.to_string())? != text {
                    return Err(format!("{} {label} {format}: output differs between runs", c.name));
                }
                let b = parse_trs(&text).map_err(|e| format!("{} {label} {format}: {e}\n{text}", c.name))?;
                if !b.structurally_eq(a) {
                    return Err(format!("{} {label} {format}: round trip changed\n{a}\ninto\n{b}", c.name));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} artifacts round-trip, emission deterministic"))
}

fn main() {
    let corpus = compile_corpus();
    let results: Vec<(&str, Outcome)> = vec![
        ("golden rev pipeline", golden_rev()),
        ("step-wise simulation", simulation(&corpus)),
        ("semantic preservation", preservation(&corpus)),
        ("step relations", step_relations(&corpus)),
        ("linear final rev", linear_rev(&corpus)),
        ("grammar safety", grammar_safety(&corpus)),
        ("uncurry simulation", uncurry_simulation(&corpus)),
        ("policy independence", policy_independence(&corpus)),
        ("non-ambiguity", non_ambiguity(&corpus)),
        ("emit round trip", round_trip(&corpus)),
    ];
    let mut failed = 0;
    for (i, (name, res)) in results.iter().enumerate() {
        match res {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
