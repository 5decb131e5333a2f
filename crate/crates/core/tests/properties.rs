//! Property tests for the invariants of terms, reduction, defunctionalization
//! and the exchange format.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use defunc_trs::defunc::defunctionalize;
use defunc_trs::pcf::pcf_eval;
use defunc_trs::rewriting::{
    is_value, isomorphism, match_term, normalize, unify, Atrs, ClosureKind, Policy, Rewriter, Rule, Subst, Symbol,
    SymbolKind, Term, Var, DEFAULT_FUEL,
};
use defunc_trs::strategy::simplify;
use defunc_trs::trs_io::{emit, parse_trs, OutputFormat};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VARS: [&str; 3] = ["x", "y", "z"];
const SIGNATURE: [(&str, usize); 2] = [("f", 2), ("g", 1)];

fn term(vars: bool) -> impl Strategy<Value = Term> {
    let leaf = if vars {
        prop_oneof![
            prop::sample::select(&VARS[..]).prop_map(Term::var),
            prop::sample::select(&["a", "b"][..]).prop_map(Term::constant),
        ]
        .boxed()
    } else {
        prop::sample::select(&["a", "b"][..]).prop_map(Term::constant).boxed()
    };
    leaf.prop_recursive(4, 24, 2, |inner| {
        let app = (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::app(l, r)).boxed();
        prop::sample::select(&SIGNATURE[..])
            .prop_flat_map(move |(f, n)| prop::collection::vec(inner.clone(), n).prop_map(move |args| (f, args)))
            .prop_map(|(f, args)| Term::fun(f, args))
            .boxed()
            .prop_union(app)
    })
}

/// Renames variables to `v0, v1, ...` in order of first occurrence.
fn canonical(t: &Term) -> Term {
    let mut map = BTreeMap::new();
    for v in t.vars() {
        let n = map.len();
        map.entry(v).or_insert_with(|| Var::new(&format!("v{n}")));
    }
    t.rename(&map)
}

proptest! {
    #[test]
    fn matching_finds_every_instance(p in term(true), ground in prop::collection::vec(term(false), 3)) {
        let mut sigma = Subst::new();
        for (x, t) in VARS.iter().zip(ground) {
            sigma.insert(Var::new(x), t);
        }
        let instance = p.apply(&sigma);
        let found = match_term(&p, &instance);
        prop_assert!(found.is_some());
        prop_assert_eq!(p.apply(&found.unwrap()), instance);
    }

    #[test]
    fn unification_is_symmetric(s in term(true), t in term(true)) {
        let (st, ts) = (unify(&s, &t), unify(&t, &s));
        prop_assert_eq!(st.is_some(), ts.is_some());
        if let (Some(a), Some(b)) = (st, ts) {
            prop_assert_eq!(s.apply(&a), t.apply(&a));
            prop_assert_eq!(s.apply(&b), t.apply(&b));
            prop_assert_eq!(canonical(&s.apply(&a)), canonical(&s.apply(&b)));
        }
    }
}

struct Corpus {
    name: &'static str,
    program: defunc_trs::pcf::Program,
    systems: Vec<Atrs>,
}

fn corpus() -> &'static [Corpus] {
    static CORPUS: std::sync::OnceLock<Vec<Corpus>> = std::sync::OnceLock::new();
    CORPUS.get_or_init(|| {
        common::CORPUS
            .iter()
            .map(|&name| {
                let (program, _) = common::load(name);
                let run = simplify(&defunctionalize(&program)).unwrap();
                let mut systems = vec![run.input.clone()];
                systems.extend(run.log.iter().map(|s| s.atrs.clone()));
                Corpus { name, program, systems }
            })
            .collect()
    })
}

/// A random call over `a`, with data or nested calls as arguments.
fn random_call(c: &Corpus, a: &Atrs, rng: &mut ChaCha8Rng, depth: usize) -> Term {
    let calls: Vec<Symbol> =
        a.signature().into_iter().filter(|(_, k)| *k == SymbolKind::Defined).map(|(f, _)| f).collect();
    let f = if rng.gen_bool(0.4) { a.main.clone() } else { calls.choose(rng).unwrap().clone() };
    let args = (0..f.arity())
        .map(|_| {
            if depth > 0 && rng.gen_bool(0.3) {
                random_call(c, a, rng, depth - 1)
            } else {
                common::list_input(&c.program, rng.gen_range(0..6), rng)
            }
        })
        .collect();
    Term::Fun(f, args)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn traces_replay_as_call_by_value_steps(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = corpus().choose(&mut rng).unwrap();
        let a = c.systems.choose(&mut rng).unwrap();
        let t = random_call(c, a, &mut rng, 2);
        let tr = normalize(a, &t, DEFAULT_FUEL, Policy::LeftmostInnermost).unwrap();
        for (i, step) in tr.steps.iter().enumerate() {
            let before = tr.term_before(i);
            let r = &a.rules[step.rule];
            prop_assert_eq!(before.subterm_at(&step.position).unwrap(), &r.lhs.apply(&step.subst));
            prop_assert_eq!(&before.replace_at(&step.position, r.rhs.apply(&step.subst)).unwrap(), &step.result);
            for (x, v) in step.subst.iter() {
                prop_assert!(is_value(a, v), "{}: {} := {} is not a value", c.name, x, v);
            }
        }
        prop_assert!(Rewriter::for_atrs(a).redexes(tr.normal_form()).is_empty());
    }

    #[test]
    fn step_counts_do_not_depend_on_the_policy(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = corpus().choose(&mut rng).unwrap();
        let a = c.systems.choose(&mut rng).unwrap();
        let t = random_call(c, a, &mut rng, 2);
        let l = normalize(a, &t, DEFAULT_FUEL, Policy::LeftmostInnermost).unwrap();
        let r = normalize(a, &t, DEFAULT_FUEL, Policy::RightmostInnermost).unwrap();
        prop_assert_eq!(l.len(), r.len(), "{}: {}", c.name, t);
        prop_assert_eq!(l.normal_form(), r.normal_form());
    }

    #[test]
    fn typed_programs_do_not_get_stuck(seed in any::<u64>(), len in 0usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for c in corpus() {
            let inputs: Vec<Term> = c.program.params.iter().map(|_| common::list_input(&c.program, len, &mut rng)).collect();
            let (v, n) = pcf_eval(&c.program, &inputs, DEFAULT_FUEL).unwrap();
            let tr = normalize(&c.systems[0], &Term::Fun(c.systems[0].main.clone(), inputs), DEFAULT_FUEL, Policy::LeftmostInnermost).unwrap();
            prop_assert!(is_value(&c.systems[0], tr.normal_form()), "{} stuck at {}", c.name, tr.normal_form());
            prop_assert_eq!(tr.normal_form(), &v);
            prop_assert_eq!(tr.len(), n);
        }
    }
}

#[test]
fn closure_constructors_have_defining_rules() {
    for c in corpus() {
        let a = &c.systems[0];
        let defined = a.defined();
        // `C(..) @ z -> ..` defines the closure `C`
        let applied: BTreeSet<&Symbol> =
            a.rules.iter().filter(|r| r.root().is_app()).filter_map(|r| r.lhs.args()[0].root()).collect();
        for f in a.rules.iter().flat_map(|r| r.rhs.symbols()) {
            if a.closures.contains_key(&f) {
                assert!(defined.contains(&f) || applied.contains(&f), "{}: closure {f} has no defining rule", c.name);
            }
        }
    }
}

// `::` and `[]` only occur at their list arities, via `rename_symbols`
const NAMES: [&str; 9] = ["f", "g", "main", "Cons", "Nil", "fix[walk]", "fix_walk", "app", "c"];

/// Rule sets over awkward names: sanitization clashes, nullary lowercase
/// symbols below the root, and symbols that differ only in arity.
fn rule_set() -> impl Strategy<Value = Atrs> {
    let arg = term(true).prop_map(|t| rename_symbols(&t));
    let rule = (prop::sample::select(&NAMES[..]), prop::collection::vec(arg, 0..3), term(true))
        .prop_filter_map("rhs variables must occur in the lhs", |(f, args, rhs)| {
            let lhs = Term::fun(f, args);
            let rhs = rename_symbols(&rhs);
            let vars: BTreeSet<Var> = lhs.vars().into_iter().collect();
            let rhs = if rhs.vars().iter().all(|v| vars.contains(v)) { rhs } else { Term::constant("c") };
            Rule::new(lhs, rhs).ok()
        });
    (prop::collection::vec(rule, 1..6), any::<u64>()).prop_map(|(rules, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let main = rules[0].root().clone();
        let symbols: Vec<Symbol> = rules.iter().flat_map(|r| r.lhs.symbols().into_iter().chain(r.rhs.symbols())).filter(|f| !f.is_app()).collect();
        let mut a = Atrs::new(rules, main);
        for f in &symbols {
            match rng.gen_range(0..6) {
                0 => {
                    a.data.insert(f.clone());
                }
                1 => {
                    a.closures.insert(f.clone(), [ClosureKind::Lam, ClosureKind::Fix, ClosureKind::Match][rng.gen_range(0..3)]);
                }
                _ => {}
            }
        }
        // metadata for a symbol that no longer occurs
        if rng.gen_bool(0.3) {
            a.closures.insert(Symbol::new("match[gone]", 2), ClosureKind::Match);
        }
        a.sufficiently_defined = rng.gen_bool(0.5);
        a
    })
}

fn rename_symbols(t: &Term) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Fun(f, args) => {
            let name = match f.name() {
                "f" => "::",
                "g" => "fix[walk]",
                "a" => "c",
                "b" => "[]",
                other => other,
            };
            Term::fun(name, args.iter().map(rename_symbols).collect())
        }
    }
}

proptest! {
    #[test]
    fn emit_round_trips(a in rule_set()) {
        for format in OutputFormat::ALL {
            let text = match emit(&a, format) {
                Ok(text) => text,
                Err(_) => {
                    prop_assert!(format == OutputFormat::Classic && a.has_app());
                    continue;
                }
            };
            prop_assert_eq!(&emit(&a, format).unwrap(), &text);
            let b = parse_trs(&text).unwrap();
            prop_assert!(b.structurally_eq(&a), "{}:\n{}\n{}", format, text, b);
            prop_assert_eq!(b.sufficiently_defined, a.sufficiently_defined);
        }
    }

    #[test]
    fn isomorphism_survives_renaming_and_reordering(a in rule_set(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let symbols: Vec<Symbol> = a.symbols().into_iter().filter(|f| !f.is_app()).collect();
        let mut targets: Vec<usize> = (0..symbols.len()).collect();
        targets.shuffle(&mut rng);
        let map: BTreeMap<Symbol, Symbol> = symbols
            .iter()
            .zip(&targets)
            .map(|(f, &i)| (f.clone(), Symbol::new(&format!("s{i}"), f.arity())))
            .collect();
        let rename = |t: &Term| rename_with(t, &map);
        let mut rules: Vec<Rule> = a.rules.iter().map(|r| Rule::new(rename(&r.lhs), rename(&r.rhs)).unwrap()).collect();
        rules.shuffle(&mut rng);
        prop_assert!(isomorphism(&a.rules, &rules).is_some());
    }
}

fn rename_with(t: &Term, map: &BTreeMap<Symbol, Symbol>) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Fun(f, args) => {
            let g = map.get(f).cloned().unwrap_or_else(|| f.clone());
            Term::Fun(g, args.iter().map(|s| rename_with(s, map)).collect())
        }
    }
}
