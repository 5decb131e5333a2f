#![allow(dead_code)]

use std::path::PathBuf;

use defunc_trs::pcf::{load_program, Program, Typing};
use defunc_trs::rewriting::{list_term, Term};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS: [&str; 5] = ["rev", "fold_sum", "map", "isort", "identity"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(format!("{name}.fp"))
}

pub fn source(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn load(name: &str) -> (Program, Typing) {
    load_program(&source(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn nat(n: usize) -> Term {
    (0..n).fold(Term::constant("0"), |t, _| Term::fun("S", vec![t]))
}

/// A list of `len` elements: small naturals when the program uses them,
/// otherwise short lists of `[]`.
pub fn list_input(p: &Program, len: usize, rng: &mut ChaCha8Rng) -> Term {
    let has_nat = p.data.iter().any(|c| c.name() == "S");
    let items = (0..len)
        .map(|_| {
            let k = rng.gen_range(0..4);
            if has_nat {
                nat(k)
            } else {
                list_term(vec![Term::constant("[]"); k])
            }
        })
        .collect();
    list_term(items)
}

/// One input vector per length 0..=max_len, fixed seed.
pub fn inputs(p: &Program, max_len: usize, seed: u64) -> Vec<Vec<Term>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..=max_len)
        .map(|n| p.params.iter().map(|_| list_input(p, n, &mut rng)).collect())
        .collect()
}
