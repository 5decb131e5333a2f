//! The invariant suite behind `defunc-trs check`: simulation of the source
//! program by its defunctionalization, and per-transformation semantic
//! preservation, step relations, non-ambiguity and grammar safety.

use std::fmt;

use crate::cfa::{build_grammar, dead_rules, NonTerminal, CFA_FUEL};
use crate::pcf::{pcf_eval, Program};
use crate::rewriting::{check_non_ambiguous, list_term, normalize, Atrs, Policy, Term};
use crate::strategy::Run;
use crate::Error;

/// Input lengths and element pattern for generated inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputSpec {
    pub min: usize,
    pub max: usize,
}

impl InputSpec {
    /// `N` or `A..B` (inclusive).
    pub fn parse(s: &str) -> Result<InputSpec, Error> {
        let bad = || Error::Usage(format!("bad input spec `{s}`, expected N or A..B"));
        let (a, b) = match s.split_once("..") {
            Some((a, b)) => (a.trim(), b.trim()),
            None => ("0", s.trim()),
        };
        let min = a.parse().map_err(|_| bad())?;
        let max = b.parse().map_err(|_| bad())?;
        if min > max {
            return Err(bad());
        }
        Ok(InputSpec { min, max })
    }

    /// One input vector per size: every parameter gets a list of that many
    /// elements (small naturals if the program uses them, else short lists
    /// of `[]`), or a natural of that size if lists are not used.
    pub fn generate(&self, p: &Program) -> Result<Vec<Vec<Term>>, Error> {
        let has = |n: &str| p.data.iter().any(|c| c.name() == n);
        let nat = |k: usize| (0..k).fold(Term::constant("0"), |t, _| Term::fun("S", vec![t]));
        let element = |i: usize| {
            let k = (i * 7 + 3) % 4;
            if has("S") {
                nat(k)
            } else {
                list_term(vec![Term::constant("[]"); k % 3])
            }
        };
        let input = |n: usize| -> Result<Term, Error> {
            if has("::") {
                Ok(list_term((0..n).map(element).collect()))
            } else if has("S") {
                Ok(nat(n))
            } else {
                Err(Error::Usage("can only generate list or natural-number inputs".into()))
            }
        };
        (self.min..=self.max).map(|n| p.params.iter().map(|_| input(n)).collect()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub check: String,
    pub stage: String,
    pub passed: usize,
    pub total: usize,
    pub note: String,
}

impl Row {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Report {
    pub rows: Vec<Row>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(Row::ok)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.rows.iter().map(|r| r.stage.len()).max().unwrap_or(5).max(5);
        writeln!(f, "{:<14} {:<w$} {:>9}  result", "check", "stage", "passed")?;
        for r in &self.rows {
            let status = if r.ok() { "ok" } else { "FAIL" };
            let frac = format!("{}/{}", r.passed, r.total);
            write!(f, "{:<14} {:<w$} {frac:>9}  {status}", r.check, r.stage)?;
            if !r.note.is_empty() {
                write!(f, "  {}", r.note)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn main_call(a: &Atrs, inputs: &[Term]) -> Term {
    Term::Fun(a.main.clone(), inputs.to_vec())
}

/// Result and length of the innermost reduction of `main(inputs)`.
pub fn run_main(a: &Atrs, inputs: &[Term], fuel: usize) -> Result<(Term, usize), Error> {
    let t = normalize(a, &main_call(a, inputs), fuel, Policy::LeftmostInnermost)?;
    Ok((t.normal_form().clone(), t.len()))
}

/// Whether `after` must take exactly as many steps as `before`, or the
/// halving bound of inlining applies.
fn step_relation(label: &str) -> &'static str {
    if label.starts_with("inline") {
        "l <= 2l'+2"
    } else {
        "l = l'"
    }
}

/// Runs every check over the transformations recorded in `run`.
pub fn check(p: &Program, run: &Run, inputs: &[Vec<Term>], fuel: usize) -> Result<Report, Error> {
    let mut rows = Vec::new();

    let mut passed = 0;
    for inp in inputs {
        let (v, n) = pcf_eval(p, inp, fuel)?;
        let (w, m) = run_main(&run.input, inp, fuel)?;
        passed += usize::from(v == w && n == m);
    }
    rows.push(Row {
        check: "simulation".into(),
        stage: "defunc".into(),
        passed,
        total: inputs.len(),
        note: "source steps = rewrite steps".into(),
    });

    let mut before = &run.input;
    let mut chain: Vec<(&str, &Atrs)> = vec![("defunc", &run.input)];
    for snap in run.log.iter().filter(|s| !s.stage) {
        let rel = step_relation(&snap.label);
        let mut passed = 0;
        for inp in inputs {
            let (v, l) = run_main(before, inp, fuel)?;
            let (w, l2) = run_main(&snap.atrs, inp, fuel)?;
            let steps_ok = if rel == "l = l'" { l == l2 } else { l <= 2 * l2 + 2 };
            passed += usize::from(v == w && steps_ok);
        }
        rows.push(Row {
            check: "preservation".into(),
            stage: snap.label.clone(),
            passed,
            total: inputs.len(),
            note: rel.into(),
        });
        chain.push((&snap.label, &snap.atrs));
        before = &snap.atrs;
    }

    for (label, a) in &chain {
        let rep = check_non_ambiguous(a);
        rows.push(Row {
            check: "non-ambiguity".into(),
            stage: label.to_string(),
            passed: usize::from(rep.non_ambiguous),
            total: 1,
            note: String::new(),
        });
    }

    let analysed = before_first_cfa(run);
    let g = build_grammar(analysed, CFA_FUEL)?;
    let dead = dead_rules(&g, analysed);
    let (mut passed, mut total) = (0, 0);
    for inp in inputs {
        let trace = normalize(analysed, &main_call(analysed, inp), fuel, Policy::LeftmostInnermost)?;
        for step in &trace.steps {
            total += 1;
            let live = !dead.contains(&step.rule);
            let covered = step
                .subst
                .iter()
                .all(|(x, v)| g.generates(&NonTerminal::Var(x.clone(), step.rule), v));
            passed += usize::from(live && covered);
        }
    }
    rows.push(Row {
        check: "grammar-safety".into(),
        stage: "cfa input".into(),
        passed,
        total,
        note: "trace steps covered".into(),
    });
    Ok(Report { rows })
}

/// The system the first control-flow analysis ran on, or the final one.
pub fn before_first_cfa(run: &Run) -> &Atrs {
    let prims: Vec<_> = run.log.iter().filter(|s| !s.stage).collect();
    match prims.iter().position(|s| s.label == "cfa" || s.label == "cfaDCE") {
        Some(0) => &run.input,
        Some(i) => &prims[i - 1].atrs,
        None => &run.output,
    }
}
