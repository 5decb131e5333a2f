//! Regular tree grammars over the signature of a rewrite system.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::rewriting::{Symbol, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NonTerminal {
    Start,
    /// Generates every data term.
    Any,
    /// Reducts of the right-hand side of rule `i`.
    Rule(usize),
    /// Values bound to variable `x` of rule `i`.
    Var(Var, usize),
}

impl fmt::Display for NonTerminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonTerminal::Start => f.write_str("S"),
            NonTerminal::Any => f.write_str("*"),
            NonTerminal::Rule(i) => write!(f, "R{i}"),
            NonTerminal::Var(x, i) => write!(f, "{x}_{i}"),
        }
    }
}

/// A term whose leaves may be nonterminals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GTerm {
    N(NonTerminal),
    F(Symbol, Vec<GTerm>),
}

impl GTerm {
    /// Reads a rule side, turning variable `x` into the nonterminal `x_i`.
    pub fn from_rule_side(t: &Term, rule: usize) -> GTerm {
        match t {
            Term::Var(x) => GTerm::N(NonTerminal::Var(x.clone(), rule)),
            Term::Fun(f, args) => GTerm::F(f.clone(), args.iter().map(|a| GTerm::from_rule_side(a, rule)).collect()),
        }
    }

    /// Nonterminals become variables named after them, for printing.
    pub fn to_term(&self) -> Term {
        match self {
            GTerm::N(n) => Term::var(&n.to_string()),
            GTerm::F(f, args) => Term::Fun(f.clone(), args.iter().map(GTerm::to_term).collect()),
        }
    }

    pub fn any_symbol(&self, pred: &impl Fn(&Symbol) -> bool) -> bool {
        match self {
            GTerm::N(_) => false,
            GTerm::F(f, args) => pred(f) || args.iter().any(|a| a.any_symbol(pred)),
        }
    }

    /// Function-symbol nodes with their positions, pre-order.
    pub(crate) fn calls(&self) -> Vec<(Vec<usize>, &GTerm)> {
        fn go<'a>(t: &'a GTerm, cur: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a GTerm)>) {
            if let GTerm::F(_, args) = t {
                out.push((cur.clone(), t));
                for (i, a) in args.iter().enumerate() {
                    cur.push(i);
                    go(a, cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub(crate) fn replace_at(&self, path: &[usize], by: GTerm) -> GTerm {
        match path.split_first() {
            None => by,
            Some((&i, rest)) => match self {
                GTerm::F(f, args) => {
                    let mut args = args.clone();
                    args[i] = args[i].replace_at(rest, by);
                    GTerm::F(f.clone(), args)
                }
                GTerm::N(_) => unreachable!("paths come from calls()"),
            },
        }
    }
}

impl fmt::Display for GTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TreeGrammar {
    productions: BTreeMap<NonTerminal, BTreeSet<GTerm>>,
}

impl TreeGrammar {
    pub fn new() -> TreeGrammar {
        TreeGrammar::default()
    }

    /// Returns true if the production is new.
    pub fn add(&mut self, n: NonTerminal, t: GTerm) -> bool {
        self.productions.entry(n).or_default().insert(t)
    }

    pub fn productions(&self, n: &NonTerminal) -> impl Iterator<Item = &GTerm> {
        self.productions.get(n).into_iter().flatten()
    }

    pub fn has_productions(&self, n: &NonTerminal) -> bool {
        self.productions.get(n).is_some_and(|p| !p.is_empty())
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = &NonTerminal> {
        self.productions.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NonTerminal, &GTerm)> {
        self.productions.iter().flat_map(|(n, ps)| ps.iter().map(move |p| (n, p)))
    }

    pub fn len(&self) -> usize {
        self.productions.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Replaces ε-productions `N -> M` by the non-ε productions reachable
    /// through ε-chains from `N`. The language of every nonterminal is kept.
    pub fn eliminate_epsilon(&self) -> TreeGrammar {
        let mut out = TreeGrammar::new();
        for n in self.nonterminals() {
            let mut seen = BTreeSet::from([n.clone()]);
            let mut stack = vec![n.clone()];
            while let Some(m) = stack.pop() {
                for p in self.productions(&m) {
                    match p {
                        GTerm::N(k) => {
                            if seen.insert(k.clone()) {
                                stack.push(k.clone());
                            }
                        }
                        GTerm::F(..) => {
                            out.add(n.clone(), p.clone());
                        }
                    }
                }
            }
        }
        out
    }

    /// Decides `n ⇒* t` for a ground term `t`.
    pub fn generates(&self, n: &NonTerminal, t: &Term) -> bool {
        self.annotate(t).nts.contains(n)
    }

    /// Nonterminals generating `t` and each of its subterms, bottom-up.
    fn annotate(&self, t: &Term) -> Annot {
        let kids: Vec<Annot> = t.args().iter().map(|a| self.annotate(a)).collect();
        let mut nts = BTreeSet::new();
        if t.is_var() {
            return Annot { nts, kids };
        }
        for (n, p) in self.iter() {
            if matches!(p, GTerm::F(..)) && accepts(p, t, &kids, &BTreeSet::new()) {
                nts.insert(n.clone());
            }
        }
        loop {
            let before = nts.len();
            for (n, p) in self.iter() {
                if let GTerm::N(m) = p {
                    if nts.contains(m) {
                        nts.insert(n.clone());
                    }
                }
            }
            if nts.len() == before {
                break;
            }
        }
        Annot { nts, kids }
    }
}

struct Annot {
    nts: BTreeSet<NonTerminal>,
    kids: Vec<Annot>,
}

/// Does grammar term `g` derive `t`, given annotations of `t`'s arguments
/// (`kids`) and the nonterminals known to derive `t` itself (`here`)?
fn accepts(g: &GTerm, t: &Term, kids: &[Annot], here: &BTreeSet<NonTerminal>) -> bool {
    match (g, t) {
        (GTerm::N(m), _) => here.contains(m),
        (GTerm::F(f, gs), Term::Fun(h, ts)) => {
            f == h && gs.iter().zip(ts).zip(kids).all(|((g, t), k)| accepts(g, t, &k.kids, &k.nts))
        }
        (GTerm::F(..), Term::Var(_)) => false,
    }
}

impl fmt::Display for TreeGrammar {
    /// One line per nonterminal, `N → t1 | t2 | ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, ps) in &self.productions {
            let alts: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
            writeln!(f, "{n} → {}", alts.join(" | "))?;
        }
        Ok(())
    }
}
