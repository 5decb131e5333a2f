use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::term::{unify, Fresh, Position, Symbol, Term, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Constructor,
    Defined,
    Application,
}

/// Origin of a closure constructor introduced by defunctionalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClosureKind {
    Lam,
    Fix,
    Match,
}

impl ClosureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClosureKind::Lam => "lam",
            ClosureKind::Fix => "fix",
            ClosureKind::Match => "match",
        }
    }

    pub fn parse(s: &str) -> Option<ClosureKind> {
        match s {
            "lam" => Some(ClosureKind::Lam),
            "fix" => Some(ClosureKind::Fix),
            "match" => Some(ClosureKind::Match),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("left-hand side is a variable: {0}")]
    VariableLhs(String),
    #[error("right-hand side variable {var} does not occur in the left-hand side of {rule}")]
    FreeRhsVar { var: String, rule: String },
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term) -> Result<Rule, RuleError> {
        if lhs.is_var() {
            return Err(RuleError::VariableLhs(lhs.to_string()));
        }
        let lv = lhs.var_set();
        if let Some(v) = rhs.vars().into_iter().find(|v| !lv.contains(v)) {
            return Err(RuleError::FreeRhsVar {
                var: v.to_string(),
                rule: format!("{lhs} -> {rhs}"),
            });
        }
        Ok(Rule { lhs, rhs })
    }

    pub fn root(&self) -> &Symbol {
        self.lhs.root().expect("rule lhs is never a variable")
    }

    pub fn vars(&self) -> Vec<Var> {
        self.lhs.vars()
    }

    /// Copy with every variable replaced by a fresh one.
    pub fn rename_apart(&self, fresh: &mut Fresh) -> Rule {
        let map: BTreeMap<Var, Var> =
            self.lhs.vars().into_iter().map(|v| (v.clone(), fresh.var(v.base()))).collect();
        Rule { lhs: self.lhs.rename(&map), rhs: self.rhs.rename(&map) }
    }

    /// Renames variables back to their base names, adding numeric suffixes
    /// where two distinct variables would share a name.
    pub fn canonical(&self) -> Rule {
        let mut used = BTreeSet::new();
        let mut map = BTreeMap::new();
        for v in self.lhs.vars() {
            let base = v.base();
            let base = if base.is_empty() { "x" } else { base };
            let mut name = base.to_string();
            let mut k = 1;
            while used.contains(&name) {
                name = format!("{base}{k}");
                k += 1;
            }
            used.insert(name.clone());
            map.insert(v, Var::new(&name));
        }
        Rule { lhs: self.lhs.rename(&map), rhs: self.rhs.rename(&map) }
    }

    /// The rule with variables renamed to `_0, _1, ...` by first occurrence.
    pub fn shape(&self) -> Rule {
        let map: BTreeMap<Var, Var> = self
            .lhs
            .vars()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, Var::new(&format!("_{i}"))))
            .collect();
        Rule { lhs: self.lhs.rename(&map), rhs: self.rhs.rename(&map) }
    }

    /// Equality up to variable renaming.
    pub fn alpha_eq(&self, other: &Rule) -> bool {
        self.shape() == other.shape()
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// An applicative rewrite system: ordered rules (the index of a rule is its
/// id), a designated `main` symbol, the data constructors that make up valid
/// inputs, and closure-constructor provenance from defunctionalization.
#[derive(Clone, PartialEq, Eq)]
pub struct Atrs {
    pub rules: Vec<Rule>,
    pub main: Symbol,
    pub data: BTreeSet<Symbol>,
    pub closures: BTreeMap<Symbol, ClosureKind>,
    /// Trusted property of defunctionalization output that calls from
    /// `main` on data never get stuck. Inlining refuses to run without it.
    pub sufficiently_defined: bool,
}

impl Atrs {
    pub fn new(rules: Vec<Rule>, main: Symbol) -> Atrs {
        Atrs {
            rules,
            main,
            data: BTreeSet::new(),
            closures: BTreeMap::new(),
            sufficiently_defined: false,
        }
    }

    /// Same metadata, different rules.
    pub fn with_rules(&self, rules: Vec<Rule>) -> Atrs {
        Atrs { rules, ..self.clone_meta() }
    }

    fn clone_meta(&self) -> Atrs {
        Atrs {
            rules: Vec::new(),
            main: self.main.clone(),
            data: self.data.clone(),
            closures: self.closures.clone(),
            sufficiently_defined: self.sufficiently_defined,
        }
    }

    /// Roots of left-hand sides.
    pub fn defined(&self) -> BTreeSet<Symbol> {
        self.rules.iter().map(|r| r.root().clone()).collect()
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out: BTreeSet<Symbol> = self.data.clone();
        for r in &self.rules {
            out.extend(r.lhs.symbols());
            out.extend(r.rhs.symbols());
        }
        out
    }

    pub fn kind(&self, f: &Symbol) -> SymbolKind {
        if f.is_app() {
            SymbolKind::Application
        } else if self.rules.iter().any(|r| r.root() == f) {
            SymbolKind::Defined
        } else {
            SymbolKind::Constructor
        }
    }

    pub fn signature(&self) -> Vec<(Symbol, SymbolKind)> {
        self.symbols().into_iter().map(|f| {
            let k = self.kind(&f);
            (f, k)
        }).collect()
    }

    pub fn has_app(&self) -> bool {
        self.rules.iter().any(|r| r.lhs.any_symbol(&Symbol::is_app) || r.rhs.any_symbol(&Symbol::is_app))
    }

    pub fn rules_defining<'a>(&'a self, f: &'a Symbol) -> impl Iterator<Item = (usize, &'a Rule)> + 'a {
        self.rules.iter().enumerate().filter(move |(_, r)| r.root() == f)
    }

    /// Drops duplicate rules (up to renaming), keeping the first occurrence.
    pub fn dedup_rules(rules: Vec<Rule>) -> Vec<Rule> {
        let mut seen = BTreeSet::new();
        rules.into_iter().filter(|r| seen.insert(r.shape())).collect()
    }

    /// Equality of rules up to per-rule variable renaming, plus metadata.
    pub fn structurally_eq(&self, other: &Atrs) -> bool {
        self.main == other.main
            && self.data == other.data
            && self.closures == other.closures
            && self.rules.len() == other.rules.len()
            && self.rules.iter().zip(&other.rules).all(|(a, b)| a.alpha_eq(b))
    }
}

impl fmt::Debug for Atrs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Atrs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// An overlap between the left-hand side of rule `outer` at `position` and
/// the (renamed) left-hand side of rule `inner`. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Overlap {
    pub outer: usize,
    pub inner: usize,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbiguityReport {
    pub non_ambiguous: bool,
    pub overlaps: Vec<Overlap>,
}

pub fn check_non_ambiguous(a: &Atrs) -> AmbiguityReport {
    check_rules_non_ambiguous(&a.rules)
}

pub fn check_rules_non_ambiguous(rules: &[Rule]) -> AmbiguityReport {
    let mut fresh = Fresh::new();
    let mut overlaps = Vec::new();
    for (i, ri) in rules.iter().enumerate() {
        for (p, sub) in ri.lhs.subterms() {
            let Some(f) = sub.root() else { continue };
            for (j, rj) in rules.iter().enumerate() {
                if p.is_root() && j <= i {
                    continue;
                }
                if rj.root() != f {
                    continue;
                }
                let rj = rj.rename_apart(&mut fresh);
                if unify(sub, &rj.lhs).is_some() {
                    overlaps.push(Overlap { outer: i, inner: j, position: p.clone() });
                }
            }
        }
    }
    AmbiguityReport { non_ambiguous: overlaps.is_empty(), overlaps }
}

/// Finds a bijective, arity-preserving renaming of symbols (fixing `@`)
/// under which the two rule lists are equal as multisets, up to per-rule
/// variable renaming.
pub fn isomorphism(a: &[Rule], b: &[Rule]) -> Option<BTreeMap<Symbol, Symbol>> {
    if a.len() != b.len() {
        return None;
    }
    let fp = |r: &Rule| fingerprint(&r.shape());
    let fa: Vec<String> = a.iter().map(fp).collect();
    let fb: Vec<String> = b.iter().map(fp).collect();
    let mut sa = fa.clone();
    let mut sb = fb.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut state = IsoState::default();
    if iso_search(a, b, &fa, &fb, 0, &mut used, &mut state) {
        Some(state.fwd)
    } else {
        None
    }
}

fn fingerprint(r: &Rule) -> String {
    fn go(t: &Term, out: &mut String) {
        match t {
            Term::Var(v) => out.push_str(v.name()),
            Term::Fun(f, args) => {
                if f.is_app() {
                    out.push('@');
                } else {
                    out.push_str(&format!("f{}", f.arity()));
                }
                out.push('(');
                for a in args {
                    go(a, out);
                    out.push(',');
                }
                out.push(')');
            }
        }
    }
    let mut s = String::new();
    go(&r.lhs, &mut s);
    s.push_str("->");
    go(&r.rhs, &mut s);
    s
}

#[derive(Default, Clone)]
struct IsoState {
    fwd: BTreeMap<Symbol, Symbol>,
    bwd: BTreeMap<Symbol, Symbol>,
}

fn iso_search(
    a: &[Rule],
    b: &[Rule],
    fa: &[String],
    fb: &[String],
    i: usize,
    used: &mut [bool],
    st: &mut IsoState,
) -> bool {
    if i == a.len() {
        return true;
    }
    for j in 0..b.len() {
        if used[j] || fa[i] != fb[j] {
            continue;
        }
        let saved = st.clone();
        let ra = a[i].shape();
        let rb = b[j].shape();
        if iso_term(&ra.lhs, &rb.lhs, st) && iso_term(&ra.rhs, &rb.rhs, st) {
            used[j] = true;
            if iso_search(a, b, fa, fb, i + 1, used, st) {
                return true;
            }
            used[j] = false;
        }
        *st = saved;
    }
    false
}

fn iso_term(s: &Term, t: &Term, st: &mut IsoState) -> bool {
    match (s, t) {
        (Term::Var(x), Term::Var(y)) => x == y,
        (Term::Fun(f, xs), Term::Fun(g, ys)) => {
            if f.arity() != g.arity() || f.is_app() != g.is_app() {
                return false;
            }
            match (st.fwd.get(f), st.bwd.get(g)) {
                (Some(g2), _) if g2 != g => return false,
                (_, Some(f2)) if f2 != f => return false,
                _ => {
                    st.fwd.insert(f.clone(), g.clone());
                    st.bwd.insert(g.clone(), f.clone());
                }
            }
            xs.iter().zip(ys).all(|(x, y)| iso_term(x, y, st))
        }
        _ => false,
    }
}
