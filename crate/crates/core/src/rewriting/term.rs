//! First-order terms over named symbols, with one distinguished binary
//! application symbol `@`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Name of the application symbol.
pub const APP: &str = "@";

/// A function symbol: a name plus a fixed arity.
///
/// Whether a symbol is a constructor or a defined symbol is a property of the
/// rule set it lives in (defined symbols are the roots of left-hand sides),
/// so it is not stored here. See [`super::SymbolKind`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    name: Arc<str>,
    arity: usize,
}

impl Symbol {
    pub fn new(name: &str, arity: usize) -> Symbol {
        Symbol { name: Arc::from(name), arity }
    }

    pub fn app() -> Symbol {
        Symbol::new(APP, 2)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_app(&self) -> bool {
        self.arity == 2 && &*self.name == APP
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A variable. Fresh variables carry a `#n` suffix that never appears in
/// names produced by [`super::Rule::canonical`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Var {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// The name with any fresh suffix stripped.
    pub fn base(&self) -> &str {
        match self.0.find('#') {
            Some(i) => &self.0[..i],
            None => &self.0,
        }
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Generator of fresh variables, `base#n` with increasing `n`.
#[derive(Debug, Default, Clone)]
pub struct Fresh {
    next: usize,
}

impl Fresh {
    pub fn new() -> Fresh {
        Fresh::default()
    }

    pub fn var(&mut self, base: &str) -> Var {
        self.next += 1;
        let base = match base.find('#') {
            Some(i) => &base[..i],
            None => base,
        };
        Var::new(&format!("{base}#{}", self.next))
    }
}

/// A 1-based path into a term. The empty path is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn child(&self, i: usize) -> Position {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<usize>> for Position {
    fn from(v: Vec<usize>) -> Position {
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid position {position} in term {term}")]
pub struct InvalidPosition {
    pub position: Position,
    pub term: String,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Fun(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::Fun(Symbol::new(name, 0), Vec::new())
    }

    /// Builds `f(args)`; the symbol's arity is taken from `args`.
    pub fn fun(name: &str, args: Vec<Term>) -> Term {
        Term::Fun(Symbol::new(name, args.len()), args)
    }

    pub fn app(l: Term, r: Term) -> Term {
        Term::Fun(Symbol::app(), vec![l, r])
    }

    /// Left-nested application `head @ a1 @ ... @ an`.
    pub fn apply_all(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::Fun(..) => None,
        }
    }

    pub fn root(&self) -> Option<&Symbol> {
        match self {
            Term::Var(_) => None,
            Term::Fun(f, _) => Some(f),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::Fun(_, a) => a,
        }
    }

    pub fn is_app(&self) -> bool {
        matches!(self, Term::Fun(f, _) if f.is_app())
    }

    /// Splits `h @ s1 @ ... @ sn` into `(h, [s1..sn])` where `h` is not
    /// rooted in `@`.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut head = self;
        let mut rev = Vec::new();
        while let Term::Fun(f, a) = head {
            if !f.is_app() {
                break;
            }
            rev.push(&a[1]);
            head = &a[0];
        }
        rev.reverse();
        (head, rev)
    }

    pub fn subterm_at(&self, p: &Position) -> Result<&Term, InvalidPosition> {
        let mut t = self;
        for &i in &p.0 {
            match t {
                Term::Fun(_, args) if i >= 1 && i <= args.len() => t = &args[i - 1],
                _ => {
                    return Err(InvalidPosition { position: p.clone(), term: self.to_string() })
                }
            }
        }
        Ok(t)
    }

    pub fn replace_at(&self, p: &Position, s: Term) -> Result<Term, InvalidPosition> {
        fn go(t: &Term, path: &[usize], s: Term) -> Option<Term> {
            match path.split_first() {
                None => Some(s),
                Some((&i, rest)) => match t {
                    Term::Fun(f, args) if i >= 1 && i <= args.len() => {
                        let mut args = args.clone();
                        args[i - 1] = go(&args[i - 1], rest, s)?;
                        Some(Term::Fun(f.clone(), args))
                    }
                    _ => None,
                },
            }
        }
        go(self, &p.0, s)
            .ok_or_else(|| InvalidPosition { position: p.clone(), term: self.to_string() })
    }

    /// All positions in pre-order (root first, then children left to right),
    /// which is also leftmost-outermost order.
    pub fn positions(&self) -> Vec<Position> {
        fn go(t: &Term, cur: &mut Vec<usize>, out: &mut Vec<Position>) {
            out.push(Position(cur.clone()));
            for (i, a) in t.args().iter().enumerate() {
                cur.push(i + 1);
                go(a, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Subterms paired with their positions, pre-order.
    pub fn subterms(&self) -> Vec<(Position, &Term)> {
        fn go<'a>(t: &'a Term, cur: &mut Vec<usize>, out: &mut Vec<(Position, &'a Term)>) {
            out.push((Position(cur.clone()), t));
            for (i, a) in t.args().iter().enumerate() {
                cur.push(i + 1);
                go(a, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Variables in order of first occurrence (left to right, pre-order).
    pub fn vars(&self) -> Vec<Var> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.collect_vars(&mut seen, &mut out);
        out
    }

    fn collect_vars(&self, seen: &mut BTreeSet<Var>, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
            Term::Fun(_, args) => args.iter().for_each(|a| a.collect_vars(seen, out)),
        }
    }

    pub fn var_set(&self) -> BTreeSet<Var> {
        self.vars().into_iter().collect()
    }

    pub fn occurs(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Fun(_, args) => args.iter().any(|a| a.occurs(v)),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Fun(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Node count, variables included.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Fun(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Fun(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        if let Term::Fun(f, args) = self {
            out.insert(f.clone());
            args.iter().for_each(|a| a.collect_symbols(out));
        }
    }

    pub fn any_symbol(&self, pred: &impl Fn(&Symbol) -> bool) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Fun(f, args) => pred(f) || args.iter().any(|a| a.any_symbol(pred)),
        }
    }

    /// Number of nodes whose symbol satisfies `pred`.
    pub fn count_symbols(&self, pred: &impl Fn(&Symbol) -> bool) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::Fun(f, args) => {
                usize::from(pred(f)) + args.iter().map(|a| a.count_symbols(pred)).sum::<usize>()
            }
        }
    }

    pub fn apply(&self, s: &Subst) -> Term {
        match self {
            Term::Var(v) => s.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Fun(f, args) => Term::Fun(f.clone(), args.iter().map(|a| a.apply(s)).collect()),
        }
    }

    /// Rebuilds the term bottom-up, replacing every symbol via `f`.
    pub fn map_symbols(&self, f: &impl Fn(&Symbol) -> Symbol) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::Fun(g, args) => Term::Fun(f(g), args.iter().map(|a| a.map_symbols(f)).collect()),
        }
    }

    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> Term {
        match self {
            Term::Var(v) => Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
            Term::Fun(f, args) => Term::Fun(f.clone(), args.iter().map(|a| a.rename(map)).collect()),
        }
    }
}

/// A finite map from variables to terms.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subst(BTreeMap<Var, Term>);

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn insert(&mut self, v: Var, t: Term) {
        self.0.insert(v, t);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn domain(&self) -> BTreeSet<Var> {
        self.0.keys().cloned().collect()
    }

    /// Drops bindings for variables outside `keep`.
    pub fn restrict(&self, keep: &BTreeSet<Var>) -> Subst {
        Subst(self.0.iter().filter(|(v, _)| keep.contains(*v)).map(|(v, t)| (v.clone(), t.clone())).collect())
    }
}

impl FromIterator<(Var, Term)> for Subst {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Subst {
        Subst(iter.into_iter().collect())
    }
}

impl fmt::Debug for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} ↦ {t}")?;
        }
        f.write_str("}")
    }
}

/// Matches `pattern` against `subject`. Non-linear patterns are
/// consistency-checked.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Subst> {
    let mut s = Subst::new();
    match_into(pattern, subject, &mut s).then_some(s)
}

fn match_into(p: &Term, t: &Term, s: &mut Subst) -> bool {
    match (p, t) {
        (Term::Var(v), _) => match s.get(v) {
            Some(bound) => bound == t,
            None => {
                s.insert(v.clone(), t.clone());
                true
            }
        },
        (Term::Fun(f, ps), Term::Fun(g, ts)) => {
            f == g && ps.iter().zip(ts).all(|(p, t)| match_into(p, t, s))
        }
        (Term::Fun(..), Term::Var(_)) => false,
    }
}

/// Most general unifier with occurs check. The result is idempotent.
pub fn unify(s: &Term, t: &Term) -> Option<Subst> {
    unify_all(&[(s.clone(), t.clone())])
}

pub fn unify_all(eqs: &[(Term, Term)]) -> Option<Subst> {
    let mut sigma = Subst::new();
    let mut work: Vec<(Term, Term)> = eqs.iter().rev().cloned().collect();
    while let Some((a, b)) = work.pop() {
        let a = a.apply(&sigma);
        let b = b.apply(&sigma);
        match (a, b) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if t.occurs(&x) {
                    return None;
                }
                let single: Subst = [(x.clone(), t.clone())].into_iter().collect();
                for v in sigma.0.values_mut() {
                    *v = v.apply(&single);
                }
                sigma.insert(x, t);
            }
            (Term::Fun(f, xs), Term::Fun(g, ys)) => {
                if f != g {
                    return None;
                }
                for pair in xs.into_iter().zip(ys).rev() {
                    work.push(pair);
                }
            }
        }
    }
    Some(sigma)
}
