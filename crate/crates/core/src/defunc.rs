//! Defunctionalization: every abstraction, fixpoint and match of a program
//! becomes a closure constructor applied to its free variables, with
//! defining rules for `@` (abstractions, fixpoints) or for the match
//! symbol itself.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::pcf::{free_vars, free_vars_cases, Case, Expr, Ident, Origin, Program};
use crate::rewriting::{Atrs, ClosureKind, Rule, Symbol, Term};

/// What a closure constructor stands for. Expressions are compared
/// structurally, so copies of one definition share a constructor while the
/// body of an unfolded fixpoint gets its own.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Abs(Expr),
    Cases(Origin, Vec<Case>),
}

impl Key {
    fn origin(&self) -> Origin {
        match self {
            Key::Abs(Expr::Lam(o, ..) | Expr::Fix(o, ..)) | Key::Cases(o, _) => *o,
            Key::Abs(_) => unreachable!("only abstractions and fixpoints are keyed"),
        }
    }

    fn kind(&self) -> ClosureKind {
        match self {
            Key::Abs(Expr::Fix(..)) => ClosureKind::Fix,
            Key::Abs(_) => ClosureKind::Lam,
            Key::Cases(..) => ClosureKind::Match,
        }
    }

    fn free_vars(&self) -> Vec<Ident> {
        match self {
            Key::Abs(e) => free_vars(e),
            Key::Cases(_, cs) => free_vars_cases(cs),
        }
    }
}

struct Defunc<'p> {
    program: &'p Program,
    symbols: BTreeMap<Key, Symbol>,
    created: Vec<Key>,
    used_names: BTreeSet<String>,
    queue: VecDeque<Key>,
    next_fresh: u32,
}

fn var_term(x: &Ident) -> Term {
    let base = if &*x.name == "_" { "u" } else { &x.name };
    Term::var(&format!("{base}#{}", x.id))
}

impl<'p> Defunc<'p> {
    fn symbol(&mut self, key: Key) -> Symbol {
        if let Some(s) = self.symbols.get(&key) {
            return s.clone();
        }
        let mut name = self.program.name_of(key.origin()).to_string();
        while !self.used_names.insert(name.clone()) {
            name.push('\'');
        }
        let arity = key.free_vars().len() + usize::from(matches!(key, Key::Cases(..)));
        let sym = Symbol::new(&name, arity);
        self.symbols.insert(key.clone(), sym.clone());
        self.created.push(key.clone());
        self.queue.push_back(key);
        sym
    }

    fn closure(&mut self, key: Key, first: Option<Term>) -> Term {
        let fv: Vec<Term> = key.free_vars().iter().map(var_term).collect();
        let sym = self.symbol(key);
        Term::Fun(sym, first.into_iter().chain(fv).collect())
    }

    /// ⟦e⟧
    fn translate(&mut self, e: &Expr) -> Term {
        match e {
            Expr::Var(x) => var_term(x),
            Expr::Con(c, args) => Term::Fun(c.clone(), args.iter().map(|a| self.translate(a)).collect()),
            Expr::App(f, a) => {
                let f = self.translate(f);
                let a = self.translate(a);
                Term::app(f, a)
            }
            Expr::Lam(..) | Expr::Fix(..) => self.closure(Key::Abs(e.clone()), None),
            Expr::Match(o, s, cases) => {
                let s = self.translate(s);
                self.closure(Key::Cases(*o, cases.clone()), Some(s))
            }
        }
    }

    fn fresh(&mut self, base: &str) -> Term {
        self.next_fresh += 1;
        Term::var(&format!("{base}#f{}", self.next_fresh))
    }

    fn defining_rules(&mut self, key: &Key) -> Vec<Rule> {
        let head = Term::Fun(self.symbols[key].clone(), key.free_vars().iter().map(var_term).collect());
        let mut rules = Vec::new();
        match key {
            Key::Abs(Expr::Lam(_, x, body)) => {
                let rhs = self.translate(body);
                rules.push((Term::app(head, var_term(x)), rhs));
            }
            Key::Abs(fix @ Expr::Fix(_, x, body)) => {
                let z = match &**body {
                    Expr::Lam(_, y, _) => self.fresh(if &*y.name == "_" { "z" } else { &y.name }),
                    _ => self.fresh("z"),
                };
                let unfolded = body.subst(x, fix);
                let rhs = Term::app(self.translate(&unfolded), z.clone());
                rules.push((Term::app(head, z), rhs));
            }
            Key::Abs(_) => unreachable!(),
            Key::Cases(_, cases) => {
                let Term::Fun(sym, fv) = head else { unreachable!() };
                for c in cases {
                    let pat = Term::Fun(c.con.clone(), c.vars.iter().map(var_term).collect());
                    let lhs = Term::Fun(sym.clone(), std::iter::once(pat).chain(fv.iter().cloned()).collect());
                    rules.push((lhs, self.translate(&c.body)));
                }
            }
        }
        rules
            .into_iter()
            .map(|(l, r)| Rule::new(l, r).expect("defining rules are well-formed").canonical())
            .collect()
    }
}

/// Translates a type-checked program into an applicative rewrite system.
///
/// Rules are grouped by closure constructor in source order, with the
/// `main` rule last.
pub fn defunctionalize(p: &Program) -> Atrs {
    let mut d = Defunc {
        program: p,
        symbols: BTreeMap::new(),
        created: Vec::new(),
        used_names: p.data.iter().map(|c| c.name().to_string()).chain(["main".to_string()]).collect(),
        queue: VecDeque::new(),
        next_fresh: 0,
    };
    let main_rhs = d.translate(&p.body);
    let main_lhs = Term::fun("main", p.params.iter().map(var_term).collect());
    let main_rule = Rule::new(main_lhs, main_rhs).expect("program is closed").canonical();
    let mut by_key: BTreeMap<Key, Vec<Rule>> = BTreeMap::new();
    while let Some(k) = d.queue.pop_front() {
        let rs = d.defining_rules(&k);
        by_key.insert(k, rs);
    }
    let mut order: Vec<(Origin, usize, Key)> =
        d.created.iter().enumerate().map(|(i, k)| (k.origin(), i, k.clone())).collect();
    order.sort();
    let mut rules: Vec<Rule> = order.into_iter().flat_map(|(_, _, k)| by_key.remove(&k).unwrap()).collect();
    rules.push(main_rule);
    let mut a = Atrs::new(rules, Symbol::new("main", p.params.len()));
    a.data = p.data.iter().cloned().collect();
    a.closures = d.created.iter().map(|k| (d.symbols[k].clone(), k.kind())).collect();
    a.sufficiently_defined = true;
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcf::parse_program;
    use crate::rewriting::{check_non_ambiguous, isomorphism, parse_rules};

    const REV: &str = "let comp f g = fun z->f (g z) ;;\n\
        let rec walk xs = match xs with [] -> (fun z->z) | x::ys -> comp (walk ys) (fun z->x::z) ;;\n\
        let rev l = walk l [] ;;\n\
        let main l = rev l ;;";

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

    #[test]
    fn rev_matches_the_listing_verbatim() {
        let a = defunctionalize(&parse_program(REV).unwrap());
        let expected = parse_rules(A_REV).unwrap();
        assert_eq!(a.rules.len(), 11);
        for r in &expected {
            assert!(a.rules.iter().any(|s| s.alpha_eq(r)), "missing {r}\n{a}");
        }
        let iso = isomorphism(&a.rules, &expected).unwrap();
        assert!(iso.iter().all(|(f, g)| f == g));
        assert!(check_non_ambiguous(&a).non_ambiguous);
        assert_eq!(a.closures[&Symbol::new("fix[walk]", 0)], ClosureKind::Fix);
        assert_eq!(a.closures[&Symbol::new("match[walk]", 1)], ClosureKind::Match);
    }

    #[test]
    fn identity() {
        let a = defunctionalize(&parse_program("let main x = x ;;").unwrap());
        assert_eq!(a.rules.len(), 1);
        assert_eq!(a.rules[0].to_string(), "main(x) -> x");
    }

    #[test]
    fn every_closure_has_defining_rules() {
        let a = defunctionalize(&parse_program(REV).unwrap());
        let defines = |f: &Symbol| {
            a.rules.iter().any(|r| match a.closures[f] {
                ClosureKind::Match => r.root() == f,
                _ => r.lhs.is_app() && r.lhs.args()[0].root() == Some(f),
            })
        };
        for r in &a.rules {
            for f in r.rhs.symbols() {
                if a.closures.contains_key(&f) {
                    assert!(defines(&f), "{f:?}");
                }
            }
        }
    }
}
