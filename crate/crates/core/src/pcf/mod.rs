//! The source language: a call-by-value λ-calculus with constructors,
//! pattern matching and fixpoints, written in an ML-like syntax.

mod desugar;
pub mod eval;
mod parse;
mod printer;
pub mod syntax;
pub mod types;

use std::fmt;

pub use desugar::{desugar, SUCC, ZERO};
pub use eval::{pcf_eval, EvalError};
pub use parse::{parse_module, parse_sexpr};
pub use printer::{print_module, print_sexpr};
pub use syntax::{free_vars, free_vars_cases, Case, Expr, Ident, Module, Origin, Program, Span};
pub use types::{infer_types, Type, Typing};

use crate::rewriting::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcfErrorKind {
    Parse,
    Unbound,
    Type,
}

impl fmt::Display for PcfErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PcfErrorKind::Parse => "parse error",
            PcfErrorKind::Unbound => "unbound",
            PcfErrorKind::Type => "type error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {kind}: {msg}")]
pub struct PcfError {
    pub kind: PcfErrorKind,
    pub span: Span,
    pub msg: String,
}

impl PcfError {
    pub(crate) fn parse(span: Span, msg: &str) -> PcfError {
        PcfError { kind: PcfErrorKind::Parse, span, msg: msg.to_string() }
    }

    pub(crate) fn unbound(span: Span, what: &str) -> PcfError {
        PcfError { kind: PcfErrorKind::Unbound, span, msg: what.to_string() }
    }

    pub(crate) fn type_error(span: Span, msg: &str) -> PcfError {
        PcfError { kind: PcfErrorKind::Type, span, msg: msg.to_string() }
    }
}

/// Parses and desugars a program. Does not type-check; see [`infer_types`].
pub fn parse_program(src: &str) -> Result<Program, PcfError> {
    desugar(&parse_module(src)?)
}

/// Parses and type-checks.
pub fn load_program(src: &str) -> Result<(Program, Typing), PcfError> {
    let p = parse_program(src)?;
    let t = infer_types(&p)?;
    Ok((p, t))
}

/// Reads an input data term over the program's constructors.
pub fn parse_data(src: &str, p: &Program) -> Result<Term, PcfError> {
    desugar::data_term(&parse_sexpr(src)?, p)
}

/// Reads comma-separated inputs such as `[1;2], 3`.
pub fn parse_inputs(src: &str, p: &Program) -> Result<Vec<Term>, PcfError> {
    if src.trim().is_empty() {
        return Ok(Vec::new());
    }
    let e = parse_sexpr(&format!("Inputs__({src})"));
    match e? {
        syntax::SExpr::Con(_, args, _) => args.iter().map(|a| desugar::data_term(a, p)).collect(),
        _ => unreachable!("wrapped in a constructor"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewriting::Symbol;

    const REV: &str = "let comp f g = fun z->f (g z) ;;\n\
        let rec walk xs = match xs with [] -> (fun z->z) | x::ys -> comp (walk ys) (fun z->x::z) ;;\n\
        let rev l = walk l [] ;;\n\
        let main l = rev l ;;";

    fn names(p: &Program) -> Vec<&str> {
        p.names.values().map(String::as_str).collect()
    }

    #[test]
    fn rev_desugars_to_the_textbook_term() {
        let p = parse_program(REV).unwrap();
        assert_eq!(p.params.len(), 1);
        assert_eq!(names(&p), vec!["comp", "comp1", "C1", "fix[walk]", "walk", "match[walk]", "C2", "C3", "rev"]);
        assert_eq!(p.data, vec![Symbol::new("[]", 0), Symbol::new("::", 2)]);
        // main l = (λl'. (fix walk. …) l' []) l
        let Expr::App(f, a) = &p.body else { panic!("{:?}", p.body) };
        assert!(matches!(**a, Expr::Var(ref x) if x == &p.params[0]));
        let Expr::Lam(o, _, body) = &**f else { panic!() };
        assert_eq!(p.name_of(*o), "rev");
        let Expr::App(g, nil) = &**body else { panic!() };
        assert!(matches!(**nil, Expr::Con(ref c, _) if c.name() == "[]"));
        let Expr::App(fix, _) = &**g else { panic!() };
        assert!(matches!(**fix, Expr::Fix(..)));
    }

    #[test]
    fn walk_has_curried_ground_type() {
        let (p, ty) = load_program(REV).unwrap();
        let Expr::App(f, _) = &p.body else { panic!() };
        let Expr::Lam(_, _, body) = &**f else { panic!() };
        let Expr::App(g, _) = &**body else { panic!() };
        let Expr::App(fix, _) = &**g else { panic!() };
        let Expr::Fix(_, walk, _) = &**fix else { panic!() };
        assert_eq!(ty.of(walk).to_string(), "Ground -> Ground -> Ground");
    }

    #[test]
    fn free_variables_follow_binder_order() {
        let p = parse_program(REV).unwrap();
        let mut lams = Vec::new();
        collect_lams(&p.body, &mut lams);
        let fv_of = |n: &str| {
            let e = lams.iter().find(|(o, _)| p.name_of(*o) == n).unwrap().1;
            free_vars(e).iter().map(|x| x.name.to_string()).collect::<Vec<_>>()
        };
        assert_eq!(fv_of("C1"), vec!["f", "g"]);
        assert!(fv_of("C2").is_empty());
        assert_eq!(fv_of("C3"), vec!["x"]);
    }

    fn collect_lams<'a>(e: &'a Expr, out: &mut Vec<(Origin, &'a Expr)>) {
        match e {
            Expr::Var(_) => {}
            Expr::Con(_, args) => args.iter().for_each(|a| collect_lams(a, out)),
            Expr::Lam(o, _, b) => {
                out.push((*o, e));
                collect_lams(b, out);
            }
            Expr::Fix(_, _, b) => collect_lams(b, out),
            Expr::App(f, a) => {
                collect_lams(f, out);
                collect_lams(a, out);
            }
            Expr::Match(_, s, cs) => {
                collect_lams(s, out);
                cs.iter().for_each(|c| collect_lams(&c.body, out));
            }
        }
    }

    #[test]
    fn trivial_program() {
        let p = parse_program("let main x = x ;;").unwrap();
        assert_eq!(p.params.len(), 1);
        assert_eq!(p.body, Expr::Var(p.params[0].clone()));
    }

    #[test]
    fn unbound_variables_are_located() {
        let e = parse_program("let main x =\n  y ;;").unwrap_err();
        assert_eq!(e.kind, PcfErrorKind::Unbound);
        assert_eq!((e.span.line, e.span.col), (2, 3));
    }

    #[test]
    fn print_then_parse_is_identity() {
        let src = "type t = L | N of t * t ;;\n\
            let rec size x = match x with L -> 0 | N(a, b) -> S(size a) ;;\n\
            let main x = let y = size x in match y with 0 -> [] | S _ -> (fun z -> z :: []) y ;;";
        let m = parse_module(src).unwrap();
        let printed = print_module(&m);
        assert_eq!(desugar(&parse_module(&printed).unwrap()).unwrap(), desugar(&m).unwrap(), "{printed}");
    }

    #[test]
    fn wildcard_case_expands() {
        let p = parse_program("type c = R | G | B ;;\nlet main x = match x with G -> R | _ -> G ;;").unwrap();
        let Expr::Match(_, _, cases) = &p.body else { panic!() };
        let cons: Vec<&str> = cases.iter().map(|c| c.con.name()).collect();
        assert_eq!(cons, vec!["G", "B", "R"]);
    }

    #[test]
    fn inputs_split_at_top_level() {
        let p = parse_program("let main x y = x ;;").unwrap();
        let ins = parse_inputs("[[]; []], []", &p).unwrap();
        assert_eq!(ins.len(), 2);
    }
}
