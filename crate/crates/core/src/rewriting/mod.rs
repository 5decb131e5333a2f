//! Terms, applicative rewrite systems and call-by-value evaluation.

pub mod atrs;
pub mod eval;
mod pretty;
pub mod term;

pub use atrs::{
    check_non_ambiguous, check_rules_non_ambiguous, isomorphism, AmbiguityReport, Atrs, ClosureKind, Overlap,
    Rule, RuleError, SymbolKind,
};
pub use eval::{is_value, normalize, EvalError, Policy, Redex, Rewriter, Step, Trace, DEFAULT_FUEL};
pub use pretty::{cons_symbol, list_term, nil_symbol, parse_rules, parse_term, ListingError, CONS, NIL};
pub(crate) use pretty::looks_like_var;
pub use term::{match_term, unify, unify_all, Fresh, InvalidPosition, Position, Subst, Symbol, Term, Var, APP};
