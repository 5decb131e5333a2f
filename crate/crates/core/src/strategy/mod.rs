//! Transformation strategies: sequencing, exhaustive iteration and
//! left-biased choice over the primitive transformations, and the default
//! `simplify` pipeline.

mod parse;

pub use parse::{parse_strategy, ParseStrategyError};

use std::fmt;

use crate::cfa::{cfa_dce, cfa_transform, CfaError};
use crate::rewriting::Atrs;
use crate::transforms::{inline, uncurry, usable_rules_syntactic, InliningPredicate, TransformError};

/// Iteration bound for each `exhaustive` block.
pub const EXHAUSTIVE_FUEL: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prim {
    Inline(InliningPredicate),
    UsableRules,
    Cfa,
    CfaDce,
    Uncurry,
    /// Always applicable, changes nothing.
    Id,
}

impl Prim {
    /// `Ok(None)` if inapplicable.
    pub fn apply(self, a: &Atrs) -> Result<Option<Atrs>, StrategyError> {
        let res = match self {
            Prim::Inline(p) => inline(a, p).map_err(StrategyError::from),
            Prim::UsableRules => {
                let b = usable_rules_syntactic(a);
                return Ok((b.rules.len() < a.rules.len()).then_some(b));
            }
            Prim::Cfa => cfa_transform(a).map_err(StrategyError::from),
            Prim::CfaDce => cfa_dce(a).map_err(StrategyError::from),
            Prim::Uncurry => {
                if !a.has_app() {
                    return Ok(None);
                }
                uncurry(a).map_err(StrategyError::from)
            }
            Prim::Id => return Ok(Some(a.clone())),
        };
        match res {
            Ok(b) => Ok(Some(b)),
            Err(e) if e.is_inapplicable() => Ok(None),
            Err(e) => Err(e),
        }
    }
}

impl fmt::Display for Prim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prim::Inline(p) => write!(f, "inline({p})"),
            Prim::UsableRules => f.write_str("usableRules"),
            Prim::Cfa => f.write_str("cfa"),
            Prim::CfaDce => f.write_str("cfaDCE"),
            Prim::Uncurry => f.write_str("uncurry"),
            Prim::Id => f.write_str("id"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    Prim(Prim),
    /// `s1; s2`: `s2` after `s1`, where an inapplicable side is skipped.
    /// Inapplicable only if both sides are.
    Seq(Box<Strategy>, Box<Strategy>),
    /// `s1 <> s2`: `s1` if applicable, otherwise `s2`.
    Choice(Box<Strategy>, Box<Strategy>),
    /// Iterate until inapplicable. Always applicable.
    Exhaustive(Box<Strategy>),
    /// A named sub-pipeline; its result is recorded as a stage.
    Stage(String, Box<Strategy>),
}

impl Strategy {
    pub fn seq(parts: impl IntoIterator<Item = Strategy>) -> Strategy {
        let mut parts: Vec<Strategy> = parts.into_iter().collect();
        let last = parts.pop().expect("at least one strategy");
        parts.into_iter().rev().fold(last, |acc, s| Strategy::Seq(Box::new(s), Box::new(acc)))
    }

    pub fn choice(l: Strategy, r: Strategy) -> Strategy {
        Strategy::Choice(Box::new(l), Box::new(r))
    }

    pub fn exhaustive(s: Strategy) -> Strategy {
        Strategy::Exhaustive(Box::new(s))
    }

    pub fn stage(name: &str, s: Strategy) -> Strategy {
        Strategy::Stage(name.to_string(), Box::new(s))
    }

    /// `exhaustive inline(lambda-rewrite); exhaustive inline(match);
    /// exhaustive inline(constructor); usableRules`
    pub fn simp_atrs() -> Strategy {
        let ex = |p| Strategy::exhaustive(Strategy::Prim(Prim::Inline(p)));
        Strategy::seq([
            ex(InliningPredicate::LambdaRewrite),
            ex(InliningPredicate::Match),
            ex(InliningPredicate::Constructor),
            Strategy::Prim(Prim::UsableRules),
        ])
    }

    /// `cfa; uncurry; usableRules`
    pub fn to_trs() -> Strategy {
        Strategy::seq([Strategy::Prim(Prim::Cfa), Strategy::Prim(Prim::Uncurry), Strategy::Prim(Prim::UsableRules)])
    }

    /// `exhaustive ((inline(decreasing); usableRules) <> cfaDCE)`
    pub fn simp_trs() -> Strategy {
        Strategy::exhaustive(Strategy::choice(
            Strategy::seq([
                Strategy::Prim(Prim::Inline(InliningPredicate::Decreasing)),
                Strategy::Prim(Prim::UsableRules),
            ]),
            Strategy::Prim(Prim::CfaDce),
        ))
    }

    /// `simpATRS; toTRS; simpTRS`, with each block recorded as a stage.
    pub fn simplify() -> Strategy {
        Strategy::seq([
            Strategy::stage("simpATRS", Strategy::simp_atrs()),
            Strategy::stage("toTRS", Strategy::to_trs()),
            Strategy::stage("simpTRS", Strategy::simp_trs()),
        ])
    }

    /// Runs the strategy. `Ok(None)` means inapplicable. Every successful
    /// primitive and stage appends to `log`; entries of attempts that turn
    /// out inapplicable are rolled back.
    pub fn run(&self, a: &Atrs, log: &mut Vec<Snapshot>) -> Result<Option<Atrs>, StrategyError> {
        let mark = log.len();
        let out = self.run_inner(a, log);
        if !matches!(out, Ok(Some(_))) {
            log.truncate(mark);
        }
        out
    }

    fn run_inner(&self, a: &Atrs, log: &mut Vec<Snapshot>) -> Result<Option<Atrs>, StrategyError> {
        match self {
            Strategy::Prim(p) => {
                let out = p.apply(a)?;
                if let Some(b) = &out {
                    log.push(Snapshot { label: p.to_string(), atrs: b.clone(), stage: false });
                }
                Ok(out)
            }
            Strategy::Seq(l, r) => {
                let first = l.run(a, log)?;
                let mid = first.as_ref().unwrap_or(a);
                match r.run(mid, log)? {
                    Some(b) => Ok(Some(b)),
                    None => Ok(first),
                }
            }
            Strategy::Choice(l, r) => match l.run(a, log)? {
                Some(b) => Ok(Some(b)),
                None => r.run(a, log),
            },
            Strategy::Exhaustive(s) => {
                let mut cur = a.clone();
                for _ in 0..EXHAUSTIVE_FUEL {
                    match s.run(&cur, log)? {
                        Some(b) => cur = b,
                        None => return Ok(Some(cur)),
                    }
                }
                Err(StrategyError::FuelExhausted { strategy: s.to_string(), fuel: EXHAUSTIVE_FUEL })
            }
            Strategy::Stage(name, s) => {
                // a stage is recorded even when it changes nothing
                let b = s.run(a, log)?.unwrap_or_else(|| a.clone());
                log.push(Snapshot { label: name.clone(), atrs: b.clone(), stage: true });
                Ok(Some(b))
            }
        }
    }

    /// Runs the strategy, treating inapplicability as the identity.
    pub fn apply(&self, a: &Atrs) -> Result<Run, StrategyError> {
        let mut log = Vec::new();
        let out = self.run(a, &mut log)?.unwrap_or_else(|| a.clone());
        Ok(Run { input: a.clone(), output: out, log })
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand(s: &Strategy, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match s {
                Strategy::Seq(..) | Strategy::Choice(..) => write!(f, "({s})"),
                _ => write!(f, "{s}"),
            }
        }
        match self {
            Strategy::Prim(p) => write!(f, "{p}"),
            Strategy::Seq(l, r) => {
                operand(l, f)?;
                f.write_str("; ")?;
                match **r {
                    Strategy::Seq(..) => write!(f, "{r}"),
                    _ => operand(r, f),
                }
            }
            Strategy::Choice(l, r) => {
                operand(l, f)?;
                f.write_str(" <> ")?;
                operand(r, f)
            }
            Strategy::Exhaustive(s) => {
                f.write_str("exhaustive ")?;
                operand(s, f)
            }
            Strategy::Stage(_, s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub label: String,
    pub atrs: Atrs,
    /// Recorded at the end of a named stage rather than after a primitive.
    pub stage: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub input: Atrs,
    pub output: Atrs,
    pub log: Vec<Snapshot>,
}

impl Run {
    /// Result of the last snapshot with this label.
    pub fn stage(&self, label: &str) -> Option<&Atrs> {
        self.log.iter().rev().find(|s| s.label == label).map(|s| &s.atrs)
    }

    /// The input followed by the result of every named stage.
    pub fn stages(&self) -> Vec<(&str, &Atrs)> {
        std::iter::once(("input", &self.input))
            .chain(self.log.iter().filter(|s| s.stage).map(|s| (s.label.as_str(), &s.atrs)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StrategyError {
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Cfa(#[from] CfaError),
    #[error("exhaustive {strategy} did not reach a fixpoint within {fuel} iterations")]
    FuelExhausted { strategy: String, fuel: usize },
}

impl StrategyError {
    fn is_inapplicable(&self) -> bool {
        match self {
            StrategyError::Transform(e) => e.is_inapplicable(),
            StrategyError::Cfa(e) => e.is_inapplicable(),
            StrategyError::FuelExhausted { .. } => false,
        }
    }
}

/// The default pipeline on `a`.
pub fn simplify(a: &Atrs) -> Result<Run, StrategyError> {
    Strategy::simplify().apply(a)
}

#[cfg(test)]
mod tests;
