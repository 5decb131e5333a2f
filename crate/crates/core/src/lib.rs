//! Defunctionalization of a small call-by-value functional language into
//! applicative and first-order term rewrite systems.

pub mod rewriting;
pub mod pcf;
pub mod defunc;
pub mod transforms;
pub mod cfa;
pub mod strategy;
pub mod trs_io;
pub mod check;
pub mod cli;

use cfa::CfaError;
use strategy::StrategyError;
use transforms::TransformError;

/// Environment variable overriding the evaluation step budget.
pub const FUEL_ENV: &str = "DEFUNC_TRS_FUEL";

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Pcf(#[from] pcf::PcfError),
    #[error(transparent)]
    ParseStrategy(#[from] strategy::ParseStrategyError),
    #[error(transparent)]
    Emit(#[from] trs_io::EmitError),
    #[error(transparent)]
    ParseTrs(#[from] trs_io::ParseTrsError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Cfa(#[from] CfaError),
    #[error("source evaluation: {0}")]
    PcfEval(#[from] pcf::EvalError),
    #[error("rewriting: {0}")]
    Eval(#[from] rewriting::EvalError),
    #[error("{0}")]
    CheckFailed(String),
}

impl Error {
    /// 1 for bad input, 2 when the pipeline cannot proceed on this program,
    /// 3 for violated internal invariants and exhausted fuel.
    pub fn exit_code(&self) -> i32 {
        fn transform(e: &TransformError) -> i32 {
            match e {
                TransformError::Inapplicable { .. }
                | TransformError::HeadVariable { .. }
                | TransformError::SaturationDiverged { .. } => 2,
                TransformError::AmbiguityIntroduced { .. } | TransformError::ForeignPlanVariable { .. } => 3,
            }
        }
        fn cfa(e: &CfaError) -> i32 {
            match e {
                CfaError::UncoveredHeadVariable { .. } => 2,
                CfaError::FuelExhausted { .. } => 3,
                CfaError::Transform(t) => transform(t),
            }
        }
        match self {
            Error::Usage(_)
            | Error::Io { .. }
            | Error::Pcf(_)
            | Error::ParseStrategy(_)
            | Error::Emit(_)
            | Error::ParseTrs(_) => 1,
            Error::Strategy(StrategyError::Transform(t)) => transform(t),
            Error::Strategy(StrategyError::Cfa(c)) | Error::Cfa(c) => cfa(c),
            Error::Strategy(StrategyError::FuelExhausted { .. }) => 3,
            Error::PcfEval(pcf::EvalError::Arity { .. }) => 1,
            Error::PcfEval(_) | Error::Eval(_) | Error::CheckFailed(_) => 3,
        }
    }
}

/// Step budget for evaluation, from [`FUEL_ENV`] if set.
pub fn eval_fuel() -> Result<usize, Error> {
    match std::env::var(FUEL_ENV) {
        Ok(s) => s.trim().parse().map_err(|_| Error::Usage(format!("{FUEL_ENV} must be a number, got `{s}`"))),
        Err(_) => Ok(rewriting::DEFAULT_FUEL),
    }
}
