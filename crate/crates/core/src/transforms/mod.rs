//! Complexity-reflecting transformations on applicative rewrite systems.
//!
//! Every transformation is partial: [`TransformError::Inapplicable`] means
//! "nothing to do here" and is what the strategy layer branches on. The other
//! variants are hard failures.

mod inline;
mod instantiate;
mod uncurry;
mod usable;

pub use inline::{inline, is_redex_preserving, narrowings, InliningPredicate, NarrowError};
pub use instantiate::{instantiate, InstantiationPlan};
pub use uncurry::{
    applicative_arity, eta_saturate, head_variable_sites, is_head_variable_free, uncurry, HeadVariableSite,
    Uncurrier, ETA_FUEL,
};
pub use usable::{cap, usable_rules_syntactic};

use crate::rewriting::Overlap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("{transform} is inapplicable: {reason}")]
    Inapplicable { transform: String, reason: String },
    #[error("instantiation would make the system ambiguous ({} overlaps)", overlaps.len())]
    AmbiguityIntroduced { overlaps: Vec<Overlap> },
    #[error("instantiation plan for rule {rule} binds {var}, which is not a variable of its left-hand side")]
    ForeignPlanVariable { rule: usize, var: String },
    #[error("eta-saturation did not terminate after adding {added} rules")]
    SaturationDiverged { added: usize },
    #[error("head variables prevent uncurrying: {}", sites.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", "))]
    HeadVariable { sites: Vec<HeadVariableSite> },
}

impl TransformError {
    pub(crate) fn inapplicable(transform: &str, reason: &str) -> TransformError {
        TransformError::Inapplicable { transform: transform.to_string(), reason: reason.to_string() }
    }

    pub fn is_inapplicable(&self) -> bool {
        matches!(self, TransformError::Inapplicable { .. })
    }
}
