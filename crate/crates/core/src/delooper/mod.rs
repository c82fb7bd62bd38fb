//! Bass delooping at the level of homotopy groups: sources of K-groups for ring-like
//! expressions, the `ΩL` operator, the fundamental sequence and the splitting checks.

mod checks;
mod expr;
mod instance;
mod model;
mod source;
mod tower;
mod twisted;

use crate::abgroup::AbGroupError;
use crate::rings::Structural;

pub use checks::{
    bass_step, bhs_check, bhs_complement, contracted_check, fundamental_sequence, nk, nk_of, BassStep, BhsReport, BhsVerdict,
    BoundaryTarget, ContractedDegree, ContractedReport, FundamentalSequence, NkResult, Spot,
};
pub use expr::{var_name, Adjunction, Base, ExprMap, Expression};
pub use model::{Ground, GroundValue, InnerGround, ModelSource, TableGround};
pub use instance::{DegreeData, StructuredKInstance};
pub use source::{BassCokernel, Delooped, EngineSource, KSource, NilTable, Rho, SourceMode};
pub use tower::{
    filtered_colimit_check, kh_groups, negative_k, shadow_tower, ColimitReport, ColimitVerdict, DegreeStability, KhReport, NegativeLevel,
    RingDiagram, Tower,
};
pub use twisted::{mapping_torus_pi, nil_decomposition_check, twisted_bhs_check, NilReport, TorusPi, TwistedReport, TwistedVerdict};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeloopError {
    /// Data needed for the answer is not available from the source.
    #[error("gap: {0}")]
    Gap(String),
    /// The data contradicts itself.
    #[error("inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Group(#[from] AbGroupError),
}

impl DeloopError {
    pub fn is_gap(&self) -> bool {
        matches!(self, DeloopError::Gap(_))
    }
}

/// The polynomial side of a Laurent extension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn ev0(self) -> Structural {
        match self {
            Sign::Plus => Structural::Ev0Plus,
            Sign::Minus => Structural::Ev0Minus,
        }
    }

    pub fn i(self) -> Structural {
        match self {
            Sign::Plus => Structural::IPlus,
            Sign::Minus => Structural::IMinus,
        }
    }

    pub fn j(self) -> Structural {
        match self {
            Sign::Plus => Structural::JPlus,
            Sign::Minus => Structural::JMinus,
        }
    }

    pub fn kind(self) -> crate::rings::VarKind {
        match self {
            Sign::Plus => crate::rings::VarKind::Polynomial,
            Sign::Minus => crate::rings::VarKind::NegPolynomial,
        }
    }
}
