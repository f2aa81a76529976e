use thiserror::Error;

use crate::group::GroupAxiomError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} (expected {expected}, found {found})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("dimension {requested} exceeds the configured cap {cap}")]
    DimensionCap { requested: usize, cap: usize },

    #[error("leg index {leg} repeated in leg placement")]
    RepeatedLeg { leg: usize },

    #[error("leg index {leg} out of range for a {legs}-leg vector")]
    LegOutOfRange { leg: usize, legs: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("SVD failed to converge (ill-conditioned input)")]
    SvdNonConvergence,

    #[error("empty basis")]
    EmptyBasis,

    #[error("vector has zero norm and cannot be normalized")]
    ZeroVector,

    #[error("vector is not a unit vector (norm {norm})")]
    NotUnitVector { norm: f64 },

    #[error("operator is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("element is not in the algebra (membership residual {residual:e})")]
    NotInAlgebra { residual: f64 },

    #[error("invalid group table: {0}")]
    InvalidGroup(#[from] GroupAxiomError),

    #[error("structural check `{check}` failed with residual {residual:e}")]
    StructureViolation { check: &'static str, residual: f64 },

    #[error("slices of W do not span a unital *-algebra (non-regular input)")]
    SliceSpanDegenerate,

    #[error("block decomposition degenerate after {attempts} random draws")]
    DegenerateCenter { attempts: usize },

    #[error("decomposition acts on dimension {decomposition}, functional on {functional}")]
    MismatchedDecomposition {
        decomposition: usize,
        functional: usize,
    },

    #[error("exact nets are only known for function-algebra and group-algebra constructions")]
    NoExactNets,

    #[error("slice convention check failed (residual {residual:e})")]
    SliceConvention { residual: f64 },
}
