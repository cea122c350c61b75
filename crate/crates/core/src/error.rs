use thiserror::Error;

/// Errors raised anywhere in the exact pipeline. Messages carry the name of
/// the module that produced them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse: {message} at byte {position}")]
    Syntax { position: usize, message: String },
    #[error("parse: variable x{index} out of range for dimension {dimension}")]
    VariableOutOfRange { index: usize, dimension: usize },
    #[error("parse: negative exponent at byte {position}")]
    NegativeExponent { position: usize },
    #[error("exact-core: dimension mismatch (expected {expected}, found {found})")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("newton-polyhedron: empty support has no Newton polyhedron")]
    EmptyNewtonPolyhedron,
    #[error("newton-polyhedron: direction has a negative component")]
    NegativeDirection,
    #[error("newton-polyhedron: point is not contained in the polyhedron")]
    PointOutsidePolyhedron,
    #[error("newton-polyhedron: input exceeds desk-scale limits ({0})")]
    TooLarge(String),
    #[error("exact-core: integer overflow in exact arithmetic")]
    Overflow,
    #[error("pair-analysis: the phase has no facet with positive offset (f(0) != 0)")]
    NoPositiveFacet,
    #[error("toric-fan: {0}")]
    Fan(String),
    #[error("zeta-poles: {0}")]
    Poles(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
