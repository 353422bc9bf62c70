use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("order relation has a cycle through {0} and {1}")]
    Cycle(String, String),

    #[error("duplicate element `{0}`")]
    DuplicateElement(String),

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("unknown operation symbol `{0}`")]
    UnknownSymbol(String),

    #[error("table for `{symbol}` is missing the entry {args}")]
    PartialTable { symbol: String, args: String },

    #[error("table for `{symbol}` maps {args} to `{value}`, which is outside the carrier")]
    Range {
        symbol: String,
        args: String,
        value: String,
    },

    #[error("`{symbol}` has arity {expected} but an entry has {found} arguments")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("signatures differ: {0}")]
    SignatureMismatch(String),

    #[error("congruence does not belong to this algebra: {0}")]
    ForeignCongruence(String),

    #[error("map is not a homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("objects live on different algebras ({left} vs {right} elements)")]
    AlgebraMismatch { left: usize, right: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),

    #[error("stalk assignment is not monotone: {lower} <= {upper} but its congruence is not contained")]
    Monotonicity { lower: String, upper: String },

    #[error("decomposition is not interpolating: {0}")]
    NotInterpolating(String),

    #[error("map is not monotone: {0}")]
    NotMonotone(String),

    #[error("a soft sheaf with a validated frame homomorphism is required: {0}")]
    SoftnessRequired(String),

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("structure check failed: {0}")]
    Invalid(String),

    #[error("unsupported object for export: {0}")]
    UnsupportedObject(String),

    #[error("parse error: {0}")]
    Parse(String),
}
