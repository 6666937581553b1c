use num_rational::BigRational;

/// Crate-wide error type. Variants that certify a mathematical fact
/// (e.g. an existing fooling vector) carry the witness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("update to coordinate {index} would exceed the magnitude bound {bound}")]
    MagnitudeBound { index: usize, bound: i64 },

    #[error("frequency vector has a negative entry x[{index}] = {value}")]
    NegativeEntry { index: usize, value: i64 },

    #[error("sketches are incompatible: {reason}")]
    Incompatible { reason: String },

    #[error("metric has an infinite distance where a finite one is required")]
    InfiniteDistance,

    #[error("metric axiom violated: {0}")]
    MetricAxiom(String),

    #[error("embedding distortion bound {bound} not certified after {attempts} independent builds")]
    DistortionUnverified { bound: f64, attempts: usize },

    #[error("approximation factor {c} too small: floor((c-2)/4) must be at least 2")]
    ApproximationTooSmall { c: f64 },

    #[error("I* is empty: no index i with d(u_i, v_i) >= 2k+1")]
    EmptyIstar,

    #[error("required neighborhood N(v_{i}) is empty")]
    EmptyNeighborhood { i: usize },

    #[error("index {i} lies outside I*")]
    IndexOutsideIstar { i: usize },

    #[error("a fooling vector exists for index {i}; its dual row is undefined")]
    FoolingVectorExists { i: usize, witness: Vec<BigRational> },

    #[error("column {i} of the sketch matrix is zero; its dual row is undefined")]
    ZeroColumn { i: usize },

    #[error("knowledge graph has {t} vertices; brute-force minrank is capped at {max}")]
    BruteForceCap { t: usize, max: usize },

    #[error("deletion at update {position}: insertion-only baseline cannot process deletions")]
    DeletionInBaseline { position: usize },

    #[error("malformed input at line {line}: {reason}")]
    Malformed { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for `InvalidParameter`.
    pub fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
