use thiserror::Error;

/// Errors raised by the elliptic orthogonal polynomial toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modular parameter must satisfy Im(tau) > 0, got {0}")]
    NonPositiveTau(f64),

    #[error("q-series truncated too early: consistency residual {residual:e} with {terms} terms")]
    TruncationTooCoarse { residual: f64, terms: usize },

    #[error("point {re}+{im}i reduces to within 1e-12 of a lattice point")]
    PoleProximity { re: f64, im: f64 },

    #[error("point {re}+{im}i is not on the A-cycle")]
    OffContour { re: f64, im: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse weight spec {input:?}: {reason}")]
    WeightParse { input: String, reason: String },

    #[error("quadrature did not self-converge up to {max_order} nodes (last change {change:e})")]
    QuadratureNotConverged { max_order: usize, change: f64 },

    #[error("invalid degree {degree}: {reason}")]
    InvalidDegree { degree: usize, reason: &'static str },

    #[error("degenerate norm at degree {degree}: h = {h:e} (h_0 = {h0:e})")]
    DegenerateNorm { degree: usize, h: f64, h0: f64 },

    #[error("family of degree {have} too small, need at least {need}")]
    InsufficientDegree { have: usize, need: usize },

    #[error("recurrence coefficient index {index} is out of range")]
    IndexOutOfRange { index: i64 },

    #[error("recurrence coefficients are inconsistent: residual {residual:e} at degree {degree}")]
    InconsistentCoefficients { residual: f64, degree: usize },

    #[error("wp'(x) vanishes at the requested point; use the degenerate-point formula")]
    DegeneratePoint,

    #[error("point is not a critical point of wp on the A-cycle")]
    NotDegenerate,

    #[error("point set contains duplicates")]
    DuplicatePoints,

    #[error("point is within {distance:e} of the A-cycle")]
    TooCloseToContour { distance: f64 },

    #[error("points are too close to confluence: |wp(x) - wp(y)| = {gap:e}")]
    NearConfluent { gap: f64 },

    #[error("weight is not symmetric about the midpoint of the A-cycle")]
    NotSymmetric,

    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("operation requires the unit weight")]
    RequiresUnityWeight,

    #[error("wp inversion failed for value {value}")]
    InversionFailure { value: f64 },

    #[error("degree {degree}: found {found} zeros on the A-cycle, expected {expected}")]
    CountMismatch {
        degree: usize,
        found: usize,
        expected: usize,
    },

    #[error("no real zero found for degree {degree}")]
    NotFound { degree: usize },

    #[error("zero set for degree {degree} is incomplete")]
    IncompleteZeroSet { degree: usize },

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures caused by numerical breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::TruncationTooCoarse { .. }
                | Error::QuadratureNotConverged { .. }
                | Error::DegenerateNorm { .. }
                | Error::InconsistentCoefficients { .. }
                | Error::InversionFailure { .. }
                | Error::CountMismatch { .. }
                | Error::NotFound { .. }
        )
    }
}
