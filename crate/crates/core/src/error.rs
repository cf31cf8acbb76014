use thiserror::Error;

/// Errors raised by construction and certification routines.
///
/// Check failures carry the smallest-ID witness that was found so that
/// failure messages are reproducible.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("characteristic {0} is even; only odd characteristic is supported")]
    EvenCharacteristic(u32),
    #[error("modulus {0:?} is not a monic irreducible polynomial of the requested degree")]
    NotIrreducible(Vec<u32>),
    #[error("field of order {0}^{1} is too large for table-driven arithmetic")]
    FieldTooLarge(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("extension degree {0} is odd; a quadratic extension split needs an even degree")]
    OddDegree(u32),
    #[error("xi (index {0}) lies in the subfield")]
    XiInSubfield(u32),
    #[error("degenerate quadratic form: discriminant is zero")]
    DegenerateForm,

    #[error("planar function constraint violated: {0}")]
    SpecConstraintViolated(String),
    #[error("cannot parse planar function spec {0:?}: {1}")]
    BadSpec(String, String),

    #[error("the two points are equal (id {0})")]
    EqualPoints(u64),
    #[error("projective plane axiom violated: {what} (witness ids {a}, {b})")]
    AxiomViolation { what: String, a: u64, b: u64 },
    #[error("collineation family does not apply to this plane: {0}")]
    FamilyMismatch(String),

    #[error("theta must be nonzero")]
    ZeroTheta,
    #[error("unital hypothesis failed for theta index {theta}: value {value} has {count} preimages")]
    HypothesisFailed { theta: u32, value: u32, count: usize },
    #[error("g_x is not injective for x index {0}")]
    NotInjective(u32),
    #[error("line L(a={a}, b={b}) meets the candidate set in {count} points")]
    CountViolation { a: u32, b: u32, count: usize },
    #[error("line {line} meets the unital in {count} points")]
    IntersectionViolation { line: u64, count: usize },
    #[error("point {point} lies on {count} tangent lines")]
    TangentViolation { point: u64, count: usize },
    #[error("point pair ({0}, {1}) is covered {2} times")]
    PairCoverageViolation(u64, u64, usize),
    #[error("design has {found} blocks, expected {expected}")]
    BlockCountMismatch { found: usize, expected: usize },

    #[error("involution condition (a) fails at x index {0}")]
    ConditionAFailed(u32),
    #[error("involution condition (b) fails at x index {0}")]
    ConditionBFailed(u32),
    #[error("involution condition (c) fails at x index {x}: {count} solutions")]
    ConditionCFailed { x: u32, count: usize },
    #[error("the correlation is not a polarity: {0}")]
    NotPolarity(String),
    #[error("polarity has {found} absolute points, expected {expected}")]
    AbsoluteCountMismatch { found: usize, expected: usize },
    #[error("dual switch image differs from the unital at id {0}")]
    SwitchMismatch(u64),
    #[error("planar function is not normal")]
    NotNormal,
    #[error("line {line} meets oval O_c (c index {c}) in {count} points")]
    OvalViolation { line: u64, c: u32, count: usize },
    #[error("operation requires provenance {0}")]
    WrongProvenance(String),

    #[error("singular linear system while solving for delta")]
    SingularSystem,
    #[error("circle parameter beta must be nonzero")]
    ZeroBeta,
    #[error("circle design violated: {0}")]
    CircleViolation(String),
    #[error("explicit construction hypotheses not met: {0}")]
    HypothesisUnmet(String),
    #[error("explicit witness failed verification: {0}")]
    WitnessCheckFailed(String),
    #[error("search budget of {0} partial configurations exceeded")]
    BudgetExceeded(usize),
    #[error("collineation {0} does not fix the unital")]
    ElementDoesNotFix(String),
    #[error("instance too large for this operation: {0}")]
    TooLarge(String),

    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
