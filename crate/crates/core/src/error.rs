use thiserror::Error;

/// Why a conductor was rejected by [`crate::field::validate_field`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConductorRule {
    /// A prime divides `n` more than once (other than `p` itself).
    RepeatedFactor(u64),
    /// A prime factor `q != p` with `q % p != 1`.
    FactorNotOneModP(u64),
    /// The exponent of `p` in `n` is neither 0 nor 2.
    PAdicValuation(u32),
    /// `n` has no prime factor at all besides `p`'s exponent, in the unramified shape.
    Empty,
}

impl std::fmt::Display for ConductorRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConductorRule::RepeatedFactor(q) => write!(f, "prime factor {q} is repeated"),
            ConductorRule::FactorNotOneModP(q) => write!(f, "factor {q} is not 1 mod p"),
            ConductorRule::PAdicValuation(v) => {
                write!(f, "p-adic valuation of n is {v}, must be 0 or 2")
            }
            ConductorRule::Empty => write!(f, "unramified conductor needs at least one prime"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("degree must be an odd prime, got {0}")]
    EvenOrTwo(u64),
    #[error("bad conductor {n} for p = {p}: {rule}")]
    BadConductor { p: u64, n: u64, rule: ConductorRule },
    #[error("pair traces for the unramified field ({p}, {n}) have not been derived")]
    MissingDerivedData { p: u64, n: u64 },
    #[error("elements belong to different fields: ({0}, {1}) vs ({2}, {3})")]
    FieldMismatch(u64, u64, u64, u64),
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("pair traces depend on the power difference: {0}")]
    InconsistentTraces(String),
    #[error("construction requires the {expected} case")]
    WrongCase { expected: &'static str },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("index {j} out of range 1..={s}")]
    BadIndex { j: usize, s: usize },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("operation not supported for family {0}")]
    UnsupportedFamily(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("dimension {0} exceeds the enumeration limit of {max}", max = crate::svp::MAX_DIMENSION)]
    DimensionTooLarge(usize),
    #[error("Gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("element is a rational integer; its Galois orbit is constant")]
    AlphaRational,
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("character choice {index} out of range ({count} available)")]
    InvalidChoice { index: usize, count: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
