use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus {0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("modulus {0} is not a power of an odd prime")]
    NotOddPrimePower(u64),

    #[error("modulus {k} is below the minimum {min}")]
    ModulusTooSmall { k: u64, min: u64 },

    #[error("{a} is not coprime to the modulus {k}")]
    NotCoprime { a: i64, k: u64 },

    #[error("{g} does not generate the multiplicative group mod {k}")]
    NotGenerator { g: u64, k: u64 },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("index {index} out of range for {len} components")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("illegal Kirby move: {0}")]
    IllegalMove(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("brute-force sum needs {terms} terms, above the guard of {guard}")]
    GuardExceeded { terms: u128, guard: u64 },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("curves too close: minimum distance {distance:e} below {threshold:e}")]
    CurvesTooClose { distance: f64, threshold: f64 },

    #[error("linking integral {value} is not within {tolerance:e} of an integer")]
    NonIntegralLinking { value: f64, tolerance: f64 },

    #[error("self-linking is unstable under push-off refinement: {values:?}")]
    UnstableFraming { values: Vec<i64> },

    #[error("components ({i}, {j}): {source}")]
    Component {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("register {reg} out of range for a {regs}-register state")]
    RegisterOutOfRange { reg: usize, regs: usize },

    #[error("state dimension {dim} exceeds the simulator limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("target error {0} must lie strictly between 0 and 1")]
    EpsilonOutOfRange(f64),
}
