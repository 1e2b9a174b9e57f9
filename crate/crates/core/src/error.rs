use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("qubit index {index} out of range for a {qubits}-qubit register")]
    QubitOutOfRange { index: usize, qubits: usize },

    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),

    #[error("operator of dimension {dim} cannot act on {targets} target qubit(s)")]
    TargetArity { dim: usize, targets: usize },

    #[error("register size mismatch: {0} vs {1} qubits")]
    DimensionMismatch(usize, usize),

    #[error("zero-norm state (norm^2 = {0:e}): impossible branch")]
    ZeroNorm(f64),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("parameter `{name}` = {value} outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("post-weak strength p1 = {p1} is infeasible (must lie in [0,1])")]
    InfeasibleP1 { p1: f64 },

    #[error("invalid qubit subset: {0}")]
    InvalidSubset(String),

    #[error("expected a {expected}-qubit state, got {got}")]
    WrongQubitCount { expected: usize, got: usize },

    #[error("input state is a product state; nothing to protect")]
    ProductInput,

    #[error("fresh qubit {0} is not blank")]
    FreshNotBlank(usize),

    #[error("case parameter undefined at (x, s): {0}")]
    Undefined(String),

    #[error("invalid pairing: {0}")]
    InvalidPairing(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(Error::Domain {
            name,
            value,
            domain: "[0, 1]",
        });
    }
    Ok(())
}
