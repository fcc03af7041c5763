use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized: |psi|^2 = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("sensitivity undefined: linear response is zero")]
    UndefinedSensitivity,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("krylov propagation did not converge (residual estimate {residual:e}, reached t = {reached} of {target})")]
    Convergence {
        residual: f64,
        reached: f64,
        target: f64,
    },

    #[error("no interior maximum in [{lo}, {hi}] (maximizer {at} sits on the boundary)")]
    Bracket { lo: f64, hi: f64, at: f64 },

    #[error("{qubits} qubits exceed the full state-vector bound of {bound}")]
    Resource { qubits: usize, bound: usize },

    #[error("invalid protocol: {0}")]
    InvalidSpec(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
