use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero wave vector: the covariant measure weight 1/omega is singular")]
    ZeroWaveVector,
    #[error("sample count {got} does not match grid mode count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("operands live on different mode grids")]
    GridMismatch,
    #[error("mode index {index} out of range for grid with {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },
    #[error("occupation {n} exceeds the truncation cutoff {cutoff}")]
    CutoffExceeded { n: usize, cutoff: usize },
    #[error("spectrum is not normalized: |norm^2 - 1| = {deviation:.3e}")]
    NotNormalized { deviation: f64 },
    #[error("truncation tail weight {tail:.3e} exceeds the allowed bound {bound:.3e}")]
    TruncationTail { tail: f64, bound: f64 },
    #[error("coefficient |mu| = {mu} must be < 1 for the Mehler-type closed form")]
    MuOutOfRange { mu: f64 },
    #[error("spectral overlap mu has imaginary part {imag:.3e}; only real mu is supported")]
    ComplexMu { imag: f64 },
    #[error("modes {m} and {n} must differ")]
    EqualModes { m: usize, n: usize },
    #[error("normal-ordering denominator 1 - k2*k4*t^2 is singular near t = {singular_t:.6}")]
    SingularOrdering { singular_t: f64 },
    #[error("regularization required: the exact-limit overlap of same-kind states is a delta family; use epsilon > 0")]
    RegularizationRequired,
    #[error("epsilon = {epsilon} outside (0, 1]")]
    EpsilonOutOfRange { epsilon: f64 },
    #[error("specs disagree in kind or regularization; {context}")]
    IncompatibleSpecs { context: &'static str },
    #[error("quadrature grid too narrow: coefficient tail {tail:.3e} at the boundary exceeds {bound:.3e}")]
    QuadratureGridTooNarrow { tail: f64, bound: f64 },
    #[error("block cut {block_cut} too close to cutoff {cutoff}; leakage bound {leakage:.3e} exceeds tolerance")]
    BlockCutTooHigh {
        block_cut: usize,
        cutoff: usize,
        leakage: f64,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("sample index {index} out of range for ensemble of {count} samples")]
    SampleOutOfRange { index: usize, count: usize },
    #[error("statistical check did not converge: deviation {deviation:.3e} > {factor} x stderr {stderr:.3e}")]
    NotConverged {
        deviation: f64,
        stderr: f64,
        factor: f64,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
