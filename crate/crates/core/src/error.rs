use thiserror::Error;

/// Errors raised by the evaluators and identity checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),

    #[error("invalid interval [{a}, {b}]: lower limit must be below upper limit")]
    InvalidInterval { a: f64, b: f64 },

    #[error("integrand returned a non-finite value at x = {abscissa}")]
    NonFinite { abscissa: f64 },

    #[error("no truncation point found below {cap}: integrand tail is unbounded or the damping bound never reaches the threshold")]
    UnboundedTail { cap: f64 },

    #[error("frequency {omega} exceeds the supported cap {cap}")]
    FrequencyCap { omega: f64, cap: f64 },

    #[error("order {order} is too large (cap {cap})")]
    OrderTooLarge { order: f64, cap: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("t = {t} lies below the supported window [{min}, {max}]: the oscillatory representation cancels catastrophically there")]
    SmallTime { t: f64, min: f64, max: f64 },

    #[error("parameter outside the supported window: {0}")]
    Window(String),

    #[error("coefficient a({k},{n}) is not an integer after reduction")]
    NonIntegerCoefficient { k: usize, n: usize },

    #[error("series truncation at M = {m} is below the peak index {peak}")]
    InsufficientTruncation { m: usize, peak: usize },

    #[error("series terms are not decreasing at the cutoff (k = {k})")]
    TruncationUnsound { k: usize },

    #[error("declared tail model is inconsistent with the sampled decay: {0}")]
    TailModel(String),

    #[error("spectral function decays too slowly for the inversion integral: {0}")]
    Divergence(String),

    #[error("function is not in the convolution ring: {0}")]
    RingMembership(String),
}

pub type Result<T> = std::result::Result<T, Error>;
