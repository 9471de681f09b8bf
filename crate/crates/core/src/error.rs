use thiserror::Error;

/// Errors raised by the spectral routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` must be strictly positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("parameter `{name}` is not finite")]
    NonFinite { name: &'static str },

    #[error("empty or invalid frequency window ({lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },

    #[error("omega = {omega} is singular: sin(omega * a{axis}) vanishes")]
    SingularFrequency { omega: f64, axis: usize },

    #[error("omega = {omega} lies in the essential spectrum")]
    InsideSpectrum { omega: f64 },

    #[error("scan resolution {resolution} is too coarse near omega = {omega}")]
    ResolutionTooCoarse { resolution: f64, omega: f64 },

    #[error(
        "gap ({omega_b}, {omega_t}) matches no gap type: edge flags ({edge_b}, {edge_t}), \
         {w_count} pole(s) of phi inside"
    )]
    ClassificationViolation {
        omega_b: f64,
        omega_t: f64,
        edge_b: bool,
        edge_t: bool,
        w_count: usize,
    },

    #[error("quadrature failed: {reason}")]
    QuadratureFailure { reason: String },

    #[error("({omega_b}, {omega_t}) is not a verified gap: omega = {probe} is in the spectrum")]
    GapUnverified {
        omega_b: f64,
        omega_t: f64,
        probe: f64,
    },

    #[error("lattice field normalization violated: u(0,0) = {value}")]
    NormalizationInconsistency { value: f64 },

    #[error("lattice field vanishes on every ring")]
    DegenerateField,

    #[error("system with {size} unknowns exceeds the solver cap of {cap}")]
    SizeLimit { size: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
