use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("wedge parameter p must be a positive integer, got {0}")]
    InvalidP(u32),
    #[error("opening angle must lie in (0, pi], got {0}")]
    InvalidAlpha(f64),
    #[error("opening angle {alpha} gives p = pi/alpha = {p}, which is not an integer")]
    NonIntegerP { alpha: f64, p: f64 },
    #[error("medium constants must be positive and finite, got epsilon={epsilon}, mu={mu}")]
    InvalidMedium { epsilon: f64, mu: f64 },
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("angle {theta} is not strictly inside the wedge (0, {alpha})")]
    NotInterior { theta: f64, alpha: f64 },
    #[error("invalid splitting parameter {0}")]
    InvalidSplitting(f64),
    #[error("a p = 1 geometry has no nonzero images")]
    NoImages,
    #[error("unknown unit system {0:?} (expected natural, cgs or si)")]
    UnknownUnits(String),
    #[error("polarizability must be positive and finite, got {0}")]
    InvalidPolarizability(f64),
    #[error("invalid string parameters: {0}")]
    InvalidString(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("Bessel argument must be positive, got {0}")]
    NonPositiveArgument(f64),
    #[error("I_{order}({x}) or K_{order}({x}) overflows f64; use the scaled evaluation")]
    Overflow { order: u32, x: f64 },
    #[error("I_{order}({x}) underflows f64; use the scaled evaluation")]
    Underflow { order: u32, x: f64 },
    #[error("continued fraction for order {order} at x = {x} did not converge")]
    NoConvergence { order: u32, x: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid quadrature settings: {0}")]
    InvalidSpec(String),
    #[error("integrand is not finite at rho = {rho}")]
    NonFinite { rho: f64 },
    #[error(
        "integral did not converge after {subdivisions} subdivisions \
         (best estimate {value:e} +/- {err_estimate:e})"
    )]
    NotConverged {
        value: f64,
        err_estimate: f64,
        subdivisions: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SumError {
    #[error("mode terms are not decaying after {terms} terms (partial sum {partial:e})")]
    NonDecaying { partial: f64, terms: usize },
    #[error("mode sum hit the {terms}-term limit with tail bound {tail:e} (partial sum {partial:e})")]
    TruncationLimit { partial: f64, terms: usize, tail: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtrapolationError {
    #[error("need at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("splitting sequence must be strictly monotone and nonzero")]
    NonMonotone,
    #[error(
        "extrapolation did not converge: estimate {value:e}, last-level change {err_estimate:e}, \
         diagonal {diagonal:?}"
    )]
    NotConverged {
        value: f64,
        err_estimate: f64,
        diagonal: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Sum(#[from] SumError),
    #[error(transparent)]
    Extrapolation(#[from] ExtrapolationError),
    #[error("the potential diverges on the wall (sin(p theta) = 0 at theta = {theta})")]
    OnWall { theta: f64 },
    #[error("the mode-sum route needs a radial split (r != r'); got r = r' = {r}")]
    NeedsRadialSplit { r: f64 },
    #[error("the point split is coincident; use the regularized entry points")]
    Coincident,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
