use thiserror::Error;

/// Errors raised by the model, transforms, quadrature and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("transience condition mu1 + r*mu2^- < 0 violated (value {value})")]
    NotTransient { value: f64 },

    #[error("covariance matrix is not symmetric positive-definite: {0}")]
    BadCovariance(String),

    #[error("starting point must satisfy x2 >= 0 (got x2 = {x2})")]
    BadStart { x2: f64 },

    #[error("non-finite model parameter: {0}")]
    NonFinite(&'static str),

    #[error("theta1 = {re}{im:+}i lies on a branch cut of the kernel roots")]
    OnBranchCut { re: f64, im: f64 },

    #[error("evaluation point is a pole (denominator modulus {modulus:e})")]
    AtPole { modulus: f64 },

    #[error("z2 = {z2} is below the minimum distance {min} from the boundary")]
    BoundaryTooClose { z2: f64, min: f64 },

    #[error("z2 = {z2} is within {min} of the starting level x2 = {x2}")]
    NearStartLevel { z2: f64, x2: f64, min: f64 },

    #[error("quadrature did not reach tolerance within {nodes} nodes (error estimate {error:e})")]
    NoConvergence { nodes: usize, error: f64 },

    #[error("angle {alpha} is outside the admissible range (0, pi)")]
    AlphaOutOfRange { alpha: f64 },

    #[error("tail constant for this direction is not determined when mu2 = 0")]
    ZeroDriftUnsupportedDirection,

    #[error("tail mass is infinite for a law with zero decay rate")]
    InfiniteTailMass,

    #[error("Martin kernel limits are only available for mu2 < 0")]
    NotImplementedForPositiveDrift,

    #[error("harmonic family unavailable: {0}")]
    FamilyUnavailable(&'static str),

    #[error("simulation budget exceeded: all {paths} paths hit the time cap")]
    BudgetExceeded { paths: usize },

    #[error("theta = ({0}, {1}) is outside the convergence domain E u F")]
    ThetaOutsideConvergence(f64, f64),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),
}

pub type Result<T> = std::result::Result<T, Error>;
