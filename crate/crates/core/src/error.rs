use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("model needs at least one bath site")]
    NoSites,

    #[error("coupling ({0}, {1}) references a site outside 0..{2}")]
    CouplingOutOfRange(usize, usize, usize),

    #[error("coupling ({0}, {0}) couples a site to itself")]
    SelfCoupling(usize),

    #[error("duplicate coupling ({0}, {1})")]
    DuplicateCoupling(usize, usize),

    #[error("non-finite parameter `{0}`")]
    NonFinite(&'static str),

    #[error("parameter `{name}` must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("{sites} sites exceeds the cap of {cap} for {what}")]
    DimensionCap {
        sites: usize,
        cap: usize,
        what: &'static str,
    },

    #[error("operator dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("polynomial must have degree at least 1")]
    ZeroDegree,

    #[error("root finder did not converge after {iterations} iterations (worst residual {worst_residual:e})")]
    NoConvergence {
        iterations: usize,
        worst_residual: f64,
        residuals: Vec<f64>,
    },

    #[error("probe decoupled; correlator has no bath-induced zeros")]
    ProbeDecoupled,

    #[error("empty correlator trace")]
    EmptyTrace,

    #[error("time grid must be strictly increasing and finite")]
    InvalidGrid,
}
