use thiserror::Error;

use crate::scheme::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid strategy profile: {0}")]
    InvalidProfile(String),

    #[error("strategy profile is infeasible")]
    InfeasibleProfile,

    #[error("game is infeasible: no strategy profile respects all capacities")]
    InfeasibleGame,

    #[error("cost-sharing scheme violates the admissibility properties: {0:?}")]
    SchemeViolation(Vec<Violation>),

    #[error("path or profile count exceeds cap {cap} (reached {count})")]
    PathExplosion { cap: usize, count: usize },

    #[error("flow is infeasible: {0}")]
    InfeasibleFlow(String),

    #[error("graph is not series-parallel")]
    NotSeriesParallel,

    #[error("no feasible extension path exists")]
    NoExtension,

    #[error("agent {0} has no feasible path")]
    NoFeasiblePath(usize),

    #[error("dynamics exceeded the step cap of {0}")]
    StepCapExceeded(usize),

    #[error("instance is not symmetric")]
    NotSymmetric,

    #[error("internal assertion failed: {0}")]
    InternalAssertion(String),

    #[error("parameter violation: {0}")]
    ParameterViolation(String),

    #[error("generated instance failed its self-check: {0}")]
    SelfCheckFailed(String),

    #[error("instance generation failed: {0}")]
    GenerationFailed(String),

    #[error("parse error: {0}")]
    Parse(String),
}
