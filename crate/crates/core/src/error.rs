use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid system parameters: {0}")]
    InvalidParams(String),

    #[error("channel estimate is rank deficient (numerical rank {rank}, expected {expected})")]
    RankDeficient { rank: usize, expected: usize },

    #[error("regressor matrix is numerically singular")]
    SingularRegressor,

    #[error("UR NMSE floor gamma={gamma} outside admissible range (0, {max}]")]
    InfeasibleGamma { gamma: f64, max: f64 },

    #[error("no feasible lattice point")]
    NoFeasiblePoint,

    #[error("geometric program is infeasible (phase-one margin {margin})")]
    Infeasible { margin: f64 },

    #[error("solver did not converge after {iterations} iterations (residual {residual})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("condensation objective decreased from {previous} to {current}")]
    Stalled { previous: f64, current: f64 },

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
