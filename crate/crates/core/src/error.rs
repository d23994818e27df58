use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("point ({x}, {y}) is outside the unit-disk chart")]
    PointOutsideChart { x: f64, y: f64 },

    #[error("curvature bound violated: K = {value} at ({x}, {y}) exceeds {bound}")]
    HypothesisViolation { x: f64, y: f64, value: f64, bound: f64 },

    #[error("trajectory approached the chart boundary (|x| = {radius})")]
    ChartEscape { radius: f64 },

    #[error("integrator failed: {0}")]
    Integrator(String),

    #[error("boundary value problem did not converge after {iterations} iterations (best residual {residual:e})")]
    BvpNoConvergence { iterations: usize, residual: f64 },

    #[error("state has not escaped the support (|x| = {radius}, radial velocity {radial})")]
    NotEscaped { radius: f64, radial: f64 },

    #[error("recovered ideal endpoints ({got_forward}, {got_backward}) differ from requested ({forward}, {backward})")]
    EndpointMismatch { forward: f64, backward: f64, got_forward: f64, got_backward: f64 },

    #[error("ideal points must be distinct (got {0} twice)")]
    DegeneratePair(f64),

    #[error("{kind} limit did not converge; history {history:?}")]
    NotConverged { kind: &'static str, history: Vec<(f64, f64)> },

    #[error("direction points into the disk at the boundary (normal component {normal})")]
    NotEntrySphere { normal: f64 },

    #[error("linear solver failed: {0}")]
    SolverFailure(String),

    #[error("pipeline stage {stage} failed with residual {residual:e}")]
    PipelineStageFailure { stage: char, residual: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
