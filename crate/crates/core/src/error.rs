use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("edge list is empty")]
    EmptyGraph,
    #[error("node index {index} out of range for {n_nodes} nodes")]
    BadIndex { index: usize, n_nodes: usize },
    #[error("node {0} has no incident edge")]
    IsolatedNode(usize),
    #[error("edge {0} is a self-loop")]
    SelfLoop(usize),
    #[error("graph admits no layer decomposition with at least two layers")]
    NotLayerGraph,
    #[error("graph is not a symmetric layer graph")]
    NotSymmetricLayerGraph,
    #[error("graph is not bipartite")]
    NotBipartite,

    #[error("coefficient field depends on x")]
    NotConstant,
    #[error("evaluation point {0} lies outside [0, 1]")]
    OutOfDomain(f64),
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("edge functions disagree at node {node} (spread {spread:e})")]
    DiscontinuousAtNode { node: usize, spread: f64 },
    #[error("endpoint traces are not node-continuous (residual {residual:e})")]
    NotContinuous { residual: f64 },

    #[error("linear solve failed: {0}")]
    SolverFailure(String),
    #[error("system is not self-adjoint")]
    NotSelfAdjoint,
    #[error("invalid time stepping parameters: {0}")]
    InvalidTimeStep(String),

    #[error("matrix is not an orthogonal projection (defect {defect:e})")]
    NotProjection { defect: f64 },
    #[error("projection is not admissible for this graph")]
    NotAdmissible,

    #[error("parse error: {0}")]
    Parse(String),
}
