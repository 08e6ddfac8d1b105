use thiserror::Error;

/// Errors raised while constructing or transforming graphs.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at node {0}")]
    SelfLoop(u32),
    #[error("parallel edge between {0} and {1}")]
    ParallelEdge(u32, u32),
    #[error("edge ({0},{1}) has invalid weight {2} (must be in 1..2^63)")]
    BadWeight(u32, u32, u64),
    #[error("node id {0} out of range 1..={1}")]
    BadNode(u32, u32),
    #[error("graph is not connected")]
    Disconnected,
    #[error("infeasible generator parameters: {0}")]
    InfeasibleParams(String),
    #[error("graph is not a tree ({0} nodes, {1} edges)")]
    NotATree(u32, usize),
    #[error("no unique-shortest-path certificate on this graph")]
    MissingUspCertificate,
    #[error("could not reach unique shortest paths after {0} perturbation attempts")]
    UspFailure(u32),
    #[error("edge subdivision would grow the graph more than {factor}x (limit 3x)")]
    BlowupExceeded { factor: u64 },
}

/// Errors from text-format readers. Carries the 1-based line number.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(line: usize, msg: impl Into<String>) -> Self {
        ParseError {
            line,
            msg: msg.into(),
        }
    }
}

/// Errors around hopset construction and loading.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum HopsetError {
    #[error("shortcut ({u},{v}) claims weight {claimed} but d_G = {actual}")]
    WeightMismatch {
        u: u32,
        v: u32,
        claimed: u64,
        actual: u64,
    },
    #[error("shortcut ({u},{v}) weight {claimed} is below the true distance {actual}")]
    WeightBelowDistance {
        u: u32,
        v: u32,
        claimed: u64,
        actual: u64,
    },
    #[error("shortcut node id {0} out of range 1..={1}")]
    BadNode(u32, u32),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Errors from the three-hop oracle.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("no middle-table probe hit for pair ({0},{1}); oracle is not a valid cover")]
    NoCover(u32, u32),
    #[error("oracle build failed after {attempts} attempts; first violation {u},{v}: got {got}, want {want}")]
    BuildFailed {
        attempts: u32,
        u: u32,
        v: u32,
        got: u64,
        want: u64,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Errors around tree decompositions.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TdError {
    #[error("invalid decomposition: {reason}")]
    Invalid { reason: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl TdError {
    pub fn invalid(reason: impl Into<String>) -> Self {
        TdError::Invalid {
            reason: reason.into(),
        }
    }
}

/// Errors from the LP pipeline.
#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("model is infeasible (size bound below the coverage minimum)")]
    Infeasible,
    #[error("solver failure: {0}")]
    SolverFailure(String),
    #[error("randomized rounding failed after {0} attempts")]
    RoundingFailed(u32),
    #[error("solution violates constraint: {0}")]
    BadSolution(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Hopset(#[from] HopsetError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
