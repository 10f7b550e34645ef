use std::path::PathBuf;

use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range for graph with {num_nodes} nodes")]
    NodeOutOfRange { node: NodeId, num_nodes: usize },

    #[error("self-loop on node {0} is not a valid edge")]
    SelfLoop(NodeId),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("graph has no wedges; the clustering coefficient is undefined")]
    UndefinedClustering,

    #[error("edge ({0}, {1}) arrived twice")]
    DuplicateArrival(NodeId, NodeId),

    #[error("arrival label {got} is not greater than previous label {previous}")]
    LabelOrder { previous: u64, got: u64 },

    #[error("sampling probability {0} is outside (0, 1]")]
    InvalidProbability(f64),

    #[error("sample too small: {0}")]
    SampleTooSmall(&'static str),

    #[error("bias correction undefined: 1 + rb_hat = {0} is not positive")]
    CorrectionOverflow(f64),

    #[error("count overflowed 64 bits while computing {0}")]
    Overflow(&'static str),

    #[error("target RSE {target} is unreachable (RSE at p = 1 is {at_one})")]
    UnreachableTarget { target: f64, at_one: f64 },

    #[error("invalid experiment: {0}")]
    InvalidSpec(String),

    #[error("graph with {edges} edges exceeds the oracle size limit of {limit}; pass the huge-oracle override to proceed")]
    OracleTooLarge { edges: usize, limit: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
