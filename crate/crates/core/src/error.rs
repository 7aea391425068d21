use std::path::PathBuf;

/// Errors raised anywhere in the linkage pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("duplicate user id {id:?} in network {network:?}")]
    DuplicateId { network: String, id: String },
    #[error("edge ({from:?}, {to:?}) in network {network:?} references undeclared user {missing:?}")]
    DanglingEdge {
        network: String,
        from: String,
        to: String,
        missing: String,
    },
    #[error("self-loop edge on user {id:?} in network {network:?}")]
    SelfLoop { network: String, id: String },
    #[error("invalid attribute {attribute:?} on user {id:?}: {reason}")]
    InvalidAttribute {
        id: String,
        attribute: String,
        reason: String,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("unknown id {0:?}")]
    UnknownId(String),
    #[error("conflicting anchors: {0:?} appears in more than one pair")]
    ConflictingAnchor(String),
    #[error("embedding table has no row {0}")]
    MissingRow(usize),
    #[error("no object embedding for {predicate} object {index}")]
    MissingObjectEmbedding { predicate: String, index: usize },
    #[error("no factoids to train on")]
    EmptyFactoids,
    #[error("noise distribution has no mass")]
    EmptyDistribution,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numeric divergence in {stage}: {detail}")]
    Divergence { stage: String, detail: String },
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 3 for numeric divergence, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Divergence { .. } => 3,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn in_stage(self, stage: &str) -> Self {
        Error::Stage {
            stage: stage.to_string(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
