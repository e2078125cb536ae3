use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("{path}: {msg}")]
    Schema { path: String, msg: String },

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("no embedding of `{circuit}` onto `{hardware}`")]
    NoEmbedding { circuit: String, hardware: String },

    #[error("no feasible (hardware, layout) pair for subcircuit `{0}`")]
    NoFeasibleHardware(String),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("infeasible schedule: {0}")]
    Infeasible(String),

    #[error("resource guard exceeded: {0}")]
    ResourceGuard(String),

    #[error("reconstruction error: {0}")]
    Reconstruction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the CLI: 2 for schema/parse problems,
    /// 3 for infeasible schedules, 4 for resource guards, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::InvalidCircuit(_)
            | Error::Schema { .. }
            | Error::InvalidCut(_)
            | Error::InvalidLayout(_)
            | Error::Json(_) => 2,
            Error::NoEmbedding { .. } | Error::NoFeasibleHardware(_) | Error::Infeasible(_) => 3,
            Error::ResourceGuard(_) => 4,
            _ => 1,
        }
    }
}
