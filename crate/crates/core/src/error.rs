use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    TraceParse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("trace references unknown {kind} id {id} (deployment has {count})")]
    UnknownNode {
        kind: &'static str,
        id: usize,
        count: usize,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("gNB {gnb} has no free RF chain{} (limit {limit})", panel.map(|p| format!(" on panel {p}")).unwrap_or_default())]
    Capacity {
        gnb: usize,
        panel: Option<usize>,
        limit: usize,
    },

    #[error("aggregate effective channel is rank deficient (condition number {condition:.3e}) for UEs {ues:?}")]
    RankDeficient { ues: Vec<usize>, condition: f64 },

    #[error("angular resolution is undefined for an unbounded estimation codebook")]
    UnboundedResolution,

    #[error("exhaustive search refused: {0}")]
    OracleRefused(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
