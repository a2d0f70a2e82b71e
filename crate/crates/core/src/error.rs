use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulation core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed {side} profile: {reason}")]
    MalformedProfile { side: &'static str, reason: String },

    #[error("profiles do not share an index space: {0}")]
    DimensionMismatch(String),

    #[error("{side} {agent} is matched to {partner}, which is not on its list")]
    PartnerNotListed {
        side: &'static str,
        agent: usize,
        partner: usize,
    },

    #[error(
        "exhaustive search limited to {max_doctors}x{max_hospitals}, got {doctors}x{hospitals}"
    )]
    SizeGuard {
        doctors: usize,
        hospitals: usize,
        max_doctors: usize,
        max_hospitals: usize,
    },

    #[error("regression in worked example: {0}")]
    Regression(String),

    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
