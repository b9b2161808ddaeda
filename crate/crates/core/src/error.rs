//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by any stage of the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error in {path} at line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("network is empty")]
    EmptyNetwork,
    #[error("mesh generation failed: {0}")]
    MeshFailure(String),
    #[error("mesh topology error: {0}")]
    TopologyError(String),
    #[error("singular element: triangle {0} has non-positive area")]
    SingularElement(usize),
    #[error("missing boundary mid node on the {0} edge")]
    MissingMidNode(&'static str),
    #[error("linear solve failed: {0}")]
    SolveFailure(String),
    #[error("invalid elastic moduli: E = {e}, nu = {nu} (need E > 0 and 0 <= nu < 0.5)")]
    InvalidModuli { e: f64, nu: f64 },
    #[error("negative contact stress {0} passed to the aperture law")]
    NegativeStress(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Wraps an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: impl Into<String>) -> Self {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
