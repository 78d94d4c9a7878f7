use thiserror::Error;

use crate::spline_mat::SplineMat;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate triangle: points are collinear")]
    DegenerateTriangle,

    #[error("duplicate input point at index {0}")]
    DuplicatePoint(usize),

    #[error("all input points are collinear")]
    AllCollinear,

    #[error("medial axis graph is empty")]
    EmptyMat,

    #[error("least-squares system is rank deficient ({n_ctrl} control points for {n_points} samples)")]
    RankDeficient { n_ctrl: usize, n_points: usize },

    #[error("parameter {0} outside the curve domain [0, 1]")]
    Domain(f64),

    #[error("medial circles coincide: identical center and radius")]
    CoincidentCircles,

    #[error("simplification did not reach the target: epsilon {achieved} > {target}")]
    NonConvergence {
        best: Box<SplineMat>,
        achieved: f64,
        target: f64,
    },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        match self {
            // Keep the non-convergence payload reachable at the top level.
            e @ Error::NonConvergence { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// Strips stage labels.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}
