use std::fmt;

/// Pipeline stage labels, as they appear in reports and CLI diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stage {
    NptCheck,
    Witness,
    Concentrate,
    StandardForm,
    Symmetrize,
    RcWitness,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::NptCheck => "npt_check",
            Stage::Witness => "witness",
            Stage::Concentrate => "concentrate",
            Stage::StandardForm => "standard_form",
            Stage::Symmetrize => "symmetrize",
            Stage::RcWitness => "rc_witness",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid mode count: {0}")]
    InvalidModeCount(usize),
    #[error("invalid shape {rows}x{cols}: {reason}")]
    InvalidShape {
        rows: usize,
        cols: usize,
        reason: &'static str,
    },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),
    #[error("state is unphysical (min symplectic eigenvalue {0})")]
    Unphysical(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("numerical inconsistency: {0}")]
    Inconsistent(String),
    #[error("invalid mode index {index} (side has {modes} modes)")]
    ModeIndex { index: usize, modes: usize },
    #[error("concentration failed: {0}")]
    Concentration(String),
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
    #[error("invalid state file: {0}")]
    Schema(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Tags the error with a pipeline stage unless it already carries one.
    pub fn at(self, stage: Stage) -> Error {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// The stage label, if this error was raised inside the pipeline.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
