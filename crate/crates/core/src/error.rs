use std::fmt;

use thiserror::Error;

/// Failures while parsing a binary netpbm file.
#[derive(Debug, Error)]
pub enum NetpbmError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic number {found:?}: expected P5 or P6")]
    BadMagic { found: String },
    #[error("malformed header field `{field}`")]
    BadHeader { field: &'static str },
    #[error("unsupported maxval {0}: only 255 is accepted")]
    BadMaxval(u32),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
}

/// Pipeline stage names, used to report where a detection run failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Preprocess,
    Canny,
    BrainMask,
    Midpoints,
    AxisFit,
    Asymmetry,
    Regions,
    Measure,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Preprocess => "preprocess",
            Stage::Canny => "canny",
            Stage::BrainMask => "brain_mask",
            Stage::Midpoints => "row_midpoints",
            Stage::AxisFit => "fit_axis_lsm",
            Stage::Asymmetry => "asymmetry_map",
            Stage::Regions => "connected_components",
            Stage::Measure => "measure",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("image {width}x{height} is too small: {what} needs at least {min}x{min}")]
    Dimension {
        width: usize,
        height: usize,
        min: usize,
        what: &'static str,
    },
    #[error(transparent)]
    Netpbm(#[from] NetpbmError),
    #[error("no foreground separable: image has a single intensity level")]
    NoForeground,
    #[error("too few midpoint samples: need {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("singular system: degenerate midpoint geometry")]
    Singular,
    #[error("stage {stage} failed: {source}")]
    Pipeline {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn at(stage: Stage) -> impl FnOnce(Error) -> Error {
        move |source| Error::Pipeline {
            stage,
            source: Box::new(source),
        }
    }

    /// The innermost error, skipping pipeline-stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Pipeline { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
