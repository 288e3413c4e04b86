use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid discretization: {nodes} nodes (need an even count of at least 8)")]
    InvalidDiscretization { nodes: usize },

    #[error("unsupported winding number {0}; only -1, 0 and +1 are allowed")]
    UnsupportedWinding(i64),

    #[error("degenerate contour: nodes {index} and {next} coincide")]
    DegenerateContour { index: usize, next: usize },

    #[error("invalid patch system: {0}")]
    InvalidSystem(String),

    #[error("ambiguous region membership: point ({x1}, {x2}) lies on a contour")]
    AmbiguousMembership { x1: f64, x2: f64 },

    #[error("kernel evaluated at a lattice singularity (rho = {rho:e})")]
    KernelSingularity { rho: f64 },

    #[error("probe ({x1}, {x2}) is within {threshold:e} of contour {contour}")]
    NearBoundary { x1: f64, x2: f64, contour: usize, threshold: f64 },

    #[error("contour proximity breakdown: {0}")]
    ContourProximity(String),

    #[error("arc-length redistribution did not converge at node {node}")]
    RedistributionFailed { node: usize },

    #[error("runge-kutta stage {stage}: {source}")]
    Stage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("I/O error after frame {frame}: {message}")]
    Io { frame: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { path: path.into(), message: message.into() }
    }

    /// Strips any runge-kutta stage annotation.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}
