use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown fractal `{0}` (expected vicsek, gasket or carpet_graph)")]
    UnknownFractal(String),

    #[error("carpet_graph needs user-supplied (rho, tau) estimates")]
    MissingCarpetParams,

    #[error("size cap exceeded: {what} needs {requested} vertices, cap is {cap}")]
    SizeCap {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("product factors must share one fractal spec ({0} vs {1})")]
    SpecMismatch(String, String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("grid function has {got} values, graph has {expected} vertices")]
    GraphMismatch { expected: usize, got: usize },

    #[error("{what} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("outside the applicable regime: {0}")]
    Regime(String),

    #[error("function takes negative values (min {0}); shift it first")]
    NegativeValues(f64),

    #[error("all densities vanish")]
    AllZero,

    #[error("harmonic extension is singular: free vertices not connected to the pinned set")]
    SingularSystem,

    #[error("eigensolver failed: {0}")]
    Solver(String),

    #[error("corrupt spectral data: {0}")]
    Corrupt(String),
}

impl Error {
    pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::GraphMismatch { expected, got })
        }
    }
}
