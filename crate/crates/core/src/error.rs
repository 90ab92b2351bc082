use thiserror::Error;

/// Errors raised by the simulation and analysis layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid is not symmetric about zero")]
    GridAsymmetry,

    #[error("spectral density integrates to {0:e} on the grid")]
    ZeroDensity(f64),

    #[error("invalid spectral density: {0}")]
    InvalidDensity(String),

    #[error("spectral density is not even in frequency offset")]
    AsymmetricSpectrum,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("density operator has eigenvalue {0:e} below the positivity tolerance")]
    NotPositive(f64),

    #[error("unsupported state: {0}")]
    UnsupportedState(String),

    #[error("invalid interferometer: {0}")]
    InvalidInterferometer(String),

    #[error("operation requires a {expected} interferometer, got {found}")]
    WrongInterferometer {
        expected: &'static str,
        found: &'static str,
    },

    #[error("pump is neither even nor odd (|beta| = {0:.9}); use the mode oracle")]
    NonParityPump(f64),

    #[error("invalid scan: {0}")]
    InvalidScan(String),

    #[error("scan step {step:e} s exceeds the fringe-resolution limit {limit:e} s")]
    UnderSampled { step: f64, limit: f64 },

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("element not valid here: {0}")]
    InvalidElement(String),

    #[error("pipeline incomplete: outputs have not been relabeled")]
    IncompletePipeline,

    #[error("dense tensor needs {required} bytes, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("samples are empty, negative, or all zero")]
    EmptyOrNegative,

    #[error("signal is under-resolved: {0}")]
    UnderResolved(String),

    #[error("no fringe above the detection threshold")]
    NoFringe,

    #[error("no dip deeper than the detection threshold")]
    NoDip,

    #[error("scans do not share a delay grid")]
    GridMismatch,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::Io(io),
                _ => unreachable!("checked io kind"),
            }
        } else {
            Error::Parse(e.to_string())
        }
    }
}
