use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("support of {cells} cells exceeds the table cap of {cap} cells")]
    Capacity { cells: u128, cap: usize },

    #[error("index ({x}, {y}) outside support [0, {n1}] x [0, {n2}]")]
    OutOfSupport { x: u64, y: u64, n1: u32, n2: u32 },

    #[error("observation {index} = ({x}, {y}) lies outside support [0, {n1}] x [0, {n2}]")]
    DataOutOfSupport {
        index: usize,
        x: u32,
        y: u32,
        n1: u32,
        n2: u32,
    },

    #[error("truncation at {truncation} leaves tail mass bound {bound:e} above 1e-12")]
    TruncationInsufficient { truncation: u32, bound: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cell ({x}, {y}) has zero frequency")]
    ZeroFrequency { x: u32, y: u32 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate data: {0}")]
    Boundary(String),

    #[error("no grid point produced a fit: {0}")]
    AllFitsFailed(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no observations")]
    NoObservations,

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code used in CLI error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Capacity { .. } => "capacity",
            Error::OutOfSupport { .. } => "out_of_support",
            Error::DataOutOfSupport { .. } => "data_out_of_support",
            Error::TruncationInsufficient { .. } => "truncation_insufficient",
            Error::Config(_) => "config",
            Error::ZeroFrequency { .. } => "zero_frequency",
            Error::InsufficientData(_) => "insufficient_data",
            Error::Boundary(_) => "boundary",
            Error::AllFitsFailed(_) => "all_fits_failed",
            Error::Parse { .. } => "parse",
            Error::NoObservations => "no_observations",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
