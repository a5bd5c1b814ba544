use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid subsystem permutation: {0}")]
    InvalidPermutation(String),

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("operator is not Hermitian (imaginary residue {0:e})")]
    NonHermitian(f64),

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("negative probability {0:e} from a model trace")]
    NegativeProbability(f64),

    #[error("probability table is missing entry x={x} z={z} b={b} a={a} c={c}")]
    MissingEntry {
        x: u8,
        z: u8,
        b: &'static str,
        a: u8,
        c: u8,
    },

    #[error("invalid probability table: {0}")]
    InvalidTable(String),

    #[error("setting block x={x} z={z} has no recorded trials")]
    EmptyBlock { x: u8, z: u8 },

    #[error("conditioning outcome has zero probability")]
    ZeroSuccessProbability,

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
