use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A channel frequency bin used for data has zero gain and cannot be equalized.
    #[error("singular channel: frequency bin {bin} has zero gain")]
    SingularChannel { bin: usize },

    /// The cyclic prefix is shorter than the channel memory.
    #[error("cyclic prefix of {cp_len} samples cannot absorb a {taps}-tap channel (inter-symbol interference)")]
    IsiRisk { cp_len: usize, taps: usize },

    #[error("chromaticity undefined for a spectrum with X+Y+Z = 0")]
    UndefinedChromaticity,

    #[error("no meaningful CCT: chromaticity lies {duv:.4} from the Planckian locus")]
    NoMeaningfulCct { duv: f64 },

    #[error("data table error: {0}")]
    Data(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
