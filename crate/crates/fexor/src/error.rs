//! Crate-wide error type.

use std::fmt;

use crate::device::Mode;

#[derive(Debug)]
pub enum Error {
    /// Symbol value outside what the storage mode can hold.
    InvalidSymbol { symbol: u8, mode: Mode },
    /// Profile constants violate a load-time invariant.
    InvalidProfile(String),
    /// Matrix shape disagrees with the array geometry (rows, cols).
    DimensionMismatch { expected: (usize, usize), got: (usize, usize) },
    /// A per-row or per-column vector has the wrong length.
    LengthMismatch { what: &'static str, expected: usize, got: usize },
    RowOutOfRange { row: usize, rows: usize },
    /// Write-pulse polarity disagrees with the Vth ordering of the target.
    InconsistentPulse { level: u8, target: u8, delta_v: f64 },
    /// Bias schedule is malformed (split BL/SL during a write, bad lengths).
    InvalidBias(String),
    /// Settled SL voltage falls between the sense bands.
    IndeterminateSense { v_sl: f64 },
    /// A decisive read cycle could not be decoded. `cycle` is 1-based.
    Undecodable { row: usize, col: usize, cycle: usize, v_sl: f64 },
    /// A statistic was requested over an empty sample population.
    EmptyPopulation,
    InvalidConfig(String),
    /// Workload layer geometry is unusable (e.g. filter larger than ifmap).
    InvalidLayer(String),
    /// Malformed input text. `line` is 1-based.
    Parse { line: usize, msg: String },
    Io(std::io::Error),
    Json(serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSymbol { symbol, mode } => {
                write!(f, "symbol {symbol} is not representable in {mode} mode")
            }
            Error::InvalidProfile(msg) => write!(f, "invalid profile: {msg}"),
            Error::DimensionMismatch { expected, got } => write!(
                f,
                "dimension mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            Error::LengthMismatch { what, expected, got } => {
                write!(f, "{what}: expected length {expected}, got {got}")
            }
            Error::RowOutOfRange { row, rows } => {
                write!(f, "row {row} out of range for array with {rows} rows")
            }
            Error::InconsistentPulse { level, target, delta_v } => write!(
                f,
                "write pulse of {delta_v:+.3} V cannot move level {level} toward {target}"
            ),
            Error::InvalidBias(msg) => write!(f, "invalid bias schedule: {msg}"),
            Error::IndeterminateSense { v_sl } => {
                write!(f, "indeterminate sense: V_SL = {v_sl:.4} V is between the decode bands")
            }
            Error::Undecodable { row, col, cycle, v_sl } => write!(
                f,
                "cell ({row},{col}) undecodable in cycle {cycle}: V_SL = {v_sl:.4} V"
            ),
            Error::EmptyPopulation => write!(f, "empty sample population"),
            Error::InvalidConfig(msg) => write!(f, "invalid config: {msg}"),
            Error::InvalidLayer(msg) => write!(f, "invalid layer: {msg}"),
            Error::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            Error::Io(e) => write!(f, "io error: {e}"),
            Error::Json(e) => write!(f, "json error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            Error::Json(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e)
    }
}

impl Error {
    /// True for errors caused by bad user input (files, arguments, shapes)
    /// rather than by a failure while running a valid request.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidSymbol { .. }
                | Error::InvalidProfile(_)
                | Error::DimensionMismatch { .. }
                | Error::LengthMismatch { .. }
                | Error::RowOutOfRange { .. }
                | Error::InvalidConfig(_)
                | Error::InvalidLayer(_)
                | Error::Parse { .. }
                | Error::Json(_)
        )
    }
}
