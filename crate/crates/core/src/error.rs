use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong inside the model and the pipelines built on it.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A unit names an item that has no cell in the population.
    UnknownMember { unit: usize, item: String },
    /// A unit with no members reached the evolution loop.
    EmptyUnit { unit: usize },
    /// Two vectors that must agree in dimension do not.
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    /// A gene became (or was supplied as) NaN or infinite.
    NonFinite { item: String },
    /// A configuration value is out of its allowed range.
    InvalidConfig(String),
    /// Item ids may not contain tabs or newlines.
    InvalidItemId(String),
    /// Tokens without a base vector under the `error` policy; at most 20 are listed.
    MissingEmbeddings { missing: Vec<String>, total: usize },
    /// The catalog is too short to form a single co-existence unit.
    NoCompleteUnit { events: usize, window: usize },
    /// An event coordinate falls outside the valid latitude/longitude range.
    CoordinateOutOfRange { lat: f64, lon: f64 },
    /// Evaluation events do not lie strictly after the training window.
    Leakage {
        train_end_ms: i64,
        first_eval_ms: i64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnknownMember { unit, item } => {
                write!(f, "unit {unit}: item `{item}` has no cell in the population")
            }
            Error::EmptyUnit { unit } => write!(f, "unit {unit} has no members"),
            Error::DimensionMismatch {
                context,
                expected,
                found,
            } => write!(
                f,
                "{context}: expected dimension {expected}, found {found}"
            ),
            Error::NonFinite { item } => write!(f, "non-finite gene in item `{item}`"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::InvalidItemId(id) => {
                write!(f, "item id {id:?} contains a tab or newline")
            }
            Error::MissingEmbeddings { missing, total } => {
                write!(f, "{total} token(s) have no embedding: ")?;
                for (i, tok) in missing.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(tok)?;
                }
                if *total > missing.len() {
                    write!(f, ", ... ({} more)", total - missing.len())?;
                }
                Ok(())
            }
            Error::NoCompleteUnit { events, window } => write!(
                f,
                "no complete co-existence unit: {events} event(s) with window size {window}"
            ),
            Error::CoordinateOutOfRange { lat, lon } => {
                write!(f, "coordinate out of range: lat {lat}, lon {lon}")
            }
            Error::Leakage {
                train_end_ms,
                first_eval_ms,
            } => write!(
                f,
                "evaluation catalog overlaps the training window (event at {first_eval_ms} ms <= training end {train_end_ms} ms)"
            ),
        }
    }
}

impl core::error::Error for Error {}
