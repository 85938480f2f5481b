use core::fmt;

/// Errors shared across the toolkit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Input signal or grid has no samples/frames.
    EmptyInput,
    /// Transform or filter parameters violate their invariants.
    InvalidParams(&'static str),
    /// A scalar input is out of its documented domain.
    InvalidInput(&'static str),
    /// Two grids/signals that must agree in shape do not.
    ShapeMismatch,
    /// Sample rates of paired signals differ.
    RateMismatch,
    /// Signal is shorter than the filter or segment requires.
    InputTooShort,
    /// Reference signal unusable for the requested metric.
    InvalidReference(&'static str),
    /// No detection on the evaluated signal where one was required.
    MissedDetection,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput => write!(f, "empty input"),
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::ShapeMismatch => write!(f, "shape mismatch"),
            Error::RateMismatch => write!(f, "sample rate mismatch"),
            Error::InputTooShort => write!(f, "input too short"),
            Error::InvalidReference(msg) => write!(f, "invalid reference: {msg}"),
            Error::MissedDetection => write!(f, "no detection on evaluated signal"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
