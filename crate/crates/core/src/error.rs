use thiserror::Error;

/// Errors raised by the filter, series and example-solution operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("requested {requested} terms but the series only holds {available}")]
    TruncationOutOfRange { requested: usize, available: usize },

    #[error("aliasing: {samples} samples cannot resolve {k_max} modes (need at least {required})")]
    Aliasing {
        samples: usize,
        k_max: usize,
        required: usize,
    },

    #[error("operation requires a {expected} sampled function")]
    WrongExtension { expected: &'static str },

    #[error("filter range {range} is below the grid resolution (minimum {minimum})")]
    RangeBelowResolution { range: f64, minimum: f64 },

    #[error("filter range {range} exceeds the periodic half-width {half_width}")]
    RangeExceedsPeriod { range: f64, half_width: f64 },

    #[error("function returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },

    #[error("limit sequence does not settle: last step {last_step:e} vs first step {first_step:e}")]
    NonConvergentTrend { first_step: f64, last_step: f64 },

    #[error("field {field} does not belong to the {problem} solution family")]
    FieldMismatch {
        field: &'static str,
        problem: &'static str,
    },

    #[error("point ({0}, {1}) lies outside the problem domain")]
    OutsideDomain(f64, f64),

    #[error("{0} is a divergent series here; pass an explicit acknowledgement to evaluate partial sums")]
    DivergentSeries(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
