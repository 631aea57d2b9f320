use thiserror::Error;

/// Errors raised by the measure, variation, discrepancy and transform routines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate {value} on axis {axis} lies outside [0, 1]")]
    OutOfUnitCube { axis: usize, value: f64 },

    #[error("invalid distribution function: {0}")]
    InvalidCdf(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid grid function: {0}")]
    InvalidGrid(String),

    #[error("coordinate {value} on axis {axis} is not a grid breakpoint")]
    OffGrid { axis: usize, value: f64 },

    #[error("measure has no left-limit support; cannot evaluate an open box side")]
    MissingLeftLimit,

    #[error("exact evaluation needs {cells} cells in dimension {dim}, limits are {budget} cells and dimension {max_dim}")]
    BudgetExceeded {
        cells: u128,
        dim: usize,
        budget: u128,
        max_dim: usize,
    },

    #[error("operation requires a right-continuous step function")]
    NotStep,

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("conditional distribution is not invertible at {0}")]
    NotInvertible(f64),

    #[error("density is not positive at sample point {index} (value {value})")]
    NonPositiveDensity { index: usize, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit_point(p: &[f64]) -> Result<()> {
    for (axis, &value) in p.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfUnitCube { axis, value });
        }
    }
    Ok(())
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
