use thiserror::Error;

/// Errors raised by the field operators, the solver and the audits.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids or fibers: {0}")]
    Mismatch(String),

    #[error("map violates the sphere constraint (max | |phi| - 1 | = {defect:e})")]
    OffSphere { defect: f64 },

    #[error("spinor is not tangent along the map (tangency defect {defect:e})")]
    NonTangent { defect: f64 },

    #[error("imaginary part {value:e} exceeds tolerance in {context}")]
    ImaginaryPart { context: &'static str, value: f64 },

    #[error("circle of radius {radius} is too close to the chart boundary (need r + 2h < 1/2)")]
    ChartBoundary { radius: f64 },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("seed rejected: {0}")]
    InvalidSeed(String),

    #[error("invalid flow configuration: {0}")]
    InvalidFlow(String),

    #[error("non-finite values after step {iter} (blow-up)")]
    BlowUp { iter: usize },

    #[error("invalid estimate constants: {0}")]
    InvalidConstants(String),

    #[error("infeasible constants: d_tilde = {dtilde} <= 0")]
    Infeasible { dtilde: f64 },

    #[error("image not in B_R(y0): distance {distance} >= R = {radius} at ({x}, {y})")]
    RangeViolation { distance: f64, radius: f64, x: f64, y: f64 },

    #[error("residual {residual:e} exceeds the admissible level {limit:e}")]
    ResidualTooLarge { residual: f64, limit: f64 },

    #[error("i/o: {0}")]
    Io(String),

    #[error("malformed field file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Format(e.to_string())
    }
}
