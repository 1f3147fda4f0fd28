use thiserror::Error;

/// Errors raised by the geometry, PDE and free-boundary layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("annulus too thin: boundary gap {gap:.6} is below the required {required:.6}")]
    EmptyAnnulus { gap: f64, required: f64 },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("level {level} not present in field (range [{min}, {max}])")]
    LevelNotPresent { level: f64, min: f64, max: f64 },

    #[error("no convergence after {iterations} iterations (last residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("grid too coarse: lambda {lambda} is below 2h = {}", 2.0 * .h)]
    GridTooCoarse { lambda: f64, h: f64 },

    #[error("lambda {lambda} exceeds the admissible maximum{}", fmt_max(.lambda_max))]
    LambdaTooLarge {
        lambda: f64,
        lambda_max: Option<f64>,
    },

    #[error("value {value} outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn fmt_max(m: &Option<f64>) -> String {
    match m {
        Some(v) => format!(" {v}"),
        None => String::new(),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
