use thiserror::Error;

/// Errors surfaced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("p must lie in (1,2), got {0}")]
    POutOfRange(f64),

    #[error("invalid {what}: {why}")]
    InvalidParameter { what: &'static str, why: String },

    #[error("fields live on different grids ({0} vs {1} points per side)")]
    GridMismatch(usize, usize),

    #[error("operation undefined on the zero field")]
    ZeroField,

    #[error("nonlinearity saturates at t = {t:.6e} (threshold {threshold:.6e})")]
    Saturation { t: f64, threshold: f64 },

    #[error("fiber map has no sign change up to the saturation threshold t = {t_max:.6e} (min phi = {phi_min:.6e})")]
    NoBracket { t_max: f64, phi_min: f64 },

    #[error("radial grid too coarse: spacing {spacing:.6e} exceeds {required:.6e} needed to resolve the plateau")]
    Resolution { spacing: f64, required: f64 },

    #[error("configuration invalid:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed field file {path}: {why}")]
    FieldFormat { path: String, why: String },
}

pub type Result<T> = std::result::Result<T, Error>;
