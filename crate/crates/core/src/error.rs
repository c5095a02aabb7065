use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole: {0}")]
    Pole(String),

    /// |L(s) - a| fell below the guard at an evaluation point.
    #[error("too close to an a-point at s = {re} + {im}i (|L - a| = {modulus:e})")]
    NearAPoint { re: f64, im: f64, modulus: f64 },

    /// A contour passed within the guard distance of an a-point; pick another height.
    #[error("contour too close to an a-point near s = {re} + {im}i (|f| = {modulus:e})")]
    ContourTooClose { re: f64, im: f64, modulus: f64 },

    #[error("Newton iteration failed in window t in ({t_lo}, {t_hi}], sigma in ({s_lo}, {s_hi})")]
    NonConvergence {
        t_lo: f64,
        t_hi: f64,
        s_lo: f64,
        s_hi: f64,
    },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("a = 1 transform mismatch at {} point(s): {details}", .count)]
    Mismatch { count: usize, details: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn pole(msg: impl Into<String>) -> Self {
        Error::Pole(msg.into())
    }
}
