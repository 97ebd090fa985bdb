use num_complex::Complex64 as C64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of r2 at {0} (k near +/- omega^2)")]
    Pole(C64),

    #[error("branch cut hit at k = {k} (distance {dist:.3e})")]
    BranchCut { k: C64, dist: f64 },

    #[error("P(k) nearly singular at k = {k}: |det P| = {det_abs:.3e}")]
    NearSingular { k: C64, det_abs: f64 },

    #[error("Volterra march did not converge: {0}")]
    Convergence(String),

    #[error("division near zero: |s11| = {0:.3e} (possible soliton / assumption violation)")]
    DivisionNearZero(f64),

    #[error("k = {k} is not on contour region {region} (distance {dist:.3e})")]
    RegionMismatch { region: String, k: C64, dist: f64 },

    #[error("evaluation point too close to the integration arc: dist = {0:.3e}")]
    NearContour(f64),

    #[error("regularized integral did not stabilize: relative change {0:.3e}")]
    Regularization(f64),

    #[error("sign condition failed for {0}")]
    SignCondition(String),

    #[error("inadmissible spectral data: {0}")]
    Admissibility(String),

    #[error("special function accuracy check failed: {0}")]
    Accuracy(String),

    #[error("degenerate beta coefficient (nu = 0) in {0}")]
    DegenerateBeta(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error at byte offset {offset}, line {line}, column {column}: {msg}")]
    Parse {
        offset: usize,
        line: usize,
        column: usize,
        msg: String,
    },
}

impl Error {
    pub fn domain<S: Into<String>>(msg: S) -> Self {
        Error::Domain(msg.into())
    }
}
