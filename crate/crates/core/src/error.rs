use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("symbol is not in the expected form: {0}")]
    Form(String),

    #[error("normal form check failed: {0}")]
    NormalForm(String),

    #[error("parity class violated at grade {grade}: {detail}")]
    Parity { grade: u32, detail: String },

    #[error("right-hand side not orthogonal to the kernel (projection {projection:.3e}, norm {norm:.3e})")]
    OrthogonalityViolation { projection: f64, norm: f64 },

    #[error("resonant obstruction at recurrence step {step}")]
    ResonantObstruction { step: usize },

    #[error("fit residual {residual:.3e} exceeds bound {bound:.3e}")]
    FitDiagnostics { residual: f64, bound: f64 },

    #[error("polynomial degree {degree} exceeds cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("well classification ambiguous near ({x:.6}, {xi:.6}): eigenvalue gap {gap:.3e}")]
    ClassificationAmbiguous { x: f64, xi: f64, gap: f64 },

    #[error("no closed orbit found at energy {tau}")]
    NoClosedOrbit { tau: f64 },

    #[error("target {target} outside the tabulated range [{lo}, {hi}]")]
    OutOfRange { target: f64, lo: f64, hi: f64 },

    #[error("p={p} and q={q} are not coprime")]
    NotCoprime { p: i64, q: i64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("eigensolver failed for {0}")]
    Eigen(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
