use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuatError {
    #[error("quaternion is not unit length (norm {norm})")]
    NotUnit { norm: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error(transparent)]
    Quat(#[from] QuatError),
    #[error("tangent vectors live at different base points (distance {distance:e})")]
    BaseMismatch { distance: f64 },
    #[error("vector is not tangent at its base point (normal component {normal:e})")]
    NotTangent { normal: f64 },
    #[error("vector field evaluation failed: {0}")]
    Field(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error(transparent)]
    Quat(#[from] QuatError),
    #[error("grid needs at least 5 samples per direction, got {nu}x{nv}")]
    TooSmall { nu: usize, nv: usize },
    #[error("grid steps must be positive and finite (du={du}, dv={dv})")]
    BadStep { du: f64, dv: f64 },
    #[error("expected {expected} samples, got {got}")]
    SampleCount { expected: usize, got: usize },
    #[error("non-finite sample at ({iu}, {iv})")]
    NonFinite { iu: usize, iv: usize },
    #[error("immersion degenerates at ({iu}, {iv}): derivative norm {norm:e}")]
    Degenerate { iu: usize, iv: usize, norm: f64 },
    #[error("tangent plane is rank deficient at ({iu}, {iv})")]
    RankDeficient { iu: usize, iv: usize },
    #[error("first fundamental form degenerates at ({iu}, {iv}): EG-F^2 = {det:e}")]
    DegenerateMetric { iu: usize, iv: usize, det: f64 },
    #[error(
        "grid is not in adapted coordinates: real-part residual {real_part:e}, \
         J-relation residual {relation:e}"
    )]
    NotAdapted { real_part: f64, relation: f64 },
    #[error("parameter window is invalid: {0}")]
    Window(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrespondenceError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("closed-form check failed: path-order loop residual {loop_residual:e} exceeds {tolerance:e}")]
    NotClosed { loop_residual: f64, tolerance: f64 },
    #[error("H-surface equation residual {residual:e} exceeds {tolerance:e}")]
    HEquation { residual: f64, tolerance: f64 },
    #[error("eps_u^2 + eps_v^2 vanishes at ({iu}, {iv})")]
    VanishingDerivative { iu: usize, iv: usize },
    #[error("parameters are not isothermal on eps (conformality defect {defect:e})")]
    NonIsothermal { defect: f64 },
    #[error("row and column integration disagree by {residual:e} (limit {tolerance:e})")]
    Incompatible { residual: f64, tolerance: f64 },
}

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("expected header `{expected}`")]
    Header { expected: &'static str },
    #[error("irregular grid at row {row}: {message}")]
    Irregular { row: usize, message: String },
    #[error(transparent)]
    Grid(#[from] GridError),
}
