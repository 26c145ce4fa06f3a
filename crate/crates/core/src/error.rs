use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("subspace is not isotropic: bilinear residual {0:e}")]
    NotIsotropic(f64),
    #[error("expected a subspace of dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("degree {deg} exceeds the guard |deg| <= {guard}")]
    DegreeGuard { deg: i32, guard: i32 },
    #[error("evaluation point is off the unit circle (|λ| = {0})")]
    OffCircle(f64),
    #[error("generator has support at degree {deg}, outside window [{lo}, {hi})")]
    OutsideWindow { deg: i32, lo: i32, hi: i32 },
    #[error("degree {0} outside the window")]
    IndexOutsideWindow(i32),
    #[error("rank defect: expected {expected}, got {got}")]
    RankDefect { expected: usize, got: usize },
    #[error("point is not in the stratum of ({k},{l}): {detail}")]
    NotInStratum { k: i64, l: i64, detail: String },
    #[error("precedence fails for {0:?} -> {1:?}")]
    Precedence((i64, i64), (i64, i64)),
    #[error("loop is not invertible at degree zero")]
    NotInvertible,
    #[error("stage {stage} failed membership: {detail}")]
    StageMembership { stage: usize, detail: String },
    #[error("normalizing loop varies along the family: deviation {0:e}")]
    NotConstant(f64),
    #[error("solver did not converge: best residual {0:e}")]
    NoConvergence(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
