use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hurwitz (max real eigenvalue {max_real_eig:.6e})")]
    NotHurwitz { max_real_eig: f64 },

    #[error("pair (A, B) is not controllable")]
    NotControllable,

    #[error("matrix is not Metzler (off-diagonal entry {value:.3e} at ({row}, {col}))")]
    NotMetzler { row: usize, col: usize, value: f64 },

    #[error("filter pole must be strictly negative, got {0}")]
    InvalidAlpha(f64),

    #[error("system must be square (n_z = n_w), got n_z = {n_z}, n_w = {n_w}")]
    NotSquare { n_z: usize, n_w: usize },

    #[error("matrix dimension {dim} exceeds the hard cap of {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("filter structure mismatch: {0}")]
    StructureMismatch(String),

    #[error("invalid system description: field `{field}`: {reason}")]
    Schema { field: String, reason: String },

    #[error("solver error: {0}")]
    Solver(String),

    #[error("conic problem is infeasible: {0}")]
    Infeasible(String),

    #[error("numerical trouble: {0}")]
    NumericalTrouble(String),

    #[error("feedback loop is not well posed: {0}")]
    IllPosedLoop(String),

    #[error("bound cell (alpha = {alpha}, N = {degree}): {source}")]
    Cell {
        alpha: f64,
        degree: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn schema(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
