use rug::Integer;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a positive integer, got {0}")]
    NotPositive(Integer),

    #[error("{0} is not squarefree")]
    NotSquarefree(Integer),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("point {point} is not on E_{t}")]
    NotOnCurve { point: String, t: Integer },

    /// Points with `Y = 0` (and the point at infinity) carry no triangle.
    #[error("torsion point {0} has no associated triangle")]
    TorsionPoint(String),

    #[error("degenerate triangle: {0}")]
    Degenerate(String),

    #[error("not a primitive right triangle: {0}")]
    NotPrimitive(String),

    #[error("invalid (s, t) pair: {0}")]
    InvalidStPair(String),

    #[error("{gens} generators but {coeffs} coefficients")]
    LengthMismatch { gens: usize, coeffs: usize },

    #[error("invalid generator record for t = {t}: {reason}")]
    InvalidRecord { t: String, reason: String },

    #[error("line {line}, column {column}: {reason}")]
    Parse {
        line: usize,
        column: usize,
        reason: String,
    },

    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("scan has no pair of dissimilar triangles")]
    NoPairs,

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
