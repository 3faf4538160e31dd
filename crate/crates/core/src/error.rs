use num_rational::BigRational;
use thiserror::Error;

use crate::ring::TruncationParams;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid truncation parameters: {0}")]
    InvalidParams(String),

    #[error("operands live in different rings: {left} vs {right}")]
    RingMismatch { left: String, right: String },

    #[error("row index {row} exceeds K = {max_row}; increase K")]
    RowOverflow { row: u32, max_row: u32 },

    #[error("K = {max_row} is too small for r = {r}")]
    RowsTooFew { r: i64, max_row: u32 },

    #[error("monomial `{monomial}` does not fit in {params}")]
    OutOfBounds {
        monomial: String,
        params: TruncationParams,
    },

    #[error("parse error at position {position}: unexpected `{token}` ({message})")]
    Parse {
        position: usize,
        token: String,
        message: String,
    },

    #[error("coefficient {coeff} is not {prime}-integral")]
    NotIntegral { coeff: BigRational, prime: u64 },

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("reduction mod {prime} needs m <= p, got m = {m}")]
    TruncationAbovePrime { prime: u64, m: u32 },

    #[error("expected an element over Q")]
    NotRational,

    #[error("no table entry for ({r}, {s})")]
    MissingCell { r: i64, s: i64 },

    #[error("k = {k} out of range 0..={r}")]
    RowChoice { k: u32, r: u32 },

    #[error("regrouped ansatz cannot reproduce the solution; witness monomial `{witness}`")]
    RegroupInconsistent { witness: String },

    #[error("oracle basis too large ({size} > {limit})")]
    BasisOverflow { size: usize, limit: usize },

    #[error("pairing matrix is singular at column {column}")]
    SingularPairing { column: usize },

    #[error("tuple {0:?} is not strictly increasing")]
    NotIncreasing(Vec<u32>),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
