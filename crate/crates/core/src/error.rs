//! Error type shared by all modules.

use crate::grid::ProfileKind;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("profiles live on different grids")]
    GridMismatch,

    #[error("expected a {expected:?}-side profile, got {got:?}")]
    KindMismatch { expected: ProfileKind, got: ProfileKind },

    #[error("masses differ beyond tolerance: {lhs} vs {rhs} (tol {tol})")]
    MassMismatch { lhs: f64, rhs: f64, tol: f64 },

    #[error("time step {dt} exceeds the stability bound {bound}")]
    TimeStepTooLarge { dt: f64, bound: f64 },

    #[error("cell ({i},{j}) went negative ({value}); time step violation or scheme defect")]
    NegativeCell { i: usize, j: usize, value: f64 },

    #[error("cumulative exponent {0} exceeds the overflow guard (700); input data corrupt")]
    ExponentOverflow(f64),

    #[error("profile too concentrated for the grid at node {node} (r = {r}); refine the grid")]
    UnresolvedConcentration { node: usize, r: f64 },

    #[error("sandwich inequality `{inequality}` violated at node {node} (r = {r}), margin {margin:e}")]
    SandwichViolation {
        inequality: &'static str,
        node: usize,
        r: f64,
        margin: f64,
    },

    #[error("{0} validation check(s) failed")]
    ValidationFailed(usize),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line driver: 1 for configuration
    /// errors, 2 for numerical aborts, 3 for failed validation checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse { .. } | Error::InvalidParameter { .. } => 1,
            Error::ValidationFailed(_) => 3,
            _ => 2,
        }
    }
}
