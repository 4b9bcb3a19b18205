use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("0/0 is not a value of the extended line")]
    Indeterminate,
    #[error("arithmetic on the point at infinity is not defined")]
    InfiniteOperand,
    #[error("expected a finite value, got infinity")]
    NotFinite,
    #[error("transformation is singular (ps - qr = 0)")]
    Singular,
    #[error("entries must be pairwise distinct")]
    RepeatedEntry,
    #[error("homogeneous coordinates must not all be zero")]
    ZeroVector,
    #[error("duplicate element {0} in input set")]
    DuplicateElement(String),
    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("invalid order {0}, expected 1, 2 or 3")]
    InvalidOrder(u8),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("need at least {needed} points with distinct sizes, got {got}")]
    TooFewPoints { needed: usize, got: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
