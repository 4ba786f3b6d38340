use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("rank {0} exceeds the supported maximum {max}", max = crate::MAX_RANK)]
    RankTooLarge(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("({0}, {1}) are not coprime")]
    NotCoprime(u32, u32),
    #[error("invalid slope: {0}")]
    InvalidSlope(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0} is not left-reduced for the Hodge datum")]
    NotLeftReduced(String),
    #[error("element {0} does not lie in the minuscule double coset")]
    NotMinuscule(String),
    #[error("invalid semimodule beginning: {0}")]
    InvalidBeginning(String),
    #[error("length convention broken: {0}")]
    BrokenLengthConvention(String),
    #[error("local shtuka carries no reduction witness")]
    WitnessMissing,
    #[error("singular matrix")]
    SingularMatrix,
    #[error("invalid field configuration: {0}")]
    InvalidField(String),
    #[error("invalid 1-truncated module: {0}")]
    InvalidBt1(String),
    #[error("classification failed: {0}")]
    Classification(String),
    #[error("inconsistent filtration data: {0}")]
    InconsistentFiltration(String),
    #[error("newton polygon computation failed: {0}")]
    Newton(String),
    #[error("resource limit exceeded: {0}")]
    ResourceExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
