use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid symbol {0}: letters must be 1, 2, 3 or 4")]
    InvalidSymbol(u8),
    #[error("depth {depth} exceeds the configured maximum {max}")]
    DepthTooLarge { depth: u32, max: u32 },
    #[error("words {0} and {1} overlap (one extends the other)")]
    OverlappingWords(String, String),
    #[error("some cylinder is still ambiguous at depth cap {depth}")]
    Ambiguous { depth: u32 },
    #[error("site {site} captured no mass")]
    DegenerateCell { site: usize },
    #[error("invalid codebook: {0}")]
    InvalidCodebook(String),
    #[error("site index {site} out of range for a codebook of size {len}")]
    SiteOutOfRange { site: usize, len: usize },
    #[error("invalid variant {variant} for base set of size {m}")]
    InvalidVariant { m: u32, variant: usize },
    #[error("invalid word subset: {0}")]
    InvalidSubset(String),
    #[error("n = {n} is below the minimum {min}")]
    TooSmall { n: u64, min: u64 },
    #[error("arithmetic range exceeded: {0}")]
    Overflow(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
