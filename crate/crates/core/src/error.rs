use thiserror::Error;

/// Errors produced by the index library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input text is empty")]
    EmptyInput,
    #[error("position range [{i}, {j}] is out of bounds for a sequence of length {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("character rank {0} appears twice in a change list")]
    DuplicateChange(u32),
    #[error("no acceptable candidate found after {0} attempts")]
    RetryLimitExceeded(usize),
    #[error("character rank {rank} is outside the alphabet of size {sigma}")]
    RankOutOfRange { rank: u32, sigma: usize },
    #[error("collection contains two equal sets; no injective hash exists")]
    DuplicateSets,
    #[error("required modulus {0} exceeds 2^62")]
    ModulusTooLarge(u128),
    #[error("strings have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("character rank {0} occurs twice in one string")]
    DuplicateCharacter(u32),
    #[error("fingerprint set is not prefix closed (a set of size {0} has no parent)")]
    NotPrefixClosed(usize),
    #[error("unknown fingerprint")]
    UnknownFingerprint,
    #[error("sequence length {n} exceeds the oracle cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("k = {0} is outside 1..=26")]
    KOutOfRange(usize),
    #[error("malformed index file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
