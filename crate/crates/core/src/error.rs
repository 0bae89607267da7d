use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("invalid parameters a={a}, b={b}: need a >= 2 and b >= 2a")]
    InvalidParams { a: usize, b: usize },
    #[error("parameter mismatch between trees")]
    ParamsMismatch,
    #[error("invalid node: {0}")]
    InvalidNode(String),
    #[error("splitter violates key order: {0}")]
    OrderViolation(String),
    #[error("input sequence is not strictly ascending")]
    NotSorted,
    #[error("key ranges of the trees overlap or are out of order")]
    Overlap,
    #[error("operation needs subtree sizes but the tree is not augmented")]
    NotAugmented,
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("tree spines were not preprocessed")]
    NotPreprocessed,
    #[error("rank {rank} outside stack coverage [{lo}, {hi}]")]
    RankOutOfCoverage { rank: u32, lo: u32, hi: u32 },
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
}
