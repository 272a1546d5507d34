use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("bit block has odd length {0}")]
    OddBitCount(usize),

    #[error("expected {expected} bits for the data cells, got {actual}")]
    BitCount { expected: usize, actual: usize },

    #[error("pilot symbol at subcarrier {subcarrier}, symbol {symbol} is zero")]
    ZeroPilot { subcarrier: usize, symbol: usize },

    #[error("unknown power delay profile `{name}`; valid names: {valid}")]
    UnknownPdp { name: String, valid: String },

    #[error("invalid power delay profile: {0}")]
    InvalidPdp(String),

    #[error("correlation matrix is not Hermitian positive semi-definite: {0}")]
    NotPsd(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("bad file format: {0}")]
    Format(String),

    #[error("training diverged at epoch {epoch}")]
    Diverged {
        epoch: usize,
        last_finite: Box<crate::nn::ModelParams>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}
