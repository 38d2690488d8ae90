use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{param}` is out of its domain: {value}")]
    Domain { param: &'static str, value: f64 },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{what}: {size} exceeds the limit of {limit}")]
    SizeCap {
        what: &'static str,
        size: usize,
        limit: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
