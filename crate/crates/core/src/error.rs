use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    Shape {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("format error: {0}")]
    Format(String),
    #[error("length error: expected {expected} bytes, found {actual}")]
    Length { expected: usize, actual: usize },
    #[error("value out of range: {0}")]
    Range(String),
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Corruption { stored: u32, computed: u32 },
    #[error("unsupported version: {0}")]
    Version(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("tape does not belong to this network")]
    TapeMismatch,
}

impl Error {
    pub(crate) fn shape(op: &'static str, left: (usize, usize), right: (usize, usize)) -> Self {
        Error::Shape { op, left, right }
    }
}
