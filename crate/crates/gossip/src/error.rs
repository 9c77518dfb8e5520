use sketchgossip_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GossipError {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("could not generate a connected graph after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

pub type Result<T> = std::result::Result<T, GossipError>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> GossipError {
    GossipError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
