use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("infeasible instance: {0}")]
    InfeasibleInstance(String),
    #[error("malformed model: {0}")]
    Model(String),
    #[error("enumeration cap exceeded after {0} nodes")]
    CapExceeded(usize),
    #[error("input error: {0}")]
    Input(String),
}
