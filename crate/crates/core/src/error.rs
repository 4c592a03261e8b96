use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("universe mismatch: expected {expected} attributes, found {found}")]
    UniverseMismatch { expected: usize, found: usize },
    #[error("duplicate attribute label `{0}`")]
    DuplicateLabel(String),
    #[error("attribute labels must be non-empty")]
    EmptyLabel,
    #[error("unknown attribute `{0}`")]
    UnknownLabel(String),
    #[error("{what} is limited to {limit} attributes, got {width}")]
    UniverseTooLarge {
        what: &'static str,
        limit: usize,
        width: usize,
    },
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;

pub(crate) fn same_width(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(CoreError::UniverseMismatch { expected, found })
    }
}
