use thiserror::Error;

use bipsym_bdd::BddError;

use crate::model::Diagnostic;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("atom `{atom}` has no state `{state}`")]
    UnknownState { atom: String, state: String },
    #[error("port `{0}` does not belong to any atom of the system")]
    ForeignPort(String),
    #[error("interaction {{{0}}} is not enabled in the current state")]
    NotEnabled(String),
    #[error("inconsistent global state: {0}")]
    BadState(String),
    #[error("invalid system: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    Bdd(#[from] BddError),
}
