use thiserror::Error;

use crate::lp::LpError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid atom name `{0}`")]
    InvalidAtomName(String),

    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),

    #[error("unknown atom `{0}`")]
    UnknownAtom(String),

    #[error("atom index {index} out of range for {num_atoms} atoms")]
    AtomIndex { index: usize, num_atoms: usize },

    #[error("invalid knowledge base: {0}")]
    InvalidKb(String),

    #[error("resource limit exceeded: {what} is {actual}, cap is {cap}")]
    ResourceLimit {
        what: &'static str,
        cap: usize,
        actual: usize,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("cannot translate to a classical knowledge base: {0}")]
    Translation(String),

    #[error("inconsistency: {0}")]
    Inconsistency(String),

    #[error("generation budget of {0} attempts exhausted")]
    GenerationBudget(usize),

    #[error(transparent)]
    Lp(#[from] LpError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
