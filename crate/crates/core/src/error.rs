use std::fmt;

use thiserror::Error;

/// Location of a token in parser input. Lines and columns are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {span}: {message}")]
    Syntax { message: String, span: SourceSpan },

    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),

    #[error("constant `{0}` is not defined")]
    UnboundConstant(String),

    #[error("constant `{0}` is defined more than once")]
    DuplicateConstant(String),

    #[error("label `{0}` is not declared in the alphabet")]
    LabelNotInAlphabet(String),

    #[error("unguarded recursion through constant `{0}`")]
    UnguardedRecursion(String),

    #[error("transition system is incomplete (exploration hit a cap)")]
    IncompleteLts,

    #[error("state space exceeds the cap of {cap} states")]
    ExceedsCap { cap: usize },

    #[error("unknown law `{0}`")]
    UnknownLaw(String),

    #[error("law {law}: {message}")]
    Binding { law: String, message: String },

    #[error("processes are not weakly bisimilar")]
    NotWeaklyEquivalent,

    #[error("Klop index {0} exceeds the maximum of {max}", max = crate::klop::MAX_KLOP_INDEX)]
    KlopIndexTooLarge(usize),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
