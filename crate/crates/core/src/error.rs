use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("the tail of an eventually periodic word must be nonempty")]
    EmptyTail,

    #[error("alphabet size {0} is out of range (1..=256)")]
    AlphabetSize(usize),

    #[error("letter {letter} is outside the alphabet of size {size}")]
    LetterOutOfRange { letter: usize, size: usize },

    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),

    #[error("cannot parse word {input:?}: {reason}")]
    WordSyntax { input: String, reason: String },

    #[error("invalid group description: {0}")]
    InvalidGroup(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("state set is not closed under restriction: {0}")]
    NotRestrictionClosed(String),

    #[error("state closure exceeds the bound of {0} states")]
    ClosureBound(usize),

    #[error("nucleus candidates exceed the bound of {0} elements")]
    NucleusBound(usize),

    #[error("search exceeds its budget: {0}")]
    Budget(String),

    #[error("shift map undefined: {0}")]
    ShiftMapUndefined(String),

    #[error("inconsistent equations: {0}")]
    InconsistentEquations(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("contradiction: {0}")]
    Contradiction(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for outcomes that mean "undecided within the configured bounds".
    pub fn is_unknown(&self) -> bool {
        matches!(
            self,
            Error::ClosureBound(_) | Error::NucleusBound(_) | Error::Budget(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
