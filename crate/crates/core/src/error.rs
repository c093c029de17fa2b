use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("letter {letter} is outside the alphabet of size {alphabet}")]
    LetterOutOfRange { letter: usize, alphabet: usize },
    #[error("level {level} exceeds the table-level cap {cap}")]
    LevelAboveCap { level: u32, cap: u32 },
    #[error("cannot combine tables of levels {0} and {1}")]
    LevelMismatch(u32, u32),
    #[error("invalid word `{0}`")]
    WordSyntax(String),
    #[error("machine definition, line {line}: {message}")]
    MachineDefinition { line: usize, message: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("rule {rule} does not apply at position {position}")]
    RuleNotApplicable { rule: String, position: usize },
    #[error("rewriting did not terminate within {0} steps")]
    NonTermination(u64),
    #[error("witness refuted: {0}")]
    WitnessRefuted(String),
    #[error("image counts did not stabilize below level {0}")]
    NotStabilized(u32),
}

impl Error {
    /// True for errors caused by malformed input rather than by a limit or a failed check.
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            Error::UnknownState(_)
                | Error::LetterOutOfRange { .. }
                | Error::WordSyntax(_)
                | Error::MachineDefinition { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
