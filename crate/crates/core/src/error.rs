use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character {found:?} at offset {offset}")]
    UnexpectedChar { offset: usize, found: char },
    #[error("unexpected end of input: {0}")]
    UnexpectedEnd(&'static str),
    #[error("expected {expected} at offset {offset}")]
    Expected {
        offset: usize,
        expected: &'static str,
    },
    #[error("letter {letter:?} is not a generator of {group}")]
    LetterOutOfRange { letter: char, group: String },
    #[error("invalid group selector {0:?}")]
    GroupSelector(String),
    #[error("dimacs line {line}: {message}")]
    Dimacs { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("expansion of {needed} letters exceeds the cap of {cap}")]
    CapExceeded { needed: String, cap: u64 },
    #[error("rewriting took more than {budget} steps")]
    StepBudgetExceeded { budget: usize },
    #[error("rule application at position {position} does not match the word")]
    InvalidApplication { position: usize },
    #[error("prefix sum {value} lies inside a cut interval")]
    IncompatibleCut { value: String },
    #[error("periodic membership needs {needed} point checks, cap is {cap}")]
    MembershipCapExceeded { needed: String, cap: u64 },
    #[error("zero-shift power with exponent {exponent} exceeds the materialization cap {cap}")]
    ZeroShiftOverflow { exponent: String, cap: u64 },
    #[error("element order exceeds 2^{cap_exponent}")]
    OrderCapExceeded { cap_exponent: u32 },
    #[error("{vars} variables exceed the brute-force limit of {limit}")]
    TooManyVariables { vars: usize, limit: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
