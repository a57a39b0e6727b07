use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    Alphabet(String),

    #[error("symbol {symbol:?} is not in alphabet {alphabet:?}")]
    UnknownSymbol { symbol: char, alphabet: String },

    #[error("enumeration of {requested} items exceeds cap {cap}")]
    Capacity { requested: u128, cap: u128 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("undefined transition at state {state} on input {input} with stack top {top}")]
    UndefinedTransition {
        state: String,
        input: char,
        top: char,
    },

    #[error("lambda overflow at state {state}: more than {bound} lambda-transitions before one input symbol")]
    LambdaOverflow { state: String, bound: usize },

    #[error("no bet defined at state {state} with stack top {top}")]
    MissingBet { state: String, top: char },

    #[error("no output defined at state {state} on input {input} with stack top {top}")]
    MissingOutput {
        state: String,
        input: char,
        top: char,
    },

    #[error("stack underflow: {0}")]
    StackUnderflow(String),

    #[error("machine kind mismatch: expected a {expected}")]
    KindMismatch { expected: &'static str },

    #[error("construction rejected: {0}")]
    Construction(String),

    #[error("degenerate zone at n={n}, k={k}: {reason}")]
    DegenerateZone { n: usize, k: usize, reason: String },

    #[error("zero capital: dimension estimate undefined")]
    ZeroCapital,

    #[error("straddling phrase {phrase} covering offsets {start}..{end}")]
    StraddlingPhrase {
        phrase: usize,
        start: usize,
        end: usize,
    },

    #[error("at input position {position}: {source}")]
    Run {
        position: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn at(position: usize, source: Error) -> Error {
        Error::Run {
            position,
            source: Box::new(source),
        }
    }

    /// Short machine-parseable class name, used by the command line.
    pub fn class(&self) -> &'static str {
        match self {
            Error::Alphabet(_) | Error::UnknownSymbol { .. } => "alphabet",
            Error::Capacity { .. } => "capacity",
            Error::Domain(_) => "domain",
            Error::Parse { .. } => "parse",
            Error::UndefinedTransition { .. }
            | Error::LambdaOverflow { .. }
            | Error::MissingBet { .. }
            | Error::MissingOutput { .. }
            | Error::StackUnderflow(_)
            | Error::KindMismatch { .. } => "machine",
            Error::Construction(_) => "construction",
            Error::DegenerateZone { .. } => "degenerate-zone",
            Error::ZeroCapital => "zero-capital",
            Error::StraddlingPhrase { .. } => "straddling-phrase",
            Error::Run { source, .. } => source.class(),
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
