use thiserror::Error;

use crate::textio::ParseError;
use crate::tree::Path;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("path `{0}` does not resolve")]
    PathUnresolvable(Path),
    #[error("node at `{0}` is not a set")]
    NotASet(Path),
    #[error("ordinal segment in meet operand `{0}`")]
    OrdinalInMeet(Path),
    #[error("invalid label `{0}`")]
    InvalidLabel(String),

    #[error("`{op}`: operands mix leaves and sets")]
    MixedKinds { op: &'static str },
    #[error("`{op}`: operand is not a boolean")]
    NotBoolean { op: &'static str },
    #[error("`{op}`: operand is not a leaf")]
    NotALeaf { op: &'static str },
    #[error("`{op}`: expected {expected} operands, found {found}")]
    Arity {
        op: &'static str,
        expected: &'static str,
        found: usize,
    },
    #[error("division by zero")]
    DivisionByZero,
    #[error("arithmetic overflow")]
    Overflow,

    #[error("unknown operation `{0}`")]
    UnknownOperation(String),
    #[error("fuel exhausted")]
    FuelExhausted,
    #[error("cyclic reference through `{0}`")]
    CyclicReference(Path),
    #[error("operand is not evaluated to a value")]
    NotAValue,

    #[error("malformed instruction: {0}")]
    InvalidInstruction(String),
    #[error("malformed formula: {0}")]
    InvalidFormula(String),
    #[error("unbound variable `${0}`")]
    UnboundVariable(String),
    #[error("instruction #{index}: {source}")]
    Instruction {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("node at `{0}` is not a function template")]
    NotATemplate(Path),
    #[error("argument slot `{0}` is empty")]
    MissingArgument(String),
    #[error("no argument slot `{0}`")]
    UnknownArgument(String),
    #[error("compare failed: {0}")]
    CompareFailed(Box<Error>),
    #[error("heap is empty")]
    EmptyHeap,

    #[error("no device bound at `{0}`")]
    UnboundDevice(Path),
    #[error("end of input")]
    EndOfInput,
    #[error("value cannot be written to a text device")]
    NotEncodable,

    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    /// The innermost error, looking through instruction and compare wrappers.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::Instruction { source, .. } | Error::CompareFailed(source) => source.root_cause(),
            other => other,
        }
    }
}
