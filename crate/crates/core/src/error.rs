use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undeclared generator {name:?} at line {line}, column {column}")]
    UndeclaredGenerator {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("presentation has no generators")]
    EmptyGenerators,
    #[error("unknown catalog family {0:?}")]
    UnknownFamily(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("homomorphism does not respect relator {0}")]
    InvalidHom(String),
    #[error("homomorphism is not surjective")]
    NotSurjective,
    #[error("coset enumeration exceeded {0} cosets")]
    CapExceeded(usize),
    #[error("word is not in the subgroup")]
    NotInSubgroup,
    #[error("unsupported coefficients: {0}")]
    UnsupportedCoefficients(String),
    #[error("unsupported action: {0}")]
    UnsupportedAction(String),
    #[error("unsupported quotient: {0}")]
    UnsupportedQuotient(String),
    #[error("invalid Seifert matrix: {0}")]
    InvalidSeifert(String),
    #[error("base knot has zero rho invariant for d = {0}; the family cannot be distinguished")]
    BaseHasZeroRho(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
