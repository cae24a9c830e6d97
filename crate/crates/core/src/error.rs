use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not a prime modulus")]
    NotPrime(u64),
    #[error("0 has no inverse in GF({0})")]
    ZeroInverse(u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("field mismatch: GF({0}) vs GF({1})")]
    FieldMismatch(u32, u32),
    #[error("vector has length {got}, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("not a subspace of the given parent")]
    NotASubspace,
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid term: {0}")]
    InvalidTerm(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown built-in `{0}`")]
    UnknownName(String),
    #[error("search budget: {0}")]
    Budget(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown element label `{0}`")]
    UnknownLabel(String),
    #[error("ground set of {0} elements exceeds the enumeration limit")]
    SizeLimit(usize),
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("code shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("literal {literal} needs the inverse of {denominator}, which is 0 in GF({modulus})")]
    MissingInverse {
        literal: String,
        denominator: i64,
        modulus: u32,
    },
    #[error("no network constraint zeroes {0}")]
    UnjustifiedConditional(String),
    #[error("term {0} cannot be reduced to singleton ranks")]
    UnreducibleTerm(String),
    #[error("edge variable `{0}` has a negative reduced coefficient")]
    NegativeEdgeCoefficient(String),
    #[error("reduced bound has a nonpositive {0}")]
    NonpositiveBound(&'static str),
    #[error("demand {0} receives its own message directly; the cut bound is vacuous")]
    DegenerateDemand(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
}
