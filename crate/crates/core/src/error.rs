use thiserror::Error;

/// Violations of the structural invariants of a generalized network.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("self-loop reaction {0}: source and target complex coincide")]
    SelfLoop(String),
    #[error("duplicate reaction {0}")]
    DuplicateReaction(String),
    #[error("duplicate complex {0}")]
    DuplicateComplex(String),
    #[error("complexes {first} and {second} share the kinetic complex {kinetic}")]
    DuplicateKineticComplex {
        first: String,
        second: String,
        kinetic: String,
    },
    #[error("complex {0} does not appear in any reaction")]
    OrphanComplex(String),
    #[error("kinetic complex of {0} assigned more than once")]
    DuplicateAssociation(String),
    #[error("negative coefficient for species {0}")]
    NegativeCoefficient(String),
    #[error("species name {0:?} is invalid or duplicated")]
    InvalidSpecies(String),
    #[error("species index {0} out of range")]
    UnknownSpecies(usize),
    #[error("complex index {0} out of range")]
    UnknownComplex(usize),
    #[error("rate given for unknown reaction {0}")]
    UnknownReaction(String),
    #[error("rate of reaction {0} given more than once")]
    DuplicateRate(String),
    #[error("rate of reaction {0} must be positive")]
    NonPositiveRate(String),
    #[error("complex and kinetic complex lists differ in length ({complexes} vs {kinetic})")]
    LengthMismatch { complexes: usize, kinetic: usize },
}

/// Errors raised while reading the network text format.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: ValidationError,
    },
    #[error("{0}")]
    Network(#[from] ValidationError),
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { line, .. } | ParseError::Invalid { line, .. } => Some(*line),
            ParseError::Network(_) => None,
        }
    }
}

/// Errors raised by the analyses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("network is not weakly reversible")]
    NotWeaklyReversible,
    #[error("t = {terminal} != l = {linkage}: structural deficiency formula inapplicable")]
    StructuralFormulaInapplicable { terminal: usize, linkage: usize },
    #[error("expected {expected} rate constants, got {found}")]
    RateCount { expected: usize, found: usize },
    #[error("rate constants are missing for some reactions")]
    MissingRates,
    #[error("rate constant {index} is not positive")]
    NonPositiveRate { index: usize },
    #[error("expected a vector of length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("concentration of species {index} is negative or not finite")]
    NegativeConcentration { index: usize },
    #[error("concentration of species {index} is zero but its kinetic order is positive")]
    ZeroConcentration { index: usize },
    #[error("sign enumeration over {n} coordinates exceeds the limit of {limit}")]
    EnumerationLimit { n: usize, limit: usize },
    #[error("basis columns are linearly dependent")]
    DependentColumns,
    #[error("exponent {value} exceeds the overflow guard")]
    ExponentOverflow { value: f64 },
    #[error("kernel of A has dimension {found} but there are {expected} terminal classes")]
    KernelDimension { expected: usize, found: usize },
    #[error("pseudo-reaction transform produces a negative coefficient in {0}")]
    TransformInapplicable(String),
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("invalid equilibrium: {0}")]
    InvalidEquilibrium(String),
    #[error("step size fell below the minimum {h_min:e} at t = {t}")]
    StepUnderflow { t: f64, h_min: f64 },
    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
