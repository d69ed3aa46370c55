use thiserror::Error;

use crate::arith::MPoly;

/// Errors raised by the arithmetic, chain and lifting layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("not a resultant operand: degree zero in x{0}")]
    NotResultantOperand(usize),
    #[error("discriminant needs degree at least 2 in x{0}")]
    DegreeTooLow(usize),
    #[error("polynomial is identically zero")]
    IdenticallyZero,
    #[error("polynomial is not univariate")]
    NotUnivariate,
    #[error("interval does not isolate a root")]
    NotIsolating,
    #[error("polynomial has no main variable")]
    Constant,
    #[error("malformed regular chain: {0}")]
    MalformedChain(String),
    #[error("requires split on initial {0}")]
    RequiresSplit(MPoly),
    #[error("polynomial is not regular modulo the chain")]
    NotRegular,
    #[error("positive-dimensional chain; unsupported: general triangularize")]
    PositiveDimensional,
    #[error("polynomial is nullified at the point")]
    NullifiedFiber,
    #[error("element without main variable x{0}")]
    WrongMainVariable(usize),
    #[error("EC lost in basis")]
    EcLostInBasis,
    #[error("equational constraint must have the last variable as main variable")]
    EcNotTopLevel,
    #[error("nothing to decompose")]
    NothingToDecompose,
    #[error("minimal delineating polynomial requested over a cell of dimension {0}")]
    PositiveDimensionalCell(usize),
    #[error("preprocessing failed: {0}")]
    PreprocessingFailed(String),
    #[error("budget exceeded: more than {0} cells")]
    BudgetExceeded(usize),
    #[error("malformed CAD: {0}")]
    MalformedCad(String),
}

pub type Result<T> = std::result::Result<T, Error>;
