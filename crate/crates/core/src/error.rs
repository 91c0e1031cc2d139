//! Crate-wide error type.

use crate::local::Place;
use thiserror::Error;

/// Errors surfaced by the calculator.
///
/// Validation failures are distinguished from internal inconsistencies:
/// the latter signal a bug in the calculator itself, never bad input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero has no square class")]
    ZeroInput,

    #[error("{0} is not an odd prime")]
    OddPrimeRequired(String),

    #[error("{0} is not prime")]
    NotPrime(String),

    #[error("no factor of {0} found within the iteration budget")]
    Unfactorable(String),

    #[error("prime {0} divides the discriminant; supply an explicit table row for it")]
    RamifiedPrime(String),

    #[error("polynomial is reducible over the rationals")]
    ReduciblePolynomial,

    #[error("polynomial must be monic for this operation")]
    NotMonic,

    #[error("polynomial has degree {0}, expected {1}")]
    BadDegree(usize, String),

    #[error("could not certify irreducibility within the witness search bound")]
    IrreducibilityUnverified,

    #[error("square classes {0} are not independent modulo squares")]
    DependentBasis(String),

    #[error("d = {0} lies in the span of the field generators; E is not a field")]
    NotAField(String),

    #[error("configuration outside the exactness domain: {0}")]
    OutsideExactnessDomain(String),

    #[error("dimension relation violated: {0}")]
    DimensionMismatch(String),

    #[error("configuration degree {config} does not match algebra degree {algebra}")]
    DegreeMismatch { config: u64, algebra: u64 },

    #[error("algebra descriptor invalid: {0}")]
    BadAlgebra(String),

    #[error("duplicate datum entry at factor {factor}, place {place}")]
    DuplicateEntry { factor: usize, place: Place },

    #[error("unrealizable invariant: place {place} is not in V_{factor}")]
    UnrealizableInvariant { factor: usize, place: Place },

    #[error("reciprocity violation: oriented datum invariants sum to 1/2")]
    ReciprocityViolation,

    #[error("orientation not applicable: datum marked oriented but the algebra is {0}")]
    OrientationNotApplicable(String),

    #[error("oriented datum required: the algebra is nonsplit orthogonal")]
    OrientationRequired,

    #[error("factor index {0} out of range")]
    BadFactorIndex(usize),

    #[error("class map is not constant on the equivalence classes")]
    NotClassConstant,

    #[error("orientation machinery inactive: algebra is {0}")]
    OrientationInactive(String),

    #[error("missing Clifford class pair for place {0}")]
    MissingCliffordPair(Place),

    #[error("Clifford class pair at place {place} has the wrong center shape (expected {expected})")]
    CliffordShapeMismatch { place: Place, expected: String },

    #[error("witness search exhausted the prime bound {0} (internal inconsistency)")]
    WitnessSearchExhausted(u64),

    #[error("index set of size {0} exceeds the brute-force cap of {1}")]
    SizeCapExceeded(usize, usize),

    #[error("unsupported base-change slice: factor {0} has a nontrivial fixed field")]
    UnsupportedBaseChange(usize),

    #[error("splitting table has no row for place {0}")]
    MissingTableRow(Place),

    #[error("table row at place {place} is invalid: {reason}")]
    BadTableRow { place: Place, reason: String },

    #[error("even number of odd local degrees at place {0}; a user row is inconsistent")]
    OddParityViolated(Place),

    #[error("datum required: obstruction group is nontrivial and no datum was supplied")]
    DatumRequired,

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code for the CLI: validation problems exit 2.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
