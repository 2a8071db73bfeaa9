//! Parikh images, witness languages for linear sets, and counting
//! constraints rendered as counting formulas.

mod constraint;
mod linear;
mod witness;

pub use constraint::{constraint_to_formula, equal_counts, CountingConstraint};
pub use linear::{linear_member, parikh_image, parikh_vector, semilinear_member, LinearSet, SemilinearSet};
pub use witness::{perm_closure_member, prime_example_formula, witness_formula, witness_language, WitnessLanguage};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParikhError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("linear sets need dimension at least 1")]
    ZeroDimension,
    #[error("period {0} is the zero vector")]
    ZeroPeriod(usize),
    #[error("a semilinear set needs at least one linear component")]
    EmptyUnion,
    #[error("word of length {len} exceeds the bound {max}")]
    TooLong { len: usize, max: usize },
    #[error("letter {0:?} is not in the alphabet")]
    UnknownLetter(char),
    #[error("congruence needs modulus > 0 and residue < modulus, got mod {modulus} residue {residue}")]
    BadModulus { modulus: u64, residue: u64 },
}
