use alloc::boxed::Box;
use alloc::vec::Vec;

use super::ParikhError;
use crate::logic::{Alphabet, CountTerm, Direction, Formula, UnaryPredicate};

/// Quantifier-free Presburger constraint over letter counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CountingConstraint {
    /// `Σ coef·|w|ₓ + constant ≥ 0`, terms kept in the given order.
    Ineq { coefs: Vec<(char, i64)>, constant: i64 },
    /// `|w|ₓ ≡ residue (mod modulus)`.
    Cong { letter: char, modulus: u64, residue: u64 },
    And(Vec<CountingConstraint>),
    Or(Vec<CountingConstraint>),
    Not(Box<CountingConstraint>),
}

impl CountingConstraint {
    pub fn validate(&self, alphabet: &Alphabet) -> Result<(), ParikhError> {
        match self {
            CountingConstraint::Ineq { coefs, .. } => {
                if let Some((c, _)) = coefs.iter().find(|(c, _)| !alphabet.contains(*c)) {
                    return Err(ParikhError::UnknownLetter(*c));
                }
                Ok(())
            }
            CountingConstraint::Cong { letter, modulus, residue } => {
                if !alphabet.contains(*letter) {
                    return Err(ParikhError::UnknownLetter(*letter));
                }
                if *modulus == 0 || residue >= modulus {
                    return Err(ParikhError::BadModulus { modulus: *modulus, residue: *residue });
                }
                Ok(())
            }
            CountingConstraint::And(cs) | CountingConstraint::Or(cs) => cs.iter().try_for_each(|c| c.validate(alphabet)),
            CountingConstraint::Not(c) => c.validate(alphabet),
        }
    }

    /// Truth value on the letter counts of `word`.
    pub fn holds(&self, word: &str) -> bool {
        let count = |x: char| word.chars().filter(|&c| c == x).count() as u64;
        self.holds_with(&count)
    }

    fn holds_with(&self, count: &dyn Fn(char) -> u64) -> bool {
        match self {
            CountingConstraint::Ineq { coefs, constant } => {
                let total: i128 = coefs.iter().map(|(c, k)| *k as i128 * count(*c) as i128).sum();
                total + *constant as i128 >= 0
            }
            CountingConstraint::Cong { letter, modulus, residue } => count(*letter) % modulus == *residue,
            CountingConstraint::And(cs) => cs.iter().all(|c| c.holds_with(count)),
            CountingConstraint::Or(cs) => cs.iter().any(|c| c.holds_with(count)),
            CountingConstraint::Not(c) => !c.holds_with(count),
        }
    }
}

/// `|x₁| = |x₂| = … ` as pairs of opposite inequalities between neighbours.
pub fn equal_counts(letters: &[char]) -> CountingConstraint {
    let mut parts = Vec::new();
    for pair in letters.windows(2) {
        let (x, y) = (pair[0], pair[1]);
        parts.push(CountingConstraint::Ineq { coefs: alloc::vec![(x, 1), (y, -1)], constant: 0 });
        parts.push(CountingConstraint::Ineq { coefs: alloc::vec![(y, 1), (x, -1)], constant: 0 });
    }
    CountingConstraint::And(parts)
}

/// A counting formula that holds at position 0 exactly when the constraint
/// holds on the word's letter counts.
pub fn constraint_to_formula(c: &CountingConstraint, alphabet: &Alphabet) -> Result<Formula, ParikhError> {
    c.validate(alphabet)?;
    Ok(emit(c))
}

fn emit(c: &CountingConstraint) -> Formula {
    match c {
        CountingConstraint::Ineq { coefs, constant } => {
            let mut terms: Vec<CountTerm> = coefs
                .iter()
                .filter(|(_, k)| *k != 0)
                .map(|(x, k)| CountTerm::new(*k, Direction::Right, Formula::Atom(*x)))
                .collect();
            if *constant != 0 {
                // ←#true is 1 at position 0
                terms.push(CountTerm::new(*constant, Direction::Left, Formula::True));
            }
            if terms.is_empty() {
                Formula::True
            } else {
                Formula::LinIneq(terms)
            }
        }
        CountingConstraint::Cong { letter, modulus, residue } => Formula::pred_of_count(
            UnaryPredicate::Mod { modulus: *modulus, residue: *residue },
            Direction::Right,
            Formula::Atom(*letter),
        ),
        CountingConstraint::And(cs) => cs.iter().map(emit).reduce(Formula::and).unwrap_or(Formula::True),
        CountingConstraint::Or(cs) => cs.iter().map(emit).reduce(Formula::or).unwrap_or_else(|| Formula::True.not()),
        CountingConstraint::Not(c) => emit(c).not(),
    }
}
