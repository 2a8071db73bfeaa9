//! Formulas of LTL(Mon) and LTL(C,+), their concrete syntax, and their
//! semantics over finite non-empty words.

mod alphabet;
mod eval;
mod formula;
mod parse;
mod predicate;

pub use alphabet::{Alphabet, AlphabetError, WordsOfLen, RESERVED};
pub use eval::{accepts, count_left, count_right, eval_at, trace, EvalError};
pub use formula::{CountTerm, Direction, Formula, Fragment};
pub use parse::{parse_formula, parse_formula_with, ParseError, PredicateRegistry};
pub use predicate::{PredicateError, TablePredicate, UnaryPredicate};

/// Fragment of a formula: `Mon` iff it has no counting node.
pub fn classify(phi: &Formula) -> Fragment {
    phi.classify()
}
