//! Exact and certified arithmetic used by the runtime.

pub mod ball;
mod precision;
mod rational;
mod value;

pub use precision::{Certified, Comparator, NumericError, PrecisionMode, PrecisionPolicy, MIN_BITS};
pub use rational::{ParseRationalError, Rational};
pub use value::{Evaluator, TrigTerm, Value, Wave};
