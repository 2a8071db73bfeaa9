use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

/// A unary numerical predicate: a family `θₙ : {0..n} → {0,1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum UnaryPredicate {
    Even,
    /// `i ≡ residue (mod modulus)`.
    Mod { modulus: u64, residue: u64 },
    Eq(u64),
    Geq(u64),
    /// `n` even and `i = n/2 - 1`.
    Midpoint,
    /// `i + 1` is prime.
    PrimeShift,
    Table(TablePredicate),
}

/// An explicit bit table: `rows[n - 1][i] = θₙ(i)` for `1 ≤ n ≤ rows.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TablePredicate {
    name: String,
    rows: Arc<Vec<Vec<bool>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PredicateError {
    #[error("predicate {name} evaluated at position {i} beyond word length {n}")]
    PositionOutOfRange { name: String, n: usize, i: usize },
    #[error("table predicate {name} has no row for word length {n} (stored bound {bound})")]
    BeyondTable { name: String, n: usize, bound: usize },
    #[error("table predicate {name}: row for n = {n} must have {expected} bits, found {found}")]
    MalformedTable { name: String, n: usize, expected: usize, found: usize },
    #[error("mod predicate needs modulus > 0 and residue < modulus, got mod({modulus},{residue})")]
    BadModulus { modulus: u64, residue: u64 },
}

impl TablePredicate {
    pub fn new(name: impl Into<String>, rows: Vec<Vec<bool>>) -> Result<Self, PredicateError> {
        let name = name.into();
        for (k, row) in rows.iter().enumerate() {
            let n = k + 1;
            if row.len() != n + 1 {
                return Err(PredicateError::MalformedTable { name, n, expected: n + 1, found: row.len() });
            }
        }
        Ok(TablePredicate { name, rows: Arc::new(rows) })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn bound(&self) -> usize {
        self.rows.len()
    }
}

fn is_prime(k: u64) -> bool {
    if k < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= k {
        if k.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl UnaryPredicate {
    pub fn modulo(modulus: u64, residue: u64) -> Result<Self, PredicateError> {
        if modulus == 0 || residue >= modulus {
            return Err(PredicateError::BadModulus { modulus, residue });
        }
        Ok(UnaryPredicate::Mod { modulus, residue })
    }

    pub fn name(&self) -> &str {
        match self {
            UnaryPredicate::Even => "even",
            UnaryPredicate::Mod { .. } => "mod",
            UnaryPredicate::Eq(_) => "eq",
            UnaryPredicate::Geq(_) => "geq",
            UnaryPredicate::Midpoint => "midpoint",
            UnaryPredicate::PrimeShift => "primeshift",
            UnaryPredicate::Table(_) => "table",
        }
    }

    pub fn params(&self) -> Vec<u64> {
        match self {
            UnaryPredicate::Mod { modulus, residue } => alloc::vec![*modulus, *residue],
            UnaryPredicate::Eq(c) | UnaryPredicate::Geq(c) => alloc::vec![*c],
            _ => Vec::new(),
        }
    }

    /// `θₙ(i)` for `n ≥ 1` and `0 ≤ i ≤ n`.
    pub fn eval(&self, n: usize, i: usize) -> Result<bool, PredicateError> {
        if i > n || n == 0 {
            return Err(PredicateError::PositionOutOfRange { name: self.to_string(), n, i });
        }
        let i64_ = i as u64;
        Ok(match self {
            UnaryPredicate::Even => i.is_multiple_of(2),
            UnaryPredicate::Mod { modulus, residue } => i64_ % modulus == *residue,
            UnaryPredicate::Eq(c) => i64_ == *c,
            UnaryPredicate::Geq(c) => i64_ >= *c,
            UnaryPredicate::Midpoint => n.is_multiple_of(2) && i + 1 == n / 2,
            UnaryPredicate::PrimeShift => is_prime(i64_ + 1),
            UnaryPredicate::Table(t) => match t.rows.get(n - 1) {
                Some(row) => row[i],
                None => {
                    return Err(PredicateError::BeyondTable { name: t.name.clone(), n, bound: t.bound() })
                }
            },
        })
    }
}

/// Concrete syntax without the leading `@`.
impl fmt::Display for UnaryPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnaryPredicate::Mod { modulus, residue } => write!(f, "mod({modulus},{residue})"),
            UnaryPredicate::Eq(c) => write!(f, "eq({c})"),
            UnaryPredicate::Geq(c) => write!(f, "geq({c})"),
            UnaryPredicate::Table(t) => write!(f, "table({})", t.name),
            other => f.write_str(other.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn builtins() {
        let even: Vec<bool> = (0..=3).map(|i| UnaryPredicate::Even.eval(3, i).unwrap()).collect();
        assert_eq!(even, vec![true, false, true, false]);
        let mid: Vec<bool> = (0..4).map(|i| UnaryPredicate::Midpoint.eval(4, i).unwrap()).collect();
        assert_eq!(mid, vec![false, true, false, false]);
        assert!(!UnaryPredicate::Midpoint.eval(5, 1).unwrap());
        let primes: Vec<usize> = (0..=12).filter(|&i| UnaryPredicate::PrimeShift.eval(12, i).unwrap()).collect();
        assert_eq!(primes, vec![1, 2, 4, 6, 10, 12]);
        let m = UnaryPredicate::modulo(3, 2).unwrap();
        assert!(m.eval(9, 5).unwrap() && !m.eval(9, 6).unwrap());
        assert!(UnaryPredicate::modulo(2, 2).is_err());
        assert!(UnaryPredicate::Geq(2).eval(4, 2).unwrap());
        assert!(!UnaryPredicate::Eq(2).eval(4, 3).unwrap());
    }

    #[test]
    fn value_at_n_is_defined() {
        assert!(UnaryPredicate::Even.eval(4, 4).unwrap());
        assert!(UnaryPredicate::Even.eval(4, 5).is_err());
    }

    #[test]
    fn table_errors_beyond_bound() {
        let t = TablePredicate::new("t", vec![vec![true, false], vec![false, true, true]]).unwrap();
        let p = UnaryPredicate::Table(t);
        assert!(p.eval(2, 2).unwrap());
        assert!(matches!(p.eval(3, 0), Err(PredicateError::BeyondTable { bound: 2, .. })));
        assert!(TablePredicate::new("bad", vec![vec![true]]).is_err());
    }

    #[test]
    fn totality_spot_check() {
        let preds = [
            UnaryPredicate::Even,
            UnaryPredicate::modulo(7, 3).unwrap(),
            UnaryPredicate::Eq(17),
            UnaryPredicate::Geq(9000),
            UnaryPredicate::Midpoint,
            UnaryPredicate::PrimeShift,
        ];
        for n in [1usize, 2, 97, 1000, 10_000] {
            for i in [0, n / 3, n / 2, n.saturating_sub(1), n] {
                for p in &preds {
                    let a = p.eval(n, i).unwrap();
                    assert_eq!(a, p.eval(n, i).unwrap());
                }
            }
        }
    }
}
