use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::ParikhError;
use crate::logic::Alphabet;

/// `base + Σ periodsₖ·ℕ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearSet {
    base: Vec<u64>,
    periods: Vec<Vec<u64>>,
}

impl LinearSet {
    pub fn new(base: Vec<u64>, periods: Vec<Vec<u64>>) -> Result<Self, ParikhError> {
        if base.is_empty() {
            return Err(ParikhError::ZeroDimension);
        }
        for (k, p) in periods.iter().enumerate() {
            if p.len() != base.len() {
                return Err(ParikhError::DimensionMismatch { expected: base.len(), found: p.len() });
            }
            if p.iter().all(|&x| x == 0) {
                return Err(ParikhError::ZeroPeriod(k + 1));
            }
        }
        Ok(LinearSet { base, periods })
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &[u64] {
        &self.base
    }

    pub fn periods(&self) -> &[Vec<u64>] {
        &self.periods
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        linear_member(v, self)
    }
}

/// Finite union of linear sets of one dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemilinearSet {
    components: Vec<LinearSet>,
}

impl SemilinearSet {
    pub fn new(components: Vec<LinearSet>) -> Result<Self, ParikhError> {
        let first = components.first().ok_or(ParikhError::EmptyUnion)?;
        let d = first.dim();
        if let Some(bad) = components.iter().find(|c| c.dim() != d) {
            return Err(ParikhError::DimensionMismatch { expected: d, found: bad.dim() });
        }
        Ok(SemilinearSet { components })
    }

    pub fn components(&self) -> &[LinearSet] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }
}

impl From<LinearSet> for SemilinearSet {
    fn from(l: LinearSet) -> Self {
        SemilinearSet { components: alloc::vec![l] }
    }
}

/// Exact membership by bounded search over the period multipliers.
pub fn linear_member(v: &[u64], s: &LinearSet) -> bool {
    if v.len() != s.dim() {
        return false;
    }
    let mut rest = Vec::with_capacity(v.len());
    for (x, b) in v.iter().zip(&s.base) {
        match x.checked_sub(*b) {
            Some(r) => rest.push(r),
            None => return false,
        }
    }
    search(&mut rest, &s.periods)
}

fn search(rest: &mut [u64], periods: &[Vec<u64>]) -> bool {
    let Some((p, others)) = periods.split_first() else {
        return rest.iter().all(|&x| x == 0);
    };
    let bound = p.iter().zip(rest.iter()).filter(|(q, _)| **q > 0).map(|(q, r)| r / q).min().unwrap_or(0);
    for k in 0..=bound {
        if k > 0 {
            for (r, q) in rest.iter_mut().zip(p) {
                *r -= q;
            }
        }
        if search(rest, others) {
            for (r, q) in rest.iter_mut().zip(p) {
                *r += q * k;
            }
            return true;
        }
    }
    for (r, q) in rest.iter_mut().zip(p) {
        *r += q * bound;
    }
    false
}

pub fn semilinear_member(v: &[u64], s: &SemilinearSet) -> bool {
    s.components.iter().any(|c| linear_member(v, c))
}

/// Letter counts of `word` in alphabet order.
pub fn parikh_vector(word: &str, alphabet: &Alphabet) -> Result<Vec<u64>, ParikhError> {
    let mut v = alloc::vec![0u64; alphabet.len()];
    for c in word.chars() {
        let k = alphabet.index_of(c).ok_or(ParikhError::UnknownLetter(c))?;
        v[k] += 1;
    }
    Ok(v)
}

/// Count vectors of all member words of length at most `max_total`, the empty word included.
pub fn parikh_image(membership: &dyn Fn(&str) -> bool, alphabet: &Alphabet, max_total: usize) -> BTreeSet<Vec<u64>> {
    let mut out = BTreeSet::new();
    if membership("") {
        out.insert(alloc::vec![0; alphabet.len()]);
    }
    for w in alphabet.words_up_to(max_total) {
        if membership(&w) {
            out.insert(parikh_vector(&w, alphabet).expect("enumerated over the alphabet"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn running_example_membership() {
        let s = LinearSet::new(vec![1, 1, 0], vec![vec![2, 0, 1]]).unwrap();
        assert!(s.contains(&[3, 1, 1]));
        assert!(!s.contains(&[2, 1, 0]));
        assert!(s.contains(&[1, 1, 0]));
        assert!(!s.contains(&[3, 1, 0]));
    }

    #[test]
    fn search_restores_state() {
        let s = LinearSet::new(vec![0, 0], vec![vec![2, 1], vec![1, 1], vec![0, 3]]).unwrap();
        assert!(s.contains(&[3, 5]));
        assert!(!s.contains(&[1, 0]));
    }

    #[test]
    fn invalid_sets() {
        assert_eq!(LinearSet::new(vec![1], vec![vec![0]]), Err(ParikhError::ZeroPeriod(1)));
        assert!(LinearSet::new(vec![1], vec![vec![0, 1]]).is_err());
        assert_eq!(SemilinearSet::new(vec![]), Err(ParikhError::EmptyUnion));
    }
}
