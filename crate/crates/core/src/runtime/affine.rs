use alloc::vec;
use alloc::vec::Vec;

use super::RuntimeError;
use crate::numeric::{Rational, Value};

/// `x ↦ Mx + b` with exact rational entries.
///
/// Stored row-sparse: compiled models are mostly identity pass-through with a
/// handful of non-zero entries per layer, while the file format is dense.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<(usize, Rational)>>,
    bias: Vec<Rational>,
    /// Leading rows that are exactly `e_k` with zero bias.
    identity_prefix: usize,
}

impl AffineMap {
    pub fn zero(rows: usize, cols: usize) -> Self {
        AffineMap { rows, cols, entries: vec![Vec::new(); rows], bias: vec![Rational::zero(); rows], identity_prefix: 0 }
            .finish()
    }

    pub fn from_dense(matrix: Vec<Vec<Rational>>, bias: Vec<Rational>) -> Result<Self, RuntimeError> {
        let rows = matrix.len();
        if bias.len() != rows {
            return Err(RuntimeError::InvalidModel(alloc::format!(
                "affine map has {rows} matrix rows but {} bias entries",
                bias.len()
            )));
        }
        let cols = matrix.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(rows);
        for (r, row) in matrix.into_iter().enumerate() {
            if row.len() != cols {
                return Err(RuntimeError::InvalidModel(alloc::format!(
                    "affine map row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            entries.push(row.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect());
        }
        Ok(AffineMap { rows, cols, entries, bias, identity_prefix: 0 }.finish())
    }

    /// Builds from `(row, col, value)` triples; repeated positions are summed.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        triples: impl IntoIterator<Item = (usize, usize, Rational)>,
        bias: Vec<Rational>,
    ) -> Result<Self, RuntimeError> {
        if bias.len() != rows {
            return Err(RuntimeError::InvalidModel(alloc::format!(
                "affine map has {rows} rows but {} bias entries",
                bias.len()
            )));
        }
        let mut entries: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); rows];
        for (r, c, v) in triples {
            if r >= rows || c >= cols {
                return Err(RuntimeError::InvalidModel(alloc::format!(
                    "entry ({r}, {c}) outside a {rows}x{cols} map"
                )));
            }
            match entries[r].iter_mut().find(|(k, _)| *k == c) {
                Some(slot) => slot.1 = &slot.1 + &v,
                None => entries[r].push((c, v)),
            }
        }
        for row in &mut entries {
            row.retain(|(_, v)| !v.is_zero());
            row.sort_by_key(|(c, _)| *c);
        }
        Ok(AffineMap { rows, cols, entries, bias, identity_prefix: 0 }.finish())
    }

    fn finish(mut self) -> Self {
        let one = Rational::one();
        self.identity_prefix = (0..self.rows)
            .take_while(|&r| {
                self.bias[r].is_zero() && self.entries[r].len() == 1 && self.entries[r][0].0 == r && self.entries[r][0].1 == one
            })
            .count();
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn bias(&self) -> &[Rational] {
        &self.bias
    }

    pub fn row_entries(&self, r: usize) -> &[(usize, Rational)] {
        &self.entries[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.entries[r].iter().find(|(k, _)| *k == c).map_or_else(Rational::zero, |(_, v)| v.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|r| r.is_empty()) && self.bias.iter().all(|b| b.is_zero())
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        self.entries
            .iter()
            .map(|row| {
                let mut dense = vec![Rational::zero(); self.cols];
                for (c, v) in row {
                    dense[*c] = v.clone();
                }
                dense
            })
            .collect()
    }

    fn row_value<'a>(&self, r: usize, input: impl Fn(usize) -> &'a Value) -> Value {
        let one = Rational::one();
        let mut acc = Value::from(self.bias[r].clone());
        for (c, w) in &self.entries[r] {
            let x = input(*c);
            if x.is_zero() {
                continue;
            }
            acc = match (acc.is_zero(), *w == one) {
                (true, true) => x.clone(),
                (true, false) => x.scale(w),
                (false, true) => acc.add(x),
                (false, false) => acc.add(&x.scale(w)),
            };
        }
        acc
    }

    pub fn apply(&self, x: &[Value]) -> Vec<Value> {
        debug_assert_eq!(x.len(), self.cols);
        self.apply_with(|c| &x[c], x.get(..self.identity_prefix.min(x.len())))
    }

    /// Applies the map to the concatenation `left ⊕ right` without materializing it.
    pub fn apply_concat(&self, left: &[Value], right: &[Value]) -> Vec<Value> {
        debug_assert_eq!(left.len() + right.len(), self.cols);
        let d = left.len();
        let get = |c: usize| if c < d { &left[c] } else { &right[c - d] };
        let prefix = if self.identity_prefix <= d { Some(&left[..self.identity_prefix]) } else { None };
        self.apply_with(get, prefix)
    }

    fn apply_with<'a>(&self, get: impl Fn(usize) -> &'a Value, prefix: Option<&[Value]>) -> Vec<Value> {
        let mut out = Vec::with_capacity(self.rows);
        let start = match prefix {
            Some(p) => {
                out.extend_from_slice(p);
                p.len()
            }
            None => 0,
        };
        for r in start..self.rows {
            out.push(self.row_value(r, &get));
        }
        out
    }

    /// Leading rows that copy their own input coordinate unchanged.
    pub fn identity_prefix(&self) -> usize {
        self.identity_prefix
    }

    /// Rows `from..` of the map applied to `left ⊕ right`.
    pub fn apply_concat_from(&self, left: &[Value], right: &[Value], from: usize) -> Vec<Value> {
        let d = left.len();
        let get = |c: usize| if c < d { &left[c] } else { &right[c - d] };
        (from..self.rows).map(|r| self.row_value(r, get)).collect()
    }

    /// Only the rows whose value is non-zero, as `(row, value)`.
    pub fn apply_sparse(&self, x: &[Value]) -> Vec<(usize, Value)> {
        (0..self.rows)
            .filter(|&r| !self.entries[r].is_empty() || !self.bias[r].is_zero())
            .map(|r| (r, self.row_value(r, |c| &x[c])))
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Rational {
        Rational::from_int(v)
    }

    #[test]
    fn dense_roundtrip_and_apply() {
        let m = AffineMap::from_dense(vec![vec![q(1), q(0)], vec![q(2), q(-1)]], vec![q(0), q(3)]).unwrap();
        assert_eq!(m.to_dense(), vec![vec![q(1), q(0)], vec![q(2), q(-1)]]);
        let out = m.apply(&[Value::from(5), Value::from(4)]);
        assert_eq!(out, vec![Value::from(5), Value::from(9)]);
        let out2 = m.apply_concat(&[Value::from(5)], &[Value::from(4)]);
        assert_eq!(out, out2);
        assert!(m.apply_sparse(&[Value::from(0), Value::from(3)]).is_empty());
        assert_eq!(m.apply_sparse(&[Value::from(1), Value::from(0)]), vec![(0, Value::from(1)), (1, Value::from(5))]);
    }

    #[test]
    fn shape_errors() {
        assert!(AffineMap::from_dense(vec![vec![q(1)], vec![q(1), q(2)]], vec![q(0), q(0)]).is_err());
        assert!(AffineMap::from_dense(vec![vec![q(1)]], vec![]).is_err());
        assert!(AffineMap::from_entries(1, 1, [(0, 3, q(1))], vec![q(0)]).is_err());
    }
}
