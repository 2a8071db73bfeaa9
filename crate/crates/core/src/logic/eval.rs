//! Direct finite-word semantics; the oracle every compiled model is checked against.

use alloc::vec;
use alloc::vec::Vec;

use super::{Direction, Formula, PredicateError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("words must be non-empty")]
    EmptyWord,
    #[error("position {i} out of range for a word of length {n}")]
    PositionOutOfRange { i: usize, n: usize },
    #[error(transparent)]
    Predicate(#[from] PredicateError),
}

fn check(word: &[char], i: usize) -> Result<(), EvalError> {
    if word.is_empty() {
        return Err(EvalError::EmptyWord);
    }
    if i >= word.len() {
        return Err(EvalError::PositionOutOfRange { i, n: word.len() });
    }
    Ok(())
}

/// Truth value of `phi` at every position of `word`.
pub fn trace(phi: &Formula, word: &str) -> Result<Vec<bool>, EvalError> {
    let w: Vec<char> = word.chars().collect();
    if w.is_empty() {
        return Err(EvalError::EmptyWord);
    }
    column(phi, &w)
}

pub fn eval_at(phi: &Formula, word: &str, i: usize) -> Result<bool, EvalError> {
    let w: Vec<char> = word.chars().collect();
    check(&w, i)?;
    Ok(column(phi, &w)?[i])
}

/// `|{j ∈ 0..=i : (w, j) ⊨ φ}|`.
pub fn count_left(phi: &Formula, word: &str, i: usize) -> Result<usize, EvalError> {
    let w: Vec<char> = word.chars().collect();
    check(&w, i)?;
    Ok(count(&column(phi, &w)?, Direction::Left, i))
}

/// `|{j ∈ i..n : (w, j) ⊨ φ}|`.
pub fn count_right(phi: &Formula, word: &str, i: usize) -> Result<usize, EvalError> {
    let w: Vec<char> = word.chars().collect();
    check(&w, i)?;
    Ok(count(&column(phi, &w)?, Direction::Right, i))
}

/// `(w, 0) ⊨ φ`.
pub fn accepts(phi: &Formula, word: &str) -> Result<bool, EvalError> {
    eval_at(phi, word, 0)
}

fn count(col: &[bool], dir: Direction, i: usize) -> usize {
    let range = match dir {
        Direction::Left => &col[..=i],
        Direction::Right => &col[i..],
    };
    range.iter().filter(|&&b| b).count()
}

fn column(phi: &Formula, w: &[char]) -> Result<Vec<bool>, EvalError> {
    let n = w.len();
    Ok(match phi {
        Formula::Atom(c) => w.iter().map(|x| x == c).collect(),
        Formula::True => vec![true; n],
        Formula::Not(a) => column(a, w)?.into_iter().map(|b| !b).collect(),
        Formula::And(a, b) => {
            let (x, y) = (column(a, w)?, column(b, w)?);
            x.iter().zip(&y).map(|(p, q)| *p && *q).collect()
        }
        Formula::Or(a, b) => {
            let (x, y) = (column(a, w)?, column(b, w)?);
            x.iter().zip(&y).map(|(p, q)| *p || *q).collect()
        }
        // strict next: false at the last position
        Formula::Next(a) => {
            let x = column(a, w)?;
            (0..n).map(|i| i + 1 < n && x[i + 1]).collect()
        }
        // a witness j ≥ i with ψ at j and φ on i..j
        Formula::Until(a, b) => {
            let (x, y) = (column(a, w)?, column(b, w)?);
            (0..n).map(|i| (i..n).any(|j| y[j] && (i..j).all(|k| x[k]))).collect()
        }
        Formula::Pred(p) => (0..n).map(|i| p.eval(n, i)).collect::<Result<_, _>>()?,
        Formula::PredOfCount(p, dir, a) => {
            let x = column(a, w)?;
            (0..n).map(|i| p.eval(n, count(&x, *dir, i))).collect::<Result<_, _>>()?
        }
        Formula::LinIneq(terms) => {
            let cols = terms.iter().map(|t| column(&t.formula, w)).collect::<Result<Vec<_>, _>>()?;
            (0..n)
                .map(|i| {
                    let total: i128 = terms
                        .iter()
                        .zip(&cols)
                        .map(|(t, c)| t.coef as i128 * count(c, t.direction, i) as i128)
                        .sum();
                    total >= 0
                })
                .collect()
        }
    })
}
