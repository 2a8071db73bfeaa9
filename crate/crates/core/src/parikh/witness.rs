use alloc::string::String;
use alloc::vec::Vec;

use super::{LinearSet, ParikhError};
use crate::logic::{Alphabet, Formula, UnaryPredicate};

/// `w₀·w₁*⋯w_r*` where each block lists its letters in alphabet order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessLanguage {
    alphabet: Alphabet,
    prefix: String,
    periods: Vec<String>,
}

fn block(v: &[u64], alphabet: &Alphabet) -> String {
    alphabet.symbols().iter().zip(v).flat_map(|(&c, &k)| core::iter::repeat_n(c, k as usize)).collect()
}

pub fn witness_language(s: &LinearSet, alphabet: &Alphabet) -> Result<WitnessLanguage, ParikhError> {
    if s.dim() != alphabet.len() {
        return Err(ParikhError::DimensionMismatch { expected: s.dim(), found: alphabet.len() });
    }
    Ok(WitnessLanguage {
        alphabet: alphabet.clone(),
        prefix: block(s.base(), alphabet),
        periods: s.periods().iter().map(|p| block(p, alphabet)).collect(),
    })
}

impl WitnessLanguage {
    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    pub fn periods(&self) -> &[String] {
        &self.periods
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// `ℓ₀, …, ℓ_r`.
    pub fn block_lengths(&self) -> Vec<usize> {
        core::iter::once(&self.prefix).chain(&self.periods).map(|b| b.chars().count()).collect()
    }

    /// Exact membership: reachable `(offset, star)` states, so no backtracking order matters.
    pub fn contains(&self, word: &str) -> bool {
        let Some(rest) = word.strip_prefix(self.prefix.as_str()) else {
            return false;
        };
        let r = self.periods.len();
        let n = rest.len();
        // reach[k][p]: the first p bytes split into w₁*⋯w_k* blocks, with star k+1 still open.
        let mut reach = alloc::vec![alloc::vec![false; n + 1]; r + 1];
        reach[0][0] = true;
        for k in 0..r {
            let w = self.periods[k].as_bytes();
            for p in 0..=n {
                if reach[k][p] {
                    reach[k + 1][p] = true;
                }
                if reach[k + 1][p] && rest.as_bytes()[p..].starts_with(w) {
                    reach[k + 1][p + w.len()] = true;
                }
            }
        }
        reach[r][n]
    }

    /// Pattern text, e.g. `ab (aac)*`, optionally renaming letters.
    pub fn pattern(&self, names: Option<&[String]>) -> String {
        let render = |s: &str| -> String {
            match names {
                None => s.into(),
                Some(names) => s
                    .chars()
                    .map(|c| names[self.alphabet.index_of(c).expect("block letter")].as_str())
                    .collect(),
            }
        };
        let mut out = render(&self.prefix);
        for p in &self.periods {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push('(');
            out.push_str(&render(p));
            out.push_str(")*");
        }
        out
    }
}

fn implies(a: Formula, b: Formula) -> Formula {
    a.not().or(b)
}

fn all(parts: impl IntoIterator<Item = Formula>) -> Formula {
    parts.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
}

/// An LTL(Mon) definition of a witness language with at most one star,
/// over non-empty words. `None` for two or more stars.
pub fn witness_formula(lang: &WitnessLanguage) -> Option<Formula> {
    let prefix: Vec<char> = lang.prefix.chars().collect();
    let l0 = prefix.len() as u64;
    let last = Formula::True.next().not();
    let pred = |p: UnaryPredicate| Formula::Pred(p);
    let modulo = |m: u64, r: u64| pred(UnaryPredicate::modulo(m, r % m).expect("positive modulus"));
    let mut letters: Vec<Formula> =
        prefix.iter().enumerate().map(|(i, &c)| implies(pred(UnaryPredicate::Eq(i as u64)), Formula::Atom(c))).collect();
    let end = match lang.periods.as_slice() {
        [] => {
            if l0 == 0 {
                return Some(Formula::True.not());
            }
            last.and(pred(UnaryPredicate::Eq(l0 - 1)))
        }
        [w1] => {
            let period: Vec<char> = w1.chars().collect();
            let l1 = period.len() as u64;
            for (k, &c) in period.iter().enumerate() {
                let at = modulo(l1, l0 + k as u64);
                let guard = if l0 == 0 { at } else { pred(UnaryPredicate::Geq(l0)).and(at) };
                letters.push(implies(guard, Formula::Atom(c)));
            }
            // n = ℓ₀ + k·ℓ₁ with n ≥ max(ℓ₀, 1), read off at the last position n − 1
            let residue = modulo(l1, l0 + l1 - 1);
            if l0 == 0 {
                last.and(residue)
            } else {
                last.and(residue).and(pred(UnaryPredicate::Geq(l0 - 1)))
            }
        }
        _ => return None,
    };
    Some(all(letters).globally().and(end.eventually()))
}

/// `F(@primeshift ∧ ¬X true)`: the length is prime.
pub fn prime_example_formula() -> Formula {
    Formula::Pred(UnaryPredicate::PrimeShift).and(Formula::True.next().not()).eventually()
}

/// Whether some rearrangement of `word` lies in the base language.
pub fn perm_closure_member(word: &str, base: &dyn Fn(&str) -> bool, max_len: usize) -> Result<bool, ParikhError> {
    let mut letters: Vec<char> = word.chars().collect();
    if letters.len() > max_len {
        return Err(ParikhError::TooLong { len: letters.len(), max: max_len });
    }
    letters.sort_unstable();
    loop {
        let candidate: String = letters.iter().collect();
        if base(&candidate) {
            return Ok(true);
        }
        if !next_permutation(&mut letters) {
            return Ok(false);
        }
    }
}

fn next_permutation(v: &mut [char]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot has a successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn abc() -> Alphabet {
        Alphabet::from_str("abc").unwrap()
    }

    #[test]
    fn running_example() {
        let s = LinearSet::new(vec![1, 1, 0], vec![vec![2, 0, 1]]).unwrap();
        let w = witness_language(&s, &abc()).unwrap();
        assert_eq!(w.prefix(), "ab");
        assert_eq!(w.periods(), ["aac"]);
        assert_eq!(w.block_lengths(), [2, 3]);
        assert_eq!(w.pattern(None), "ab (aac)*");
        let names: Vec<String> = ["a1", "a2", "a3"].iter().map(|s| String::from(*s)).collect();
        assert_eq!(w.pattern(Some(&names)), "a1a2 (a1a1a3)*");
        assert!(w.contains("abaacaac"));
        assert!(!w.contains("aba"));
    }

    #[test]
    fn membership_needs_backtracking() {
        let s = LinearSet::new(vec![0, 0], vec![vec![1, 0], vec![1, 1]]).unwrap();
        let w = witness_language(&s, &Alphabet::from_str("ab").unwrap()).unwrap();
        assert!(w.contains("aab"));
        assert!(w.contains(""));
        assert!(!w.contains("aba"));
    }

    #[test]
    fn permutations() {
        let base = |w: &str| w.len().is_multiple_of(3) && w.as_bytes().chunks(3).all(|c| c == b"abc");
        assert!(perm_closure_member("cab", &base, 9).unwrap());
        assert!(!perm_closure_member("aab", &base, 9).unwrap());
        assert!(perm_closure_member("", &base, 9).unwrap());
        assert!(perm_closure_member("abcabcabca", &base, 9).is_err());
        let mut v: Vec<char> = "aab".chars().collect();
        let mut count = 1;
        while next_permutation(&mut v) {
            count += 1;
        }
        assert_eq!(count, 3);
    }
}
