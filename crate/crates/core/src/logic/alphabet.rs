use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Letters that the formula grammar reserves for temporal operators.
pub const RESERVED: [char; 4] = ['X', 'U', 'F', 'G'];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlphabetError {
    #[error("alphabet must not be empty")]
    Empty,
    #[error("duplicate symbol {0:?} in alphabet")]
    Duplicate(char),
    #[error("symbol {0:?} is not allowed in an alphabet (must be alphanumeric and not one of X, U, F, G)")]
    Reserved(char),
}

/// Ordered set of single-character symbols; the order fixes the one-hot layout.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self, AlphabetError> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(AlphabetError::Empty);
        }
        for (k, &c) in symbols.iter().enumerate() {
            if !c.is_alphanumeric() || RESERVED.contains(&c) {
                return Err(AlphabetError::Reserved(c));
            }
            if symbols[..k].contains(&c) {
                return Err(AlphabetError::Duplicate(c));
            }
        }
        Ok(Alphabet { symbols })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(s: &str) -> Result<Self, AlphabetError> {
        Alphabet::new(s.chars())
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.symbols.iter().position(|&s| s == c)
    }

    pub fn contains(&self, c: char) -> bool {
        self.index_of(c).is_some()
    }

    pub fn as_string(&self) -> String {
        self.symbols.iter().collect()
    }

    /// All words of exactly `len` symbols in lexicographic order of the alphabet.
    pub fn words_of_len(&self, len: usize) -> WordsOfLen<'_> {
        WordsOfLen { alphabet: self, digits: alloc::vec![0; len], done: false }
    }

    /// All words of length `1..=max_len`, shortest first, lexicographic within a length.
    pub fn words_up_to(&self, max_len: usize) -> impl Iterator<Item = String> + '_ {
        (1..=max_len).flat_map(move |l| self.words_of_len(l))
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_string())
    }
}

pub struct WordsOfLen<'a> {
    alphabet: &'a Alphabet,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for WordsOfLen<'_> {
    type Item = String;

    fn next(&mut self) -> Option<String> {
        if self.done {
            return None;
        }
        let word: String = self.digits.iter().map(|&d| self.alphabet.symbols[d]).collect();
        let base = self.alphabet.len();
        let mut k = self.digits.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.digits[k] += 1;
            if self.digits[k] < base {
                break;
            }
            self.digits[k] = 0;
        }
        Some(word)
    }
}
