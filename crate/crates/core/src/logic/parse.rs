//! Recursive-descent parser for the ASCII formula syntax.
//!
//! Precedence from loosest to tightest: `|`, `&`, `U` (right-associative),
//! then the prefix operators `!`, `X`, `F`, `G`. `F` and `G` are desugared on
//! the spot into `true U φ` and `!(true U !φ)`; `k*const` inside an inequality
//! becomes `k*<-#true`, which equals `k·(i+1)` at position `i` and hence `k`
//! at position 0 only.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{Alphabet, CountTerm, Direction, Formula, PredicateError, TablePredicate, UnaryPredicate};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown symbol {symbol:?} at position {pos}")]
    UnknownSymbol { pos: usize, symbol: char },
    #[error("unknown predicate @{name} at position {pos}")]
    UnknownPredicate { pos: usize, name: String },
    #[error("malformed integer coefficient {text:?} at position {pos}")]
    MalformedCoefficient { pos: usize, text: String },
    #[error("invalid predicate at position {pos}: {source}")]
    Predicate { pos: usize, source: PredicateError },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownSymbol { pos, .. }
            | ParseError::UnknownPredicate { pos, .. }
            | ParseError::MalformedCoefficient { pos, .. }
            | ParseError::Predicate { pos, .. } => *pos,
        }
    }
}

/// Named finite tables that `@table(name)` may refer to.
#[derive(Clone, Debug, Default)]
pub struct PredicateRegistry {
    tables: BTreeMap<String, TablePredicate>,
}

impl PredicateRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register_table(&mut self, table: TablePredicate) {
        self.tables.insert(table.name().to_string(), table);
    }

    pub fn table(&self, name: &str) -> Option<&TablePredicate> {
        self.tables.get(name)
    }
}

pub fn parse_formula(text: &str, alphabet: &Alphabet) -> Result<Formula, ParseError> {
    parse_formula_with(text, alphabet, &PredicateRegistry::default())
}

pub fn parse_formula_with(
    text: &str,
    alphabet: &Alphabet,
    registry: &PredicateRegistry,
) -> Result<Formula, ParseError> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0, alphabet, registry };
    let f = p.formula()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.syntax(alloc::format!("unexpected {:?}", p.chars[p.pos])));
    }
    Ok(f)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    alphabet: &'a Alphabet,
    registry: &'a PredicateRegistry,
}

impl Parser<'_> {
    fn syntax(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { pos: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn starts_with(&mut self, s: &str) -> bool {
        self.skip_ws();
        s.chars().enumerate().all(|(k, c)| self.chars.get(self.pos + k) == Some(&c))
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.starts_with(s) {
            self.pos += s.chars().count();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            let found = match self.peek() {
                Some(c) => alloc::format!("{c:?}"),
                None => "end of input".to_string(),
            };
            Err(self.syntax(alloc::format!("expected {s:?}, found {found}")))
        }
    }

    /// Keyword followed by a non-identifier character.
    fn eat_keyword(&mut self, kw: &str) -> bool {
        if !self.starts_with(kw) {
            return false;
        }
        let end = self.pos + kw.chars().count();
        if self.chars.get(end).is_some_and(|c| c.is_alphanumeric() || *c == '_') {
            return false;
        }
        self.pos = end;
        true
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.eat("|") {
            let rhs = self.conjunction()?;
            lhs = lhs.or(rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until()?;
        while self.eat("&") {
            let rhs = self.until()?;
            lhs = lhs.and(rhs);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.eat("U") {
            let rhs = self.until()?;
            return Ok(lhs.until(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some('!') => {
                self.pos += 1;
                Ok(self.unary()?.not())
            }
            Some('X') => {
                self.pos += 1;
                Ok(self.unary()?.next())
            }
            Some('F') => {
                self.pos += 1;
                Ok(self.unary()?.eventually())
            }
            Some('G') => {
                self.pos += 1;
                Ok(self.unary()?.globally())
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(")")?;
                Ok(f)
            }
            Some('@') => {
                self.pos += 1;
                self.predicate(start)
            }
            Some('[') => {
                self.pos += 1;
                self.inequality()
            }
            Some(_) if self.eat_keyword("true") => Ok(Formula::True),
            Some(c) if c.is_alphanumeric() => {
                if !self.alphabet.contains(c) {
                    return Err(ParseError::UnknownSymbol { pos: start, symbol: c });
                }
                self.pos += 1;
                Ok(Formula::Atom(c))
            }
            Some(c) => Err(self.syntax(alloc::format!("unexpected {c:?}"))),
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let mut s = String::new();
        while let Some(&c) = self.chars.get(self.pos) {
            if c.is_alphanumeric() || c == '_' {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        s
    }

    fn natural(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut s = String::new();
        while let Some(&c) = self.chars.get(self.pos) {
            if c.is_ascii_digit() {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        if s.is_empty() {
            return Err(self.syntax("expected a natural number"));
        }
        s.parse().map_err(|_| ParseError::MalformedCoefficient { pos: start, text: s })
    }

    fn count_follows(&mut self) -> bool {
        let save = self.pos;
        let ok = self.eat("(") && (self.starts_with("<-") || self.starts_with("->"));
        self.pos = save;
        ok
    }

    fn predicate(&mut self, start: usize) -> Result<Formula, ParseError> {
        let name = self.ident();
        let wrap = |pos: usize| move |source: PredicateError| ParseError::Predicate { pos, source };
        let pred = match name.as_str() {
            "even" => UnaryPredicate::Even,
            "midpoint" => UnaryPredicate::Midpoint,
            "primeshift" => UnaryPredicate::PrimeShift,
            "mod" => {
                self.expect("(")?;
                let p = self.natural()?;
                self.expect(",")?;
                let r = self.natural()?;
                self.expect(")")?;
                UnaryPredicate::modulo(p, r).map_err(wrap(start))?
            }
            "eq" | "geq" => {
                self.expect("(")?;
                let c = self.natural()?;
                self.expect(")")?;
                if name == "eq" {
                    UnaryPredicate::Eq(c)
                } else {
                    UnaryPredicate::Geq(c)
                }
            }
            "table" => {
                self.expect("(")?;
                let tpos = {
                    self.skip_ws();
                    self.pos
                };
                let tname = self.ident();
                self.expect(")")?;
                match self.registry.table(&tname) {
                    Some(t) => UnaryPredicate::Table(t.clone()),
                    None => {
                        return Err(ParseError::UnknownPredicate {
                            pos: tpos,
                            name: alloc::format!("table({tname})"),
                        })
                    }
                }
            }
            "" => return Err(self.syntax("expected a predicate name after '@'")),
            _ => return Err(ParseError::UnknownPredicate { pos: start, name }),
        };
        if self.count_follows() {
            self.expect("(")?;
            let (dir, phi) = self.count_term()?;
            self.expect(")")?;
            return Ok(Formula::PredOfCount(pred, dir, Box::new(phi)));
        }
        Ok(Formula::Pred(pred))
    }

    fn count_term(&mut self) -> Result<(Direction, Formula), ParseError> {
        let dir = if self.eat("<-") {
            Direction::Left
        } else if self.eat("->") {
            Direction::Right
        } else {
            return Err(self.syntax("expected '<-#' or '->#'"));
        };
        self.expect("#")?;
        Ok((dir, self.unary()?))
    }

    fn coefficient(&mut self, negative: bool) -> Result<Option<i64>, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut s = String::new();
        while let Some(&c) = self.chars.get(self.pos) {
            if c.is_ascii_digit() || c.is_alphanumeric() && !s.is_empty() {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        if s.is_empty() {
            return Ok(None);
        }
        let signed = if negative { alloc::format!("-{s}") } else { s.clone() };
        match signed.parse::<i64>() {
            Ok(v) => {
                self.expect("*")?;
                Ok(Some(v))
            }
            Err(_) => Err(ParseError::MalformedCoefficient { pos: start, text: s }),
        }
    }

    fn inequality(&mut self) -> Result<Formula, ParseError> {
        let mut terms = Vec::new();
        let mut negative = false;
        if self.starts_with("-") && !self.starts_with("->") {
            self.pos += 1;
            negative = true;
        }
        loop {
            let coef = self.coefficient(negative)?.unwrap_or(if negative { -1 } else { 1 });
            if self.eat_keyword("const") {
                terms.push(CountTerm::new(coef, Direction::Left, Formula::True));
            } else {
                let (dir, phi) = self.count_term()?;
                terms.push(CountTerm::new(coef, dir, phi));
            }
            if self.eat("+") {
                negative = false;
            } else if self.starts_with("-") && !self.starts_with("->") {
                self.pos += 1;
                negative = true;
            } else {
                break;
            }
        }
        self.expect(">=")?;
        self.skip_ws();
        let zpos = self.pos;
        if self.natural()? != 0 {
            return Err(ParseError::Syntax { pos: zpos, message: "inequalities must compare against 0".into() });
        }
        self.expect("]")?;
        Ok(Formula::LinIneq(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ab() -> Alphabet {
        Alphabet::from_str("ab").unwrap()
    }

    fn p(s: &str) -> Formula {
        parse_formula(s, &ab()).unwrap()
    }

    #[test]
    fn productions() {
        let (a, b) = (Formula::Atom('a'), Formula::Atom('b'));
        assert_eq!(p("a U b"), a.clone().until(b.clone()));
        assert_eq!(p("X (a & !b)"), a.clone().and(b.clone().not()).next());
        assert_eq!(
            p("[2*<-#a - 1*->#true >= 0]"),
            Formula::LinIneq(vec![
                CountTerm::new(2, Direction::Left, a.clone()),
                CountTerm::new(-1, Direction::Right, Formula::True),
            ])
        );
        assert_eq!(p("@mod(2,0)(->#a)"), Formula::pred_of_count(UnaryPredicate::Mod { modulus: 2, residue: 0 }, Direction::Right, a.clone()));
        assert_eq!(p("F b"), Formula::True.until(b.clone()));
        assert_eq!(p("G a"), Formula::True.until(a.clone().not()).not());
        assert_eq!(p("[3*const - ->#b >= 0]"), Formula::LinIneq(vec![
            CountTerm::new(3, Direction::Left, Formula::True),
            CountTerm::new(-1, Direction::Right, b.clone()),
        ]));
    }

    #[test]
    fn precedence() {
        let (a, b) = (Formula::Atom('a'), Formula::Atom('b'));
        assert_eq!(p("a | b & a"), a.clone().or(b.clone().and(a.clone())));
        assert_eq!(p("a & b U a"), a.clone().and(b.clone().until(a.clone())));
        assert_eq!(p("a U b U a"), a.clone().until(b.clone().until(a.clone())));
        assert_eq!(p("!X true"), Formula::True.next().not());
        assert_eq!(p("X X a"), a.clone().next().next());
    }

    #[test]
    fn errors() {
        let e = parse_formula("a U", &ab()).unwrap_err();
        assert!(matches!(e, ParseError::Syntax { pos: 3, .. }), "{e:?}");
        assert_eq!(parse_formula("a & c", &ab()).unwrap_err(), ParseError::UnknownSymbol { pos: 4, symbol: 'c' });
        assert!(matches!(parse_formula("@odd", &ab()).unwrap_err(), ParseError::UnknownPredicate { pos: 0, .. }));
        assert!(matches!(
            parse_formula("[2x*<-#a >= 0]", &ab()).unwrap_err(),
            ParseError::MalformedCoefficient { pos: 1, .. }
        ));
        assert!(matches!(
            parse_formula("[99999999999999999999*<-#a >= 0]", &ab()).unwrap_err(),
            ParseError::MalformedCoefficient { .. }
        ));
        assert!(matches!(parse_formula("@table(t)", &ab()).unwrap_err(), ParseError::UnknownPredicate { .. }));
        assert!(matches!(parse_formula("@mod(0,0)", &ab()).unwrap_err(), ParseError::Predicate { .. }));
        assert!(parse_formula("(a", &ab()).is_err());
        assert!(parse_formula("[<-#a >= 1]", &ab()).is_err());
    }

    #[test]
    fn tables_resolve_through_registry() {
        let mut reg = PredicateRegistry::new();
        reg.register_table(TablePredicate::new("t", vec![vec![true, false]]).unwrap());
        let f = parse_formula_with("@table(t) & a", &ab(), &reg).unwrap();
        assert_eq!(f.to_string(), "@table(t) & a");
    }

    #[test]
    fn printer_examples() {
        assert_eq!(p("a U b").to_string(), "a U b");
        assert_eq!(p("(a U b) U a").to_string(), "(a U b) U a");
        assert_eq!(p("[1*->#a - 1*->#b >= 0] & [1*->#b - 1*->#a >= 0]").to_string(), "[1*->#a - 1*->#b >= 0] & [1*->#b - 1*->#a >= 0]");
        assert_eq!(p("[-2*<-#(a U b) >= 0]").to_string(), "[-2*<-#(a U b) >= 0]");
    }
}
