//! Exact symbolic values: rational trigonometric polynomials.
//!
//! A [`Value`] is `c + Σ αₖ·cos(π·qₖ/10) + Σ βₖ·sin(π·qₖ/10)` with rational
//! `c`, `αₖ`, `βₖ`, `qₖ`. The positional components `cos_geo` / `sin_geo` are
//! of this form, affine maps and averages keep it, and attention scores (a
//! bilinear form of two such vectors) stay inside it via product-to-sum
//! identities. Equality is therefore decided symbolically; only strict
//! orderings need numerical certification.
//!
//! Canonical form: cosine angles are `> 0`, sine angles are `> 0`, no zero
//! coefficients, terms sorted by angle.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use super::ball::{self, Ball};
use super::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Wave {
    Cos,
    Sin,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TrigTerm {
    pub wave: Wave,
    /// The angle is `π·q/10`.
    pub q: Rational,
    pub coef: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Value {
    constant: Rational,
    trig: Vec<TrigTerm>,
}

impl From<Rational> for Value {
    fn from(r: Rational) -> Self {
        Value { constant: r, trig: Vec::new() }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::from(Rational::from_int(v))
    }
}

impl Value {
    pub fn zero() -> Self {
        Value::default()
    }

    pub fn one() -> Self {
        Value::from(Rational::one())
    }

    /// `cos(π·q/10)`.
    pub fn cos_pi_tenths(q: Rational) -> Self {
        let mut acc = Accumulator::default();
        acc.push(Wave::Cos, q, Rational::one());
        acc.finish()
    }

    /// `sin(π·q/10)`.
    pub fn sin_pi_tenths(q: Rational) -> Self {
        let mut acc = Accumulator::default();
        acc.push(Wave::Sin, q, Rational::one());
        acc.finish()
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.trig.is_empty()
    }

    /// The value as a rational, if it has no trigonometric part.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.trig.is_empty() {
            Some(&self.constant)
        } else {
            None
        }
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn trig_terms(&self) -> &[TrigTerm] {
        &self.trig
    }

    pub fn is_rational(&self) -> bool {
        self.trig.is_empty()
    }

    pub fn add(&self, o: &Value) -> Value {
        if self.trig.is_empty() && o.trig.is_empty() {
            return Value::from(&self.constant + &o.constant);
        }
        let mut acc = Accumulator::with_constant(&self.constant + &o.constant);
        for t in self.trig.iter().chain(o.trig.iter()) {
            acc.push(t.wave, t.q.clone(), t.coef.clone());
        }
        acc.finish()
    }

    pub fn sub(&self, o: &Value) -> Value {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Value {
        Value {
            constant: -&self.constant,
            trig: self
                .trig
                .iter()
                .map(|t| TrigTerm { wave: t.wave, q: t.q.clone(), coef: -&t.coef })
                .collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Value {
        if k.is_zero() {
            return Value::zero();
        }
        if k.is_one() {
            return self.clone();
        }
        Value {
            constant: &self.constant * k,
            trig: self
                .trig
                .iter()
                .map(|t| TrigTerm { wave: t.wave, q: t.q.clone(), coef: &t.coef * k })
                .collect(),
        }
    }

    pub fn mul(&self, o: &Value) -> Value {
        if o.trig.is_empty() {
            return self.scale(&o.constant);
        }
        if self.trig.is_empty() {
            return o.scale(&self.constant);
        }
        let half = Rational::new(1, 2);
        let mut acc = Accumulator::with_constant(&self.constant * &o.constant);
        for t in &self.trig {
            acc.push(t.wave, t.q.clone(), &t.coef * &o.constant);
        }
        for t in &o.trig {
            acc.push(t.wave, t.q.clone(), &t.coef * &self.constant);
        }
        for a in &self.trig {
            for b in &o.trig {
                let k = &(&a.coef * &b.coef) * &half;
                let diff = &a.q - &b.q;
                let sum = &a.q + &b.q;
                match (a.wave, b.wave) {
                    // cos a cos b = (cos(a-b) + cos(a+b)) / 2
                    (Wave::Cos, Wave::Cos) => {
                        acc.push(Wave::Cos, diff, k.clone());
                        acc.push(Wave::Cos, sum, k);
                    }
                    // sin a sin b = (cos(a-b) - cos(a+b)) / 2
                    (Wave::Sin, Wave::Sin) => {
                        acc.push(Wave::Cos, diff, k.clone());
                        acc.push(Wave::Cos, sum, -k);
                    }
                    // sin a cos b = (sin(a+b) + sin(a-b)) / 2
                    (Wave::Sin, Wave::Cos) => {
                        acc.push(Wave::Sin, sum, k.clone());
                        acc.push(Wave::Sin, diff, k);
                    }
                    // cos a sin b = (sin(a+b) - sin(a-b)) / 2
                    (Wave::Cos, Wave::Sin) => {
                        acc.push(Wave::Sin, sum, k.clone());
                        acc.push(Wave::Sin, diff, -k);
                    }
                }
            }
        }
        acc.finish()
    }

    /// Certified enclosure at the evaluator's precision.
    pub fn enclose(&self, ev: &mut Evaluator) -> Ball {
        let mut out = Ball::from_rational(&self.constant, ev.prec);
        for t in &self.trig {
            let (c, s) = ev.cos_sin(&t.q);
            let b = match t.wave {
                Wave::Cos => c,
                Wave::Sin => s,
            };
            out = out.add(&b.mul_rational(&t.coef));
        }
        out
    }

    pub fn approx_f64(&self) -> f64 {
        if self.trig.is_empty() {
            return self.constant.to_f64();
        }
        let mut ev = Evaluator::new(96);
        self.enclose(&mut ev).mid_f64()
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for t in &self.trig {
            let w = match t.wave {
                Wave::Cos => "cos",
                Wave::Sin => "sin",
            };
            write!(f, " + {}*{}(pi*{}/10)", t.coef, w, t.q)?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Accumulator {
    constant: Rational,
    terms: BTreeMap<(Wave, Rational), Rational>,
}

impl Accumulator {
    fn with_constant(c: Rational) -> Self {
        Accumulator { constant: c, terms: BTreeMap::new() }
    }

    fn push(&mut self, wave: Wave, q: Rational, coef: Rational) {
        if coef.is_zero() {
            return;
        }
        let (q, coef) = match q.signum() {
            Ordering::Equal => {
                if wave == Wave::Cos {
                    self.constant = &self.constant + &coef;
                }
                return;
            }
            // cos is even, sin is odd
            Ordering::Less => match wave {
                Wave::Cos => (-q, coef),
                Wave::Sin => (-q, -coef),
            },
            Ordering::Greater => (q, coef),
        };
        let slot = self.terms.entry((wave, q)).or_insert_with(Rational::zero);
        *slot = &*slot + &coef;
    }

    fn finish(self) -> Value {
        let mut trig: Vec<TrigTerm> = self
            .terms
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((wave, q), coef)| TrigTerm { wave, q, coef })
            .collect();
        trig.sort_by(|a, b| a.q.cmp(&b.q).then(a.wave.cmp(&b.wave)));
        Value { constant: self.constant, trig }
    }
}

/// Cache of π and trigonometric enclosures at one working precision.
#[derive(Debug)]
pub struct Evaluator {
    prec: u32,
    pi_tenth: Ball,
    cache: BTreeMap<Rational, (Ball, Ball)>,
}

impl Evaluator {
    pub fn new(prec: u32) -> Self {
        Evaluator { prec, pi_tenth: ball::pi(prec).div_int(10), cache: BTreeMap::new() }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// `(cos(π·q/10), sin(π·q/10))`.
    pub fn cos_sin(&mut self, q: &Rational) -> (Ball, Ball) {
        if let Some(v) = self.cache.get(q) {
            return v.clone();
        }
        let x = self.pi_tenth.mul_rational(q);
        let v = ball::cos_sin(&x);
        self.cache.insert(q.clone(), v.clone());
        v
    }
}
