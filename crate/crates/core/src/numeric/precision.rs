use alloc::collections::BTreeMap;
use core::cmp::Ordering;

use super::{Evaluator, Value};

/// Lowest bit budget any policy may produce.
pub const MIN_BITS: u32 = 64;

/// Extra fixed-point bits carried beyond the nominal budget.
const GUARD_BITS: u32 = 32;

/// How many times the budget may be doubled before a comparison is given up.
const MAX_DOUBLINGS: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrecisionMode {
    BigFloat,
    ExactRational,
}

impl PrecisionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PrecisionMode::BigFloat => "bigfloat",
            PrecisionMode::ExactRational => "exact",
        }
    }
}

/// Word-length dependent bit budget `bits(n) = max(a·n + b, floor)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionPolicy {
    pub a: u32,
    pub b: u32,
    pub floor: u32,
    pub mode: PrecisionMode,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { a: 4, b: 64, floor: MIN_BITS, mode: PrecisionMode::BigFloat }
    }
}

impl PrecisionPolicy {
    pub fn exact() -> Self {
        PrecisionPolicy { mode: PrecisionMode::ExactRational, ..Default::default() }
    }

    pub fn with_mode(self, mode: PrecisionMode) -> Self {
        PrecisionPolicy { mode, ..self }
    }

    pub fn bits(&self, n: usize) -> u32 {
        let raw = (self.a as u64).saturating_mul(n as u64).saturating_add(self.b as u64);
        let raw = raw.min(u32::MAX as u64 / 64) as u32;
        raw.max(self.floor).max(MIN_BITS)
    }

    /// Same law with both coefficients doubled, hence `bits(n)` doubled.
    pub fn doubled(&self) -> Self {
        PrecisionPolicy {
            a: self.a.saturating_mul(2),
            b: self.b.saturating_mul(2),
            floor: self.floor.saturating_mul(2),
            mode: self.mode,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumericError {
    #[error("ordering of two values could not be certified within {bits} bits")]
    PrecisionExhausted { bits: u32 },
    #[error("irrational value encountered in exact-rational mode")]
    IrrationalInExactMode,
}

/// Outcome of comparing two values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Certified {
    pub ordering: Ordering,
    /// Precision escalation was needed beyond the base budget.
    pub escalated: bool,
}

/// Certified comparisons at the budget a policy assigns to one word length.
#[derive(Debug)]
pub struct Comparator {
    mode: PrecisionMode,
    base_bits: u32,
    evaluators: BTreeMap<u32, Evaluator>,
}

impl Comparator {
    pub fn new(policy: &PrecisionPolicy, n: usize) -> Self {
        Comparator { mode: policy.mode, base_bits: policy.bits(n), evaluators: BTreeMap::new() }
    }

    pub fn base_bits(&self) -> u32 {
        self.base_bits
    }

    pub fn mode(&self) -> PrecisionMode {
        self.mode
    }

    fn evaluator(&mut self, bits: u32) -> &mut Evaluator {
        self.evaluators.entry(bits).or_insert_with(|| Evaluator::new(bits + GUARD_BITS))
    }

    /// Sign of `v`: exact for rationals and symbolic zeros, otherwise
    /// certified by interval evaluation with escalating precision.
    pub fn sign(&mut self, v: &Value) -> Result<Certified, NumericError> {
        if let Some(r) = v.as_rational() {
            return Ok(Certified { ordering: r.signum(), escalated: false });
        }
        if self.mode == PrecisionMode::ExactRational {
            return Err(NumericError::IrrationalInExactMode);
        }
        let mut bits = self.base_bits;
        for round in 0..=MAX_DOUBLINGS {
            let ball = v.enclose(self.evaluator(bits));
            if let Some(ordering) = ball.sign() {
                return Ok(Certified { ordering, escalated: round > 0 });
            }
            if round < MAX_DOUBLINGS {
                bits = bits.saturating_mul(2);
            }
        }
        Err(NumericError::PrecisionExhausted { bits })
    }

    pub fn compare(&mut self, a: &Value, b: &Value) -> Result<Certified, NumericError> {
        self.sign(&a.sub(b))
    }

    /// Whether `|v| < 2^-base_bits` cannot be ruled out at the base budget.
    pub fn below_resolution(&mut self, v: &Value) -> bool {
        let bits = self.base_bits;
        if let Some(r) = v.as_rational() {
            return r.abs() < crate::numeric::Rational::pow2_neg(bits);
        }
        let ball = v.enclose(self.evaluator(bits));
        let limit = num_bigint::BigInt::from(1u8) << GUARD_BITS as usize;
        ball.magnitude_ulps() <= limit + ball.radius_ulps()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Rational;

    #[test]
    fn default_law() {
        let p = PrecisionPolicy::default();
        assert_eq!(p.bits(0), 64);
        assert_eq!(p.bits(10), 104);
        assert_eq!(p.doubled().bits(10), 208);
        let floored = PrecisionPolicy { floor: 500, ..p };
        assert_eq!(floored.bits(10), 500);
        let tiny = PrecisionPolicy { a: 0, b: 1, ..p };
        assert_eq!(tiny.bits(3), MIN_BITS);
    }

    #[test]
    fn escalation_resolves_tiny_gaps() {
        // cos(π·2^-50/10) is below 1 by about 2^-104, invisible at 64 + guard bits.
        let v = Value::one().sub(&Value::cos_pi_tenths(Rational::pow2_neg(50)));
        let mut cmp = Comparator::new(&PrecisionPolicy { a: 0, b: 64, ..Default::default() }, 1);
        let c = cmp.sign(&v).unwrap();
        assert_eq!(c.ordering, Ordering::Greater);
        assert!(c.escalated);
        assert!(cmp.below_resolution(&v));
    }

    #[test]
    fn exact_mode_rejects_trig() {
        let mut cmp = Comparator::new(&PrecisionPolicy::exact(), 4);
        let v = Value::cos_pi_tenths(Rational::new(1, 2));
        assert_eq!(cmp.sign(&v), Err(NumericError::IrrationalInExactMode));
        assert_eq!(cmp.sign(&Value::from(-3)).unwrap().ordering, Ordering::Less);
    }
}
