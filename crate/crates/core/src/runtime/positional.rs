use core::fmt;

use crate::logic::{PredicateError, UnaryPredicate};
use crate::numeric::{Rational, Value};

/// One coordinate of the positional encoding `p(i, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PositionalComponent {
    /// `i`
    Index,
    /// `i²`
    IndexSquared,
    /// `1/(i+1)`
    InvIndex,
    /// `(-1)^i`
    AltSign,
    /// `cos(π(1 - 2^-i)/10)`
    CosGeo,
    /// `sin(π(1 - 2^-i)/10)`
    SinGeo,
    /// `θₙ(i)`
    Pred(UnaryPredicate),
    /// `θₙ(n)`, the same at every position.
    PredAtN(UnaryPredicate),
}

impl PositionalComponent {
    pub fn is_trigonometric(&self) -> bool {
        matches!(self, PositionalComponent::CosGeo | PositionalComponent::SinGeo)
    }

    pub fn eval(&self, i: usize, n: usize) -> Result<Value, PredicateError> {
        let bit = |b: bool| Value::from(b as i64);
        Ok(match self {
            PositionalComponent::Index => Value::from(i as i64),
            PositionalComponent::IndexSquared => Value::from(Rational::from_int(i as i64) * Rational::from_int(i as i64)),
            PositionalComponent::InvIndex => Value::from(Rational::new(1, i as i64 + 1)),
            PositionalComponent::AltSign => Value::from(if i.is_multiple_of(2) { 1 } else { -1 }),
            PositionalComponent::CosGeo => Value::cos_pi_tenths(geo_angle(i)),
            PositionalComponent::SinGeo => Value::sin_pi_tenths(geo_angle(i)),
            PositionalComponent::Pred(p) => bit(p.eval(n, i)?),
            PositionalComponent::PredAtN(p) => bit(p.eval(n, n)?),
        })
    }
}

/// `1 - 2^-i`, the angle of position `i` in units of `π/10`.
pub fn geo_angle(i: usize) -> Rational {
    &Rational::one() - &Rational::pow2_neg(i as u32)
}

impl fmt::Display for PositionalComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PositionalComponent::Index => f.write_str("index"),
            PositionalComponent::IndexSquared => f.write_str("index_squared"),
            PositionalComponent::InvIndex => f.write_str("inv_index"),
            PositionalComponent::AltSign => f.write_str("alt_sign"),
            PositionalComponent::CosGeo => f.write_str("cos_geo"),
            PositionalComponent::SinGeo => f.write_str("sin_geo"),
            PositionalComponent::Pred(p) => write!(f, "pred({p})"),
            PositionalComponent::PredAtN(p) => write!(f, "pred_at_n({p})"),
        }
    }
}
