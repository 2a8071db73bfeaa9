//! Exact rationals with an `i64` fast path.
//!
//! Almost every quantity flowing through a compiled model is a small integer or
//! a fraction like `1/(i+1)`, so arithmetic first tries checked `i64` ratios and
//! only falls back to big integers on overflow. Values are kept normalized: the
//! `Big` variant is only used when the value does not fit the small range, which
//! makes structural equality coincide with numeric equality.

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

const SMALL_LIMIT: i64 = 1 << 62;

#[derive(Clone, Debug)]
pub enum Rational {
    Small(Ratio<i64>),
    Big(BigRational),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational literal {0:?}")]
pub struct ParseRationalError(pub String);

impl Rational {
    pub fn zero() -> Self {
        Rational::Small(Ratio::from_integer(0))
    }

    pub fn one() -> Self {
        Rational::Small(Ratio::from_integer(1))
    }

    pub fn from_int(v: i64) -> Self {
        Rational::from_big(BigRational::from_integer(BigInt::from(v)))
    }

    /// `num / den`; panics when `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational::from_big(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Rational::from_big(BigRational::new(num, den))
    }

    pub fn from_big(r: BigRational) -> Self {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n > -SMALL_LIMIT && n < SMALL_LIMIT && d < SMALL_LIMIT {
                return Rational::Small(Ratio::new_raw(n, d));
            }
        }
        Rational::Big(r)
    }

    fn from_small(r: Ratio<i64>) -> Self {
        let (n, d) = (*r.numer(), *r.denom());
        if n > -SMALL_LIMIT && n < SMALL_LIMIT && d < SMALL_LIMIT {
            Rational::Small(r)
        } else {
            Rational::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(r) => BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Rational::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rational::Small(r) => BigInt::from(*r.numer()),
            Rational::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rational::Small(r) => BigInt::from(*r.denom()),
            Rational::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Rational::Small(r) => r.is_zero(),
            Rational::Big(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Rational::Small(r) if *r.numer() == 1 && *r.denom() == 1)
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rational::Small(r) => r.is_integer(),
            Rational::Big(r) => r.is_integer(),
        }
    }

    pub fn signum(&self) -> Ordering {
        match self {
            Rational::Small(r) => r.numer().cmp(&0),
            Rational::Big(r) => match r.numer().sign() {
                Sign::Minus => Ordering::Less,
                Sign::NoSign => Ordering::Equal,
                Sign::Plus => Ordering::Greater,
            },
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Rational::Small(r) => Rational::Small(r.abs()),
            Rational::Big(r) => Rational::Big(r.abs()),
        }
    }

    /// Integer value, when this is an integer that fits in `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Rational::Small(r) if r.is_integer() => Some(*r.numer()),
            Rational::Big(r) if r.is_integer() => r.numer().to_i64(),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Rational::Small(r) => *r.numer() as f64 / *r.denom() as f64,
            Rational::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn checked_div(&self, other: &Rational) -> Option<Rational> {
        if other.is_zero() {
            return None;
        }
        if let (Rational::Small(a), Rational::Small(b)) = (self, other) {
            if let Some(r) = a.checked_div(b) {
                return Some(Rational::from_small(r));
            }
        }
        Some(Rational::from_big(self.to_big() / other.to_big()))
    }

    /// `2^-k` as an exact rational.
    pub fn pow2_neg(k: u32) -> Rational {
        Rational::from_bigints(BigInt::one(), BigInt::one() << k as usize)
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_int(v)
    }
}

impl From<BigRational> for Rational {
    fn from(v: BigRational) -> Self {
        Rational::from_big(v)
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Rational::Small(a), Rational::Small(b)) => a == b,
            (Rational::Big(a), Rational::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.numer().hash(state);
        self.denom().hash(state);
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rational::Small(a), Rational::Small(b)) => {
                // Cross-multiplication fits in i128 because both sides are below 2^62.
                let lhs = *a.numer() as i128 * *b.denom() as i128;
                let rhs = *b.numer() as i128 * *a.denom() as i128;
                lhs.cmp(&rhs)
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                if let (Rational::Small(a), Rational::Small(b)) = (self, rhs) {
                    if let Some(r) = a.$checked(b) {
                        return Rational::from_small(r);
                    }
                }
                Rational::from_big(self.to_big().$method(rhs.to_big()))
            }
        }

        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        &self / &rhs
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self {
            Rational::Small(r) => Rational::Small(-*r),
            Rational::Big(r) => Rational::from_big(-r.clone()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

/// Canonical form: `p` for integers, `p/q` otherwise, with `gcd(p, q) = 1` and `q > 0`.
impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Rational::Small(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Rational::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Rational::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

/// Accepts `p` or `p/q` with an optional leading `-`. Non-canonical input such
/// as `2/4` is accepted and reduced; callers that need canonical text compare
/// against `to_string()`.
impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let parse_int = |t: &str| -> Result<BigInt, ParseRationalError> {
            let digits = t.strip_prefix('-').unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            t.parse::<BigInt>().map_err(|_| err())
        };
        match s.split_once('/') {
            None => Ok(Rational::from_big(BigRational::from_integer(parse_int(s)?))),
            Some((p, q)) => {
                let q = parse_int(q)?;
                if q.is_zero() || q.is_negative() {
                    return Err(err());
                }
                Ok(Rational::from_big(BigRational::new(parse_int(p)?, q)))
            }
        }
    }
}
