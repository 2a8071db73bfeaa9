//! Fixed-point midpoint/radius intervals over big integers.
//!
//! A [`Ball`] at precision `p` stands for every real in
//! `[(mid - rad) * 2^-p, (mid + rad) * 2^-p]`. Every operation rounds outward,
//! so the enclosure is always sound; callers only ever ask for a sign and
//! escalate `p` when zero is still inside.

use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    mid: BigInt,
    rad: BigInt,
    prec: u32,
}

fn ceil_shr(x: &BigInt, k: u32) -> BigInt {
    // x >= 0
    let q: BigInt = x >> k as usize;
    if (&q << k as usize) == *x {
        q
    } else {
        q + 1
    }
}

fn ceil_div(x: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = x.div_mod_floor(d);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

impl Ball {
    pub fn zero(prec: u32) -> Self {
        Ball { mid: BigInt::zero(), rad: BigInt::zero(), prec }
    }

    pub fn exact_int(v: i64, prec: u32) -> Self {
        Ball { mid: BigInt::from(v) << prec as usize, rad: BigInt::zero(), prec }
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        let num = r.numer() << prec as usize;
        let den = r.denom();
        let (q, rem) = num.div_mod_floor(&den);
        let rad = if rem.is_zero() { BigInt::zero() } else { BigInt::one() };
        Ball { mid: q, rad, prec }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Radius in units of `2^-prec`.
    pub fn radius_ulps(&self) -> &BigInt {
        &self.rad
    }

    pub fn add(&self, o: &Ball) -> Ball {
        debug_assert_eq!(self.prec, o.prec);
        Ball { mid: &self.mid + &o.mid, rad: &self.rad + &o.rad, prec: self.prec }
    }

    pub fn sub(&self, o: &Ball) -> Ball {
        debug_assert_eq!(self.prec, o.prec);
        Ball { mid: &self.mid - &o.mid, rad: &self.rad + &o.rad, prec: self.prec }
    }

    pub fn neg(&self) -> Ball {
        Ball { mid: -&self.mid, rad: self.rad.clone(), prec: self.prec }
    }

    pub fn mul(&self, o: &Ball) -> Ball {
        debug_assert_eq!(self.prec, o.prec);
        let p = self.prec as usize;
        let prod = &self.mid * &o.mid;
        let mid = &prod >> p;
        let trunc = if (&mid << p) == prod { 0 } else { 1 };
        let err = self.mid.abs() * &o.rad + o.mid.abs() * &self.rad + &self.rad * &o.rad;
        Ball { mid, rad: ceil_shr(&err, self.prec) + trunc, prec: self.prec }
    }

    pub fn mul_int(&self, k: i64) -> Ball {
        Ball { mid: &self.mid * k, rad: &self.rad * k.unsigned_abs(), prec: self.prec }
    }

    pub fn div_int(&self, d: u64) -> Ball {
        let d = BigInt::from(d);
        let (mid, rem) = self.mid.div_mod_floor(&d);
        let trunc = if rem.is_zero() { 0 } else { 1 };
        Ball { mid, rad: ceil_div(&self.rad, &d) + trunc, prec: self.prec }
    }

    pub fn mul_rational(&self, r: &Rational) -> Ball {
        let num = r.numer();
        let den = r.denom();
        let scaled = Ball { mid: &self.mid * &num, rad: &self.rad * num.abs(), prec: self.prec };
        let (mid, rem) = scaled.mid.div_mod_floor(&den);
        let trunc = if rem.is_zero() { 0 } else { 1 };
        Ball { mid, rad: ceil_div(&scaled.rad, &den) + trunc, prec: self.prec }
    }

    /// Widens the radius by `ulps` units.
    pub fn widen(&self, ulps: &BigInt) -> Ball {
        Ball { mid: self.mid.clone(), rad: &self.rad + ulps, prec: self.prec }
    }

    /// Sign of every point in the ball, or `None` when the ball straddles zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.mid > self.rad {
            Some(Ordering::Greater)
        } else if -&self.mid > self.rad {
            Some(Ordering::Less)
        } else if self.mid.is_zero() && self.rad.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Upper bound of `|x|` in ulps.
    pub fn magnitude_ulps(&self) -> BigInt {
        self.mid.abs() + &self.rad
    }

    /// True when every point of the ball is strictly below `2^-k` in absolute value.
    pub fn abs_below_pow2_neg(&self, k: u32) -> bool {
        if k > self.prec {
            return self.magnitude_ulps().is_zero();
        }
        self.magnitude_ulps() < (BigInt::one() << (self.prec - k) as usize)
    }

    pub fn mid_f64(&self) -> f64 {
        // Scale down in steps so that huge precisions do not overflow the exponent.
        let bits = self.mid.bits() as i64;
        let shift = (bits - 60).max(0);
        let m = (&self.mid >> shift as usize).to_f64().unwrap_or(0.0);
        let mut exp = shift - self.prec as i64;
        let mut v = m;
        while exp > 0 {
            let s = exp.min(60);
            v *= (1u64 << s) as f64;
            exp -= s;
        }
        while exp < 0 {
            let s = (-exp).min(60);
            v /= (1u64 << s) as f64;
            exp += s;
        }
        v
    }
}

/// `arctan(1/k)` at precision `prec`.
fn atan_inv(k: u64, prec: u32) -> Ball {
    let k2 = BigInt::from(k * k);
    let mut power: BigInt = (BigInt::one() << prec as usize) / k;
    let mut sum = BigInt::zero();
    let mut terms: u64 = 0;
    let mut j: u64 = 0;
    while !power.is_zero() {
        let term = &power / (2 * j + 1);
        if j.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &k2;
        j += 1;
        terms += 1;
    }
    // Each power carries < 2 ulps of accumulated truncation, each quotient one
    // more, and the remaining tail is below one ulp.
    Ball { mid: sum, rad: BigInt::from(3 * terms + 2), prec }
}

/// π via Machin's formula.
pub fn pi(prec: u32) -> Ball {
    atan_inv(5, prec).mul_int(16).sub(&atan_inv(239, prec).mul_int(4))
}

/// Enclosures of `(cos x, sin x)`.
pub fn cos_sin(x: &Ball) -> (Ball, Ball) {
    let prec = x.prec;
    // Halve until |x| <= 1/2, then undo with double-angle formulas.
    let half = BigInt::one() << (prec as usize).saturating_sub(1);
    let mut halvings = 0u32;
    let mut y = x.clone();
    while y.magnitude_ulps() > half {
        y = y.div_int(2);
        halvings += 1;
    }
    let (mut c, mut s) = taylor_cos_sin(&y);
    for _ in 0..halvings {
        let s2 = s.mul(&c).mul_int(2);
        let c2 = Ball::exact_int(1, prec).sub(&s.mul(&s).mul_int(2));
        c = c2;
        s = s2;
    }
    (c, s)
}

fn taylor_cos_sin(x: &Ball) -> (Ball, Ball) {
    let prec = x.prec;
    let x2 = x.mul(x);
    let cutoff = BigInt::from(256);
    let series = |first: Ball, offset: u64| {
        let mut sum = Ball::zero(prec);
        let mut term = first;
        let mut k: u64 = 0;
        loop {
            if term.magnitude_ulps() <= cutoff {
                // |x| <= 1/2: the alternating tail is bounded by twice the first omitted term.
                return sum.widen(&(&cutoff * 2));
            }
            sum = if k.is_multiple_of(2) { sum.add(&term) } else { sum.sub(&term) };
            let a = 2 * k + offset + 1;
            term = term.mul(&x2).div_int(a * (a + 1));
            k += 1;
        }
    };
    let cos = series(Ball::exact_int(1, prec), 0);
    let sin = series(x.clone(), 1);
    (cos, sin)
}
