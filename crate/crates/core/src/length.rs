//! Exact lengths in the field `Q + Q*sqrt(2)`.
//!
//! Every brick corner is a dyadic multiple of a power of `sqrt(2)`, so all
//! coordinates produced by the packers are closed under `+`, `-` and `*` in
//! this field. Comparisons are decided exactly: the sign of `a + b*sqrt(2)`
//! reduces to comparing `a^2` with `2*b^2` when `a` and `b` disagree in sign.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// A number `rational + radical * sqrt(2)` with both parts exact rationals.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Length {
    rational: BigRational,
    radical: BigRational,
}

impl Length {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    /// `num / den`. Panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(rational: BigRational) -> Self {
        Self {
            rational,
            radical: BigRational::zero(),
        }
    }

    pub fn from_parts(rational: BigRational, radical: BigRational) -> Self {
        Self { rational, radical }
    }

    /// The exact binary value of a finite float.
    pub fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Self::from_rational)
    }

    pub fn sqrt2() -> Self {
        Self {
            rational: BigRational::zero(),
            radical: BigRational::one(),
        }
    }

    /// `2^exp` for any integer exponent.
    pub fn pow2(exp: i32) -> Self {
        Self::from_rational(pow2_rational(exp))
    }

    /// `sqrt(2)^exp` for any integer exponent.
    pub fn sqrt2_pow(exp: i32) -> Self {
        let half = exp.div_euclid(2);
        if exp.rem_euclid(2) == 0 {
            Self::pow2(half)
        } else {
            Self {
                rational: BigRational::zero(),
                radical: pow2_rational(half),
            }
        }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn radical_part(&self) -> &BigRational {
        &self.radical
    }

    pub fn is_rational(&self) -> bool {
        self.radical.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.radical.is_zero()
    }

    pub fn signum(&self) -> Ordering {
        let a = self.rational.signum();
        let b = self.radical.signum();
        let zero = BigRational::zero();
        match (a.cmp(&zero), b.cmp(&zero)) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (sa, sb) if sa == sb => sa,
            (sa, _) => {
                let a2 = &self.rational * &self.rational;
                let b2 = &self.radical * &self.radical * BigRational::from_integer(2.into());
                // |a| vs |b| sqrt2 decides; the sign follows the dominant term.
                match a2.cmp(&b2) {
                    Ordering::Equal => Ordering::Equal,
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn half(&self) -> Self {
        let two = BigRational::from_integer(2.into());
        Self {
            rational: &self.rational / &two,
            radical: &self.radical / &two,
        }
    }

    pub fn scale(&self, factor: i64) -> Self {
        let f = BigRational::from_integer(factor.into());
        Self {
            rational: &self.rational * &f,
            radical: &self.radical * &f,
        }
    }

    /// Float view. Cancellation between the two parts is avoided by going
    /// through the conjugate.
    pub fn to_f64(&self) -> f64 {
        let a = ratio_f64(&self.rational);
        let b = ratio_f64(&self.radical);
        if self.rational.signum() * self.radical.signum() >= BigRational::zero() {
            return a + b * std::f64::consts::SQRT_2;
        }
        let norm = &self.rational * &self.rational
            - &self.radical * &self.radical * BigRational::from_integer(2.into());
        let conj = a - b * std::f64::consts::SQRT_2;
        ratio_f64(&norm) / conj
    }

    /// Exact textual form: `p/q`, `p/q*sqrt2`, or `p/q+r/s*sqrt2`.
    pub fn exact_string(&self) -> String {
        let fmt_q = |q: &BigRational| {
            if q.is_integer() {
                q.numer().to_string()
            } else {
                format!("{}/{}", q.numer(), q.denom())
            }
        };
        match (self.rational.is_zero(), self.radical.is_zero()) {
            (_, true) => fmt_q(&self.rational),
            (true, false) => format!("{}*sqrt2", fmt_q(&self.radical)),
            (false, false) => {
                let sign = if self.radical.is_negative() { "-" } else { "+" };
                format!(
                    "{}{}{}*sqrt2",
                    fmt_q(&self.rational),
                    sign,
                    fmt_q(&self.radical.abs())
                )
            }
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // (a + b r)^-1 = (a - b r) / (a^2 - 2 b^2); the norm is non-zero since sqrt2 is irrational.
        let norm = &self.rational * &self.rational
            - &self.radical * &self.radical * BigRational::from_integer(2.into());
        Some(Self {
            rational: &self.rational / &norm,
            radical: -&self.radical / &norm,
        })
    }
}

fn pow2_rational(exp: i32) -> BigRational {
    let p = BigInt::one() << exp.unsigned_abs();
    if exp >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

fn ratio_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Debug for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (~{})", self.exact_string(), self.to_f64())
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl Serialize for Length {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

impl PartialOrd for Length {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Length {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl From<i64> for Length {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<'a, 'b> $trait<&'b Length> for &'a Length {
            type Output = Length;
            fn $method(self, rhs: &'b Length) -> Length {
                let f: fn(&Length, &Length) -> Length = $body;
                f(self, rhs)
            }
        }
        impl $trait<Length> for Length {
            type Output = Length;
            fn $method(self, rhs: Length) -> Length {
                (&self).$method(&rhs)
            }
        }
        impl<'b> $trait<&'b Length> for Length {
            type Output = Length;
            fn $method(self, rhs: &'b Length) -> Length {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<Length> for &'a Length {
            type Output = Length;
            fn $method(self, rhs: Length) -> Length {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Length {
    rational: &a.rational + &b.rational,
    radical: &a.radical + &b.radical,
});
binop!(Sub, sub, |a, b| Length {
    rational: &a.rational - &b.rational,
    radical: &a.radical - &b.radical,
});
binop!(Mul, mul, |a, b| {
    let two = BigRational::from_integer(2.into());
    Length {
        rational: &a.rational * &b.rational + &a.radical * &b.radical * two,
        radical: &a.rational * &b.radical + &a.radical * &b.rational,
    }
});
binop!(Div, div, |a, b| a * &b.recip().expect("division by zero length"));

impl AddAssign<&Length> for Length {
    fn add_assign(&mut self, rhs: &Length) {
        self.rational += &rhs.rational;
        self.radical += &rhs.radical;
    }
}

impl AddAssign<Length> for Length {
    fn add_assign(&mut self, rhs: Length) {
        *self += &rhs;
    }
}

impl SubAssign<&Length> for Length {
    fn sub_assign(&mut self, rhs: &Length) {
        self.rational -= &rhs.rational;
        self.radical -= &rhs.radical;
    }
}

impl Neg for Length {
    type Output = Length;
    fn neg(self) -> Length {
        Length {
            rational: -self.rational,
            radical: -self.radical,
        }
    }
}

impl Neg for &Length {
    type Output = Length;
    fn neg(self) -> Length {
        Length {
            rational: -&self.rational,
            radical: -&self.radical,
        }
    }
}

impl Sum for Length {
    fn sum<I: Iterator<Item = Length>>(iter: I) -> Self {
        iter.fold(Length::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Length> for Length {
    fn sum<I: Iterator<Item = &'a Length>>(iter: I) -> Self {
        iter.fold(Length::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}
