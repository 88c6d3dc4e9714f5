use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A point of the projective line `ℝ ∪ {∞}` with rational coordinate.
///
/// Always stored reduced with a non-negative denominator. Infinity is the
/// single value `1/0`; there is no signed infinity. The total order places
/// `∞` above every finite value, which is the order obtained by cutting the
/// circle at `∞`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExtRational {
    num: BigInt,
    den: BigInt,
}

impl ExtRational {
    /// Builds `num/den` in lowest terms.
    ///
    /// `0/0` is rejected, and so is a negative numerator over zero: `∞` has
    /// exactly one spelling.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let (num, den) = (num.into(), den.into());
        if den.is_zero() {
            return if num.is_positive() {
                Ok(Self::infinity())
            } else {
                Err(Error::Domain(format!("{num}/0 is not a valid point")))
            };
        }
        Ok(Self::reduce(num, den))
    }

    /// Builds the point `[x : y]` of the projective line, so `(x, 0)` is `∞`
    /// for either sign of `x`. Panics on `(0, 0)`.
    pub fn from_projective(x: BigInt, y: BigInt) -> Self {
        if y.is_zero() {
            assert!(!x.is_zero(), "(0, 0) is not a projective point");
            return Self::infinity();
        }
        Self::reduce(x, y)
    }

    fn reduce(mut num: BigInt, mut den: BigInt) -> Self {
        debug_assert!(!den.is_zero());
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let g = num.gcd(&den);
        if !g.is_one() {
            num /= &g;
            den /= &g;
        }
        Self { num, den }
    }

    pub fn infinity() -> Self {
        Self {
            num: BigInt::one(),
            den: BigInt::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Self {
            num: n.into(),
            den: BigInt::one(),
        }
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_infinite(&self) -> bool {
        self.den.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    /// The finite value as an ordinary rational, `None` for `∞`.
    pub fn to_ratio(&self) -> Option<BigRational> {
        (!self.is_infinite()).then(|| BigRational::new_raw(self.num.clone(), self.den.clone()))
    }

    pub fn from_ratio(r: &BigRational) -> Self {
        Self::reduce(r.numer().clone(), r.denom().clone())
    }

    /// Exact value of a finite float (every finite `f64` is a dyadic rational).
    pub fn from_f64(x: f64) -> Option<Self> {
        if x.is_infinite() {
            return Some(Self::infinity());
        }
        BigRational::from_float(x).map(|r| Self::from_ratio(&r))
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_infinite() {
            return f64::INFINITY;
        }
        match (self.num.to_f64(), self.den.to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => BigRational::new_raw(self.num.clone(), self.den.clone())
                .to_f64()
                .unwrap_or(f64::NAN),
        }
    }

    /// `⌊x⌋`, `None` for `∞`.
    pub fn floor(&self) -> Option<BigInt> {
        (!self.is_infinite()).then(|| self.num.div_floor(&self.den))
    }

    /// `(p₁ + p₂) / (q₁ + q₂)` in lowest terms. Adjacent Farey terms give an
    /// already reduced result.
    pub fn mediant(&self, other: &Self) -> Self {
        let num = &self.num + &other.num;
        let den = &self.den + &other.den;
        if den.is_zero() {
            // both operands are ∞
            return Self::infinity();
        }
        Self::reduce(num, den)
    }

    /// Regular continued fraction `[a₀; a₁, …, aₖ]` of a finite value, with
    /// `aₖ ≥ 2` whenever `k ≥ 1`. `None` for `∞`.
    pub fn continued_fraction(&self) -> Option<Vec<BigInt>> {
        if self.is_infinite() {
            return None;
        }
        let (mut n, mut d) = (self.num.clone(), self.den.clone());
        let mut terms = Vec::new();
        while !d.is_zero() {
            let (a, r) = n.div_mod_floor(&d);
            terms.push(a);
            n = std::mem::replace(&mut d, r);
        }
        Some(terms)
    }

    /// `q.num·p.den − p.num·q.den`; equals 1 exactly when `p < q` are Farey neighbours.
    pub(crate) fn cross(p: &Self, q: &Self) -> BigInt {
        &q.num * &p.den - &p.num * &q.den
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (&self.num * &other.den).cmp(&(&other.num * &self.den)),
        }
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for ExtRational {
    type Err = Error;

    /// Accepts `p/q`, a bare integer `p`, and `inf`/`∞` as aliases for `1/0`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = |reason| Error::Parse {
            input: s.to_string(),
            reason,
        };
        if matches!(t, "inf" | "∞" | "+inf" | "infinity") {
            return Ok(Self::infinity());
        }
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: BigInt = n.parse().map_err(|_| bad("numerator is not an integer"))?;
        let den: BigInt = d.parse().map_err(|_| bad("denominator is not an integer"))?;
        if den.is_zero() && !num.is_positive() {
            return Err(bad("the only point at infinity is 1/0"));
        }
        Self::new(num, den)
    }
}

impl From<i64> for ExtRational {
    fn from(n: i64) -> Self {
        Self::integer(n)
    }
}

/// Shorthand used throughout the tests: `q(p, q)` is the reduced `p/q`.
pub fn q(num: i64, den: i64) -> ExtRational {
    ExtRational::new(num, den).expect("valid rational literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_normalizes_sign() {
        assert_eq!(q(2, 4), q(1, 2));
        assert_eq!(q(3, -6), q(-1, 2));
        assert_eq!(q(-3, -6).to_string(), "1/2");
        assert_eq!(q(0, -5), ExtRational::zero());
        assert_eq!(q(7, 0), ExtRational::infinity());
        assert_eq!(q(7, 0).num(), &BigInt::one());
    }

    #[test]
    fn rejects_signed_and_undefined_infinity() {
        assert!(ExtRational::new(-1, 0).is_err());
        assert!(ExtRational::new(0, 0).is_err());
        assert!("-1/0".parse::<ExtRational>().is_err());
        assert!("0/0".parse::<ExtRational>().is_err());
    }

    #[test]
    fn projective_infinity_ignores_sign() {
        let x = ExtRational::from_projective(BigInt::from(-3), BigInt::zero());
        assert!(x.is_infinite());
        assert_eq!(x.to_string(), "1/0");
    }

    #[test]
    fn mediant_examples() {
        assert_eq!(q(0, 1).mediant(&q(1, 1)), q(1, 2));
        assert_eq!(ExtRational::infinity().mediant(&q(0, 1)), q(1, 1));
        assert_eq!(q(1, 3).mediant(&q(1, 2)), q(2, 5));
    }

    #[test]
    fn order_puts_infinity_last() {
        let mut v = vec![ExtRational::infinity(), q(1, 2), q(-7, 3), q(0, 1)];
        v.sort();
        assert_eq!(v, vec![q(-7, 3), q(0, 1), q(1, 2), ExtRational::infinity()]);
    }

    #[test]
    fn parse_and_display() {
        for s in ["1/0", "0", "1", "-3/7", "22/7"] {
            assert_eq!(s.parse::<ExtRational>().unwrap().to_string(), s);
        }
        assert_eq!("6/4".parse::<ExtRational>().unwrap().to_string(), "3/2");
        assert_eq!("inf".parse::<ExtRational>().unwrap(), ExtRational::infinity());
        assert!("x/2".parse::<ExtRational>().is_err());
    }

    #[test]
    fn floor_of_negative_fraction() {
        assert_eq!(q(-1, 2).floor(), Some(BigInt::from(-1)));
        assert_eq!(q(7, 3).floor(), Some(BigInt::from(2)));
        assert_eq!(ExtRational::infinity().floor(), None);
    }

    #[test]
    fn continued_fractions() {
        let cf = |x: ExtRational| -> Vec<i64> {
            x.continued_fraction()
                .unwrap()
                .iter()
                .map(|t| t.to_i64().unwrap())
                .collect()
        };
        assert_eq!(cf(q(2, 5)), vec![0, 2, 2]);
        assert_eq!(cf(q(3, 5)), vec![0, 1, 1, 2]);
        assert_eq!(cf(q(-1, 2)), vec![-1, 2]);
        assert_eq!(cf(q(4, 1)), vec![4]);
        assert!(ExtRational::infinity().continued_fraction().is_none());
    }

    #[test]
    fn float_roundtrip_is_exact() {
        let x = ExtRational::from_f64(0.1).unwrap();
        assert_eq!(x.to_f64(), 0.1);
        assert_eq!(x.den().bits(), 56);
        assert!(ExtRational::from_f64(f64::NAN).is_none());
    }
}
