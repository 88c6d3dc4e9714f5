//! Minkowski's question-mark function `?` on `[0, 1]`, its extension `?̄` to
//! the whole projective line, and the probability measure `?̄` defines.
//!
//! `?` sends the `(k+1)`-th term of the mediant sequence `ℱₙ` to `k / 2ⁿ`.
//! Two independent evaluators are provided: a Stern–Brocot descent that
//! halves a dyadic interval at each step, and the alternating sum over
//! partial quotients. They agree exactly on every rational.
//!
//! The extension is
//!
//! ```text
//! ?̄(x) = ( Σ_{k < m} 2^{−|k|} + ?({x}) · 2^{−|m|} ) / 3,   m = ⌊x⌋,
//! ```
//!
//! with the tail summed in closed form (`2^m` for `m ≤ 0`, `3 − 2^{1−m}` for
//! `m ≥ 1`), so every value at a rational point is an exact rational. The
//! measure gives `[m, m+1]` mass `2^{−|m|} / 3` and has no atom at `∞`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{Arc, ExtRational};
use crate::error::{Error, Result};

/// Largest `|⌊x⌋|` for which `?̄(x)` is evaluated exactly; beyond it the
/// scale factor `2^{−|m|}` no longer fits comfortably in memory.
pub const MAX_EXACT_INTEGER_PART: i64 = 1 << 24;

/// An exact dyadic rational `k / 2ⁿ`, kept with `k` odd or `n = 0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Dyadic {
    num: BigInt,
    exp: u64,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: u64) -> Self {
        let mut num = num.into();
        let mut exp = exp;
        if num.is_zero() {
            return Self { num, exp: 0 };
        }
        let tz = num.trailing_zeros().unwrap_or(0).min(exp);
        num >>= tz;
        exp -= tz;
        Self { num, exp }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u64 {
        self.exp
    }

    pub fn to_ratio(&self) -> BigRational {
        BigRational::new_raw(self.num.clone(), BigInt::one() << self.exp)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_ratio().to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, BigInt::one() << self.exp)
        }
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let x: ExtRational = s.parse()?;
        let den = x.den();
        let exp = den.trailing_zeros().unwrap_or(0);
        if x.is_infinite() || (den >> exp) != BigInt::one() {
            return Err(Error::Parse {
                input: s.to_string(),
                reason: "denominator is not a power of two",
            });
        }
        Ok(Self::new(x.num().clone(), exp))
    }
}

fn require_unit(x: &ExtRational) -> Result<()> {
    if *x < ExtRational::zero() || *x > ExtRational::one() {
        return Err(Error::Domain(format!("{x} is not in [0, 1]")));
    }
    Ok(())
}

/// `?(x)` by Stern–Brocot descent.
///
/// At depth `e` the current bracket carries the dyadic value interval
/// `[L/2ᵉ, (L+1)/2ᵉ]`; its mediant gets the midpoint `(2L+1)/2ᵉ⁺¹`. Going
/// left keeps the low half (`L ← 2L`), going right the high half
/// (`L ← 2L+1`).
pub fn question_mark(x: &ExtRational) -> Result<Dyadic> {
    require_unit(x)?;
    if *x == ExtRational::zero() {
        return Ok(Dyadic::new(0, 0));
    }
    if *x == ExtRational::one() {
        return Ok(Dyadic::new(1, 0));
    }
    let (mut lo, mut hi) = (ExtRational::zero(), ExtRational::one());
    let mut low = BigInt::zero();
    let mut exp = 0u64;
    loop {
        let mid = lo.mediant(&hi);
        let mid_value: BigInt = (&low << 1) + 1u32;
        match x.cmp(&mid) {
            std::cmp::Ordering::Equal => return Ok(Dyadic::new(mid_value, exp + 1)),
            std::cmp::Ordering::Less => {
                low <<= 1;
                hi = mid;
            }
            std::cmp::Ordering::Greater => {
                low = mid_value;
                lo = mid;
            }
        }
        exp += 1;
    }
}

/// `?(x)` from the continued fraction `[a₀; a₁, …, aₙ]`:
///
/// ```text
/// ?(x) = a₀ + 2 · Σ_{k=1}^{n} (−1)^{k+1} / 2^{a₁ + … + aₖ}
/// ```
///
/// The factor 2 is what makes this agree with the Farey construction
/// (`?(1/2) = 1/2`); without it every value below 1 would be halved.
pub fn question_mark_cf(x: &ExtRational) -> Result<Dyadic> {
    require_unit(x)?;
    let cf = x.continued_fraction().expect("finite");
    let (a0, tail) = cf.split_first().expect("non-empty expansion");
    let partial: Vec<u64> = tail
        .iter()
        .scan(0u64, |acc, a| {
            *acc += a.to_u64().expect("partial quotient fits in u64");
            Some(*acc)
        })
        .collect();
    let total = partial.last().copied().unwrap_or(0);
    let mut num = a0 << total;
    for (k, s) in partial.iter().enumerate() {
        let term = BigInt::one() << (total - s + 1);
        if k % 2 == 0 {
            num += term;
        } else {
            num -= term;
        }
    }
    Ok(Dyadic::new(num, total))
}

/// The rational `x ∈ [0, 1]` with `?(x) = d`, by descending on the binary
/// digits of `d`. Terminates after at most `exponent(d)` steps.
pub fn question_mark_inverse(d: &Dyadic) -> Result<ExtRational> {
    if d.num.is_negative() || d.num > (BigInt::one() << d.exp) {
        return Err(Error::Domain(format!("{d} is not in [0, 1]")));
    }
    if d.num.is_zero() {
        return Ok(ExtRational::zero());
    }
    if d.exp == 0 {
        return Ok(ExtRational::one());
    }
    let (mut lo, mut hi) = (ExtRational::zero(), ExtRational::one());
    let mut low = BigInt::zero();
    for e in 0..d.exp {
        let mid = lo.mediant(&hi);
        let mid_value: BigInt = (&low << 1) + 1u32;
        // compare d.num / 2^d.exp with mid_value / 2^(e+1)
        let lhs = &d.num << (e + 1);
        let rhs = &mid_value << d.exp;
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Equal => return Ok(mid),
            std::cmp::Ordering::Less => {
                low <<= 1;
                hi = mid;
            }
            std::cmp::Ordering::Greater => {
                low = mid_value;
                lo = mid;
            }
        }
    }
    unreachable!("canonical dyadic {d} is reached within its exponent")
}

fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e)
    } else {
        BigRational::new_raw(BigInt::one(), BigInt::one() << (-e))
    }
}

/// `Σ_{k=−∞}^{m−1} 2^{−|k|}` in closed form.
fn tail_sum(m: i64) -> BigRational {
    if m <= 0 {
        pow2(m)
    } else {
        BigRational::from_integer(BigInt::from(3)) - pow2(1 - m)
    }
}

/// `?̄(x)`, with `?̄(∞) = 1`.
pub fn mbar(x: &ExtRational) -> Result<BigRational> {
    let Some(m) = x.floor() else {
        return Ok(BigRational::one());
    };
    let m = m
        .to_i64()
        .filter(|m| m.abs() <= MAX_EXACT_INTEGER_PART)
        .ok_or_else(|| Error::Domain(format!("|⌊{x}⌋| is too large for exact evaluation")))?;
    let frac = ExtRational::new(x.num() - BigInt::from(m) * x.den(), x.den().clone())?;
    let inner = question_mark(&frac)?.to_ratio();
    Ok((tail_sum(m) + inner * pow2(-m.abs())) / BigInt::from(3))
}

/// `μ(A)` for the probability measure with distribution function `?̄`.
pub fn measure_arc(arc: &Arc) -> Result<BigRational> {
    let start = mbar(arc.start())?;
    let end = mbar(arc.end())?;
    Ok(if arc.wraps() {
        BigRational::one() - start + end
    } else {
        end - start
    })
}

/// Float `?(x)` for `x ∈ [0, 1]`, evaluated on the exact binary value of `x`.
/// Terms beyond `2^{−64}` are dropped.
pub fn question_mark_f64(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let r = BigRational::from_float(x).expect("finite");
    let (mut n, mut d) = (r.numer().clone(), r.denom().clone());
    // x < 1, so a₀ = 0
    std::mem::swap(&mut n, &mut d);
    let mut acc = 0.0f64;
    let mut sum = 0u64;
    let mut sign = 1.0;
    while !d.is_zero() {
        let (a, rem) = n.div_mod_floor(&d);
        sum = sum.saturating_add(a.to_u64().unwrap_or(u64::MAX));
        if sum > 66 {
            break;
        }
        acc += sign * 2f64.powi(1 - sum as i32);
        sign = -sign;
        n = std::mem::replace(&mut d, rem);
    }
    acc
}

/// Float `?̄(x)` on the extended real line; `±∞` map to `1` and `0`.
pub fn mbar_f64(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    let m = x.floor();
    let tail = if m <= 0.0 {
        m.exp2()
    } else {
        3.0 - (1.0 - m).exp2()
    };
    (tail + question_mark_f64(x - m) * (-m.abs()).exp2()) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use crate::farey::farey_sequence;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn r(n: i64, den: i64) -> BigRational {
        BigRational::new(n.into(), den.into())
    }

    #[test]
    fn dyadic_is_canonical() {
        assert_eq!(Dyadic::new(6, 4), Dyadic::new(3, 3));
        assert_eq!(Dyadic::new(0, 9), Dyadic::new(0, 0));
        assert_eq!(Dyadic::new(4, 2).to_string(), "1");
        assert_eq!(d("3/8").exponent(), 3);
        assert!("1/3".parse::<Dyadic>().is_err());
    }

    #[test]
    fn descent_examples() {
        assert_eq!(question_mark(&q(0, 1)).unwrap(), d("0"));
        assert_eq!(question_mark(&q(1, 2)).unwrap(), d("1/2"));
        assert_eq!(question_mark(&q(2, 5)).unwrap(), d("3/8"));
        assert_eq!(question_mark(&q(1, 1)).unwrap(), d("1"));
        assert!(question_mark(&q(3, 2)).is_err());
    }

    #[test]
    fn continued_fraction_examples() {
        assert_eq!(question_mark_cf(&q(1, 2)).unwrap(), d("1/2"));
        assert_eq!(question_mark_cf(&q(1, 3)).unwrap(), d("1/4"));
        assert_eq!(question_mark_cf(&q(1, 1)).unwrap(), d("1"));
        assert_eq!(question_mark_cf(&q(0, 1)).unwrap(), d("0"));
        assert_eq!(question_mark_cf(&q(2, 5)).unwrap(), d("3/8"));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(question_mark_inverse(&d("1/2")).unwrap(), q(1, 2));
        assert_eq!(question_mark_inverse(&d("3/8")).unwrap(), q(2, 5));
        assert_eq!(question_mark_inverse(&d("1/4")).unwrap(), q(1, 3));
        assert_eq!(question_mark_inverse(&d("0")).unwrap(), q(0, 1));
        assert_eq!(question_mark_inverse(&d("1")).unwrap(), q(1, 1));
        assert!(question_mark_inverse(&d("3/2")).is_err());
    }

    // ℱₙ indexing oracle: the term at index k of ℱₙ has value k / 2ⁿ.
    #[test]
    fn both_constructions_match_the_farey_index() {
        let seq = farey_sequence(10).unwrap();
        for (k, x) in seq.terms().iter().enumerate() {
            let expected = Dyadic::new(k, 10);
            assert_eq!(question_mark(x).unwrap(), expected, "{x}");
            assert_eq!(question_mark_cf(x).unwrap(), expected, "{x}");
            assert_eq!(question_mark_inverse(&expected).unwrap(), *x);
        }
    }

    #[test]
    fn midpoint_law_and_pair_gaps() {
        for n in 0..=10 {
            let seq = farey_sequence(n).unwrap();
            let gap = Dyadic::new(1, n.into()).to_ratio();
            for (p, r) in seq.pairs() {
                let (mp, mr) = (
                    question_mark(p).unwrap().to_ratio(),
                    question_mark(r).unwrap().to_ratio(),
                );
                assert_eq!(&mr - &mp, gap);
                let mid = question_mark(&p.mediant(r)).unwrap().to_ratio();
                assert_eq!(mid * BigInt::from(2), mp + mr);
            }
        }
    }

    #[test]
    fn mbar_examples() {
        assert_eq!(mbar(&q(0, 1)).unwrap(), r(1, 3));
        assert_eq!(mbar(&q(1, 1)).unwrap(), r(2, 3));
        assert_eq!(mbar(&q(-1, 1)).unwrap(), r(1, 6));
        assert_eq!(mbar(&q(2, 1)).unwrap(), r(5, 6));
        assert_eq!(mbar(&ExtRational::infinity()).unwrap(), r(1, 1));
        // ?̄(−1/2) = (2^{−1} + ?(1/2)·2^{−1}) / 3 = 1/4
        assert_eq!(mbar(&q(-1, 2)).unwrap(), r(1, 4));
        assert!(mbar(&q(-1000, 1)).unwrap() < r(1, 1 << 30));
        assert!(mbar(&q(1000, 1)).unwrap() > r((1 << 30) - 1, 1 << 30));
    }

    #[test]
    fn mbar_is_continuous_at_integers() {
        for m in -6i64..=6 {
            let left = (tail_sum(m - 1) + pow2(-(m - 1).abs())) / BigInt::from(3);
            assert_eq!(mbar(&q(m, 1)).unwrap(), left, "m = {m}");
        }
    }

    #[test]
    fn unit_intervals_have_geometric_mass() {
        for m in -10i64..=10 {
            let a = Arc::new(q(m, 1), q(m + 1, 1)).unwrap();
            assert_eq!(measure_arc(&a).unwrap(), pow2(-m.abs()) / BigInt::from(3));
        }
    }

    #[test]
    fn measure_examples() {
        let arc = |s: &str| s.parse::<Arc>().unwrap();
        assert_eq!(measure_arc(&arc("0..1")).unwrap(), r(1, 3));
        assert_eq!(measure_arc(&arc("1..0")).unwrap(), r(2, 3));
        assert_eq!(measure_arc(&arc("2..1/0")).unwrap(), r(1, 6));
        assert_eq!(measure_arc(&arc("1/0..-1")).unwrap(), r(1, 6));
        for n in 0..=6u32 {
            let seq = farey_sequence(n).unwrap();
            for (p, s) in seq.pairs() {
                let a = Arc::new(p.clone(), s.clone()).unwrap();
                assert_eq!(
                    measure_arc(&a).unwrap(),
                    pow2(-i64::from(n)) / BigInt::from(3)
                );
            }
        }
    }

    #[test]
    fn float_evaluators_track_exact_values() {
        let seq = farey_sequence(8).unwrap();
        for x in seq.terms() {
            let exact = question_mark(x).unwrap().to_f64();
            assert!((question_mark_f64(x.to_f64()) - exact).abs() < 1e-12, "{x}");
        }
        for (n, den) in [(-7, 3), (5, 2), (-1, 9), (13, 4), (0, 1)] {
            let x = q(n, den);
            let exact = mbar(&x).unwrap().to_f64().unwrap();
            assert!((mbar_f64(x.to_f64()) - exact).abs() < 1e-12, "{x}");
        }
        assert_eq!(mbar_f64(f64::INFINITY), 1.0);
        assert_eq!(mbar_f64(f64::NEG_INFINITY), 0.0);
        assert!(question_mark_f64(1e-300) < 1e-100);
    }
}
