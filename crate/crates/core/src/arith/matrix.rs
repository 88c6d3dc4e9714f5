use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::ExtRational;
use crate::error::{Error, Result};

/// A determinant-one integer matrix `[[a, b], [c, d]]` taken modulo `±I`.
///
/// The sign is fixed so that the lower row is canonical: `c > 0`, or `c = 0`
/// and `d > 0`. Two matrices are equal in `PSL(2, ℤ)` iff they are equal as
/// values of this type.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix2 {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl IntMatrix2 {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<Self> {
        let (a, b, c, d) = (a.into(), b.into(), c.into(), d.into());
        let det = &a * &d - &b * &c;
        if !det.is_one() {
            return Err(Error::Domain(format!(
                "determinant of [[{a}, {b}], [{c}, {d}]] is {det}, expected 1"
            )));
        }
        Ok(Self::normalized(a, b, c, d))
    }

    fn normalized(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        let keep = c.is_positive() || (c.is_zero() && d.is_positive());
        if keep {
            Self { a, b, c, d }
        } else {
            Self {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        }
    }

    pub fn identity() -> Self {
        Self {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::zero(),
            d: BigInt::one(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::normalized(
            &self.a * &rhs.a + &self.b * &rhs.c,
            &self.a * &rhs.b + &self.b * &rhs.d,
            &self.c * &rhs.a + &self.d * &rhs.c,
            &self.c * &rhs.b + &self.d * &rhs.d,
        )
    }

    /// Inverse in `PSL(2, ℤ)`: `[[d, −b], [−c, a]]`.
    pub fn inverse(&self) -> Self {
        Self::normalized(
            self.d.clone(),
            -self.b.clone(),
            -self.c.clone(),
            self.a.clone(),
        )
    }

    /// The Möbius action `x ↦ (a·x + b) / (c·x + d)` on `ℝ ∪ {∞}`.
    ///
    /// A unimodular matrix maps a primitive vector to a primitive vector, so
    /// the image needs no gcd reduction, only a sign fix.
    pub fn apply(&self, x: &ExtRational) -> ExtRational {
        let (p, q) = (x.num(), x.den());
        let num = &self.a * p + &self.b * q;
        let den = &self.c * p + &self.d * q;
        ExtRational::from_projective(num, den)
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Debug for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
