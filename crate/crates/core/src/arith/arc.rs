use std::fmt;
use std::str::FromStr;

use super::{ExtRational, IntMatrix2};
use crate::error::{Error, Result};

/// A closed arc of the circle `ℝ ∪ {∞}`, running from `start` to `end` in the
/// direction of increasing reals and wrapping through `∞` when `start > end`.
///
/// Endpoints are distinct, so neither the full circle nor a single point is an
/// arc; measures of the full circle are taken as the sum of two complementary
/// arcs.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Arc {
    start: ExtRational,
    end: ExtRational,
}

impl Arc {
    pub fn new(start: ExtRational, end: ExtRational) -> Result<Self> {
        if start == end {
            return Err(Error::DegenerateArc(start.to_string()));
        }
        Ok(Self { start, end })
    }

    pub fn start(&self) -> &ExtRational {
        &self.start
    }

    pub fn end(&self) -> &ExtRational {
        &self.end
    }

    /// True when the arc passes through `∞` or starts there, i.e. it is not a
    /// plain real interval `[start, end]` (possibly ending at `∞`).
    pub fn wraps(&self) -> bool {
        self.start > self.end
    }

    /// Closure of the complementary arc: same endpoints, swapped.
    pub fn complement(&self) -> Self {
        Self {
            start: self.end.clone(),
            end: self.start.clone(),
        }
    }

    pub fn contains(&self, x: &ExtRational) -> bool {
        if self.wraps() {
            *x >= self.start || *x <= self.end
        } else {
            self.start <= *x && *x <= self.end
        }
    }

    /// Image under a determinant-one matrix. Orientation-preserving maps send
    /// the arc between two points to the arc between their images.
    pub fn image(&self, g: &IntMatrix2) -> Self {
        Self {
            start: g.apply(&self.start),
            end: g.apply(&self.end),
        }
    }
}

/// True when `x, y, z` are distinct and met in this order when travelling
/// around the circle in the increasing direction.
pub fn cyclically_ordered(x: &ExtRational, y: &ExtRational, z: &ExtRational) -> bool {
    if x == y || y == z || x == z {
        return false;
    }
    Arc {
        start: x.clone(),
        end: z.clone(),
    }
    .contains(y)
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

impl FromStr for Arc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once("..").ok_or_else(|| Error::Parse {
            input: s.to_string(),
            reason: "expected start..end",
        })?;
        Self::new(a.parse()?, b.parse()?)
    }
}
