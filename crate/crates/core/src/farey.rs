//! Mediant-interleaved Farey sequences on `[0, 1]` and Stern–Brocot descent.
//!
//! `ℱ₀ = (0, 1)` and `ℱₙ₊₁` inserts the mediant between every pair of
//! neighbours of `ℱₙ`, so `|ℱₙ| = 2ⁿ + 1`. This is not the classical
//! denominator-bounded Farey sequence.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::arith::ExtRational;
use crate::error::{check_cap, Error, Result};

pub const DEFAULT_LEVEL_CAP: u32 = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FareySequence {
    level: u32,
    terms: Vec<ExtRational>,
}

impl FareySequence {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn terms(&self) -> &[ExtRational] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Zero-based index of `x`, by binary search on the increasing terms.
    pub fn position(&self, x: &ExtRational) -> Option<usize> {
        self.terms.binary_search(x).ok()
    }

    /// Consecutive pairs `(sᵢ, sᵢ₊₁)`.
    pub fn pairs(&self) -> impl Iterator<Item = (&ExtRational, &ExtRational)> {
        self.terms.windows(2).map(|w| (&w[0], &w[1]))
    }

    /// One step of the recurrence.
    pub fn refine(&self) -> Self {
        let mut terms = Vec::with_capacity(2 * self.terms.len() - 1);
        for w in self.terms.windows(2) {
            terms.push(w[0].clone());
            terms.push(w[0].mediant(&w[1]));
        }
        terms.extend(self.terms.last().cloned());
        Self {
            level: self.level + 1,
            terms,
        }
    }
}

pub fn farey_sequence(level: u32) -> Result<FareySequence> {
    farey_sequence_capped(level, DEFAULT_LEVEL_CAP)
}

pub fn farey_sequence_capped(level: u32, cap: u32) -> Result<FareySequence> {
    check_cap("Farey level", level.into(), cap.into())?;
    let mut seq = FareySequence {
        level: 0,
        terms: vec![ExtRational::zero(), ExtRational::one()],
    };
    while seq.level < level {
        seq = seq.refine();
    }
    Ok(seq)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Left,
    Right,
}

/// A descent in the Stern–Brocot tree of `(0, 1)`. The empty path is the
/// root mediant `1/2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DescentPath(Vec<Step>);

impl DescentPath {
    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for DescentPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for s in &self.0 {
            f.write_str(match s {
                Step::Left => "L",
                Step::Right => "R",
            })?;
        }
        Ok(())
    }
}

fn require_open_unit(x: &ExtRational) -> Result<()> {
    if *x <= ExtRational::zero() || *x >= ExtRational::one() {
        return Err(Error::Domain(format!("{x} is not in the open interval (0, 1)")));
    }
    Ok(())
}

/// The Left/Right descent from the bracket `(0, 1)` whose final mediant is `x`.
///
/// Walks one mediant at a time, so the path length is the sum of the partial
/// quotients of `x` minus two.
pub fn stern_brocot_path(x: &ExtRational) -> Result<DescentPath> {
    require_open_unit(x)?;
    let mut lo = ExtRational::zero();
    let mut hi = ExtRational::one();
    let mut steps = Vec::new();
    loop {
        let mid = lo.mediant(&hi);
        match x.cmp(&mid) {
            std::cmp::Ordering::Equal => return Ok(DescentPath(steps)),
            std::cmp::Ordering::Less => {
                steps.push(Step::Left);
                hi = mid;
            }
            std::cmp::Ordering::Greater => {
                steps.push(Step::Right);
                lo = mid;
            }
        }
    }
}

/// Depth of `x ∈ (0, 1)` in the Stern–Brocot tree, from its partial
/// quotients: `[0; a₁, …, aₖ]` sits at depth `a₁ + … + aₖ − 2`.
fn tree_depth(x: &ExtRational) -> Result<u64> {
    let cf = x.continued_fraction().expect("finite");
    let sum: BigInt = cf.iter().skip(1).sum();
    (sum - 2u32)
        .to_u64()
        .ok_or_else(|| Error::Domain(format!("depth of {x} does not fit in 64 bits")))
}

/// The level `n` of `ℱₙ` in which `x ∈ [0, 1]` first appears.
pub fn first_level(x: &ExtRational) -> Result<u64> {
    if *x == ExtRational::zero() || *x == ExtRational::one() {
        return Ok(0);
    }
    require_open_unit(x)?;
    Ok(tree_depth(x)? + 1)
}

/// The least `n` with `p, q` adjacent in `ℱₙ`, or `None` when `p, q` are not
/// a Farey pair.
///
/// The mediant `p ⊕ q` first appears one level after the pair becomes
/// adjacent, so the level is the tree depth of the mediant. No sequence is
/// materialized.
pub fn farey_pair_level(p: &ExtRational, q: &ExtRational) -> Result<Option<u64>> {
    let (zero, one) = (ExtRational::zero(), ExtRational::one());
    if !(zero <= *p && p < q && *q <= one) {
        return Err(Error::Domain(format!(
            "expected 0 ≤ p < q ≤ 1, got p = {p}, q = {q}"
        )));
    }
    if !ExtRational::cross(p, q).is_one() {
        return Ok(None);
    }
    tree_depth(&p.mediant(q)).map(Some)
}
