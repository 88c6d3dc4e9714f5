//! Finitely supported probability measures on `SL(2, ℝ)`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use farey_orbits::group::Letter;

use crate::error::{Result, WalkError};

pub type Mat2 = [[f64; 2]; 2];

pub const DET_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub matrix: Mat2,
    pub prob: BigRational,
}

/// Atoms with exact probabilities, plus an integer sampling table: atom `i`
/// owns `weights[i]` of the `total` equally likely tickets.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkMeasure {
    atoms: Vec<Atom>,
    cumulative: Vec<u64>,
    total: u64,
}

#[derive(Serialize, Deserialize)]
struct AtomFile {
    matrix: Mat2,
    prob: String,
}

#[derive(Serialize, Deserialize)]
struct MeasureFile {
    atoms: Vec<AtomFile>,
}

impl WalkMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(WalkError::Measure("no atoms".into()));
        }
        let mut sum = BigRational::zero();
        let mut lcm = BigInt::one();
        for (i, atom) in atoms.iter().enumerate() {
            let [[a, b], [c, d]] = atom.matrix;
            if !(a.is_finite() && b.is_finite() && c.is_finite() && d.is_finite()) {
                return Err(WalkError::Measure(format!("atom {i} has a non-finite entry")));
            }
            let det = a * d - b * c;
            if (det - 1.0).abs() > DET_TOLERANCE {
                return Err(WalkError::Measure(format!(
                    "atom {i} has determinant {det}, expected 1"
                )));
            }
            if !atom.prob.is_positive() {
                return Err(WalkError::Measure(format!(
                    "atom {i} has non-positive probability {}",
                    atom.prob
                )));
            }
            sum += &atom.prob;
            lcm = lcm.lcm(atom.prob.denom());
        }
        if !sum.is_one() {
            return Err(WalkError::Measure(format!("probabilities sum to {sum}, expected 1")));
        }
        let total = lcm
            .to_u64()
            .filter(|&t| t <= 1 << 62)
            .ok_or_else(|| WalkError::Measure("probability denominators are too large".into()))?;
        let mut acc = 0u64;
        let cumulative = atoms
            .iter()
            .map(|atom| {
                acc += (&atom.prob * &lcm).to_integer().to_u64().expect("bounded by lcm");
                acc
            })
            .collect();
        Ok(Self {
            atoms,
            cumulative,
            total,
        })
    }

    /// Uniform on the three generators of the Farey group.
    pub fn farey() -> Self {
        let third = BigRational::new(1.into(), 3.into());
        let atoms = Letter::ALL
            .into_iter()
            .map(|s| {
                let m = s.matrix();
                let [a, b, c, d] = m.entries().map(|e| e.to_f64().expect("small entry"));
                Atom {
                    matrix: [[a, b], [c, d]],
                    prob: third.clone(),
                }
            })
            .collect();
        Self::new(atoms).expect("valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MeasureFile = serde_json::from_str(text)?;
        let atoms = file
            .atoms
            .into_iter()
            .enumerate()
            .map(|(i, a)| {
                let prob = BigRational::from_str(a.prob.trim()).map_err(|_| {
                    WalkError::Measure(format!(
                        "atom {i}: probability {:?} is not an exact rational",
                        a.prob
                    ))
                })?;
                Ok(Atom {
                    matrix: a.matrix,
                    prob,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms)
    }

    pub fn to_json(&self) -> String {
        let file = MeasureFile {
            atoms: self
                .atoms
                .iter()
                .map(|a| AtomFile {
                    matrix: a.matrix,
                    prob: a.prob.to_string(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Draws an atom index with exactly the stated probabilities.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.atoms.len() == 1 {
            return 0;
        }
        let ticket = rng.gen_range(0..self.total);
        self.cumulative.partition_point(|&c| c <= ticket)
    }
}
