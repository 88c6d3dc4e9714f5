//! Independent random walks `gₙ ⋯ g₁ x₀` with renormalized log-norm
//! accumulation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::measure::WalkMeasure;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub steps: u32,
    pub walks: u64,
    pub seed: u64,
    pub x0: [f64; 2],
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(WalkError::Config("steps must be at least 1".into()));
        }
        if self.walks == 0 {
            return Err(WalkError::Config("walks must be at least 1".into()));
        }
        let [x, y] = self.x0;
        if !(x.is_finite() && y.is_finite()) || (x == 0.0 && y == 0.0) {
            return Err(WalkError::Config(format!(
                "base vector ({x}, {y}) must be finite and nonzero"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkRecord {
    /// `log |gₙ ⋯ g₁ x₀|`.
    pub log_radius: f64,
    /// `x / y` of the final vector, `+∞` when `y = 0`.
    pub direction: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleStats {
    pub config: WalkConfig,
    pub records: Vec<WalkRecord>,
}

impl EnsembleStats {
    pub fn log_radii(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.log_radius)
    }

    pub fn directions(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.direction)
    }

    /// CSV with columns `walk_id,log_radius,direction`. Floats are written in
    /// shortest round-trip form, so equal statistics give equal bytes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("walk_id,log_radius,direction\n");
        for (i, r) in self.records.iter().enumerate() {
            out.push_str(&format!("{i},{:?},{:?}\n", r.log_radius, r.direction));
        }
        out
    }
}

/// The generator for walk `index`: one ChaCha stream per walk under a common
/// key, so a walk's randomness does not depend on how walks are scheduled.
pub fn walk_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn direction(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        f64::INFINITY
    } else {
        x / y
    }
}

/// One walk of `steps` steps from `x0`.
pub fn simulate_walk(measure: &WalkMeasure, config: &WalkConfig, index: u64) -> WalkRecord {
    let mut rng = walk_rng(config.seed, index);
    let [x, y] = config.x0;
    let norm = x.hypot(y);
    let (mut u, mut v) = (x / norm, y / norm);
    let mut log_radius = norm.ln();
    for _ in 0..config.steps {
        let [[a, b], [c, d]] = measure.atoms()[measure.sample(&mut rng)].matrix;
        let (nu, nv) = (a * u + b * v, c * u + d * v);
        let r = nu.hypot(nv);
        log_radius += r.ln();
        u = nu / r;
        v = nv / r;
    }
    WalkRecord {
        log_radius,
        direction: direction(u, v),
    }
}

/// Runs the ensemble on the global rayon pool.
pub fn run_ensemble(measure: &WalkMeasure, config: &WalkConfig) -> Result<EnsembleStats> {
    config.validate()?;
    let records = (0..config.walks)
        .into_par_iter()
        .map(|i| simulate_walk(measure, config, i))
        .collect();
    Ok(EnsembleStats {
        config: *config,
        records,
    })
}

/// Runs the ensemble on a dedicated pool of `workers` threads. The output
/// does not depend on `workers`.
pub fn run_ensemble_with_workers(
    measure: &WalkMeasure,
    config: &WalkConfig,
    workers: usize,
) -> Result<EnsembleStats> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| WalkError::Pool(e.to_string()))?;
    pool.install(|| run_ensemble(measure, config))
}
