//! Summaries of an ensemble: Lyapunov estimates, radial histograms,
//! direction distributions and the normal approximation of log radii.

use farey_orbits::minkowski::{mbar_f64, question_mark_f64};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::ensemble::EnsembleStats;
use crate::error::{Result, WalkError};

pub const MIN_ANGULAR_SAMPLES: usize = 100;
pub const MIN_CLT_WALKS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lyapunov {
    /// `λ̂₁ = mean(ℓᵢ) / n`.
    pub lambda: f64,
    /// `ŝ = sd(ℓᵢ) / √n`, with the sample (n − 1) standard deviation.
    pub s: f64,
}

/// Shifted by the first sample, so constant data gives a standard deviation
/// of exactly zero.
fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let k = xs[0];
    let shifted = xs.iter().map(|x| x - k).sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - k - shifted).powi(2)).sum::<f64>() / (n - 1.0);
    (k + shifted, var.sqrt())
}

pub fn estimate_lyapunov(stats: &EnsembleStats) -> Result<Lyapunov> {
    if stats.records.len() < 2 {
        return Err(WalkError::TooFewSamples {
            count: stats.records.len(),
            needed: 2,
        });
    }
    let radii: Vec<f64> = stats.log_radii().collect();
    let (mean, sd) = mean_sd(&radii);
    let n = stats.config.steps as f64;
    Ok(Lyapunov {
        lambda: mean / n,
        s: sd / n.sqrt(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    pub alpha: f64,
    /// `bins + 1` edges from `lo` to `hi`.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// `counts / walks`.
    pub mass: Vec<f64>,
    /// Count-weighted least-squares slope of `log count` against the bin
    /// centre; `None` with fewer than two occupied bins.
    pub slope: Option<f64>,
    pub warning: Option<String>,
}

impl RadialProfile {
    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1]))
    }
}

/// Histogram of `ℓᵢ − α·n` on `[lo, hi]` in `bins` equal bins.
///
/// Under `dρ ∝ r^κ dr/r` the log radius has density `∝ e^{κℓ}`, so the slope
/// of the log-histogram estimates `κ`.
pub fn radial_profile(
    stats: &EnsembleStats,
    alpha: f64,
    lo: f64,
    hi: f64,
    bins: usize,
) -> Result<RadialProfile> {
    if bins == 0 {
        return Err(WalkError::Config("bins must be at least 1".into()));
    }
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(WalkError::Config(format!("empty window [{lo}, {hi}]")));
    }
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
    let shift = alpha * stats.config.steps as f64;
    let mut counts = vec![0u64; bins];
    for l in stats.log_radii() {
        let x = l - shift;
        if x < lo || x > hi {
            continue;
        }
        let i = (((x - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let walks = stats.records.len() as f64;
    let mass = counts.iter().map(|&c| c as f64 / walks).collect();
    let warning = counts
        .iter()
        .all(|&c| c == 0)
        .then(|| format!("no walk lands in [{lo}, {hi}] after shifting by {alpha}·n"));
    let mut profile = RadialProfile {
        alpha,
        edges,
        counts,
        mass,
        slope: None,
        warning,
    };
    profile.slope = weighted_log_slope(&profile);
    Ok(profile)
}

fn weighted_log_slope(p: &RadialProfile) -> Option<f64> {
    let pts: Vec<(f64, f64, f64)> = p
        .centers()
        .zip(&p.counts)
        .filter(|(_, &c)| c > 0)
        .map(|(x, &c)| (x, (c as f64).ln(), c as f64))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let w: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / w;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / w;
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Empirical distribution on `ℝ ∪ {∞}`, with `+∞` above every real.
#[derive(Clone, Debug, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    /// Panics on NaN.
    pub fn new(mut samples: Vec<f64>) -> Self {
        assert!(samples.iter().all(|x| !x.is_nan()), "NaN sample");
        samples.sort_by(f64::total_cmp);
        Self { sorted: samples }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples `≤ t`.
    pub fn value(&self, t: f64) -> f64 {
        self.sorted.partition_point(|&x| x <= t) as f64 / self.len() as f64
    }

    /// The samples inside `[lo, hi]`, as a distribution of their own.
    pub fn restrict(&self, lo: f64, hi: f64) -> Self {
        let a = self.sorted.partition_point(|&x| x < lo);
        let b = self.sorted.partition_point(|&x| x <= hi);
        Self {
            sorted: self.sorted[a..b].to_vec(),
        }
    }
}

/// `sup |F − G|` for the empirical `F`, checked on both sides of every jump.
/// `reference` must be a continuous distribution function on `ℝ ∪ {∞}`.
pub fn ks_distance(ecdf: &Ecdf, reference: impl Fn(f64) -> f64) -> f64 {
    let n = ecdf.len() as f64;
    let xs = ecdf.samples();
    let mut d = 0.0f64;
    let mut i = 0;
    while i < xs.len() {
        let mut j = i + 1;
        while j < xs.len() && xs[j] == xs[i] {
            j += 1;
        }
        let g = if xs[i] == f64::INFINITY { 1.0 } else { reference(xs[i]) };
        d = d.max((i as f64 / n - g).abs()).max((j as f64 / n - g).abs());
        i = j;
    }
    d
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reference {
    /// `?` on `[0, 1]`.
    Minkowski,
    /// `?̄` on `ℝ ∪ {∞}`.
    MinkowskiExtended,
}

impl Reference {
    pub fn cdf(self, x: f64) -> f64 {
        match self {
            Reference::Minkowski => question_mark_f64(x.clamp(0.0, 1.0)),
            Reference::MinkowskiExtended => mbar_f64(x),
        }
    }
}

/// Directions of the walks whose radius `|gx₀|` lies in `window`, or of all
/// walks without one.
pub fn angular_ecdf(stats: &EnsembleStats, window: Option<(f64, f64)>) -> Result<Ecdf> {
    let bounds = match window {
        None => None,
        Some((lo, hi)) if lo > 0.0 && lo < hi => Some((lo.ln(), hi.ln())),
        Some((lo, hi)) => {
            return Err(WalkError::Config(format!(
                "radius window {lo}..{hi} must satisfy 0 < lo < hi"
            )))
        }
    };
    let dirs: Vec<f64> = stats
        .records
        .iter()
        .filter(|r| bounds.is_none_or(|(a, b)| a <= r.log_radius && r.log_radius <= b))
        .map(|r| r.direction)
        .collect();
    if dirs.len() < MIN_ANGULAR_SAMPLES {
        return Err(WalkError::TooFewSamples {
            count: dirs.len(),
            needed: MIN_ANGULAR_SAMPLES,
        });
    }
    Ok(Ecdf::new(dirs))
}

#[derive(Clone, Debug, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum CltReport {
    /// `ŝ = 0`: radial growth is deterministic.
    Degenerate,
    Normal {
        lyapunov: Lyapunov,
        /// KS distance of the standardized log radii to `N(0, 1)`.
        ks: f64,
        deciles: [Decile; 9],
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decile {
    pub p: f64,
    pub empirical: f64,
    pub normal: f64,
}

impl Decile {
    pub fn error(&self) -> f64 {
        self.empirical - self.normal
    }
}

impl CltReport {
    pub fn ks(&self) -> Option<f64> {
        match self {
            CltReport::Degenerate => None,
            CltReport::Normal { ks, .. } => Some(*ks),
        }
    }
}

/// Compares `zᵢ = (ℓᵢ − λ̂₁n) / (ŝ√n)` with the standard normal.
pub fn clt_check(stats: &EnsembleStats) -> Result<CltReport> {
    if stats.records.len() < MIN_CLT_WALKS {
        return Err(WalkError::TooFewSamples {
            count: stats.records.len(),
            needed: MIN_CLT_WALKS,
        });
    }
    let lyapunov = estimate_lyapunov(stats)?;
    if lyapunov.s == 0.0 {
        return Ok(CltReport::Degenerate);
    }
    let n = stats.config.steps as f64;
    let (center, scale) = (lyapunov.lambda * n, lyapunov.s * n.sqrt());
    let z = Ecdf::new(stats.log_radii().map(|l| (l - center) / scale).collect());
    let normal = Normal::standard();
    let ks = ks_distance(&z, |x| normal.cdf(x));
    let deciles = std::array::from_fn(|k| {
        let p = (k + 1) as f64 / 10.0;
        let idx = ((p * z.len() as f64).ceil() as usize).clamp(1, z.len()) - 1;
        Decile {
            p,
            empirical: z.samples()[idx],
            normal: normal.inverse_cdf(p),
        }
    });
    Ok(CltReport::Normal {
        lyapunov,
        ks,
        deciles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_at_quantile_midpoints_is_half_a_step() {
        let n = 200;
        let samples = (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect();
        let d = ks_distance(&Ecdf::new(samples), |x| x.clamp(0.0, 1.0));
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn ks_of_point_mass_at_zero_against_mbar() {
        let d = ks_distance(&Ecdf::new(vec![0.0; 10]), mbar_f64);
        assert!((d - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn ecdf_handles_infinity() {
        let e = Ecdf::new(vec![f64::INFINITY, 1.0, -2.0, 0.5]);
        assert_eq!(e.value(0.0), 0.25);
        assert_eq!(e.value(1e300), 0.75);
        assert_eq!(e.value(f64::INFINITY), 1.0);
        assert_eq!(e.restrict(0.0, 1.0).samples(), [0.5, 1.0]);
        assert!(ks_distance(&e, mbar_f64) < 1.0);
    }

    #[test]
    fn weighted_slope_recovers_exponential() {
        let edges: Vec<f64> = (0..=8).map(|i| -2.0 + 0.5 * i as f64).collect();
        let counts = edges
            .windows(2)
            .map(|w| (1000.0 * (0.7 * 0.5 * (w[0] + w[1])).exp()).round() as u64)
            .collect();
        let p = RadialProfile {
            alpha: 0.0,
            edges,
            counts,
            mass: vec![],
            slope: None,
            warning: None,
        };
        assert!((weighted_log_slope(&p).unwrap() - 0.7).abs() < 1e-3);
    }
}
