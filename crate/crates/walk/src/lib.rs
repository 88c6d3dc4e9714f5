//! Random walks `gₙ ⋯ g₁ x₀` on `ℝ² ∖ {0}` driven by a finitely supported
//! measure on `SL(2, ℝ)`, with the statistics used to compare the rescaled
//! distribution against `dr/r ⊗ ?̄`.
//!
//! Walk `i` draws from its own ChaCha stream keyed by `(seed, i)`, so
//! ensembles are reproducible bit for bit regardless of thread count.

pub mod ensemble;
pub mod error;
pub mod measure;
pub mod stats;

pub use ensemble::{
    run_ensemble, run_ensemble_with_workers, simulate_walk, EnsembleStats, WalkConfig, WalkRecord,
};
pub use error::{Result, WalkError};
pub use measure::{Atom, WalkMeasure};
pub use stats::{
    angular_ecdf, clt_check, estimate_lyapunov, ks_distance, radial_profile, CltReport, Decile, Ecdf,
    Lyapunov, RadialProfile, Reference,
};
