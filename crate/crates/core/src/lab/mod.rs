//! Experiment runners that check the statistical behaviour of the sampled
//! clusterer at desk scale, each producing an [`ExperimentReport`].
//!
//! Reports are pure functions of their configuration and seed: per-trial
//! randomness comes from counter-based substreams and every reduction over
//! floats happens sequentially in a fixed order.

mod karger;
mod levelset;
mod mincut;
mod recovery;
mod report;
mod window;

pub use karger::{karger_connectivity_trial, KargerResult, KargerRow};
pub use levelset::{calibrate_levelset_min_pts, levelset_experiment, LevelSetCell, LevelSetConfig, LevelSetResult};
pub use mincut::{mincut_scaling_experiment, MinCutCell, MinCutResult};
pub use recovery::{recovery_experiment, recovery_experiment_exact, RecoveryCell, RecoveryConfig, RecoveryResult};
pub use report::{mean_stderr, ExperimentReport, ReportRow};
pub use window::{compute_minpts_window, MinPtsWindow};

/// Rate `min(1, c ln n / n)`.
pub fn log_rate(c: f64, n: usize) -> f64 {
    let nf = n as f64;
    (c * nf.ln() / nf).clamp(f64::MIN_POSITIVE, 1.0)
}
