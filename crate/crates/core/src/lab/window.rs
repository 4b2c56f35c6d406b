use crate::error::{Error, Result};
use crate::synthetic::{unit_ball_volume, TheoryScenario};

/// Admissible range for `min_pts / (s n)` that separates cluster points
/// from noise: `(lambda_n v_D eps^D, rho lambda_c v_D eps^D)`, with the
/// density levels taken after normalisation.
#[derive(Debug, Clone, PartialEq)]
pub struct MinPtsWindow {
    pub lo: f64,
    pub hi: f64,
    pub v_d: f64,
    /// `s * n` used to scale the window to integer `min_pts`.
    pub sn: f64,
    /// Whether `eps < min(r0, r_s)` held.
    pub precondition_ok: bool,
}

impl MinPtsWindow {
    pub fn is_valid(&self) -> bool {
        self.lo < self.hi
    }

    /// `min(m/(sn) - lo, hi - m/(sn))`; positive iff `m` is inside the window.
    pub fn margin(&self, min_pts: usize) -> f64 {
        let x = min_pts as f64 / self.sn;
        (x - self.lo).min(self.hi - x)
    }

    /// Integers `m` with `lo < m/(sn) < hi`, if any.
    pub fn integer_range(&self) -> Option<(usize, usize)> {
        let first = (self.lo * self.sn).floor() as i64 + 1;
        let last = (self.hi * self.sn).ceil() as i64 - 1;
        (first >= 1 && first <= last).then_some((first as usize, last as usize))
    }

    /// `min_pts` nearest the window midpoint (where the margin peaks),
    /// at least 1.
    pub fn midpoint_min_pts(&self) -> usize {
        ((0.5 * (self.lo + self.hi) * self.sn).round() as usize).max(1)
    }
}

pub fn compute_minpts_window(ts: &TheoryScenario, eps: f64, s: f64, n: usize) -> Result<MinPtsWindow> {
    ts.validate()?;
    if !(eps > 0.0) {
        return Err(Error::param("eps", "must be positive"));
    }
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::param("rate", format!("must lie in (0, 1], got {s}")));
    }
    let v_d = unit_ball_volume(ts.dim);
    let ball = v_d * eps.powi(ts.dim as i32);
    let (lambda_c, lambda_n) = ts.normalized_levels();
    Ok(MinPtsWindow {
        lo: lambda_n * ball,
        hi: ts.rho * lambda_c * ball,
        v_d,
        sn: s * n as f64,
        precondition_ok: eps < ts.r0.min(ts.r_s),
    })
}
