//! Root finding and mode searches over lambda.

mod breakpoints;
mod excluded;
mod roots;

pub use breakpoints::{mode_breakpoints, scan_multimodal, Breakpoint, BreakpointMap, BREAKPOINT_TIE, WALK_START};
pub use excluded::{default_ceiling, excluded_values, CeilingSource, ExcludedReport};
pub use roots::{double_mode_ceiling, first_double_mode, root_rk, unit_root, DoubleModeResult};

use crate::error::{Error, Result};
use crate::params::{kappa, DistParams, Settings};
use crate::stats::mode;

/// Conjectured mode `n - floor((3k+5)/8)` at `lambda = n / kappa`.
pub fn conjectured_mode(k: usize, n: usize) -> usize {
    n - (3 * k + 5) / 8
}

/// Whether the mode at `lambda = n / kappa` is exactly `{n - floor((3k+5)/8)}`.
pub fn check_mode_conjecture(k: usize, n: usize, settings: &Settings) -> Result<bool> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("mode conjecture needs k >= 2, got {k}")));
    }
    let kap = kappa(k) as usize;
    if n < 2 * kap {
        return Err(Error::InvalidParameter(format!("mode conjecture needs n >= 2 kappa = {}, got {n}", 2 * kap)));
    }
    let params = DistParams::new(k, n as f64 / kap as f64)?;
    let summary = mode(&params, settings)?;
    Ok(summary.modes == [conjectured_mode(k, n)])
}

/// The ten sample points `2 kappa + i ceil(kappa / 4)` used for per-order checks.
pub fn conjecture_sample_points(k: usize) -> Vec<usize> {
    let kap = kappa(k) as usize;
    let step = kap.div_ceil(4).max(1);
    (0..10).map(|i| 2 * kap + i * step).collect()
}

/// Per-order outcome of the numerical conjectures about modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureReport {
    pub k: usize,
    /// `(n, holds)` for each sampled `n`.
    pub mode_formula: Vec<(usize, bool)>,
    /// For `k >= 42`: whether `[1, m_hat - 1]` is the only excluded interval.
    pub single_interval: Option<bool>,
    pub k_plus_one_excluded: bool,
    pub m_hat: usize,
    pub excluded: ExcludedReport,
}

impl ConjectureReport {
    pub fn passed(&self) -> bool {
        self.mode_formula.iter().all(|&(_, ok)| ok)
            && self.single_interval.unwrap_or(true)
            && self.k_plus_one_excluded
    }
}

/// Orders from which a single excluded interval is expected.
pub const SINGLE_INTERVAL_FROM: usize = 42;

pub fn conjecture_report(k: usize, settings: &Settings) -> Result<ConjectureReport> {
    let mode_formula = conjecture_sample_points(k)
        .into_iter()
        .map(|n| check_mode_conjecture(k, n, settings).map(|ok| (n, ok)))
        .collect::<Result<Vec<_>>>()?;
    let excluded = excluded_values(k, None, settings)?;
    let m_hat = first_double_mode(k, settings)?.m_hat;
    let single_interval = (k >= SINGLE_INTERVAL_FROM).then(|| excluded.intervals == [(1, m_hat - 1)]);
    Ok(ConjectureReport {
        k,
        mode_formula,
        single_interval,
        k_plus_one_excluded: excluded.contains(k + 1),
        m_hat,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_formula_examples() {
        let s = Settings::default();
        assert!(check_mode_conjecture(2, 6, &s).unwrap());
        assert!(check_mode_conjecture(3, 12, &s).unwrap());
        assert!(check_mode_conjecture(2, 600, &s).unwrap());
        assert_eq!(conjectured_mode(3, 12), 11);
        assert!(check_mode_conjecture(2, 5, &s).is_err());
    }

    #[test]
    fn sample_points() {
        assert_eq!(conjecture_sample_points(2), vec![6, 7, 8, 9, 10, 11, 12, 13, 14, 15]);
        assert_eq!(conjecture_sample_points(4)[1], 23);
    }
}
