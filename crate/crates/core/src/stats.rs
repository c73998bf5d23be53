//! Mean, variance, median and mode set of one distribution.

use crate::error::{Error, Result};
use crate::extended;
use crate::params::{DistParams, Settings};
use crate::series::{h_series, pmf_series, ScaledSeries};

/// Distance from 1/2 under which the median crossing is re-evaluated.
const MEDIAN_BAND: f64 = 1e-12;
/// Near-ties within this multiple of the tie tolerance are re-evaluated.
const ESCALATION_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSummary {
    /// Sorted mode locations.
    pub modes: Vec<usize>,
    /// pmf value at the first mode.
    pub peak_value: f64,
    pub tie_tolerance: f64,
    pub n_scanned: usize,
}

pub fn mean(params: &DistParams) -> f64 {
    params.kappa() as f64 * params.lambda()
}

pub fn variance(params: &DistParams) -> f64 {
    params.variance()
}

/// Smallest `n` with `P(X <= n) >= 1/2`.
pub fn median(params: &DistParams, settings: &Settings) -> Result<usize> {
    settings.validate()?;
    let pmf = pmf_series(params, params.default_n_max())?;
    let mut cdf = 0.0;
    let mut crossing = None;
    for n in 0..pmf.len() {
        cdf += pmf.value(n);
        if cdf >= 0.5 - MEDIAN_BAND {
            crossing = Some(n);
            break;
        }
    }
    let n = crossing.ok_or_else(|| {
        Error::PrecisionLoss(format!("cdf never reached 1/2 within n <= {}", pmf.n_max()))
    })?;
    // the f64 sum may land on the wrong side of 1/2 only inside the band
    let mut n = n;
    loop {
        let cdf_n: f64 = (0..=n).map(|i| pmf.value(i)).sum();
        if (cdf_n - 0.5).abs() >= MEDIAN_BAND {
            if cdf_n >= 0.5 {
                return Ok(n);
            }
            n += 1;
            continue;
        }
        let d = extended::cdf_minus_half(params.k(), params.lambda(), &[n], settings.digits)[0];
        if d.abs() <= extended::resolution(settings.digits, n) {
            return Err(Error::PrecisionLoss(format!(
                "cdf at n = {n} is indistinguishable from 1/2 at {} digits",
                settings.digits
            )));
        }
        if d > 0.0 {
            return Ok(n);
        }
        n += 1;
    }
}

/// Mode set over `n in [0, floor(lambda kappa)]`.
///
/// Values within `tie_tol` (relative) of the maximum are modes. Candidates
/// within a thousand times that band are re-evaluated in extended precision
/// first, and a gap that lands on the band edge is reported as an
/// [`Error::AmbiguousTie`].
pub fn mode(params: &DistParams, settings: &Settings) -> Result<ModeSummary> {
    settings.validate()?;
    let upper = params.floor_mean();
    let h = h_series(params, upper)?;
    let modes = modes_of(&h, 0, upper, settings)?;
    let peak_value = h.wide(modes[0]).mul(exp_neg_wide(params)).to_f64();
    Ok(ModeSummary {
        modes,
        peak_value,
        tie_tolerance: settings.tie_tol,
        n_scanned: upper + 1,
    })
}

fn exp_neg_wide(params: &DistParams) -> crate::wide::WideFloat {
    let series = pmf_series(params, 0).expect("validated params");
    series.wide(0)
}

/// Tie-aware mode set of an h-series restricted to `lo..=hi`.
pub(crate) fn modes_of(h: &ScaledSeries, lo: usize, hi: usize, settings: &Settings) -> Result<Vec<usize>> {
    let top = h.argmax(lo, hi);
    let band = settings.tie_tol * ESCALATION_FACTOR;
    let mut near: Vec<(usize, f64)> = Vec::new();
    for n in lo..=hi {
        if n == top {
            continue;
        }
        let gap = 1.0 - h.ratio(n, top);
        if gap <= band {
            near.push((n, gap));
        }
    }
    if near.is_empty() {
        return Ok(vec![top]);
    }
    let mut candidates: Vec<usize> = near.iter().map(|&(n, _)| n).collect();
    candidates.push(top);
    candidates.sort_unstable();
    let params = h.params();
    let gaps = extended::relative_gaps(params.k(), params.lambda(), &candidates, settings.digits);
    let res = extended::resolution(settings.digits, hi);
    let mut modes = Vec::new();
    for (&n, &g) in candidates.iter().zip(&gaps) {
        if (g - settings.tie_tol).abs() <= res {
            return Err(Error::AmbiguousTie {
                lambda: params.lambda(),
                candidates,
            });
        }
        if g <= settings.tie_tol {
            modes.push(n);
        }
    }
    Ok(modes)
}

/// Bounds `[floor(lambda kappa) - kappa + 1 - [k = 1], floor(lambda kappa)]`
/// that every mode satisfies, clamped at zero.
pub fn mode_bounds(params: &DistParams) -> (usize, usize) {
    let hi = params.floor_mean() as i128;
    let k1 = i128::from(params.k() == 1);
    let lo = hi - params.kappa() as i128 + 1 - k1;
    (lo.max(0) as usize, hi as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(k: usize, lambda: f64) -> DistParams {
        DistParams::new(k, lambda).unwrap()
    }

    fn modes(k: usize, lambda: f64) -> Vec<usize> {
        mode(&p(k, lambda), &Settings::default()).unwrap().modes
    }

    #[test]
    fn moments() {
        assert_eq!(mean(&p(2, 1.0)), 3.0);
        assert_eq!(mean(&p(1, 0.7)), 0.7);
        assert_eq!(mean(&p(4, 0.5)), 5.0);
        assert_eq!(variance(&p(1, 2.0)), 2.0);
        assert_eq!(variance(&p(2, 1.0)), 5.0);
        assert_eq!(variance(&p(3, 1.0)), 14.0);
    }

    #[test]
    fn medians() {
        let s = Settings::default();
        let lam = std::f64::consts::LN_2 / 3.0;
        assert_eq!(median(&p(3, lam), &s).unwrap(), 0);
        assert!(median(&p(3, lam + 1e-6), &s).unwrap() >= 1);
        assert_eq!(median(&p(1, 10.0), &s).unwrap(), 10);
    }

    #[test]
    fn mode_examples() {
        assert_eq!(modes(2, 0.3), vec![0]);
        assert_eq!(modes(2, 3f64.sqrt() - 1.0), vec![0, 2]);
        assert_eq!(modes(1, 2.5), vec![2]);
        assert_eq!(modes(1, 3.0), vec![2, 3]);
        let m = mode(&p(1, 2.5), &Settings::default()).unwrap();
        let want = (-2.5f64).exp() * 2.5 * 2.5 / 2.0;
        assert!((m.peak_value - want).abs() < 1e-15);
        assert_eq!(m.n_scanned, 3);
    }

    #[test]
    fn bounds() {
        assert_eq!(mode_bounds(&p(1, 3.0)), (2, 3));
        assert_eq!(mode_bounds(&p(3, 2.0)), (7, 12));
        assert_eq!(mode_bounds(&p(3, 0.1)), (0, 0));
    }
}
