use crate::error::{Error, Result};
use crate::params::{kappa, DistParams, Settings};

use super::breakpoints::{walk, WalkMode};

/// Where the upper end of an excluded-value search came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CeilingSource {
    /// `k(k+1) - floor((3k+5)/8)`, above which every integer is conjectured to be a mode.
    ModeConjecture,
    User,
}

/// Positive integers up to `n_upper` that are never a mode of order `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcludedReport {
    pub k: usize,
    /// Sorted, disjoint, closed intervals.
    pub intervals: Vec<(usize, usize)>,
    pub n_upper: usize,
    pub ceiling_source: CeilingSource,
}

impl ExcludedReport {
    pub fn contains(&self, n: usize) -> bool {
        self.intervals.iter().any(|&(a, b)| (a..=b).contains(&n))
    }
}

pub fn default_ceiling(k: usize) -> usize {
    k * (k + 1) - (3 * k + 5) / 8
}

/// Excluded values of order `k` in `[1, n_upper]`.
///
/// The mode is followed over lambda up to `2 (n_upper + kappa) / kappa`. The
/// walk ends early once `floor(lambda kappa) - kappa + 1` passes `n_upper`,
/// since no larger lambda can have a mode at or below the ceiling.
pub fn excluded_values(k: usize, n_upper: Option<usize>, settings: &Settings) -> Result<ExcludedReport> {
    settings.validate()?;
    if k < 2 {
        return Err(Error::InvalidParameter(format!("excluded values need k >= 2, got {k}")));
    }
    let (n_upper, ceiling_source) = match n_upper {
        Some(n) => (n, CeilingSource::User),
        None => (default_ceiling(k), CeilingSource::ModeConjecture),
    };
    let kap = kappa(k);
    let lambda_max = 2.0 * (n_upper as f64 + kap as f64) / kap as f64;
    let mut seen = Vec::new();
    let mut jumped = Vec::new();
    let mut stop_err = None;
    walk(
        k,
        lambda_max,
        WalkMode::Jumps,
        |lam, a| {
            seen.push(a);
            match DistParams::new(k, lam) {
                Ok(p) => (p.floor_mean() as u64 + 1) <= kap + n_upper as u64,
                Err(e) => {
                    stop_err = Some(e);
                    false
                }
            }
        },
        |t| {
            jumped.push(t.to);
            Ok(())
        },
    )?;
    if let Some(e) = stop_err {
        return Err(e);
    }
    let mut attained = vec![false; n_upper + 1];
    for a in seen.into_iter().chain(jumped) {
        if let Some(slot) = attained.get_mut(a) {
            *slot = true;
        }
    }
    let mut intervals = Vec::new();
    let mut open: Option<usize> = None;
    for n in 1..=n_upper {
        match (attained[n], open) {
            (false, None) => open = Some(n),
            (true, Some(a)) => {
                intervals.push((a, n - 1));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(a) = open {
        intervals.push((a, n_upper));
    }
    Ok(ExcludedReport { k, intervals, n_upper, ceiling_source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_orders() {
        let s = Settings::default();
        assert_eq!(excluded_values(2, None, &s).unwrap().intervals, vec![(1, 1), (3, 3)]);
        assert_eq!(excluded_values(4, None, &s).unwrap().intervals, vec![(1, 3), (5, 6), (9, 9)]);
        assert_eq!(
            excluded_values(9, None, &s).unwrap().intervals,
            vec![(1, 8), (10, 14), (19, 20)]
        );
        assert_eq!(default_ceiling(4), 18);
    }
}
