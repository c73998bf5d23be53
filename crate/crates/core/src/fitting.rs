//! Ordinary least-squares fits for the asymptotic behaviour of the double mode.

use crate::error::{Error, Result};
use crate::params::Settings;
use crate::search::{first_double_mode, DoubleModeResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// `y = a x^b`, fitted on `(ln x, ln y)`.
    PowerLaw,
    /// `y = c0 + c1 x`.
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: FitModel,
    /// `(a, b)` for a power law, `(c0, c1)` for a line.
    pub coefficients: (f64, f64),
    /// Root-mean-square relative residual.
    pub residual: f64,
    pub n_points: usize,
    /// Smallest and largest abscissa.
    pub domain: (f64, f64),
}

impl FitResult {
    pub fn predict(&self, x: f64) -> f64 {
        let (a, b) = self.coefficients;
        match self.model {
            FitModel::PowerLaw => a * x.powf(b),
            FitModel::Linear => a + b * x,
        }
    }
}

fn check(points: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 points, got {}", points.len())));
    }
    if let Some(p) = points.iter().find(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite point {p:?}")));
    }
    // a fixed summation order makes the result independent of input order
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    if sorted[0].0 == sorted[sorted.len() - 1].0 {
        return Err(Error::DegenerateFit("all abscissae are equal".into()));
    }
    Ok(sorted)
}

/// Slope and intercept of the least-squares line through sorted points.
fn ols(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

fn finish(model: FitModel, coefficients: (f64, f64), points: &[(f64, f64)]) -> Result<FitResult> {
    let mut fit = FitResult {
        model,
        coefficients,
        residual: 0.0,
        n_points: points.len(),
        domain: (points[0].0, points[points.len() - 1].0),
    };
    if !(coefficients.0.is_finite() && coefficients.1.is_finite()) {
        return Err(Error::DegenerateFit(format!("non-finite coefficients {coefficients:?}")));
    }
    let ss: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - fit.predict(x);
            if y != 0.0 {
                (r / y).powi(2)
            } else {
                r * r
            }
        })
        .sum();
    fit.residual = (ss / points.len() as f64).sqrt();
    Ok(fit)
}

/// Fits `y = a x^b` by least squares on the logarithms.
pub fn power_law_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    let sorted = check(points)?;
    if let Some(p) = sorted.iter().find(|(x, y)| *x <= 0.0 || *y <= 0.0) {
        return Err(Error::InvalidParameter(format!("power-law fit needs positive data, got {p:?}")));
    }
    let logs: Vec<(f64, f64)> = sorted.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let (c, b) = ols(&logs);
    finish(FitModel::PowerLaw, (c.exp(), b), &sorted)
}

/// Fits `y = c0 + c1 x` by ordinary least squares.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    let sorted = check(points)?;
    let (c0, c1) = ols(&sorted);
    finish(FitModel::Linear, (c0, c1), &sorted)
}

/// `(k, mean - m_hat)` for each result; a mode at or above the mean aborts.
pub fn mean_minus_mode_points(results: &[DoubleModeResult]) -> Result<Vec<(f64, f64)>> {
    results
        .iter()
        .map(|r| {
            let mu = r.mean();
            if r.m_hat as f64 >= mu {
                return Err(Error::DataIntegrity(format!(
                    "k = {}: mode {} is not below the mean {mu}",
                    r.k, r.m_hat
                )));
            }
            Ok((r.k as f64, mu - r.m_hat as f64))
        })
        .collect()
}

/// `(k, mean at lambda_hat)` for each result.
pub fn mean_points(results: &[DoubleModeResult]) -> Vec<(f64, f64)> {
    results.iter().map(|r| (r.k as f64, r.mean())).collect()
}

/// `(kappa, m_hat)` for each result.
pub fn kappa_mode_points(results: &[DoubleModeResult]) -> Vec<(f64, f64)> {
    results
        .iter()
        .map(|r| (crate::params::kappa(r.k) as f64, r.m_hat as f64))
        .collect()
}

/// `count` orders spread logarithmically over `[k_min, k_max]`, deduplicated.
pub fn log_spaced_orders(k_min: usize, k_max: usize, count: usize) -> Vec<usize> {
    if count < 2 || k_min >= k_max {
        return vec![k_min];
    }
    let ratio = k_max as f64 / k_min as f64;
    let mut ks: Vec<usize> = (0..count)
        .map(|i| (k_min as f64 * ratio.powf(i as f64 / (count - 1) as f64)).round() as usize)
        .collect();
    ks.dedup();
    ks
}

/// First double modes for fitting, one per requested order.
///
/// An order whose two smallest unit roots are too close to separate is
/// replaced by the next order up that resolves, staying within `k_limit`.
pub fn double_mode_samples(orders: &[usize], k_limit: usize, settings: &Settings) -> Result<Vec<DoubleModeResult>> {
    let mut out: Vec<DoubleModeResult> = Vec::with_capacity(orders.len());
    for &k in orders {
        let mut k = k.max(out.last().map_or(0, |r| r.k + 1));
        loop {
            match first_double_mode(k, settings) {
                Ok(r) => {
                    out.push(r);
                    break;
                }
                Err(Error::PossibleTie { .. }) if k < k_limit => k += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}
