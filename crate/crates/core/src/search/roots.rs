use crate::error::{Error, Result};
use crate::extended;
use crate::params::{kappa, DistParams, Settings};
use crate::series::{h_series, h_unchecked};

/// `|h - 1|` below which the sign is re-evaluated in extended precision.
const ESCALATE_BAND: f64 = 1e-9;
/// Roots are refined until `|h - 1|` is below this, even past the bracket tolerance.
const ROOT_RESIDUAL: f64 = 1e-10;
/// A runner-up root closer than this to the first is treated as a possible tie.
const TIE_GAP: f64 = 1e-10;

/// The first positive double mode of one order `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleModeResult {
    pub k: usize,
    pub m_hat: usize,
    pub lambda_hat: f64,
    /// Width of the final bisection bracket around `lambda_hat`.
    pub bracket_width: f64,
    /// Location whose unit root comes second.
    pub runner_up: usize,
    /// Distance in lambda from `lambda_hat` to the runner-up unit root.
    pub runner_up_gap: f64,
    /// Root of `h_k(k; lambda) = 1`.
    pub r_k: f64,
}

impl DoubleModeResult {
    /// Mean of the distribution at `lambda_hat`.
    pub fn mean(&self) -> f64 {
        kappa(self.k) as f64 * self.lambda_hat
    }
}

fn params(k: usize, lambda: f64) -> Result<DistParams> {
    DistParams::new(k, lambda)
}

/// `max_{n in lo..=hi, n != skip} h(n; lambda) - 1` together with its location.
///
/// Values within [`ESCALATE_BAND`] of one are compared in extended precision.
fn envelope(k: usize, lambda: f64, lo: usize, hi: usize, skip: Option<usize>, settings: &Settings) -> Result<(usize, f64)> {
    let h = h_unchecked(&params(k, lambda)?, hi);
    let mut best: Option<usize> = None;
    for (a, b) in split_range(lo, hi, skip) {
        let cand = h.argmax(a, b);
        if best.is_none_or(|n| h.compare(cand, n).is_gt()) {
            best = Some(cand);
        }
    }
    let top = best.ok_or_else(|| Error::InvalidParameter(format!("empty search range [{lo}, {hi}]")))?;
    let d = h.value(top) - 1.0;
    if d.abs() >= ESCALATE_BAND {
        return Ok((top, d));
    }
    let near: Vec<usize> = (lo..=hi)
        .filter(|&n| Some(n) != skip && (h.value(n) - 1.0).abs() < ESCALATE_BAND)
        .collect();
    let exact = extended::h_minus_one(k, lambda, &near, settings.digits);
    let (i, d) = exact
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("top is within the band");
    Ok((near[i], d))
}

fn split_range(lo: usize, hi: usize, skip: Option<usize>) -> Vec<(usize, usize)> {
    match skip {
        Some(s) if (lo..=hi).contains(&s) => {
            let mut out = Vec::new();
            if s > lo {
                out.push((lo, s - 1));
            }
            if s < hi {
                out.push((s + 1, hi));
            }
            out
        }
        _ => vec![(lo, hi)],
    }
}

struct Bracket {
    lo: f64,
    hi: f64,
    /// Location attaining the maximum at `hi`.
    top_hi: usize,
}

/// Bisects an increasing `f(lambda) = g - 1` (returned with its argmax) on
/// `[lo, hi]` with `f(lo) < 0 <= f(hi)`.
///
/// Stops once the bracket is within `tol` and `|f(mid)| <= ROOT_RESIDUAL`, or
/// once the bracket no longer shrinks in f64.
fn bisect(
    mut lo: f64,
    mut hi: f64,
    mut top_hi: usize,
    tol: f64,
    mut f: impl FnMut(f64) -> Result<(usize, f64)>,
) -> Result<Bracket> {
    loop {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let (top, d) = f(mid)?;
        if hi - lo <= tol && d.abs() <= ROOT_RESIDUAL {
            break;
        }
        if d >= 0.0 {
            hi = mid;
            top_hi = top;
        } else {
            lo = mid;
        }
    }
    Ok(Bracket { lo, hi, top_hi })
}

fn single(k: usize, n: usize, lambda: f64, settings: &Settings) -> Result<(usize, f64)> {
    envelope(k, lambda, n, n, None, settings)
}

/// The unique root in `(0, 1)` of `h_k(k; lambda) = 1`.
pub fn root_rk(k: usize, settings: &Settings) -> Result<f64> {
    settings.validate()?;
    if k < 2 {
        return Err(Error::InvalidParameter(format!("root r_k needs k >= 2, got {k}")));
    }
    let lo = 1.0 / kappa(k) as f64;
    let hi = 1.0;
    let (_, d_lo) = single(k, k, lo, settings)?;
    let (_, d_hi) = single(k, k, hi, settings)?;
    if d_lo >= 0.0 || d_hi < 0.0 {
        return Err(Error::BracketFailure {
            k,
            detail: format!("h(k) - 1 is {d_lo:e} at 1/kappa and {d_hi:e} at 1"),
        });
    }
    let b = bisect(lo, hi, k, settings.root_tol, |lam| single(k, k, lam, settings))?;
    Ok(0.5 * (b.lo + b.hi))
}

/// The unique `lambda > 0` with `h_k(n; lambda) = 1`.
pub fn unit_root(k: usize, n: usize, settings: &Settings) -> Result<f64> {
    settings.validate()?;
    if k < 1 || n < 1 {
        return Err(Error::InvalidParameter(format!("unit root needs k >= 1 and n >= 1, got k = {k}, n = {n}")));
    }
    let mut hi = 1.0;
    let mut steps = 0;
    while single(k, n, hi, settings)?.1 < 0.0 {
        hi *= 2.0;
        steps += 1;
        if steps > 1100 {
            return Err(Error::BracketFailure { k, detail: format!("no upper bracket for n = {n}") });
        }
    }
    let mut lo = 0.5 * hi;
    while single(k, n, lo, settings)?.1 >= 0.0 {
        hi = lo;
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            return Err(Error::BracketFailure { k, detail: format!("no lower bracket for n = {n}") });
        }
    }
    let b = bisect(lo, hi, n, settings.root_tol, |lam| single(k, n, lam, settings))?;
    Ok(0.5 * (b.lo + b.hi))
}

/// Search ceiling `floor(r_k kappa) + k` for the first double mode.
pub fn double_mode_ceiling(k: usize, r_k: f64) -> usize {
    (r_k * kappa(k) as f64).floor() as usize + k
}

/// Smallest `lambda` at which some `n >= 1` ties with `n = 0` as a mode.
///
/// The smallest unit root over `n in [k, N]` equals the root of the upper
/// envelope `max_n h(n; lambda) = 1`, which is increasing in `lambda`; that
/// envelope is bisected directly and the result checked against the unit root
/// of the located `n`.
pub fn first_double_mode(k: usize, settings: &Settings) -> Result<DoubleModeResult> {
    settings.validate()?;
    if k < 2 {
        return Err(Error::InvalidParameter(format!("first double mode needs k >= 2, got {k}")));
    }
    let r_k = root_rk(k, settings)?;
    let ceiling = double_mode_ceiling(k, r_k);
    let lo = 1.0 / kappa(k) as f64;
    let env = |lam: f64| envelope(k, lam, k, ceiling, None, settings);

    let (_, d_lo) = env(lo)?;
    // r_k is a bracket midpoint and may sit a hair below the root itself
    let mut hi = r_k;
    let (mut top_r, mut d_hi) = env(hi)?;
    let mut nudge = settings.root_tol;
    while d_hi < 0.0 && nudge < 1e-6 {
        hi = r_k + nudge;
        (top_r, d_hi) = env(hi)?;
        nudge *= 2.0;
    }
    if d_lo >= 0.0 || d_hi < 0.0 {
        return Err(Error::BracketFailure {
            k,
            detail: format!("envelope - 1 is {d_lo:e} at 1/kappa and {d_hi:e} at r_k"),
        });
    }
    let b = bisect(lo, hi, top_r, settings.root_tol, env)?;
    let m_hat = b.top_hi;
    // with m_hat = k both searches located the same root
    let lambda_hat = if m_hat == k { r_k } else { 0.5 * (b.lo + b.hi) };

    verify(k, m_hat, lambda_hat, ceiling)?;
    let direct = unit_root(k, m_hat, settings)?;
    if (direct - lambda_hat).abs() > 4.0 * settings.root_tol {
        return Err(Error::InconsistentRoot {
            k,
            detail: format!("envelope root {lambda_hat} but unit root of n = {m_hat} is {direct}"),
        });
    }

    let (runner_up, second) = runner_up(k, m_hat, b.lo, r_k, ceiling, settings)?;
    let gap = second - lambda_hat;
    if gap < TIE_GAP {
        return Err(Error::PossibleTie { k, lambda: lambda_hat, first: m_hat, second: runner_up, gap });
    }
    Ok(DoubleModeResult {
        k,
        m_hat,
        lambda_hat,
        bracket_width: b.hi - b.lo,
        runner_up,
        runner_up_gap: gap,
        r_k,
    })
}

fn verify(k: usize, m_hat: usize, lambda: f64, ceiling: usize) -> Result<()> {
    let h = h_series(&params(k, lambda)?, ceiling)?;
    let at = h.value(m_hat) - 1.0;
    if at.abs() > ROOT_RESIDUAL {
        return Err(Error::InconsistentRoot {
            k,
            detail: format!("h({m_hat}) - 1 = {at:e} at lambda = {lambda}"),
        });
    }
    if let Some(n) = (1..=ceiling).find(|&n| h.value(n) > 1.0 + ROOT_RESIDUAL) {
        return Err(Error::InconsistentRoot {
            k,
            detail: format!("h({n}) = {} exceeds one at lambda = {lambda}", h.value(n)),
        });
    }
    Ok(())
}

/// Smallest unit root over `[k, ceiling]` with `skip` removed.
fn runner_up(k: usize, skip: usize, lo: f64, r_k: f64, ceiling: usize, settings: &Settings) -> Result<(usize, f64)> {
    let env = |lam: f64| envelope(k, lam, k, ceiling, Some(skip), settings);
    let (_, d_lo) = env(lo)?;
    if d_lo >= 0.0 {
        return Ok((env(lo)?.0, lo));
    }
    let mut hi = r_k;
    let (mut top, mut d) = env(hi)?;
    while d < 0.0 {
        hi *= 1.5;
        (top, d) = env(hi)?;
        if hi > 1e6 {
            return Err(Error::BracketFailure { k, detail: "no bracket for the runner-up root".into() });
        }
    }
    let b = bisect(lo, hi, top, settings.root_tol, env)?;
    Ok((b.top_hi, 0.5 * (b.lo + b.hi)))
}
