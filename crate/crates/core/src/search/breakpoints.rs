use crate::error::{Error, Result};
use crate::extended;
use crate::params::{DistParams, Settings};
use crate::series::{h_fast, h_unchecked};

/// Left end of every lambda walk.
pub const WALK_START: f64 = 1e-6;
/// Breakpoints are localized to brackets of this width.
const LOCALIZE_TOL: f64 = 1e-12;
/// Relative gap under which two values tie at a breakpoint.
pub const BREAKPOINT_TIE: f64 = 1e-10;
/// Third candidates this close are re-examined in extended precision.
const THIRD_CANDIDATE_BAND: f64 = 1e-7;
const MAX_SPLITS: usize = 100_000;

/// A lambda at which the mode changes, with the integers tied there.
#[derive(Debug, Clone, PartialEq)]
pub struct Breakpoint {
    pub lambda: f64,
    pub tie_set: Vec<usize>,
}

/// The mode of one order `k` as a step function of lambda.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakpointMap {
    pub k: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub breakpoints: Vec<Breakpoint>,
    /// `mode_sets[i]` holds on the open interval ending at `breakpoints[i]`;
    /// the last entry holds after the final breakpoint.
    pub mode_sets: Vec<Vec<usize>>,
}

impl BreakpointMap {
    /// Mode set of the open interval containing `lambda`.
    pub fn modes_at(&self, lambda: f64) -> &[usize] {
        let i = self.breakpoints.partition_point(|b| b.lambda < lambda);
        &self.mode_sets[i]
    }
}

/// A localized change of the argmax from `from` to `to` inside `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Transition {
    pub lo: f64,
    pub hi: f64,
    pub from: usize,
    pub to: usize,
}

/// Largest pmf location at `lambda`, from the sliding-window engine.
pub(crate) fn argmax_at(k: usize, lambda: f64) -> Result<usize> {
    let params = DistParams::new(k, lambda)?;
    let upper = params.floor_mean();
    Ok(h_fast(&params, upper).argmax(0, upper))
}

/// Narrows `[lo, hi]` (argmax `from` at `lo`, something else at `hi`) to the first change.
fn localize(k: usize, mut lo: f64, from: usize, mut hi: f64) -> Result<Transition> {
    while hi - lo > LOCALIZE_TOL {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if argmax_at(k, mid)? == from {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Transition { lo, hi, from, to: argmax_at(k, hi)? })
}

/// Every argmax change inside `(lo, hi]` given the argmax at both ends.
fn split(k: usize, lo: f64, a_lo: usize, hi: f64, a_hi: usize, out: &mut Vec<Transition>) -> Result<()> {
    let (mut l, mut from) = (lo, a_lo);
    for _ in 0..MAX_SPLITS {
        let t = localize(k, l, from, hi)?;
        out.push(t);
        if t.to == a_hi {
            return Ok(());
        }
        l = t.hi;
        from = t.to;
    }
    Err(Error::UnresolvedTransition { k, lambda: lo, left: a_lo, right: a_hi })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum WalkMode {
    /// Localize every change.
    Full,
    /// Localize only changes by more than one; adjacent values are known attained.
    Jumps,
}

/// Walks lambda over `[WALK_START, lambda_max]` on a grid of step `1/(4 kappa)`.
///
/// `visit_grid` sees each grid argmax and may stop the walk by returning false
/// (after the preceding interval has been handled); `visit_change` sees each
/// localized transition in increasing lambda order.
pub(crate) fn walk(
    k: usize,
    lambda_max: f64,
    mode: WalkMode,
    mut visit_grid: impl FnMut(f64, usize) -> bool,
    mut visit_change: impl FnMut(Transition) -> Result<()>,
) -> Result<()> {
    let kappa = crate::params::kappa(k) as f64;
    let step = 1.0 / (4.0 * kappa);
    let start = WALK_START.min(lambda_max);
    let mut prev_lambda = start;
    let mut prev = argmax_at(k, start)?;
    if !visit_grid(start, prev) {
        return Ok(());
    }
    let mut i = 1u64;
    while prev_lambda < lambda_max {
        let lam = (start + i as f64 * step).min(lambda_max);
        i += 1;
        let a = argmax_at(k, lam)?;
        let needs_split = match mode {
            WalkMode::Full => a != prev,
            WalkMode::Jumps => a.abs_diff(prev) > 1,
        };
        if needs_split {
            let mut found = Vec::new();
            split(k, prev_lambda, prev, lam, a, &mut found)?;
            for t in found {
                visit_change(t)?;
            }
        }
        if !visit_grid(lam, a) {
            return Ok(());
        }
        prev_lambda = lam;
        prev = a;
    }
    Ok(())
}

fn ln_gap(k: usize, lambda: f64, a: usize, b: usize) -> Result<f64> {
    let h = h_unchecked(&DistParams::new(k, lambda)?, a.max(b));
    Ok(h.ln_value(a) - h.ln_value(b))
}

/// Pins the breakpoint inside a transition and collects its tie set.
pub(crate) fn resolve(k: usize, t: &Transition, settings: &Settings) -> Result<Breakpoint> {
    let g_lo = ln_gap(k, t.lo, t.from, t.to)?;
    let g_hi = ln_gap(k, t.hi, t.from, t.to)?;
    let frac = if g_lo > g_hi { (g_lo / (g_lo - g_hi)).clamp(0.0, 1.0) } else { 0.5 };
    let lambda = t.lo + frac * (t.hi - t.lo);
    let params = DistParams::new(k, lambda)?;
    let upper = params.floor_mean().max(t.from).max(t.to);
    let h = h_unchecked(&params, upper);
    let top = h.argmax(0, upper);
    let near: Vec<(usize, f64)> = (0..=upper)
        .map(|n| (n, 1.0 - h.ratio(n, top)))
        .filter(|&(_, g)| g <= THIRD_CANDIDATE_BAND)
        .collect();
    let clear = near.iter().all(|&(_, g)| g <= 0.1 * BREAKPOINT_TIE);
    let tie_set: Vec<usize> = if clear {
        near.iter().map(|&(n, _)| n).collect()
    } else {
        let cands: Vec<usize> = near.iter().map(|&(n, _)| n).collect();
        let gaps = extended::relative_gaps(k, lambda, &cands, settings.digits);
        cands
            .into_iter()
            .zip(gaps)
            .filter(|&(_, g)| g <= BREAKPOINT_TIE)
            .map(|(n, _)| n)
            .collect()
    };
    if !(tie_set.contains(&t.from) && tie_set.contains(&t.to)) {
        return Err(Error::UnresolvedTransition { k, lambda, left: t.from, right: t.to });
    }
    Ok(Breakpoint { lambda, tie_set })
}

/// Mode of order `k` as a step function of lambda over `[1e-6, lambda_max]`.
pub fn mode_breakpoints(k: usize, lambda_max: f64, settings: &Settings) -> Result<BreakpointMap> {
    settings.validate()?;
    if k < 1 {
        return Err(Error::InvalidParameter(format!("order k must be >= 1, got {k}")));
    }
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda_max must be finite and > 0, got {lambda_max}")));
    }
    let mut first = None;
    let mut transitions = Vec::new();
    walk(
        k,
        lambda_max,
        WalkMode::Full,
        |_, a| {
            first.get_or_insert(a);
            true
        },
        |t| {
            transitions.push(t);
            Ok(())
        },
    )?;
    let mut breakpoints = Vec::with_capacity(transitions.len());
    let mut mode_sets = vec![vec![first.expect("walk visits its start")]];
    for t in &transitions {
        breakpoints.push(resolve(k, t, settings)?);
        mode_sets.push(vec![t.to]);
    }
    Ok(BreakpointMap {
        k,
        lambda_min: WALK_START.min(lambda_max),
        lambda_max,
        breakpoints,
        mode_sets,
    })
}

/// Breakpoints up to `lambda_max` where at least `arity` integers tie.
pub fn scan_multimodal(k: usize, lambda_max: f64, arity: usize, settings: &Settings) -> Result<Vec<Breakpoint>> {
    if arity < 2 {
        return Err(Error::InvalidParameter(format!("arity must be >= 2, got {arity}")));
    }
    let map = mode_breakpoints(k, lambda_max, settings)?;
    Ok(map
        .breakpoints
        .into_iter()
        .filter(|b| b.tie_set.len() >= arity)
        .collect())
}
