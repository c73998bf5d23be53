//! Evaluation of `h_k(n; lambda)` and the pmf `f_k(n; lambda)`.
//!
//! The primary path is the compound-Poisson probability recurrence
//!
//! ```text
//! n * f(n) = lambda * sum_{j=1..min(k,n)} j * f(n - j)
//! ```
//!
//! which has only positive terms. Since the recurrence is linear and
//! homogeneous, `h = e^{k lambda} f` obeys it with `h(0) = 1`. Values are kept
//! in linear space; whenever the working window leaves `[1e-100, 1e100]` a new
//! scale block starts and the window is rescaled by a power of two, so every
//! stored entry stays a normal f64 and earlier entries are never touched.
//!
//! The order-direction recurrence (conditioning on the count of the largest
//! jump) runs over [`WideFloat`] and cross-checks a prefix of every series.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::params::DistParams;
use crate::wide::{frexp, ldexp, WideFloat};

const RESCALE_HI: f64 = 1e100;
const RESCALE_LO: f64 = 1e-100;
/// Entries of each series re-derived by the order-direction recurrence.
const CROSS_CHECK_PREFIX: usize = 64;
const CROSS_CHECK_TOL: f64 = 1e-10;
/// Exact window sums are recomputed this often in the sliding-window engine.
const WINDOW_REFRESH: usize = 64;
const MAX_SERIES_LEN: usize = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Pmf,
    /// `e^{k lambda}` times the pmf.
    H,
}

/// Entries from `start` onwards (up to the next block) carry the factor `2^exp2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaleBlock {
    pub start: usize,
    pub exp2: i64,
}

/// A finite prefix `n = 0..=n_max` of `h` or the pmf in scaled linear space.
///
/// The true value at `n` is `raw()[n] * 2^exponent(n)`; the exponent ledger is
/// a sorted list of [`ScaleBlock`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledSeries {
    params: DistParams,
    kind: SeriesKind,
    values: Vec<f64>,
    blocks: Vec<ScaleBlock>,
}

impl ScaledSeries {
    pub fn params(&self) -> &DistParams {
        &self.params
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// Scaled values, one per `n`.
    pub fn raw(&self) -> &[f64] {
        &self.values
    }

    pub fn blocks(&self) -> &[ScaleBlock] {
        &self.blocks
    }

    fn block_index(&self, n: usize) -> usize {
        self.blocks.partition_point(|b| b.start <= n) - 1
    }

    /// Binary exponent applied to entry `n`.
    pub fn exponent(&self, n: usize) -> i64 {
        self.blocks[self.block_index(n)].exp2
    }

    /// Natural-log offset of entry `n`: the true value is `raw()[n] * exp(log_scale(n))`.
    pub fn log_scale(&self, n: usize) -> f64 {
        self.exponent(n) as f64 * std::f64::consts::LN_2
    }

    /// Rescaled value; saturates outside the f64 range.
    pub fn value(&self, n: usize) -> f64 {
        ldexp(self.values[n], self.exponent(n))
    }

    pub fn wide(&self, n: usize) -> WideFloat {
        WideFloat::from_parts(self.values[n], self.exponent(n))
    }

    pub fn ln_value(&self, n: usize) -> f64 {
        self.values[n].ln() + self.log_scale(n)
    }

    /// `value(a) / value(b)` without leaving the f64 range on the way.
    pub fn ratio(&self, a: usize, b: usize) -> f64 {
        ldexp(self.values[a] / self.values[b], self.exponent(a) - self.exponent(b))
    }

    pub fn compare(&self, a: usize, b: usize) -> Ordering {
        let ea = self.exponent(a);
        let eb = self.exponent(b);
        if ea == eb {
            return self.values[a].total_cmp(&self.values[b]);
        }
        self.wide(a).partial_cmp(&self.wide(b)).unwrap_or(Ordering::Equal)
    }

    /// Index of the largest entry in `lo..=hi`; the smallest index wins exact ties.
    pub fn argmax(&self, lo: usize, hi: usize) -> usize {
        let hi = hi.min(self.n_max());
        let mut best = lo;
        let mut bi = self.block_index(lo);
        let mut start = lo;
        loop {
            let end = self
                .blocks
                .get(bi + 1)
                .map_or(hi, |b| (b.start - 1).min(hi));
            let mut local = start;
            for n in start + 1..=end {
                if self.values[n] > self.values[local] {
                    local = n;
                }
            }
            if self.compare(local, best) == Ordering::Greater {
                best = local;
            }
            if end >= hi {
                break;
            }
            bi += 1;
            start = end + 1;
        }
        best
    }

    /// All rescaled values as plain f64.
    pub fn to_vec(&self) -> Vec<f64> {
        (0..self.len()).map(|n| self.value(n)).collect()
    }

    fn into_pmf(mut self) -> Self {
        debug_assert_eq!(self.kind, SeriesKind::H);
        let k = self.params.k() as f64;
        let (mant, exp) = exp_neg_split(k, self.params.lambda());
        for v in &mut self.values {
            *v *= mant;
        }
        for b in &mut self.blocks {
            b.exp2 += exp;
        }
        self.kind = SeriesKind::Pmf;
        self
    }
}

/// `e^{-k*lambda}` as `(mantissa in (0.5, 1], binary exponent)`.
fn exp_neg_split(k: f64, lambda: f64) -> (f64, i64) {
    const LN2_HI: f64 = 6.931_471_803_691_238e-1;
    const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;
    let p = k * lambda;
    let err = k.mul_add(lambda, -p);
    let q = (p / std::f64::consts::LN_2).floor();
    let r = (p - q * LN2_HI) - q * LN2_LO;
    let m = (-r).exp() * (1.0 - err);
    let (m2, e2) = frexp(m);
    (m2, e2 - q as i64)
}

fn check_len(n_max: usize) -> Result<()> {
    if n_max >= MAX_SERIES_LEN {
        return Err(Error::UnsupportedRange(format!(
            "series length {n_max} exceeds the supported maximum {MAX_SERIES_LEN}"
        )));
    }
    Ok(())
}

/// Rescales `work[lo..=hi]` by `2^-shift` and opens a new block at `n`.
fn rescale(work: &mut [f64], lo: usize, hi: usize, shift: i64, blocks: &mut Vec<ScaleBlock>, n: usize) {
    let f = 2f64.powi(-shift as i32);
    for w in &mut work[lo..=hi] {
        *w *= f;
    }
    let exp2 = blocks.last().map_or(0, |b| b.exp2) + shift;
    if blocks.last().is_some_and(|b| b.start == n) {
        blocks.last_mut().unwrap().exp2 = exp2;
    } else {
        blocks.push(ScaleBlock { start: n, exp2 });
    }
}

/// Decides whether the window ending at `n` must be rescaled, returning the shift.
fn rescale_shift(work: &[f64], n: usize, window: usize, next_low_check: &mut usize) -> Option<i64> {
    let v = work[n];
    if v > RESCALE_HI {
        return Some(frexp(v).1);
    }
    if v < RESCALE_LO && n >= *next_low_check {
        let wmax = work[n + 1 - window..=n].iter().copied().fold(0.0, f64::max);
        if wmax < RESCALE_LO && wmax > 0.0 {
            return Some(frexp(wmax).1);
        }
        *next_low_check = n + window / 4 + 1;
    }
    None
}

/// O(n*k) direct summation of the probability recurrence for `h`.
pub(crate) fn direct_h(k: usize, lambda: f64, n_max: usize) -> (Vec<f64>, Vec<ScaleBlock>) {
    let mut work = vec![0.0; n_max + 1];
    let mut values = vec![0.0; n_max + 1];
    let mut blocks = vec![ScaleBlock { start: 0, exp2: 0 }];
    let weights: Vec<f64> = (1..=k).map(|j| j as f64).collect();
    work[0] = 1.0;
    values[0] = 1.0;
    let mut next_low_check = 0;
    for n in 1..=n_max {
        let m = n.min(k);
        let mut acc = 0.0;
        for (w, x) in weights[..m].iter().zip(work[n - m..n].iter().rev()) {
            acc += w * x;
        }
        work[n] = lambda * acc / n as f64;
        let window = (n + 1).min(k);
        if let Some(shift) = rescale_shift(&work, n, window, &mut next_low_check) {
            rescale(&mut work, n + 1 - window, n, shift, &mut blocks, n);
        }
        values[n] = work[n];
    }
    (values, blocks)
}

/// O(n) evaluation of the same recurrence with running window sums.
///
/// `S(n) = sum_{j=1..k} f(n-j)` and `T(n) = sum_{j=1..k} j f(n-j)` advance by
/// `S(n+1) = S(n) + f(n) - f(n-k)` and `T(n+1) = T(n) - k f(n-k) + S(n+1)`;
/// both are recomputed exactly every [`WINDOW_REFRESH`] steps. Used for the
/// dense lambda sweeps, where only the location of the maximum matters.
pub(crate) fn window_h(k: usize, lambda: f64, n_max: usize) -> (Vec<f64>, Vec<ScaleBlock>) {
    let mut work = vec![0.0; n_max + 1];
    let mut values = vec![0.0; n_max + 1];
    let mut blocks = vec![ScaleBlock { start: 0, exp2: 0 }];
    work[0] = 1.0;
    values[0] = 1.0;
    let exact_sums = |work: &[f64], next: usize| -> (f64, f64) {
        let m = next.min(k);
        let mut s = 0.0;
        let mut t = 0.0;
        for j in 1..=m {
            let x = work[next - j];
            s += x;
            t += j as f64 * x;
        }
        (s, t)
    };
    let (mut s, mut t) = (1.0, 1.0);
    let kf = k as f64;
    let mut next_low_check = 0;
    for n in 1..=n_max {
        work[n] = lambda * t / n as f64;
        let window = (n + 1).min(k);
        let rescaled = match rescale_shift(&work, n, window, &mut next_low_check) {
            Some(shift) => {
                rescale(&mut work, n + 1 - window, n, shift, &mut blocks, n);
                true
            }
            None => false,
        };
        values[n] = work[n];
        if rescaled || n % WINDOW_REFRESH == 0 {
            (s, t) = exact_sums(&work, n + 1);
        } else {
            let old = if n >= k { work[n - k] } else { 0.0 };
            s = s + work[n] - old;
            t = t - kf * old + s;
        }
    }
    (values, blocks)
}

/// h-series by the O(n*k) engine, without the cross-check.
pub(crate) fn h_unchecked(params: &DistParams, n_max: usize) -> ScaledSeries {
    let (values, blocks) = direct_h(params.k(), params.lambda(), n_max);
    ScaledSeries { params: *params, kind: SeriesKind::H, values, blocks }
}

/// h-series by the sliding-window engine.
pub(crate) fn h_fast(params: &DistParams, n_max: usize) -> ScaledSeries {
    let (values, blocks) = window_h(params.k(), params.lambda(), n_max);
    ScaledSeries { params: *params, kind: SeriesKind::H, values, blocks }
}

/// `h_k(n; lambda)` for `n = 0..=n_max`.
///
/// The first entries are re-derived by the order-direction recurrence; a
/// relative disagreement above `1e-10` is reported as [`Error::PrecisionLoss`].
pub fn h_series(params: &DistParams, n_max: usize) -> Result<ScaledSeries> {
    check_len(n_max)?;
    let series = h_unchecked(params, n_max);
    cross_check(&series)?;
    Ok(series)
}

/// `f_k(n; lambda)` for `n = 0..=n_max`.
pub fn pmf_series(params: &DistParams, n_max: usize) -> Result<ScaledSeries> {
    Ok(h_series(params, n_max)?.into_pmf())
}

fn cross_check(series: &ScaledSeries) -> Result<()> {
    let prefix = series.n_max().min(CROSS_CHECK_PREFIX);
    let reference = h_by_order(series.params(), prefix);
    for (n, want) in reference.iter().enumerate() {
        let got = series.wide(n);
        // entries that fell below the f64 range relative to their block carry no information
        if series.raw()[n] < f64::MIN_POSITIVE {
            continue;
        }
        let rel = got.relative_difference(*want);
        if rel > CROSS_CHECK_TOL {
            return Err(Error::PrecisionLoss(format!(
                "recurrences disagree at n = {n} (k = {}, lambda = {}): relative difference {rel:e}",
                series.params().k(),
                series.params().lambda()
            )));
        }
    }
    Ok(())
}

/// `h_k(n; lambda)` for `n = 0..=n_max` by recursing in the order:
///
/// ```text
/// h_k(n) = sum_{j=0..floor(n/k)} lambda^j / j! * h_{k-1}(n - k j),   h_1(n) = lambda^n / n!
/// ```
///
/// For orders above `n_max` only the `j = 0` term survives, so the table stops
/// at order `min(k, n_max)`. Cost is `O(n_max^2 log k)`.
pub fn h_by_order(params: &DistParams, n_max: usize) -> Vec<WideFloat> {
    let lam = WideFloat::from_f64(params.lambda());
    let mut coef = vec![WideFloat::ONE; n_max + 1];
    for j in 1..=n_max {
        coef[j] = coef[j - 1].mul(lam).div_f64(j as f64);
    }
    // order 1 is lambda^n / n!
    let mut row = coef.clone();
    let top = params.k().min(n_max.max(1));
    for order in 2..=top {
        let mut next = vec![WideFloat::ZERO; n_max + 1];
        for (n, slot) in next.iter_mut().enumerate() {
            let mut acc = WideFloat::ZERO;
            for j in 0..=n / order {
                acc = acc.add(coef[j].mul(row[n - order * j]));
            }
            *slot = acc;
        }
        row = next;
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(k: usize, lambda: f64) -> DistParams {
        DistParams::new(k, lambda).unwrap()
    }

    #[test]
    fn first_entries_match_closed_forms() {
        let s = h_series(&p(2, 1.0), 3).unwrap();
        assert_eq!(s.value(0), 1.0);
        assert!((s.value(1) - 1.0).abs() < 1e-15);
        assert!((s.value(2) - 1.5).abs() < 1e-15);
        assert!((s.value(3) - 7.0 / 6.0).abs() < 1e-15);
        for &lam in &[0.01, 0.3, 2.5] {
            for k in [1, 2, 7] {
                let s = h_series(&p(k, lam), 1).unwrap();
                assert_eq!(s.value(0), 1.0);
                assert!((s.value(1) - lam).abs() <= 1e-16 * lam);
            }
        }
    }

    #[test]
    fn pmf_start_and_poisson_case() {
        let s = pmf_series(&p(1, 1.0), 5).unwrap();
        let mut fact = 1.0;
        for n in 0..=5 {
            if n > 0 {
                fact *= n as f64;
            }
            let want = (-1.0f64).exp() / fact;
            assert!((s.value(n) - want).abs() < 1e-15 * want, "n = {n}");
        }
        let s = pmf_series(&p(3, 0.05), 0).unwrap();
        assert!((s.value(0) - (-0.15f64).exp()).abs() < 1e-16);
        let lam = 3f64.sqrt() - 1.0;
        let s = pmf_series(&p(2, lam), 2).unwrap();
        let want = (-2.0 * lam).exp();
        assert!((s.value(2) - want).abs() < 1e-15 * want);
        assert!((s.value(0) - want).abs() < 1e-15 * want);
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(DistParams::new(2, 0.0).is_err());
        assert!(h_series(&p(2, 1.0), MAX_SERIES_LEN).is_err());
    }

    #[test]
    fn large_rate_rescales_without_overflow() {
        // k*lambda = 8000: e^{-8000} underflows any f64
        let params = p(400, 20.0);
        let n = params.default_n_max();
        let s = pmf_series(&params, n).unwrap();
        assert!(s.blocks().len() > 1);
        assert!(s.raw().iter().all(|v| v.is_finite() && *v >= 0.0));
        let total: f64 = (0..=n).map(|i| s.value(i)).sum();
        assert!((total - 1.0).abs() < 1e-10, "{total}");
        let h = h_series(&params, 10).unwrap();
        assert_eq!(h.value(0), 1.0);
    }

    #[test]
    fn window_engine_tracks_direct_engine() {
        for &(k, lam) in &[(2, 0.7), (15, 0.25), (50, 0.10194), (100, 2.0), (7, 30.0)] {
            let params = p(k, lam);
            let n = params.floor_mean() + 5;
            let a = h_unchecked(&params, n);
            let b = h_fast(&params, n);
            for i in 0..=n {
                let rel = b.wide(i).relative_difference(a.wide(i));
                assert!(rel < 1e-12, "k={k} lam={lam} n={i} rel={rel:e}");
            }
            assert_eq!(a.argmax(0, n), b.argmax(0, n));
        }
    }

    #[test]
    fn argmax_compares_across_blocks() {
        let params = p(3, 200.0);
        let n = params.default_n_max();
        let s = h_unchecked(&params, n);
        assert!(s.blocks().len() > 2);
        let m = s.argmax(0, n);
        let brute = (0..=n)
            .max_by(|&a, &b| s.ln_value(a).total_cmp(&s.ln_value(b)))
            .unwrap();
        assert_eq!(m, brute);
    }
}
