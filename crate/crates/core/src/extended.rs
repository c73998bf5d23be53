//! Extended-precision re-evaluation of the h-series.
//!
//! Only used to settle comparisons that land inside the double-precision
//! noise band: `h - 1` near a unit root, relative gaps between near-tied
//! pmf values, and the CDF near one half. Up to 31 significant digits a
//! double-double representation is used; beyond that an arbitrary precision
//! binary float.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use twofloat::TwoFloat;

type Big = FBig<HalfEven, 2>;

/// Largest digit count the double-double path honours.
pub const DOUBLE_DOUBLE_DIGITS: u32 = 31;

const RESCALE_LOG2: i64 = 300;

trait Real: Clone {
    type Ctx: Copy;
    fn from_f64(x: f64, ctx: Self::Ctx) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn mul_small(&self, j: u64) -> Self;
    fn div_small(&self, n: u64) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn ldexp(&self, e: i64) -> Self;
    /// floor(log2(|x|)); `i64::MIN` for zero.
    fn log2_floor(&self) -> i64;
    fn to_f64(&self) -> f64;
    /// `e^{-mult * x}` as `(mantissa, binary exponent)`.
    fn exp_neg(mult: u64, x: f64, ctx: Self::Ctx) -> (Self, i64);
}

fn big_from_f64(x: f64, bits: usize) -> Big {
    Big::try_from(x)
        .expect("finite input")
        .with_precision(bits)
        .value()
}

impl Real for Big {
    type Ctx = usize;

    fn from_f64(x: f64, bits: usize) -> Self {
        big_from_f64(x, bits)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn mul_small(&self, j: u64) -> Self {
        self * Big::from(j)
    }
    fn div_small(&self, n: u64) -> Self {
        self / Big::from(n)
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn ldexp(&self, e: i64) -> Self {
        self.clone() << (e as isize)
    }
    fn log2_floor(&self) -> i64 {
        let repr = self.repr();
        if repr.is_pos_zero() || repr.is_neg_zero() {
            return i64::MIN;
        }
        repr.exponent() as i64 + repr.digits() as i64 - 1
    }
    fn to_f64(&self) -> f64 {
        self.to_f64().value()
    }
    fn exp_neg(mult: u64, x: f64, bits: usize) -> (Self, i64) {
        let arg = Big::from(mult).with_precision(bits + 64).value()
            * big_from_f64(x, bits + 64);
        let v = (-arg).exp();
        let e = Real::log2_floor(&v);
        let m = Real::ldexp(&v, -e).with_precision(bits).value();
        (m, e)
    }
}

impl Real for TwoFloat {
    type Ctx = ();

    fn from_f64(x: f64, _: ()) -> Self {
        TwoFloat::from(x)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn mul_small(&self, j: u64) -> Self {
        self * (j as f64)
    }
    fn div_small(&self, n: u64) -> Self {
        self / (n as f64)
    }
    fn div(&self, other: &Self) -> Self {
        // twofloat's own quotient drops the low word for some operands; long division instead
        let q1 = self.hi() / other.hi();
        let r = self - other * q1;
        let q2 = r.hi() / other.hi();
        let r = r - other * q2;
        let q3 = r.hi() / other.hi();
        TwoFloat::new_add(q1, q2) + q3
    }
    fn ldexp(&self, e: i64) -> Self {
        // exact while both words stay normal
        let mut out = *self;
        let mut e = e;
        while e != 0 {
            let step = e.clamp(-1000, 1000);
            out *= 2f64.powi(step as i32);
            e -= step;
        }
        out
    }
    fn log2_floor(&self) -> i64 {
        let hi = self.hi();
        if hi == 0.0 {
            return i64::MIN;
        }
        let (_, e) = crate::wide::frexp(hi);
        e - 1
    }
    fn to_f64(&self) -> f64 {
        self.hi() + self.lo()
    }
    fn exp_neg(mult: u64, x: f64, _: ()) -> (Self, i64) {
        let (m, e) = <Big as Real>::exp_neg(mult, x, 160);
        let hi = m.to_f64().value();
        let lo = (m - big_from_f64(hi, 160)).to_f64().value();
        (TwoFloat::new_add(hi, lo), e)
    }
}

/// h-series entries stored as `(mantissa, binary exponent)` pairs.
struct Series<R> {
    entries: Vec<(R, i64)>,
}

fn h_series<R: Real>(k: usize, lambda: f64, n_max: usize, ctx: R::Ctx) -> Series<R> {
    let lam = R::from_f64(lambda, ctx);
    let mut work: Vec<R> = Vec::with_capacity(n_max + 1);
    let mut entries = Vec::with_capacity(n_max + 1);
    let mut cur_exp = 0i64;
    let mut next_low_check = 0usize;
    work.push(R::from_f64(1.0, ctx));
    entries.push((R::from_f64(1.0, ctx), 0));
    for n in 1..=n_max {
        let m = n.min(k);
        let mut acc = R::from_f64(0.0, ctx);
        for j in 1..=m {
            acc = acc.add(&work[n - j].mul_small(j as u64));
        }
        let v = lam.mul(&acc).div_small(n as u64);
        work.push(v);
        let e = work[n].log2_floor();
        let window = (n + 1).min(k);
        let mut shift = None;
        if e > RESCALE_LOG2 {
            shift = Some(e);
        } else if e < -RESCALE_LOG2 && n >= next_low_check {
            let wmax = work[n + 1 - window..=n]
                .iter()
                .map(R::log2_floor)
                .max()
                .unwrap_or(i64::MIN);
            if wmax < -RESCALE_LOG2 && wmax != i64::MIN {
                shift = Some(wmax);
            } else {
                next_low_check = n + k / 4 + 1;
            }
        }
        if let Some(s) = shift {
            for w in &mut work[n + 1 - window..=n] {
                *w = w.ldexp(-s);
            }
            cur_exp += s;
        }
        entries.push((work[n].clone(), cur_exp));
    }
    Series { entries }
}

fn h_minus_one_in<R: Real>(k: usize, lambda: f64, ns: &[usize], ctx: R::Ctx) -> Vec<f64> {
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let s = h_series::<R>(k, lambda, n_max, ctx);
    let one = R::from_f64(1.0, ctx);
    ns.iter()
        .map(|&n| {
            let (v, e) = &s.entries[n];
            v.ldexp(*e).sub(&one).to_f64()
        })
        .collect()
}

fn relative_gaps_in<R: Real>(k: usize, lambda: f64, ns: &[usize], ctx: R::Ctx) -> Vec<f64> {
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let s = h_series::<R>(k, lambda, n_max, ctx);
    // locate the largest candidate by exponent first, then mantissa
    let key = |n: usize| {
        let (v, e) = &s.entries[n];
        (v.log2_floor().saturating_add(*e), v.to_f64() * 2f64.powi(-(v.log2_floor() as i32)))
    };
    let top = ns
        .iter()
        .copied()
        .max_by(|&a, &b| key(a).partial_cmp(&key(b)).unwrap())
        .expect("at least one candidate");
    let (vt, et) = &s.entries[top];
    let one = R::from_f64(1.0, ctx);
    ns.iter()
        .map(|&n| {
            let (v, e) = &s.entries[n];
            let ratio = v.ldexp(e - et).div(vt);
            one.sub(&ratio).to_f64()
        })
        .collect()
}

fn cdf_minus_half_in<R: Real>(k: usize, lambda: f64, ns: &[usize], ctx: R::Ctx) -> Vec<f64> {
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let s = h_series::<R>(k, lambda, n_max, ctx);
    let (em, ee) = R::exp_neg(k as u64, lambda, ctx);
    let half = R::from_f64(0.5, ctx);
    let mut acc = R::from_f64(0.0, ctx);
    let mut acc_exp = 0i64;
    let mut out = vec![0.0; ns.len()];
    for (n, (v, e)) in s.entries.iter().enumerate() {
        if *e > acc_exp {
            acc = acc.ldexp(acc_exp - e);
            acc_exp = *e;
        }
        acc = acc.add(&v.ldexp(e - acc_exp));
        for (slot, &want) in out.iter_mut().zip(ns) {
            if want == n {
                *slot = acc.mul(&em).ldexp(acc_exp + ee).sub(&half).to_f64();
            }
        }
    }
    out
}

fn bits_for(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 16
}

macro_rules! dispatch {
    ($name:ident, $k:expr, $lambda:expr, $ns:expr, $digits:expr) => {
        if $digits <= DOUBLE_DOUBLE_DIGITS {
            $name::<TwoFloat>($k, $lambda, $ns, ())
        } else {
            $name::<Big>($k, $lambda, $ns, bits_for($digits))
        }
    };
}

/// `h_k(n; lambda) - 1` for each `n` in `ns`, evaluated with `digits` significant digits.
pub fn h_minus_one(k: usize, lambda: f64, ns: &[usize], digits: u32) -> Vec<f64> {
    dispatch!(h_minus_one_in, k, lambda, ns, digits)
}

/// `1 - h(n)/max_c h(c)` over the candidate set `ns`.
pub fn relative_gaps(k: usize, lambda: f64, ns: &[usize], digits: u32) -> Vec<f64> {
    dispatch!(relative_gaps_in, k, lambda, ns, digits)
}

/// `P(X <= n) - 1/2` for each `n` in `ns`.
pub fn cdf_minus_half(k: usize, lambda: f64, ns: &[usize], digits: u32) -> Vec<f64> {
    dispatch!(cdf_minus_half_in, k, lambda, ns, digits)
}

/// Smallest difference an extended evaluation over `n` terms can resolve.
pub fn resolution(digits: u32, n: usize) -> f64 {
    10f64.powi(-(digits as i32)) * (n as f64 + 10.0)
}
