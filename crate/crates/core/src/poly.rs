//! Exact rational coefficients of `h_k(n; lambda)` as a polynomial in `lambda`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest `n` accepted by [`h_polynomial`].
pub const EXACT_N_MAX: usize = 64;

/// `h_k(n; lambda) = sum_j coeffs[j] * lambda^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HPolynomial {
    k: usize,
    n: usize,
    coeffs: Vec<BigRational>,
}

impl HPolynomial {
    pub(crate) fn from_coeffs(k: usize, n: usize, coeffs: Vec<BigRational>) -> Self {
        debug_assert_eq!(coeffs.len(), n + 1);
        HPolynomial { k, n, coeffs }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The `n` of `h_k(n; .)`, which is also the degree.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficients indexed by power of `lambda`, `0..=n`.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> BigRational {
        self.coeffs.get(j).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, lambda: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * lambda + c;
        }
        acc
    }

    /// Nearest-double evaluation via the exact value.
    pub fn eval_f64(&self, lambda: f64) -> f64 {
        let lam = BigRational::from_float(lambda).expect("finite lambda");
        rational_to_f64(&self.eval(&lam))
    }
}

pub(crate) fn factorial_inverses(n: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(n + 1);
    let mut fact = BigInt::one();
    out.push(BigRational::one());
    for j in 1..=n {
        fact *= j;
        out.push(BigRational::new(BigInt::one(), fact.clone()));
    }
    out
}

/// Converts a positive or zero rational to the nearest f64 (within one ulp).
pub fn rational_to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    if x.is_zero() {
        return 0.0;
    }
    // scale numerator so the integer quotient carries 64+ significant bits
    let num = x.numer();
    let den = x.denom();
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let q = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        num / (den << (-shift) as usize)
    };
    crate::wide::ldexp(q.to_f64().expect("quotient fits"), -shift)
}

/// Coefficients of `h_k(n; lambda)` from the order recurrence
/// `h_k(n) = sum_j lambda^j / j! * h_{k-1}(n - k j)` in exact arithmetic.
pub fn h_polynomial(k: usize, n: usize) -> Result<HPolynomial> {
    if k == 0 {
        return Err(Error::InvalidParameter("order k must be at least 1".into()));
    }
    if n > EXACT_N_MAX {
        return Err(Error::UnsupportedRange(format!(
            "exact coefficients are limited to n <= {EXACT_N_MAX}, got {n}"
        )));
    }
    let inv_fact = factorial_inverses(n);
    // row[m] holds h_order(m) for m = 0..=n; order 1 is lambda^m / m!
    let mut row: Vec<Vec<BigRational>> = (0..=n)
        .map(|m| {
            let mut c = vec![BigRational::zero(); m + 1];
            c[m] = inv_fact[m].clone();
            c
        })
        .collect();
    // orders above n contribute only the j = 0 term
    for order in 2..=k.min(n) {
        let mut next = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut c = vec![BigRational::zero(); m + 1];
            for j in 0..=m / order {
                for (deg, a) in row[m - order * j].iter().enumerate() {
                    if !a.is_zero() {
                        c[deg + j] += a * &inv_fact[j];
                    }
                }
            }
            next.push(c);
        }
        row = next;
    }
    let coeffs = row.swap_remove(n);
    Ok(HPolynomial::from_coeffs(k, n, coeffs))
}
