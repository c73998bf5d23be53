//! Brute-force evaluation of `h_k(n; lambda)` by listing every tuple
//! `(n_1, ..., n_k)` with `n_1 + 2 n_2 + ... + k n_k = n`.
//!
//! Slow and exact; used to anchor the other evaluation paths in tests.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{factorial_inverses, HPolynomial};

pub const ORACLE_N_MAX: usize = 25;
pub const ORACLE_K_MAX: usize = 25;

/// One term `lambda^degree / (n_1! ... n_k!)` of the sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleTerm {
    pub counts: Vec<usize>,
    pub weight: BigRational,
    pub degree: usize,
}

fn check_caps(k: usize, n: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("order k must be at least 1".into()));
    }
    if n > ORACLE_N_MAX || k > ORACLE_K_MAX {
        return Err(Error::UnsupportedRange(format!(
            "enumeration is limited to n <= {ORACLE_N_MAX} and k <= {ORACLE_K_MAX}, got n = {n}, k = {k}"
        )));
    }
    Ok(())
}

/// All tuples for `(k, n)`, ordered by descent on `n_k`, then `n_{k-1}`, and so on.
pub fn tuples(k: usize, n: usize) -> Result<Vec<TupleTerm>> {
    check_caps(k, n)?;
    let inv_fact = factorial_inverses(n);
    let mut out = Vec::new();
    let mut counts = vec![0; k];
    descend(k, n, &mut counts, &inv_fact, &mut out);
    Ok(out)
}

fn descend(part: usize, rest: usize, counts: &mut [usize], inv_fact: &[BigRational], out: &mut Vec<TupleTerm>) {
    if part == 1 {
        counts[0] = rest;
        let weight = counts
            .iter()
            .fold(BigRational::one(), |w, &c| w * &inv_fact[c]);
        out.push(TupleTerm {
            counts: counts.to_vec(),
            weight,
            degree: counts.iter().sum(),
        });
        return;
    }
    for c in 0..=rest / part {
        counts[part - 1] = c;
        descend(part - 1, rest - part * c, counts, inv_fact, out);
    }
    counts[part - 1] = 0;
}

/// Coefficients of `h_k(n; .)` collected from the tuple enumeration.
pub fn enumerate_h(k: usize, n: usize) -> Result<HPolynomial> {
    let mut coeffs = vec![BigRational::zero(); n + 1];
    for t in tuples(k, n)? {
        coeffs[t.degree] += t.weight;
    }
    Ok(HPolynomial::from_coeffs(k, n, coeffs))
}

/// Exact value of the polynomial at a rational `lambda`.
pub fn eval_exact(poly: &HPolynomial, lambda: &BigRational) -> BigRational {
    poly.eval(lambda)
}

/// Shorthand for the rational `num / den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
