use crate::error::{Error, Result};

/// Order `k` and rate `lambda` of one Poisson distribution of order k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistParams {
    k: usize,
    lambda: f64,
}

impl DistParams {
    pub fn new(k: usize, lambda: f64) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParameter(format!("order k must be >= 1, got {k}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "rate lambda must be finite and > 0, got {lambda}"
            )));
        }
        Ok(Self { k, lambda })
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// k(k+1)/2, the mean jump size times k.
    #[inline]
    pub fn kappa(&self) -> u64 {
        kappa(self.k)
    }

    /// `floor(lambda * kappa)` of the exact product, the upper bound on any mode.
    pub fn floor_mean(&self) -> usize {
        let kappa = self.kappa() as f64;
        let p = self.lambda * kappa;
        let err = self.lambda.mul_add(kappa, -p);
        let f = p.floor();
        if f == p && err < 0.0 {
            (f - 1.0) as usize
        } else {
            f as usize
        }
    }

    /// `lambda * k(k+1)(2k+1)/6`.
    pub fn variance(&self) -> f64 {
        let k = self.k as f64;
        self.lambda * (k * (k + 1.0) * (2.0 * k + 1.0) / 6.0)
    }

    /// Series length that covers all practically relevant mass:
    /// `ceil(kappa*lambda) + max(50, ceil(20*sd))`.
    pub fn default_n_max(&self) -> usize {
        let mean = (self.kappa() as f64 * self.lambda).ceil() as usize;
        let tail = (20.0 * self.variance().sqrt()).ceil() as usize;
        mean + tail.max(50)
    }
}

/// k(k+1)/2 in integer arithmetic.
#[inline]
pub fn kappa(k: usize) -> u64 {
    let k = k as u64;
    k * (k + 1) / 2
}

/// Numerical controls shared by the search and statistics routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    /// Final bisection bracket width on lambda.
    pub root_tol: f64,
    /// Significant decimal digits used when a comparison escalates.
    pub digits: u32,
    /// Relative tolerance under which two pmf values count as tied.
    pub tie_tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            root_tol: 1e-12,
            digits: 30,
            tie_tol: 1e-9,
        }
    }
}

impl Settings {
    pub fn validate(&self) -> Result<()> {
        if !(self.root_tol > 0.0 && self.root_tol < 1e-3) {
            return Err(Error::InvalidParameter(format!(
                "root tolerance must lie in (0, 1e-3), got {}",
                self.root_tol
            )));
        }
        if !(20..=2000).contains(&self.digits) {
            return Err(Error::InvalidParameter(format!(
                "extended precision digits must lie in [20, 2000], got {}",
                self.digits
            )));
        }
        if !(self.tie_tol > 0.0 && self.tie_tol < 1e-3) {
            return Err(Error::InvalidParameter(format!(
                "tie tolerance must lie in (0, 1e-3), got {}",
                self.tie_tol
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_params() {
        assert!(DistParams::new(0, 1.0).is_err());
        assert!(DistParams::new(2, 0.0).is_err());
        assert!(DistParams::new(2, -1.0).is_err());
        assert!(DistParams::new(2, f64::NAN).is_err());
        assert!(DistParams::new(2, f64::INFINITY).is_err());
    }

    #[test]
    fn kappa_is_exact() {
        assert_eq!(kappa(1), 1);
        assert_eq!(kappa(2), 3);
        assert_eq!(kappa(50), 1275);
        assert_eq!(kappa(10_000), 50_005_000);
    }

    #[test]
    fn floor_mean_handles_integer_products() {
        let p = DistParams::new(1, 3.0).unwrap();
        assert_eq!(p.floor_mean(), 3);
        let p = DistParams::new(2, 1.0).unwrap();
        assert_eq!(p.floor_mean(), 3);
        // 0.1 is slightly above 1/10 so 10 * 0.1 rounds to exactly 1.
        let p = DistParams::new(4, 0.1).unwrap();
        assert_eq!(p.floor_mean(), 1);
    }
}
