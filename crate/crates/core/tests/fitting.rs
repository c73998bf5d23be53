use pok::fitting::{
    kappa_mode_points, linear_fit, log_spaced_orders, mean_minus_mode_points, mean_points, power_law_fit, FitModel,
};
use pok::search::DoubleModeResult;
use pok::Error;
use proptest::prelude::*;

fn fake(k: usize, m_hat: usize, lambda_hat: f64) -> DoubleModeResult {
    DoubleModeResult {
        k,
        m_hat,
        lambda_hat,
        bracket_width: 0.0,
        runner_up: m_hat + 1,
        runner_up_gap: 1.0,
        r_k: lambda_hat,
    }
}

#[test]
fn recovers_exact_models() {
    let pts: Vec<(f64, f64)> = [0.5, 1.0, 2.0, 7.0, 11.0].iter().map(|&x| (x, 2.0 * x * x * x)).collect();
    let f = power_law_fit(&pts).unwrap();
    assert_eq!(f.model, FitModel::PowerLaw);
    assert!((f.coefficients.0 - 2.0).abs() <= 1e-10 && (f.coefficients.1 - 3.0).abs() <= 1e-10);
    assert!(f.residual <= 1e-10);
    let pts: Vec<(f64, f64)> = (-3..7).map(|i| (i as f64, 3.0 + 0.5 * i as f64)).collect();
    let f = linear_fit(&pts).unwrap();
    assert!((f.coefficients.0 - 3.0).abs() <= 1e-10 && (f.coefficients.1 - 0.5).abs() <= 1e-10);
    assert_eq!(f.n_points, 10);
    assert_eq!(f.domain, (-3.0, 6.0));
}

#[test]
fn mode_at_or_above_mean_is_rejected() {
    let good = [fake(10, 4, 1.0), fake(20, 30, 1.0), fake(30, 100, 0.5)];
    let pts = mean_minus_mode_points(&good).unwrap();
    assert_eq!(pts[0], (10.0, 51.0));
    let bad = [fake(10, 4, 1.0), fake(20, 210, 1.0), fake(30, 100, 0.5)];
    assert!(matches!(mean_minus_mode_points(&bad), Err(Error::DataIntegrity(_))));
    assert_eq!(mean_points(&good)[1], (20.0, 210.0));
    assert_eq!(kappa_mode_points(&good)[2], (465.0, 100.0));
}

#[test]
fn orders_are_log_spaced() {
    let ks = log_spaced_orders(50, 1000, 16);
    assert_eq!(ks.first(), Some(&50));
    assert_eq!(ks.last(), Some(&1000));
    assert!(ks.windows(2).all(|w| w[0] < w[1]));
    let ratios: Vec<f64> = ks.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect();
    assert!(ratios.iter().all(|r| (r - 20f64.powf(1.0 / 15.0)).abs() < 0.02));
}

proptest! {
    #[test]
    fn fits_ignore_point_order(
        pts in prop::collection::vec((0.1f64..100.0, 0.1f64..100.0), 3..30),
        seed in any::<u64>(),
    ) {
        prop_assume!(pts.iter().any(|p| p.0 != pts[0].0));
        let mut shuffled = pts.clone();
        let n = shuffled.len();
        for i in (1..n).rev() {
            let j = (seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64) >> 33) as usize % (i + 1);
            shuffled.swap(i, j);
        }
        prop_assert_eq!(linear_fit(&pts).unwrap(), linear_fit(&shuffled).unwrap());
        prop_assert_eq!(power_law_fit(&pts).unwrap(), power_law_fit(&shuffled).unwrap());
    }

    #[test]
    fn residual_nonnegative(pts in prop::collection::vec((0.1f64..100.0, 0.1f64..100.0), 3..30)) {
        prop_assume!(pts.iter().any(|p| p.0 != pts[0].0));
        let f = linear_fit(&pts).unwrap();
        prop_assert!(f.residual >= 0.0 && f.coefficients.0.is_finite());
    }
}
