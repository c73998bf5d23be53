use num_rational::BigRational;
use num_traits::Zero;
use pok::oracle::{enumerate_h, ratio, tuples};
use pok::poly::h_polynomial;

#[test]
fn enumeration_examples() {
    let p = enumerate_h(2, 2).unwrap();
    assert_eq!(p.coeffs(), &[ratio(0, 1), ratio(1, 1), ratio(1, 2)]);
    assert_eq!(tuples(2, 2).unwrap().len(), 2);
    let p = enumerate_h(3, 3).unwrap();
    assert_eq!(p.coeffs(), &[ratio(0, 1), ratio(1, 1), ratio(1, 1), ratio(1, 6)]);
    assert_eq!(enumerate_h(1, 5).unwrap().coeff(5), ratio(1, 120));
}

#[test]
fn tuples_satisfy_their_constraint() {
    for k in 1..=8 {
        for n in 0..=16 {
            for t in tuples(k, n).unwrap() {
                let s: usize = t.counts.iter().enumerate().map(|(i, c)| (i + 1) * c).sum();
                assert_eq!(s, n);
                assert_eq!(t.degree, t.counts.iter().sum::<usize>());
                assert!(t.weight > BigRational::zero());
            }
        }
    }
}

#[test]
fn orders_above_n_have_the_same_tuples() {
    for n in 0..=12 {
        for k in n + 1..=n + 5 {
            assert_eq!(enumerate_h(k, n).unwrap().coeffs(), enumerate_h(n.max(1), n).unwrap().coeffs());
        }
    }
}

#[test]
fn enumeration_obeys_the_order_recurrence() {
    for k in 2..=7 {
        for n in 0..=16 {
            let whole = enumerate_h(k, n).unwrap();
            let mut built = vec![BigRational::zero(); n + 1];
            let mut inv_fact = ratio(1, 1);
            for j in 0..=n / k {
                if j > 0 {
                    inv_fact /= ratio(j as i64, 1);
                }
                let lower = enumerate_h(k - 1, n - k * j).unwrap();
                for (d, c) in lower.coeffs().iter().enumerate() {
                    built[d + j] += c * &inv_fact;
                }
            }
            assert_eq!(whole.coeffs(), built.as_slice(), "k={k} n={n}");
        }
    }
}

#[test]
fn coefficients_positive_with_known_leading_term() {
    let mut fact = 1i64;
    for n in 1..=20 {
        fact *= n as i64;
        for k in [1, 2, 5, 20] {
            let p = enumerate_h(k, n).unwrap();
            assert_eq!(p.coeff(n), ratio(1, fact));
            assert!(p.coeff(0).is_zero());
            let lowest = n.div_ceil(k);
            for (d, c) in p.coeffs().iter().enumerate() {
                assert_eq!(*c > BigRational::zero(), d >= lowest, "k={k} n={n} d={d}");
            }
        }
    }
    assert_eq!(h_polynomial(6, 20).unwrap(), enumerate_h(6, 20).unwrap());
}
