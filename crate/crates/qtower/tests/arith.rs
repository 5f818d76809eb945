use proptest::prelude::*;
use qtower::arith::{factor_discriminant, is_fundamental_discriminant, kr, squarefree_kernel, PrimeDiscriminant};

#[test]
fn factorization_examples() {
    let vals = |d| factor_discriminant(d).unwrap().factors.iter().map(|p| p.value()).collect::<Vec<_>>();
    assert_eq!(vals(19176), vec![-3, 8, 17, -47]);
    assert_eq!(vals(-4), vec![-4]);
    assert_eq!(vals(40), vec![5, 8]);
    assert!(factor_discriminant(12 * 4).is_err());
}

#[test]
fn factorization_round_trip_up_to_a_million() {
    let mut n = 0;
    for d in (-1_000_000i64..=1_000_000).step_by(7) {
        if d == 1 || !is_fundamental_discriminant(d) {
            continue;
        }
        let f = factor_discriminant(d).unwrap();
        assert_eq!(f.factors.iter().map(|p| p.value()).product::<i64>(), d);
        assert!(f.factors.windows(2).all(|w| w[0].value().abs() <= w[1].value().abs()));
        n += 1;
    }
    assert!(n > 80_000);
}

proptest! {
    #[test]
    fn kronecker_is_multiplicative(a in -500i64..500, m in 1i64..300, n in 1i64..300) {
        prop_assert_eq!(kr(a, m * n), kr(a, m) * kr(a, n));
    }

    #[test]
    fn kronecker_periodic_for_discriminants(d in -2000i64..2000, n in 1i64..500) {
        prop_assume!(d != 1 && is_fundamental_discriminant(d));
        prop_assert_eq!(kr(d, n), kr(d, n + d.abs()));
    }

    #[test]
    fn kernel_is_squarefree_and_divides(n in 1i64..1_000_000) {
        let k = squarefree_kernel(n).unwrap();
        prop_assert_eq!(n % k, 0);
        let r = n / k;
        let s = (r as f64).sqrt().round() as i64;
        prop_assert_eq!(s * s, r);
    }

    #[test]
    fn prime_discriminants_are_fundamental(v in -5000i64..5000) {
        if let Ok(p) = PrimeDiscriminant::new(v) {
            prop_assert!(is_fundamental_discriminant(p.value()));
            prop_assert_eq!(factor_discriminant(v).unwrap().len(), 1);
        }
    }
}
