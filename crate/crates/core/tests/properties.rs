use eop_core::cd_kernel::CdKernel;
use eop_core::recurrence::{extract_five_term, residual_five_term};
use eop_core::zeros::{abel_sum_check, expected_gamma_count, zero_set, DEFAULT_GRID};
use eop_core::{EllipticPoly, EopFamily, TorusLattice, WeightSpec, C64};
use proptest::prelude::*;

fn interior_point(t: f64) -> impl Strategy<Value = C64> {
    (0.01..0.99_f64, 0.01..0.99_f64).prop_map(move |(x, y)| C64::new(x, y * t))
}

fn weight() -> impl Strategy<Value = WeightSpec> {
    prop_oneof![
        Just(WeightSpec::Unity),
        (-0.5..0.5_f64).prop_map(WeightSpec::ExpP),
        (-0.4..0.4_f64).prop_map(WeightSpec::ExpPPrime),
        (-0.3..0.3_f64, -0.3..0.3_f64)
            .prop_map(|(a, b)| WeightSpec::Product(vec![WeightSpec::ExpP(a), WeightSpec::ExpPPrime(b)])),
    ]
}

proptest! {
    #[test]
    fn wp_is_even_periodic_and_on_the_curve(t in 0.7..1.6_f64, u in 0.0..1.0_f64, v in 0.0..1.0_f64) {
        let lat = TorusLattice::new(t).unwrap();
        let z = C64::new(0.05 + 0.9 * u, (0.05 + 0.9 * v) * t);
        let w = lat.wp(z).unwrap();
        let scale = w.norm().max(1.0);
        prop_assert!((lat.wp(z + 1.0).unwrap() - w).norm() < 1e-10 * scale);
        prop_assert!((lat.wp(z + C64::new(0.0, t)).unwrap() - w).norm() < 1e-10 * scale);
        prop_assert!((lat.wp(-z).unwrap() - w).norm() < 1e-10 * scale);
        prop_assert!(lat.curve_residual(z).unwrap() < 1e-9 * scale.powi(3));
    }

    #[test]
    fn wp_is_real_on_gamma(t in 0.7..1.6_f64, s in 0.0..1.0_f64) {
        let lat = TorusLattice::new(t).unwrap();
        let v = lat.wp_all(lat.gamma_point(s)).unwrap();
        prop_assert!(v.wp.im.abs() < 1e-10 * v.wp.norm().max(1.0));
        prop_assert!(v.wp_prime.im.abs() < 1e-10 * v.wp_prime.norm().max(1.0));
    }

    #[test]
    fn weight_spec_display_round_trips(w in weight()) {
        let back: WeightSpec = w.to_string().parse().unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn multiplication_by_wp_matches_pointwise(
        coeffs in prop::collection::vec(-2.0..2.0_f64, 1..8),
        z in interior_point(1.0),
    ) {
        let lat = TorusLattice::new(1.0).unwrap();
        let mut c = coeffs;
        if c.len() > 1 {
            // slot of pi_1 is not part of the basis
            c.insert(1, 0.0);
        }
        let p = EllipticPoly::from_coeffs(c);
        let v = lat.wp_all(z).unwrap();
        let lhs = p.mul_wp().eval_at(&v);
        let rhs = v.wp * p.eval_at(&v);
        prop_assert!((lhs - rhs).norm() < 1e-9 * rhs.norm().max(1.0));
        let lhs = p.mul_wp_prime(lat.g2(), lat.g3()).eval_at(&v);
        let rhs = v.wp_prime * p.eval_at(&v);
        prop_assert!((lhs - rhs).norm() < 1e-9 * rhs.norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_weights_give_orthonormal_families(w in weight()) {
        let fam = EopFamily::build(1.0, &w, 8, 256).unwrap();
        prop_assert!(fam.orthonormality_error() < 1e-8);
        let c5 = extract_five_term(&fam).unwrap();
        prop_assert!(c5.max_asymmetry < 1e-9);
        for n in [2usize, 4, 6] {
            let z = fam.lattice().gamma_point(0.37);
            prop_assert!(residual_five_term(&fam, &c5, n, z).unwrap() < 1e-8);
        }
        // a_2 pairs pi_1 with pi_3 and is identically zero
        for n in [1, 3, 4, 5, 6, 7] {
            prop_assert!(c5.a(n) > 0.0);
        }
        prop_assert_eq!(c5.a(2), 0.0);
    }

    #[test]
    fn family_json_round_trip_is_bit_stable(w in weight()) {
        let fam = EopFamily::build(1.0, &w, 6, 128).unwrap();
        let s = fam.to_json_string().unwrap();
        let back = EopFamily::from_json_str(&s).unwrap();
        prop_assert_eq!(back.to_json_string().unwrap(), s);
    }

    #[test]
    fn cd_kernel_is_symmetric(w in weight(), s in 0.0..1.0_f64, t in 0.0..1.0_f64) {
        let fam = EopFamily::build(1.0, &w, 8, 256).unwrap();
        let k = CdKernel::new(&fam, 7).unwrap();
        let (x, y) = (fam.lattice().gamma_point(s), fam.lattice().gamma_point(t));
        let a = k.kernel_cd(x, y).unwrap().value;
        let b = k.kernel_cd(y, x).unwrap().value;
        prop_assert!((a - b).abs() < 1e-8 * a.abs().max(1.0));
        prop_assert!((a - k.kernel_sum(x, y).unwrap()).abs() < 1e-8 * a.abs().max(1.0));
    }

    #[test]
    fn zeros_follow_the_count_law(w in weight()) {
        let fam = EopFamily::build(1.0, &w, 7, 256).unwrap();
        for n in 2..=7 {
            let zs = zero_set(&fam, n, DEFAULT_GRID).unwrap();
            prop_assert_eq!(zs.gamma_zeros.len(), expected_gamma_count(n));
            prop_assert_eq!(zs.real_zero.is_some(), n % 2 == 1);
            prop_assert!(abel_sum_check(&fam, &zs).unwrap() < 1e-8);
        }
    }
}
