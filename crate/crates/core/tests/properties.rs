//! Randomized invariants of the building blocks.

use std::f64::consts::PI;

use landau_automorphic::character::{check_rdq, Character, ViolationKind};
use landau_automorphic::config::{parse_nu_expr, NuSpec};
use landau_automorphic::lattice::{symplectic_form, ComplexPoint, Lattice};
use landau_automorphic::specfun::{kummer_terminating, laguerre};
use landau_automorphic::verify::{closed_dimension, verify_chain_rule};
use num_complex::Complex64;
use proptest::prelude::*;

fn point(n: usize) -> impl Strategy<Value = ComplexPoint> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), n)
        .prop_map(|v| ComplexPoint::new(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()))
}

fn planar_lattice() -> impl Strategy<Value = Lattice> {
    (0.5..2.0f64, -1.0..1.0f64, 0.5..2.0f64).prop_map(|(a, b, c)| {
        Lattice::planar(Complex64::new(a, 0.0), Complex64::new(b, c)).expect("independent generators")
    })
}

proptest! {
    #[test]
    fn pi_expressions_stay_exact(k in 1u32..64, d in 1u32..16) {
        let spec = parse_nu_expr(&format!("{k}pi/{d}")).unwrap();
        prop_assert_eq!(spec, NuSpec::PiMultiple { pi_multiple: k as f64 / d as f64 });
        let spec = parse_nu_expr(&format!("{k}*pi")).unwrap();
        prop_assert_eq!(spec.value(), k as f64 * PI);
    }

    #[test]
    fn reduction_lands_in_the_cell(lat in planar_lattice(), z in point(1)) {
        let (r, gamma) = lat.reduce(&z);
        for t in lat.coordinates_of(&r) {
            prop_assert!((-1e-12..1.0 + 1e-12).contains(&t), "t = {t}");
        }
        let back = r.add(&gamma.value);
        prop_assert!(back.sub(&z).norm() < 1e-12);
    }

    #[test]
    fn symplectic_form_is_alternating(z in point(2), w in point(2)) {
        let a = symplectic_form(&z, &w).unwrap();
        let b = symplectic_form(&w, &z).unwrap();
        prop_assert!((a + b).abs() < 1e-12 * (1.0 + a.abs()));
        prop_assert!(symplectic_form(&z, &z).unwrap().abs() < 1e-12);
    }

    #[test]
    fn level_multiplicities_in_two_dimensions(l in 0usize..12, nu in 0.5..20.0f64, vol in 0.1..10.0f64) {
        let ratio = closed_dimension(2, l, nu, vol) / closed_dimension(2, 0, nu, vol);
        prop_assert!((ratio - (l as f64 + 1.0)).abs() < 1e-12 * (l as f64 + 1.0));
    }

    #[test]
    fn kummer_is_laguerre(l in 0usize..10, x in 0.0..30.0f64) {
        let a = kummer_terminating(l, 1, x);
        let b = laguerre(l, 0.0, x);
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()), "{a} vs {b}");
    }

    #[test]
    fn literal_trivial_character_needs_even_flux(k in 1i32..12) {
        let square = Lattice::square();
        let chi = Character::trivial(&square);
        // unit-area cell: the flux is ν/π, and χ ≡ 1 forces e^{iνω} = 1
        let report = check_rdq(k as f64 * PI, &square, &chi);
        prop_assert_eq!(report.valid, k % 2 == 0);
        if k % 2 == 1 {
            prop_assert_eq!(report.violations[0].kind, ViolationKind::LiteralMismatch);
        }
        let half = check_rdq((k as f64 + 0.5) * PI, &square, &chi);
        prop_assert_eq!(half.violations[0].kind, ViolationKind::Quantization);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn chain_rule_at_any_field(nu in 0.1..8.0f64, n in 1usize..3) {
        let r = verify_chain_rule(nu, n, 10, 1e-11).unwrap();
        prop_assert!(r.passed, "{:?}", r.residuals);
    }
}
