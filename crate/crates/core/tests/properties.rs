use approx::assert_relative_eq;
use fockdual::fenchel::{conjugate_at, entropy_sum, log_conjugate_at};
use fockdual::laplace::{laplace_integral, LaplaceOptions};
use fockdual::potential::{FnPotential, Translated};
use fockdual::weights::{make_fock, make_separable_power};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn laplace_integral_is_translation_covariant(y in -1.5f64..1.5, a in -1.0f64..1.0) {
        let h = FnPotential::new(1, |x: &[f64]| x[0].powi(4) / 4.0);
        let opts = LaplaceOptions::default();
        let base = laplace_integral(&h, &[y], &opts).unwrap();
        let shifted = Translated::new(FnPotential::new(1, |x: &[f64]| x[0].powi(4) / 4.0), vec![a]);
        let moved = laplace_integral(&shifted, &[y], &opts).unwrap();
        prop_assert!((moved.ln_value - base.ln_value - a * y).abs() < 1e-8);
    }

    #[test]
    fn conjugate_scales_under_linear_tilt(y in -2.0f64..2.0, c in -1.0f64..1.0) {
        let h = FnPotential::new(1, |x: &[f64]| x[0] * x[0] / 2.0);
        let tilted = FnPotential::new(1, move |x: &[f64]| x[0] * x[0] / 2.0 + c * x[0]);
        let a = conjugate_at(&h, &[y - c]).unwrap().value;
        let b = conjugate_at(&tilted, &[y]).unwrap().value;
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn entropy_identity_holds_pointwise(x in 0.05f64..2.0, z in 0.05f64..2.0) {
        for phi in [make_fock(2).unwrap(), make_separable_power(2, 4.0).unwrap()] {
            let star = phi.conjugate_weight().unwrap();
            let a = log_conjugate_at(&phi, &[x, z], -40.0).unwrap().value;
            let b = log_conjugate_at(&star, &[x, z], -40.0).unwrap().value;
            prop_assert!((a + b - entropy_sum(&[x, z])).abs() < 1e-7);
        }
    }
}

#[test]
fn gaussian_laplace_integral_matches_closed_form() {
    let h = FnPotential::new(1, |x: &[f64]| x[0] * x[0] / 2.0);
    let v = laplace_integral(&h, &[1.0], &LaplaceOptions::default()).unwrap().value;
    assert_relative_eq!(v, (2.0 * std::f64::consts::PI).sqrt() * 0.5f64.exp(), max_relative = 1e-9);
}
