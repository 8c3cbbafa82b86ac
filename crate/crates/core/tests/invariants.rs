use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use szasz_lab::lattice::{generalized_operator_with, ClosedFormNorms, ScaledNorms};
use szasz_lab::toric::legendre_invert;
use szasz_lab::{TestFunction, ToricModel, TruncationPolicy};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partition_of_unity_and_constant_invariance(which in 0usize..3, n in 2u32..80, t in 0.02f64..0.98, c in -20.0f64..20.0) {
        let (model, x) = match which {
            0 => (ToricModel::bargmann_fock(1), 6.0 * t),
            1 => (ToricModel::fubini_study(1), t),
            _ => (ToricModel::bergman_ball(1), 6.0 * t),
        };
        let p = TruncationPolicy::default();
        let one = TestFunction::constant(1.0, 1);
        let f = TestFunction::from_spec("gaussian-bump", 1).unwrap();
        let norms = ClosedFormNorms(&model);
        let scaled = ScaledNorms { inner: ClosedFormNorms(&model), log_scale: c };
        let s1 = generalized_operator_with(&model, &one, n, &[x], &p, &norms).unwrap().value;
        prop_assert!((s1 - 1.0).abs() <= 1e-12);
        let a = generalized_operator_with(&model, &f, n, &[x], &p, &norms).unwrap().value;
        let b = generalized_operator_with(&model, &f, n, &[x], &p, &scaled).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-13);
    }

    #[test]
    fn legendre_round_trip(a in 0.01f64..0.98, s in 0.0f64..1.0) {
        // interior point of the CP2 simplex
        let b = (1.0 - a) * (0.01 + 0.98 * s) ;
        let model = ToricModel::fubini_study(2);
        let d = legendre_invert(&model, &[a, b], None).unwrap();
        let back = model.moment_map(&d.rho).unwrap();
        assert_abs_diff_eq!(back[0], a, epsilon = 1e-10);
        assert_abs_diff_eq!(back[1], b, epsilon = 1e-10);
    }
}
