use proptest::prelude::*;

use shockstrip::wave::{default_anchor, locate_singularities};
use shockstrip::{PolynomialFlux, ShockProblem};

fn concave(a: f64, b: f64) -> PolynomialFlux {
    PolynomialFlux::new(vec![0.0, b, -0.5 * a]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn concave_flux_is_admissible_and_convex_is_not(a in 0.1f64..5.0, b in -2.0f64..2.0, lo in -3.0f64..3.0, gap in 0.05f64..4.0) {
        let concave_problem = ShockProblem::new(concave(a, b), lo, lo + gap, 1.0).unwrap();
        prop_assert!(concave_problem.ensure_admissible().is_ok());
        let convex_problem = ShockProblem::new(concave(-a, b), lo, lo + gap, 1.0).unwrap();
        prop_assert!(convex_problem.ensure_admissible().is_err());
    }

    #[test]
    fn strip_scales_linearly_with_viscosity(nu in 0.05f64..20.0, lo in -2.0f64..2.0, gap in 0.2f64..3.0) {
        let strip = |nu: f64| {
            let p = ShockProblem::new(PolynomialFlux::classical(), lo, lo + gap, nu).unwrap().normalize();
            locate_singularities(&p, default_anchor(&p)).unwrap().y0_physical()
        };
        let (base, scaled) = (strip(1.0), strip(nu));
        prop_assert!((scaled / (nu * base) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cubic_strip_is_invariant_under_celerity_shift(s in -1.5f64..1.5) {
        // Adding a linear term to the flux only moves the frame.
        let p = |slope: f64| {
            let flux = PolynomialFlux::new(vec![0.0, slope, 0.0, -1.0 / 3.0]).unwrap();
            let p = ShockProblem::new(flux, 1.0, 2.0, 1.0).unwrap().normalize();
            locate_singularities(&p, default_anchor(&p)).unwrap().y0_physical()
        };
        prop_assert!((p(s) - p(0.0)).abs() < 1e-9);
    }
}
