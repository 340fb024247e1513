//! Property tests for the structural invariants: convexity and inversion
//! of the line constant, the exact discrete scaling law, and grid
//! alignment under refinement.

use klt_core::grid::Grid1D;
use klt_core::line::{lq_norm_1d, scale_potential, SampledPotential1D};
use klt_core::params::{invert_lambda_r, lambda_r, make_params};
use proptest::prelude::*;

fn qs() -> impl Strategy<Value = f64> {
    // q > d/2 = 1 with some margin, away from the q -> 1 blowup of p.
    1.05f64..8.0
}

proptest! {
    #[test]
    fn lambda_r_is_convex(q in qs(), mu1 in 1e-3f64..1e3, scale in 1.001f64..50.0, t in 0.01f64..0.99) {
        let pr = make_params(2, q).unwrap();
        let mu2 = mu1 * scale;
        let mid = t * mu1 + (1.0 - t) * mu2;
        let lhs = lambda_r(mid, &pr).unwrap();
        let rhs = t * lambda_r(mu1, &pr).unwrap() + (1.0 - t) * lambda_r(mu2, &pr).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12), "convexity violated: {lhs} > {rhs}");
    }

    #[test]
    fn lambda_r_roundtrips(q in qs(), mu in 1e-3f64..1e3) {
        let pr = make_params(2, q).unwrap();
        let back = invert_lambda_r(lambda_r(mu, &pr).unwrap(), &pr).unwrap();
        prop_assert!((back - mu).abs() <= 1e-12 * mu, "{back} vs {mu}");
        let lam = lambda_r(mu, &pr).unwrap();
        let fwd = lambda_r(invert_lambda_r(lam, &pr).unwrap(), &pr).unwrap();
        prop_assert!((fwd - lam).abs() <= 1e-12 * lam);
    }

    #[test]
    fn lambda_r_monotone(q in qs(), mu in 1e-3f64..1e3, factor in 1.0001f64..10.0) {
        let pr = make_params(2, q).unwrap();
        prop_assert!(lambda_r(mu * factor, &pr).unwrap() > lambda_r(mu, &pr).unwrap());
    }

    #[test]
    fn discrete_norm_scaling_law_is_exact(
        q in 1.5f64..5.0,
        nu in 0.1f64..10.0,
        amp in 0.1f64..4.0,
        width in 0.5f64..2.0,
    ) {
        let grid = Grid1D::symmetric(12.0, 257).unwrap();
        let v = SampledPotential1D::from_fn(grid, |s| amp * (-s * s / (2.0 * width * width)).exp());
        let base = lq_norm_1d(&v, q).unwrap();
        let scaled = scale_potential(&v, nu).unwrap();
        let got = lq_norm_1d(&scaled, q).unwrap();
        let expect = nu.powf(2.0 - 1.0 / q) * base;
        prop_assert!((got - expect).abs() <= 1e-11 * expect.max(1e-30), "{got} vs {expect}");
    }

    #[test]
    fn refined_grids_stay_aligned(n in 16usize..400, a in -5.0f64..0.0, w in 0.5f64..20.0) {
        let grid = Grid1D::new(a, a + w, n).unwrap();
        let fine = grid.refined();
        prop_assert_eq!(fine.n(), 2 * n + 1);
        for i in 0..n {
            let delta = (fine.point(2 * i + 1) - grid.point(i)).abs();
            prop_assert!(delta <= 1e-12 * (1.0 + grid.point(i).abs()));
        }
    }
}
