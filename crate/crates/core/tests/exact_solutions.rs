//! The basin solutions satisfy the frictionless equations, and the pentadiagonal
//! norm agrees with a dense eigensolver.

use nalgebra::DMatrix;
use proptest::prelude::*;

use swe_core::stability::{penta_dense, penta_norm_diagnostic};
use swe_core::verification::{paraboloid_z, thacker_exact, Example, ThackerParams};

/// Residuals of mass and both momentum equations at `(x, y, t)` by central
/// differences of step `d`, with `S0 = -∇z`.
fn residual(example: Example, p: &ThackerParams, x: f64, y: f64, t: f64, d: f64) -> [f64; 3] {
    let q = |x: f64, y: f64, t: f64| {
        let s = thacker_exact(example, x, y, t, p);
        [s.h, s.h * s.u, s.h * s.v]
    };
    let e = |x: f64, y: f64| {
        let s = thacker_exact(example, x, y, t, p);
        [s.h * s.u, s.h * s.u * s.u + 0.5 * p.g * s.h * s.h, s.h * s.u * s.v]
    };
    let f = |x: f64, y: f64| {
        let s = thacker_exact(example, x, y, t, p);
        [s.h * s.v, s.h * s.u * s.v, s.h * s.v * s.v + 0.5 * p.g * s.h * s.h]
    };
    let h = thacker_exact(example, x, y, t, p).h;
    let s0x = -(paraboloid_z(x + d, y, p) - paraboloid_z(x - d, y, p)) / (2.0 * d);
    let s0y = -(paraboloid_z(x, y + d, p) - paraboloid_z(x, y - d, p)) / (2.0 * d);
    let src = [0.0, p.g * h * s0x, p.g * h * s0y];
    let (qa, qb) = (q(x, y, t + d), q(x, y, t - d));
    let (ea, eb) = (e(x + d, y), e(x - d, y));
    let (fa, fb) = (f(x, y + d), f(x, y - d));
    core::array::from_fn(|c| (qa[c] - qb[c] + ea[c] - eb[c] + fa[c] - fb[c]) / (2.0 * d) - src[c])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn basin_solutions_satisfy_the_equations(
        ex2 in any::<bool>(),
        x in 0.5f64..3.5,
        y in 0.5f64..3.5,
        t in 0.0f64..3.0,
    ) {
        let p = ThackerParams::default();
        let example = if ex2 { Example::Two } else { Example::One };
        let d = 1e-3;
        // stay clear of the shoreline, where the solution has a kink
        let wet = |x: f64, y: f64, t: f64| thacker_exact(example, x, y, t, &p).h > 5e-3;
        prop_assume!([-1.0, 1.0].iter().all(|s| wet(x + s * 2.0 * d, y, t) && wet(x, y + s * 2.0 * d, t) && wet(x, y, t + s * 2.0 * d)));
        for r in residual(example, &p, x, y, t.max(d), d) {
            prop_assert!(r.abs() < 1e-3, "{example:?} ({x}, {y}, {t}): {r}");
        }
    }
}

#[test]
fn penta_norm_matches_dense_eigensolver() {
    let n = 5;
    let a = DMatrix::from_row_slice(n, n, &penta_dense(n));
    let dense = (a.transpose() * &a).symmetric_eigenvalues().max().sqrt();
    let power = penta_norm_diagnostic(n).computed_norm;
    assert!((dense - power).abs() < 1e-8, "{dense} vs {power}");
}
