//! Pointwise physics: flux vectors, Jacobians, Manning friction, the source
//! vector and bed slopes.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Sub};

use crate::grid::Grid;
use crate::math::{powf, sqrt};

/// Physical constants of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    /// Gravitational acceleration (m/s^2).
    pub g: f64,
    /// Manning roughness (s/m^(1/3)).
    pub n_manning: f64,
    /// Dimensional constant of the friction law (m^(1/2)/s).
    pub c0: f64,
    /// Depth below which a node is dry (m).
    pub h_eps: f64,
}

impl Default for PhysParams {
    /// Frictionless, `g = 10`, `c0 = 40`, `h_eps = 1e-6`.
    fn default() -> Self {
        Self {
            g: 10.0,
            n_manning: 0.0,
            c0: 40.0,
            h_eps: 1e-6,
        }
    }
}

/// Parameter validation failure.
#[derive(Debug, Clone, PartialEq)]
pub struct InvalidParam {
    /// Parameter name.
    pub name: &'static str,
    /// Rejected value.
    pub value: f64,
}

impl fmt::Display for InvalidParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid physical parameter {} = {}", self.name, self.value)
    }
}

impl core::error::Error for InvalidParam {}

impl PhysParams {
    /// Validated constructor.
    pub fn new(g: f64, n_manning: f64, c0: f64, h_eps: f64) -> Result<Self, InvalidParam> {
        let p = Self {
            g,
            n_manning,
            c0,
            h_eps,
        };
        p.validate()?;
        Ok(p)
    }

    /// Check `g > 0`, `c0 > 0`, `n >= 0`, `h_eps > 0`, all finite.
    pub fn validate(&self) -> Result<(), InvalidParam> {
        let checks = [
            ("g", self.g, self.g > 0.0),
            ("c0", self.c0, self.c0 > 0.0),
            ("n_manning", self.n_manning, self.n_manning >= 0.0),
            ("h_eps", self.h_eps, self.h_eps > 0.0),
        ];
        for (name, value, ok) in checks {
            if !(ok && value.is_finite()) {
                return Err(InvalidParam { name, value });
            }
        }
        Ok(())
    }
}

/// Three components: continuity, x momentum, y momentum.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CellVec3(pub [f64; 3]);

impl CellVec3 {
    /// All components finite.
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl Add for CellVec3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for CellVec3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Mul<f64> for CellVec3 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

/// Row-major 3x3 matrix.
pub type Mat3 = [[f64; 3]; 3];

/// `M · x`.
#[inline(always)]
pub fn mat_vec(m: &Mat3, x: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * x[0] + m[0][1] * x[1] + m[0][2] * x[2],
        m[1][0] * x[0] + m[1][1] * x[1] + m[1][2] * x[2],
        m[2][0] * x[0] + m[2][1] * x[1] + m[2][2] * x[2],
    ]
}

/// x-direction flux `(hu, hu² + gh²/2, huv)`.
#[inline]
pub fn flux_e(h: f64, u: f64, v: f64, g: f64) -> CellVec3 {
    let hu = h * u;
    CellVec3([hu, hu * u + 0.5 * g * h * h, hu * v])
}

/// y-direction flux `(hv, huv, hv² + gh²/2)`.
#[inline]
pub fn flux_f(h: f64, u: f64, v: f64, g: f64) -> CellVec3 {
    let hv = h * v;
    CellVec3([hv, hv * u, hv * v + 0.5 * g * h * h])
}

/// Manning friction slopes `(Sfx, Sfy)`.
///
/// The law is `n² (u^{3/2} + u v^{1/2}) / (c0² h^{4/3})` and its mirror for y.
/// Fractional powers act on magnitudes with the sign of the leading velocity
/// factor kept, so `Sfx` is odd in `u` and friction opposes the flow.
/// Dry nodes (`h < h_eps`) return zero.
pub fn manning_friction(h: f64, u: f64, v: f64, params: &PhysParams) -> (f64, f64) {
    if h < params.h_eps || params.n_manning == 0.0 {
        return (0.0, 0.0);
    }
    let scale = params.n_manning * params.n_manning / (params.c0 * params.c0 * powf(h, 4.0 / 3.0));
    let (au, av) = (u.abs(), v.abs());
    let sfx = u.signum() * au * sqrt(au) + u * sqrt(av);
    let sfy = v.signum() * av * sqrt(av) + v * sqrt(au);
    // signum(0.0) is 1.0, but the magnitude factor is then 0.
    (scale * sfx, scale * sfy)
}

/// Source vector `gh (0, S0x - Sfx, S0y - Sfy)`.
#[inline]
pub fn source_g(h: f64, s0x: f64, s0y: f64, sfx: f64, sfy: f64, g: f64) -> CellVec3 {
    let gh = g * h;
    CellVec3([0.0, gh * (s0x - sfx), gh * (s0y - sfy)])
}

/// Jacobian of `E` with respect to the primitive triple `(h, u, v)`:
///
/// ```text
/// [ u        h    0  ]
/// [ u² + gh  2hu  0  ]
/// [ uv       hv   hu ]
/// ```
pub fn jacobian_e(h: f64, u: f64, v: f64, g: f64) -> Mat3 {
    [
        [u, h, 0.0],
        [u * u + g * h, 2.0 * h * u, 0.0],
        [u * v, h * v, h * u],
    ]
}

/// Jacobian of `E` with respect to the conservative triple `(h, hu, hv)`.
pub fn jacobian_e_conservative(h: f64, u: f64, v: f64, g: f64) -> Mat3 {
    [
        [0.0, 1.0, 0.0],
        [g * h - u * u, 2.0 * u, 0.0],
        [-u * v, v, u],
    ]
}

/// Jacobian of `F` with respect to the conservative triple `(h, hu, hv)`.
pub fn jacobian_f_conservative(h: f64, u: f64, v: f64, g: f64) -> Mat3 {
    [
        [0.0, 0.0, 1.0],
        [-u * v, v, u],
        [g * h - v * v, 0.0, 2.0 * v],
    ]
}

/// Dimensionless bed slopes on every node.
///
/// These enter the momentum source as `gh (S0 - Sf)`. For a bed elevation `z`
/// the physically downhill-driving slope is `S0 = -∇z`.
#[derive(Debug, Clone, PartialEq)]
pub struct BedSlopes {
    /// x slope per node.
    pub s0x: Vec<f64>,
    /// y slope per node.
    pub s0y: Vec<f64>,
}

impl BedSlopes {
    /// Flat bed.
    pub fn zeros(grid: &Grid) -> Self {
        Self::constant(grid, 0.0, 0.0)
    }

    /// Uniform slopes.
    pub fn constant(grid: &Grid, s0x: f64, s0y: f64) -> Self {
        Self {
            s0x: vec![s0x; grid.len()],
            s0y: vec![s0y; grid.len()],
        }
    }

    /// Slopes sampled from a function of node coordinates.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(f64, f64) -> (f64, f64)) -> Self {
        let mut out = Self::zeros(grid);
        for p in 0..grid.ny() {
            for l in 0..grid.nx() {
                let (sx, sy) = f(grid.x(l), grid.y(p));
                let i = grid.idx(l, p);
                out.s0x[i] = sx;
                out.s0y[i] = sy;
            }
        }
        out
    }

    /// Flip the sign of both components.
    pub fn negated(mut self) -> Self {
        self.s0x.iter_mut().chain(self.s0y.iter_mut()).for_each(|s| *s = -*s);
        self
    }

    /// All entries finite and one per node.
    pub fn is_valid_for(&self, grid: &Grid) -> bool {
        self.s0x.len() == grid.len()
            && self.s0y.len() == grid.len()
            && self.s0x.iter().chain(&self.s0y).all(|s| s.is_finite())
    }
}

/// Gradient of the paraboloid `z = h0 (r²/d² - 1)` centered at `center`:
/// `(2 h0 (x - xc) / d², 2 h0 (y - yc) / d²)`.
pub fn paraboloid_slopes(grid: &Grid, h0: f64, d: f64, center: (f64, f64)) -> BedSlopes {
    let k = 2.0 * h0 / (d * d);
    BedSlopes::from_fn(grid, |x, y| (k * (x - center.0), k * (y - center.1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn flux_e_examples() {
        assert_eq!(flux_e(2.0, 3.0, 1.0, 10.0), CellVec3([6.0, 38.0, 6.0]));
        assert_eq!(flux_e(0.0, 0.0, 0.0, 10.0), CellVec3([0.0, 0.0, 0.0]));
        assert_eq!(flux_e(1.0, 0.0, 0.0, 10.0), CellVec3([0.0, 5.0, 0.0]));
    }

    #[test]
    fn flux_f_examples() {
        assert_eq!(flux_f(2.0, 3.0, 1.0, 10.0), CellVec3([2.0, 6.0, 22.0]));
        assert_eq!(flux_f(0.0, 0.0, 0.0, 10.0), CellVec3([0.0, 0.0, 0.0]));
    }

    #[test]
    fn manning_examples() {
        let p = PhysParams::new(10.0, 0.025, 40.0, 1e-6).unwrap();
        assert_eq!(manning_friction(1.0, 0.0, 0.0, &p), (0.0, 0.0));
        let (sx, sy) = manning_friction(1.0, 1.0, 1.0, &p);
        assert_relative_eq!(sx, 7.8125e-7, max_relative = 1e-12);
        assert_relative_eq!(sy, 7.8125e-7, max_relative = 1e-12);
        let (sx, _) = manning_friction(1.0, -1.0, 1.0, &p);
        assert_relative_eq!(sx, -7.8125e-7, max_relative = 1e-12);
        assert_eq!(manning_friction(1e-9, 3.0, 3.0, &p), (0.0, 0.0));
    }

    #[test]
    fn source_examples() {
        assert_eq!(source_g(0.0, 0.3, 0.1, 0.0, 0.0, 10.0), CellVec3([0.0, 0.0, 0.0]));
        let s = source_g(1.0, 0.01, 0.0, 0.0, 0.0, 10.0);
        assert_relative_eq!(s.0[1], 0.1, max_relative = 1e-14);
        assert_eq!(s.0[2], 0.0);
        assert_eq!(source_g(2.0, 0.2, -0.1, 0.2, -0.1, 10.0), CellVec3([0.0, 0.0, 0.0]));
    }

    #[test]
    fn jacobian_examples() {
        assert_eq!(
            jacobian_e(1.0, 2.0, 3.0, 10.0),
            [[2.0, 1.0, 0.0], [14.0, 4.0, 0.0], [6.0, 3.0, 2.0]]
        );
        assert_eq!(jacobian_e(0.0, 0.0, 0.0, 10.0), [[0.0; 3]; 3]);
        assert_eq!(
            jacobian_e(1.0, 0.0, 0.0, 10.0),
            [[0.0, 1.0, 0.0], [10.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
        );
    }

    #[test]
    fn paraboloid_slope_examples() {
        let g = Grid::new(0.0, 0.0, 4.0, 4.0, 8, 8).unwrap();
        let s = paraboloid_slopes(&g, 0.1, 1.0, (2.0, 2.0));
        let c = g.idx(4, 4);
        assert_eq!((s.s0x[c], s.s0y[c]), (0.0, 0.0));
        // x = 3 is l = 6: x - xc = 1.
        assert_relative_eq!(s.s0x[g.idx(6, 4)], 0.2, max_relative = 1e-14);
        let river = Grid::new(0.0, 0.0, 80.0, 1000.0, 8, 100).unwrap();
        let s = paraboloid_slopes(&river, 0.1, 1.0, (40.0, 500.0));
        let i = river.idx(8, 100);
        assert_relative_eq!(s.s0x[i], 2.0 * 0.1 * (80.0 - 40.0), max_relative = 1e-14);
        assert_relative_eq!(s.s0y[i], 2.0 * 0.1 * (1000.0 - 500.0), max_relative = 1e-14);
        let n = s.clone().negated();
        assert_eq!(n.s0x[i], -s.s0x[i]);
    }

    /// Central finite-difference Jacobian of `flux_e` w.r.t. `(h, u, v)`.
    fn fd_jacobian(h: f64, u: f64, v: f64, g: f64, eps: f64) -> Mat3 {
        let mut jac = [[0.0; 3]; 3];
        for col in 0..3 {
            let mut plus = [h, u, v];
            let mut minus = [h, u, v];
            plus[col] += eps;
            minus[col] -= eps;
            let fp = flux_e(plus[0], plus[1], plus[2], g).0;
            let fm = flux_e(minus[0], minus[1], minus[2], g).0;
            for row in 0..3 {
                jac[row][col] = (fp[row] - fm[row]) / (2.0 * eps);
            }
        }
        jac
    }

    proptest! {
        #[test]
        fn hydrostatic_flux_at_rest(h in 0.0f64..10.0, g in 1.0f64..20.0) {
            let e = flux_e(h, 0.0, 0.0, g);
            let f = flux_f(h, 0.0, 0.0, g);
            prop_assert_eq!(e, CellVec3([0.0, 0.5 * g * h * h, 0.0]));
            prop_assert_eq!(f, CellVec3([0.0, 0.0, 0.5 * g * h * h]));
        }

        #[test]
        fn flux_f_mirrors_flux_e(h in 0.0f64..5.0, u in -3.0f64..3.0, v in -3.0f64..3.0) {
            let e = flux_e(h, v, u, 10.0).0;
            let f = flux_f(h, u, v, 10.0).0;
            prop_assert_eq!(f[0], e[0]);
            prop_assert_eq!(f[2], e[1]);
            prop_assert_eq!(f[1], e[2]);
        }

        #[test]
        fn friction_is_odd_and_sign_invariant(h in 0.01f64..5.0, u in -4.0f64..4.0, v in -4.0f64..4.0) {
            let p = PhysParams::new(9.81, 0.03, 40.0, 1e-6).unwrap();
            let (sx, sy) = manning_friction(h, u, v, &p);
            let (sxm, _) = manning_friction(h, -u, v, &p);
            let (_, sym) = manning_friction(h, u, -v, &p);
            prop_assert!((sx + sxm).abs() <= 1e-15 * (1.0 + sx.abs()));
            prop_assert!((sy + sym).abs() <= 1e-15 * (1.0 + sy.abs()));
            for (a, b) in [(u, -v), (-u, v), (-u, -v)] {
                let (fx, fy) = manning_friction(h, a, b, &p);
                prop_assert!((fx.abs() - sx.abs()).abs() <= 1e-15 * (1.0 + sx.abs()));
                prop_assert!((fy.abs() - sy.abs()).abs() <= 1e-15 * (1.0 + sy.abs()));
            }
        }

        #[test]
        fn jacobian_matches_finite_differences(h in 0.05f64..3.0, u in -2.0f64..2.0, v in -2.0f64..2.0) {
            let exact = jacobian_e(h, u, v, 10.0);
            let fd = fd_jacobian(h, u, v, 10.0, 1e-6);
            let scale = exact.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
            for r in 0..3 {
                for c in 0..3 {
                    prop_assert!((exact[r][c] - fd[r][c]).abs() / scale < 1e-5);
                }
            }
        }

        #[test]
        fn conservative_jacobians_match_finite_differences(h in 0.05f64..3.0, u in -2.0f64..2.0, v in -2.0f64..2.0) {
            let eps = 1e-6;
            let q = [h, h * u, h * v];
            let e_of = |q: [f64; 3]| flux_e(q[0], q[1] / q[0], q[2] / q[0], 10.0).0;
            let f_of = |q: [f64; 3]| flux_f(q[0], q[1] / q[0], q[2] / q[0], 10.0).0;
            let je = jacobian_e_conservative(h, u, v, 10.0);
            let jf = jacobian_f_conservative(h, u, v, 10.0);
            for col in 0..3 {
                let mut qp = q;
                let mut qm = q;
                qp[col] += eps;
                qm[col] -= eps;
                let (ep, em) = (e_of(qp), e_of(qm));
                let (fp, fm) = (f_of(qp), f_of(qm));
                for row in 0..3 {
                    prop_assert!((je[row][col] - (ep[row] - em[row]) / (2.0 * eps)).abs() < 1e-5 * (1.0 + je[row][col].abs()));
                    prop_assert!((jf[row][col] - (fp[row] - fm[row]) / (2.0 * eps)).abs() < 1e-5 * (1.0 + jf[row][col].abs()));
                }
            }
        }

        #[test]
        fn source_is_linear_in_depth(h in 0.0f64..4.0, c in 0.0f64..5.0, sx in -1.0f64..1.0, sy in -1.0f64..1.0) {
            let a = source_g(c * h, sx, sy, 0.01, -0.02, 10.0);
            let b = source_g(h, sx, sy, 0.01, -0.02, 10.0) * c;
            for k in 0..3 {
                prop_assert!((a.0[k] - b.0[k]).abs() <= 1e-12 * (1.0 + a.0[k].abs()));
            }
        }
    }
}
