//! Thacker's paraboloid-basin solutions, discrete norms and convergence orders.
//!
//! Both examples live on `[0, l]²` over the bed `z = h0 (r²/d² - 1)` with
//! `r` measured from the basin centre `(l/2, l/2)`. Exact depths are clamped
//! at zero outside the wet region. The momentum source is `-g h ∇z`, so the
//! bed slopes handed to the stepper are the negated gradient.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::grid::{FlowState, Grid, GridError, Primitive};
use crate::math::{cos, ln, sin, sqrt};
use crate::physics::{paraboloid_slopes, BedSlopes, PhysParams};
use crate::run::{run, LevelObserver, RunPlan, RunStatus, StepPolicy};
use crate::stability::StabilityError;
use crate::stepper::{BoundaryProvider, StageConfig, Stepper};

/// Failures of the verification helpers.
#[derive(Debug, Clone, PartialEq)]
pub enum VerificationError {
    /// Empty series passed to [`linf_time_norm`].
    EmptySeries,
    /// Non-positive error passed to [`convergence_order`].
    NonPositiveError(f64),
    /// Refinement ratio not above one.
    Ratio(f64),
    /// Invalid Thacker parameter.
    Param(&'static str, f64),
    /// Grid construction failed.
    Grid(GridError),
    /// Governor configuration rejected.
    Stability(StabilityError),
}

impl fmt::Display for VerificationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerificationError::EmptySeries => write!(f, "time series is empty"),
            VerificationError::NonPositiveError(e) => write!(f, "error {e} must be positive"),
            VerificationError::Ratio(r) => write!(f, "refinement ratio {r} must exceed 1"),
            VerificationError::Param(name, v) => write!(f, "invalid parameter {name} = {v}"),
            VerificationError::Grid(e) => write!(f, "{e}"),
            VerificationError::Stability(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for VerificationError {}

impl From<GridError> for VerificationError {
    fn from(e: GridError) -> Self {
        VerificationError::Grid(e)
    }
}

impl From<StabilityError> for VerificationError {
    fn from(e: StabilityError) -> Self {
        VerificationError::Stability(e)
    }
}

/// Which analytical solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Example {
    /// Radially symmetric oscillation.
    One,
    /// Planar surface rotating in the basin.
    Two,
}

impl Example {
    /// `1` or `2`.
    pub fn number(self) -> u8 {
        match self {
            Example::One => 1,
            Example::Two => 2,
        }
    }

    /// Parse `1` or `2`.
    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Example::One),
            2 => Some(Example::Two),
            _ => None,
        }
    }
}

/// Basin and solution parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThackerParams {
    /// Domain edge.
    pub l: f64,
    /// Central depth scale.
    pub h0: f64,
    /// Radius of zero bed elevation.
    pub d: f64,
    /// Gravity.
    pub g: f64,
    /// Initial shoreline radius (example 1).
    pub r0: f64,
    /// Surface offset (example 2).
    pub eta: f64,
}

impl Default for ThackerParams {
    fn default() -> Self {
        Self {
            l: 4.0,
            h0: 0.1,
            d: 1.0,
            g: 10.0,
            r0: 0.8,
            eta: 0.5,
        }
    }
}

impl ThackerParams {
    /// Check positivity and `r0 < d`.
    pub fn validate(&self) -> Result<(), VerificationError> {
        for (name, v) in [
            ("l", self.l),
            ("h0", self.h0),
            ("d", self.d),
            ("g", self.g),
            ("r0", self.r0),
            ("eta", self.eta),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(VerificationError::Param(name, v));
            }
        }
        if self.r0 >= self.d {
            return Err(VerificationError::Param("r0", self.r0));
        }
        Ok(())
    }

    /// Angular frequency: `√(8 g h0)/d` or `√(2 g h0)/d`.
    pub fn omega(&self, example: Example) -> f64 {
        let c = match example {
            Example::One => 8.0,
            Example::Two => 2.0,
        };
        sqrt(c * self.g * self.h0) / self.d
    }

    /// `R = (d² - r0²)/(d² + r0²)`.
    pub fn amplitude(&self) -> f64 {
        let (d2, r2) = (self.d * self.d, self.r0 * self.r0);
        (d2 - r2) / (d2 + r2)
    }

    /// One oscillation period `2π/ω`.
    pub fn period(&self, example: Example) -> f64 {
        2.0 * PI / self.omega(example)
    }

    /// Basin centre coordinate `l/2`.
    pub fn center(&self) -> f64 {
        0.5 * self.l
    }

    /// Physical constants matching the basin: frictionless, given `h_eps`.
    pub fn physics(&self, h_eps: f64) -> PhysParams {
        PhysParams {
            g: self.g,
            n_manning: 0.0,
            h_eps,
            ..PhysParams::default()
        }
    }
}

/// Bed elevation `h0 (r²/d² - 1)`.
pub fn paraboloid_z(x: f64, y: f64, p: &ThackerParams) -> f64 {
    let c = p.center();
    let r2 = (x - c) * (x - c) + (y - c) * (y - c);
    p.h0 * (r2 / (p.d * p.d) - 1.0)
}

/// Example 1 at `(x, y, t)`.
pub fn thacker1_exact(x: f64, y: f64, t: f64, p: &ThackerParams) -> Primitive {
    let c = p.center();
    let (w, r) = (p.omega(Example::One), p.amplitude());
    let (dx, dy) = (x - c, y - c);
    let r2 = dx * dx + dy * dy;
    let den = 1.0 - r * cos(w * t);
    let one_r2 = 1.0 - r * r;
    let surf = p.h0 * (sqrt(one_r2) / den - r2 / (p.d * p.d) * (one_r2 / (den * den) - 1.0) - 1.0);
    let h = (surf - paraboloid_z(x, y, p)).max(0.0);
    let a = w * r / (2.0 * den) * sin(w * t);
    Primitive::new(h, a * dx, a * dy)
}

/// Example 2 at `(x, y, t)`.
pub fn thacker2_exact(x: f64, y: f64, t: f64, p: &ThackerParams) -> Primitive {
    let c = p.center();
    let w = p.omega(Example::Two);
    let (s, co) = (sin(w * t), cos(w * t));
    let surf = p.eta * p.h0 / (p.d * p.d) * (2.0 * (x - c) * co + 2.0 * (y - c) * s - p.eta);
    let h = (surf - paraboloid_z(x, y, p)).max(0.0);
    Primitive::new(h, -p.eta * w * s, p.eta * w * co)
}

/// Either example.
pub fn thacker_exact(example: Example, x: f64, y: f64, t: f64, p: &ThackerParams) -> Primitive {
    match example {
        Example::One => thacker1_exact(x, y, t, p),
        Example::Two => thacker2_exact(x, y, t, p),
    }
}

/// `√(ΔxΔy Σ w²)` over interior nodes.
pub fn l2_norm(field: &[f64], grid: &Grid) -> f64 {
    let mut acc = 0.0;
    for p in grid.interior_p() {
        let row = p * grid.nx();
        for l in grid.interior_l() {
            let w = field[row + l];
            acc += w * w;
        }
    }
    sqrt(acc * grid.dx() * grid.dy())
}

/// Maximum of per-level norms.
pub fn linf_time_norm(series: &[f64]) -> Result<f64, VerificationError> {
    series
        .iter()
        .copied()
        .reduce(f64::max)
        .ok_or(VerificationError::EmptySeries)
}

/// `log(e_coarse/e_fine)/log(ratio)`.
pub fn convergence_order(e_coarse: f64, e_fine: f64, ratio: f64) -> Result<f64, VerificationError> {
    for e in [e_coarse, e_fine] {
        if !(e > 0.0 && e.is_finite()) {
            return Err(VerificationError::NonPositiveError(e));
        }
    }
    if !(ratio > 1.0 && ratio.is_finite()) {
        return Err(VerificationError::Ratio(ratio));
    }
    Ok(ln(e_coarse / e_fine) / ln(ratio))
}

/// Square basin grid with `Mx = My = round(l/Δx)`.
pub fn thacker_grid(p: &ThackerParams, dx: f64) -> Result<Grid, VerificationError> {
    if !(dx > 0.0 && dx.is_finite()) {
        return Err(VerificationError::Param("dx", dx));
    }
    let m = libm::round(p.l / dx) as usize;
    Ok(Grid::new(0.0, 0.0, p.l, p.l, m, m)?)
}

/// `S0 = -∇z` on `grid`.
pub fn thacker_slopes(grid: &Grid, p: &ThackerParams) -> BedSlopes {
    let c = p.center();
    paraboloid_slopes(grid, p.h0, p.d, (c, c)).negated()
}

/// Exact state at time `t`.
pub fn thacker_state(example: Example, grid: Grid, t: f64, p: &ThackerParams) -> FlowState {
    FlowState::from_fn(grid, t, |x, y| thacker_exact(example, x, y, t, p))
}

/// Boundary data sampled from the exact solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactBoundary {
    /// Example.
    pub example: Example,
    /// Parameters.
    pub params: ThackerParams,
}

impl BoundaryProvider for ExactBoundary {
    fn prescribe(&self, grid: &Grid, l: usize, p: usize, t: f64) -> Primitive {
        thacker_exact(self.example, grid.x(l), grid.y(p), t, &self.params)
    }
}

/// Running `L∞(0,T;L²)` errors against the exact solution.
///
/// Velocities are compared only where the exact depth is at least `h_eps`.
#[derive(Debug, Clone)]
pub struct ErrorAccumulator {
    example: Example,
    params: ThackerParams,
    h_eps: f64,
    /// `max_n ‖hⁿ - h(tⁿ)‖₀`.
    pub e_h: f64,
    /// `max_n ‖uⁿ - u(tⁿ)‖₀` over wet nodes.
    pub e_u: f64,
    /// `max_n ‖vⁿ - v(tⁿ)‖₀` over wet nodes.
    pub e_v: f64,
    /// `max_n ‖φⁿ‖₀` of the computed conservative state.
    pub computed_envelope: f64,
    /// `max_n ‖φ(tⁿ)‖₀` of the exact conservative state.
    pub exact_envelope: f64,
    /// Levels seen.
    pub levels: usize,
}

impl ErrorAccumulator {
    /// Fresh accumulator.
    pub fn new(example: Example, params: ThackerParams, h_eps: f64) -> Self {
        Self {
            example,
            params,
            h_eps,
            e_h: 0.0,
            e_u: 0.0,
            e_v: 0.0,
            computed_envelope: 0.0,
            exact_envelope: 0.0,
            levels: 0,
        }
    }

    /// Ratio of the computed to the exact norm envelope.
    pub fn envelope_ratio(&self) -> f64 {
        self.computed_envelope / self.exact_envelope
    }
}

impl LevelObserver for ErrorAccumulator {
    fn level(&mut self, _n: usize, state: &FlowState) {
        let grid = state.grid;
        let (mut sh, mut su, mut sv, mut sc, mut se) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for p in grid.interior_p() {
            let y = grid.y(p);
            for l in grid.interior_l() {
                let i = grid.idx(l, p);
                let ex = thacker_exact(self.example, grid.x(l), y, state.t, &self.params);
                let num = state.primitive(i, self.h_eps);
                let dh = num.h - ex.h;
                sh += dh * dh;
                if ex.h >= self.h_eps {
                    let (du, dv) = (num.u - ex.u, num.v - ex.v);
                    su += du * du;
                    sv += dv * dv;
                }
                let q = state.cons(i);
                sc += q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
                let qe = ex.conservative();
                se += qe[0] * qe[0] + qe[1] * qe[1] + qe[2] * qe[2];
            }
        }
        let w = grid.dx() * grid.dy();
        let nan_max = |a: f64, b: f64| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) };
        self.e_h = nan_max(self.e_h, sqrt(sh * w));
        self.e_u = nan_max(self.e_u, sqrt(su * w));
        self.e_v = nan_max(self.e_v, sqrt(sv * w));
        self.computed_envelope = nan_max(self.computed_envelope, sqrt(sc * w));
        self.exact_envelope = self.exact_envelope.max(sqrt(se * w));
        self.levels += 1;
    }
}

/// One rung of a refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    /// Mesh spacing in x.
    pub dx: f64,
    /// Mesh spacing in y.
    pub dy: f64,
    /// Nominal time step (the largest step taken under a governor).
    pub k: f64,
    /// Depth error.
    pub e_h: f64,
    /// x-velocity error.
    pub e_u: f64,
    /// y-velocity error.
    pub e_v: f64,
    /// Depth order against the previous (coarser) rung.
    pub order_h: Option<f64>,
    /// x-velocity order.
    pub order_u: Option<f64>,
    /// y-velocity order.
    pub order_v: Option<f64>,
    /// Computed-to-exact norm envelope ratio.
    pub envelope_ratio: f64,
    /// How the rung ended.
    pub status: RunStatus,
    /// Steps taken.
    pub steps: usize,
    /// Smallest restriction value seen, for checking fixed steps against it.
    pub k_thm1_min: f64,
}

impl ErrorReport {
    /// Whether the rung reached its final time.
    pub fn completed(&self) -> bool {
        self.status == RunStatus::Completed
    }
}

/// Wet/dry threshold used by the basin rungs. Thinner thresholds let the
/// shoreline films pick up spurious velocities that stall the implicit stage.
pub const THACKER_H_EPS: f64 = 1e-3;

/// A single verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct Rung {
    /// Example.
    pub example: Example,
    /// Parameters.
    pub params: ThackerParams,
    /// Mesh spacing (both axes).
    pub dx: f64,
    /// Step policy.
    pub policy: StepPolicy,
    /// Final time.
    pub t_end: f64,
    /// Stage settings.
    pub config: StageConfig,
    /// Wet/dry threshold.
    pub h_eps: f64,
}

impl Rung {
    /// Rung over three periods with the default solver settings.
    pub fn new(example: Example, dx: f64, policy: StepPolicy) -> Self {
        let params = ThackerParams::default();
        Self {
            example,
            params,
            dx,
            policy,
            t_end: 3.0 * params.period(example),
            config: StageConfig::default(),
            h_eps: THACKER_H_EPS,
        }
    }

    /// Run it.
    pub fn run(&self) -> Result<ErrorReport, VerificationError> {
        self.params.validate()?;
        let grid = thacker_grid(&self.params, self.dx)?;
        let stepper = Stepper::new(
            self.params.physics(self.h_eps),
            self.config,
            thacker_slopes(&grid, &self.params),
        );
        let initial = thacker_state(self.example, grid, 0.0, &self.params);
        let bc = ExactBoundary {
            example: self.example,
            params: self.params,
        };
        let mut acc = ErrorAccumulator::new(self.example, self.params, self.h_eps);
        let mut plan = RunPlan::new(self.t_end, self.policy);
        plan.series_every = usize::MAX;
        let summary = run(&stepper, &initial, &bc, &plan, &mut acc)?;
        let k = summary.governor.iter().map(|g| g.bound.chosen_k).fold(0.0, f64::max);
        let k_thm1_min = summary.governor.iter().map(|g| g.bound.k_thm1).fold(f64::INFINITY, f64::min);
        let diverged = summary.status != RunStatus::Completed;
        let e = |v: f64| if diverged { f64::INFINITY } else { v };
        Ok(ErrorReport {
            dx: grid.dx(),
            dy: grid.dy(),
            k,
            e_h: e(acc.e_h),
            e_u: e(acc.e_u),
            e_v: e(acc.e_v),
            order_h: None,
            order_u: None,
            order_v: None,
            envelope_ratio: acc.envelope_ratio(),
            status: summary.status,
            steps: summary.steps,
            k_thm1_min,
        })
    }
}

/// Fill pairwise orders of consecutive rungs (coarse to fine, ratio 3).
///
/// A pair with a diverged or zero-error rung gets no order.
pub fn fill_orders(reports: &mut [ErrorReport]) {
    for i in 1..reports.len() {
        let (a, b) = (&reports[i - 1], &reports[i]);
        let o = |x: f64, y: f64| convergence_order(x, y, 3.0).ok();
        let (oh, ou, ov) = (o(a.e_h, b.e_h), o(a.e_u, b.e_u), o(a.e_v, b.e_v));
        let r = &mut reports[i];
        r.order_h = oh;
        r.order_u = ou;
        r.order_v = ov;
    }
}

/// Run every rung in order and attach orders.
pub fn run_convergence_study(rungs: &[Rung]) -> Result<Vec<ErrorReport>, VerificationError> {
    let mut out = Vec::with_capacity(rungs.len());
    for r in rungs {
        out.push(r.run()?);
    }
    fill_orders(&mut out);
    Ok(out)
}

/// Spatial ladder: fixed `k`, `Δx = 3^-e` for each exponent.
pub fn spatial_ladder(example: Example, exponents: &[i32], k: f64, gamma: f64) -> Vec<Rung> {
    exponents
        .iter()
        .map(|&e| Rung::new(example, libm::pow(3.0, -(e as f64)), StepPolicy::Fixed { k, gamma }))
        .collect()
}

/// Temporal ladder: fixed `Δx`, `k = 3^-e` for each exponent.
pub fn temporal_ladder(example: Example, dx: f64, exponents: &[i32], gamma: f64) -> Vec<Rung> {
    exponents
        .iter()
        .map(|&e| {
            Rung::new(
                example,
                dx,
                StepPolicy::Fixed {
                    k: libm::pow(3.0, -(e as f64)),
                    gamma,
                },
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_one_centre_depth() {
        let p = ThackerParams::default();
        assert!((p.amplitude() - 9.0 / 41.0).abs() < 1e-15);
        let s = thacker1_exact(2.0, 2.0, 0.0, &p);
        assert!((s.h - 0.125).abs() < 1e-14, "{}", s.h);
        let s = thacker1_exact(0.3, 3.1, 0.0, &p);
        assert_eq!((s.u, s.v), (0.0, 0.0));
    }

    #[test]
    fn example_one_initial_shoreline() {
        // at t = 0 the depth is h0 (√((1+R)/(1-R)) - r² (1+R)/(1-R)), zero at r² = 0.8
        let p = ThackerParams::default();
        let r = 0.8f64.sqrt();
        assert!(thacker1_exact(2.0 + r - 1e-3, 2.0, 0.0, &p).h > 0.0);
        assert_eq!(thacker1_exact(2.0 + r + 1e-3, 2.0, 0.0, &p).h, 0.0);
    }

    #[test]
    fn solutions_are_periodic() {
        let p = ThackerParams::default();
        for ex in [Example::One, Example::Two] {
            let tp = p.period(ex);
            for (x, y, t) in [(1.5, 2.2, 0.3), (2.7, 1.1, 1.9), (2.0, 2.0, 0.05)] {
                let a = thacker_exact(ex, x, y, t, &p);
                let b = thacker_exact(ex, x, y, t + tp, &p);
                assert!((a.h - b.h).abs() < 1e-12);
                assert!((a.u - b.u).abs() < 1e-12);
                assert!((a.v - b.v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn example_two_values() {
        let p = ThackerParams::default();
        assert!((p.omega(Example::Two) - 2f64.sqrt()).abs() < 1e-15);
        let s = thacker2_exact(2.0, 2.0, 0.0, &p);
        assert!((s.h - 0.075).abs() < 1e-15);
        assert_eq!(s.u, 0.0);
        assert!((s.v - 0.5 * 2f64.sqrt()).abs() < 1e-15);
        let a = thacker2_exact(0.5, 3.0, 1.234, &p);
        let b = thacker2_exact(3.5, 1.0, 1.234, &p);
        assert_eq!((a.u, a.v), (b.u, b.v));
    }

    #[test]
    fn paraboloid_values() {
        let p = ThackerParams::default();
        assert!((paraboloid_z(2.0, 2.0, &p) + 0.1).abs() < 1e-15);
        assert!(paraboloid_z(3.0, 2.0, &p).abs() < 1e-15);
        assert!((paraboloid_z(4.0, 2.0, &p) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn l2_norm_examples() {
        let grid = Grid::new(0.0, 0.0, 1.0, 2.0, 8, 10).unwrap();
        let ones = alloc::vec![1.0; grid.len()];
        let expect = sqrt(grid.dx() * grid.dy() * 5.0 * 7.0);
        assert!((l2_norm(&ones, &grid) - expect).abs() < 1e-15);
        assert_eq!(l2_norm(&alloc::vec![0.0; grid.len()], &grid), 0.0);
        let mut one = alloc::vec![0.0; grid.len()];
        one[grid.idx(3, 4)] = -2.5;
        assert!((l2_norm(&one, &grid) - 2.5 * sqrt(grid.dx() * grid.dy())).abs() < 1e-15);
        // boundary layers do not count
        let mut edge = alloc::vec![0.0; grid.len()];
        edge[grid.idx(1, 4)] = 7.0;
        assert_eq!(l2_norm(&edge, &grid), 0.0);
    }

    #[test]
    fn time_norm_examples() {
        assert_eq!(linf_time_norm(&[1.0, 3.0, 2.0]).unwrap(), 3.0);
        assert_eq!(linf_time_norm(&[0.0]).unwrap(), 0.0);
        assert_eq!(linf_time_norm(&[0.1, 0.2, 0.4]).unwrap(), 0.4);
        assert_eq!(linf_time_norm(&[]), Err(VerificationError::EmptySeries));
    }

    #[test]
    fn order_examples() {
        let o = convergence_order(2.0413e-2, 2.8230e-4, 3.0).unwrap();
        assert!((o - 3.8967).abs() < 5e-5, "{o}");
        assert_eq!(convergence_order(0.3, 0.3, 3.0).unwrap(), 0.0);
        assert!((convergence_order(81.0, 1.0, 3.0).unwrap() - 4.0).abs() < 1e-15);
        assert!(convergence_order(0.0, 1.0, 3.0).is_err());
        assert!(convergence_order(1.0, -1.0, 3.0).is_err());
    }

    #[test]
    fn thacker_grid_spacing() {
        let p = ThackerParams::default();
        let g = thacker_grid(&p, 1.0 / 9.0).unwrap();
        assert_eq!((g.mx(), g.my()), (36, 36));
        assert!((g.dx() - 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(thacker_grid(&p, 1.0 / 81.0).unwrap().mx(), 324);
    }

    #[test]
    fn slopes_point_downhill() {
        let p = ThackerParams::default();
        let g = thacker_grid(&p, 0.25).unwrap();
        let s = thacker_slopes(&g, &p);
        // right of the centre the bed rises, so S0x < 0
        let i = g.idx(12, 8);
        assert!((s.s0x[i] + 0.2).abs() < 1e-14);
        assert_eq!(s.s0y[i], 0.0);
    }

    #[test]
    fn accumulator_is_zero_on_exact_levels() {
        let p = ThackerParams::default();
        let g = thacker_grid(&p, 0.25).unwrap();
        let mut acc = ErrorAccumulator::new(Example::One, p, 1e-6);
        for (n, t) in [0.0, 0.4, 0.9].into_iter().enumerate() {
            acc.level(n, &thacker_state(Example::One, g, t, &p));
        }
        assert!(acc.e_h < 1e-15 && acc.e_u < 1e-12 && acc.e_v < 1e-12);
        assert!((acc.envelope_ratio() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orders_fill_pairwise() {
        let mk = |e: f64| ErrorReport {
            dx: 0.1,
            dy: 0.1,
            k: 0.01,
            e_h: e,
            e_u: e,
            e_v: f64::INFINITY,
            order_h: None,
            order_u: None,
            order_v: None,
            envelope_ratio: 1.0,
            status: RunStatus::Completed,
            steps: 1,
            k_thm1_min: 1.0,
        };
        let mut r = alloc::vec![mk(81.0), mk(1.0), mk(1.0 / 9.0)];
        fill_orders(&mut r);
        assert_eq!(r[0].order_h, None);
        assert!((r[1].order_h.unwrap() - 4.0).abs() < 1e-14);
        assert!((r[2].order_u.unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(r[2].order_v, None);
    }
}
