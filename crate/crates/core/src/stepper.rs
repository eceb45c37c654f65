//! The symmetric split step `P1(k/2) ∘ P2(k) ∘ P1(k/2)`.
//!
//! `P1(τ)` is the explicit x-sweep
//!
//! ```text
//! φ* = φ - τ C4x E(φ) + (τ²/2) · [J(i+1) B3x E(i+1) - J(i-1) F3x E(i-1)] / (2Δx)
//! ```
//!
//! and `P2(k)` the implicit y-sweep, the trapezoidal rule
//!
//! ```text
//! φ** = φ* - (k/2) C4y [F(φ**) + F(φ*)] + (k/2) [G(φ**) + G(φ*)]
//! ```
//!
//! solved on every x-column by fixed-point iteration or by a chord iteration
//! with a frozen block-pentadiagonal linearization. Interior nodes
//! (`2..=M-2` on both axes) are updated; the two outer layers on every side
//! carry boundary data, pinned before the step and after every stage.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::banded::BandedMatrix;
use crate::grid::{FlowState, Grid, Primitive};
use crate::math::sqrt;
use crate::physics::{
    flux_e, flux_f, jacobian_e, jacobian_e_conservative, jacobian_f_conservative, manning_friction,
    mat_vec, source_g, BedSlopes, Mat3, PhysParams,
};

/// How the implicit stage's nonlinear system is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Linearization {
    /// Fixed-point iteration on the trapezoidal update.
    PicardOnly,
    /// Chord iteration: per-column banded LU of the system linearized at `φ*`.
    FrozenJacobian,
    /// A single solve of the system linearized at `φ*`, with no iteration.
    /// Defined at Courant numbers where both iterations diverge.
    Linearized,
}

/// Which matrix multiplies the one-sided flux differences in the explicit
/// stage's second-order correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JacobianForm {
    /// `∂E/∂(h, u, v)`, the matrix with rows `[u, h, 0; u²+gh, 2hu, 0; uv, hv, hu]`.
    Primitive,
    /// `∂E/∂(h, hu, hv)`, the flux Jacobian of the conservative system.
    Conservative,
}

/// Solver settings for the stages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageConfig {
    /// Iteration cap for the implicit stage.
    pub picard_max_iters: usize,
    /// Relative residual tolerance for the implicit stage.
    pub picard_tol: f64,
    /// Under-relaxation of the fixed-point update, in `(0, 1]`.
    pub relaxation: f64,
    /// Implicit solver.
    pub linearization: Linearization,
    /// Matrix used in the explicit correction term.
    pub jacobian: JacobianForm,
    /// After the depth clamp, drop the momentum of nodes with `h < h_eps`.
    pub dry_momentum_zeroing: bool,
}

impl Default for StageConfig {
    fn default() -> Self {
        Self {
            picard_max_iters: 25,
            picard_tol: 1e-10,
            relaxation: 1.0,
            linearization: Linearization::PicardOnly,
            jacobian: JacobianForm::Conservative,
            dry_momentum_zeroing: true,
        }
    }
}

/// The stage in which a step failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StageKind {
    /// First explicit x-sweep.
    ExplicitFirst,
    /// Implicit y-sweep.
    Implicit,
    /// Second explicit x-sweep.
    ExplicitSecond,
}

/// Failures of a single step.
#[derive(Debug, Clone, PartialEq)]
pub enum StepError {
    /// A stage produced a non-finite value.
    NonFinite {
        /// Stage that produced it.
        stage: StageKind,
        /// x index.
        l: usize,
        /// y index.
        p: usize,
        /// Time at the start of the step.
        t: f64,
    },
    /// The implicit stage did not reach its tolerance.
    IterationFailure {
        /// Iterations performed.
        iterations: usize,
        /// Last relative residual.
        residual: f64,
        /// Time at the start of the step.
        t: f64,
    },
    /// Boundary data with negative or non-finite depth.
    InvalidBoundary {
        /// x index.
        l: usize,
        /// y index.
        p: usize,
        /// Prescribed depth.
        h: f64,
        /// Boundary time.
        t: f64,
    },
    /// Time step not positive and finite.
    InvalidStep {
        /// Rejected step.
        k: f64,
    },
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepError::NonFinite { stage, l, p, t } => {
                write!(f, "non-finite value in {stage:?} stage at ({l}, {p}), t = {t}")
            }
            StepError::IterationFailure {
                iterations,
                residual,
                t,
            } => write!(
                f,
                "implicit stage stalled after {iterations} iterations (residual {residual:e}) at t = {t}"
            ),
            StepError::InvalidBoundary { l, p, h, t } => {
                write!(f, "boundary depth {h} at ({l}, {p}), t = {t} is not a valid depth")
            }
            StepError::InvalidStep { k } => write!(f, "time step {k} must be positive and finite"),
        }
    }
}

impl core::error::Error for StepError {}

/// Prescribed `(h, u, v)` on boundary-layer nodes.
pub trait BoundaryProvider {
    /// Value at node `(l, p)` and time `t`.
    fn prescribe(&self, grid: &Grid, l: usize, p: usize, t: f64) -> Primitive;
}

impl<F> BoundaryProvider for F
where
    F: Fn(&Grid, usize, usize, f64) -> Primitive,
{
    fn prescribe(&self, grid: &Grid, l: usize, p: usize, t: f64) -> Primitive {
        self(grid, l, p, t)
    }
}

/// Time-constant boundary values captured from a state.
#[derive(Debug, Clone)]
pub struct FixedBoundary {
    nx: usize,
    values: Vec<Primitive>,
}

impl FixedBoundary {
    /// Freeze the boundary layers of `state` (velocities dry-masked).
    pub fn from_state(state: &FlowState, h_eps: f64) -> Self {
        let g = state.grid;
        let mut values = vec![Primitive::default(); g.len()];
        g.for_each_boundary_node(|l, p| {
            let i = g.idx(l, p);
            values[i] = state.primitive(i, h_eps);
        });
        Self { nx: g.nx(), values }
    }

    /// Overwrite the stored value at one node.
    pub fn set(&mut self, l: usize, p: usize, value: Primitive) {
        self.values[p * self.nx + l] = value;
    }
}

impl BoundaryProvider for FixedBoundary {
    fn prescribe(&self, _grid: &Grid, l: usize, p: usize, _t: f64) -> Primitive {
        self.values[p * self.nx + l]
    }
}

/// Write boundary data at time `t` into the two outer layers of `state`.
///
/// Interior nodes are not touched.
pub fn apply_boundaries<B: BoundaryProvider + ?Sized>(
    state: &mut FlowState,
    bc: &B,
    t: f64,
) -> Result<(), StepError> {
    let grid = state.grid;
    let mut bad = None;
    grid.for_each_boundary_node(|l, p| {
        if bad.is_some() {
            return;
        }
        let f = bc.prescribe(&grid, l, p, t);
        if !(f.h >= 0.0) || !f.is_finite() {
            bad = Some(StepError::InvalidBoundary { l, p, h: f.h, t });
            return;
        }
        state.set_cons(grid.idx(l, p), f.conservative());
    });
    match bad {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Outcome of an implicit stage solve.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ImplicitReport {
    /// Residual evaluations performed (the last one met the tolerance).
    pub iterations: usize,
    /// Relative residual after each evaluation.
    pub residuals: Vec<f64>,
}

impl ImplicitReport {
    /// Final relative residual.
    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(0.0)
    }
}

/// One stage invocation inside a composed step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StageCall {
    /// Explicit x-sweep with its own step `τ`.
    ExplicitX(f64),
    /// Implicit y-sweep with step `k`.
    ImplicitY(f64),
}

/// What a composed step did.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    /// Stages in the order they ran.
    pub stages: [StageCall; 3],
    /// Implicit-stage solver statistics.
    pub implicit: ImplicitReport,
}

/// Physics, bed and solver settings for advancing a state.
#[derive(Debug, Clone)]
pub struct Stepper {
    /// Physical constants.
    pub params: PhysParams,
    /// Stage solver settings.
    pub config: StageConfig,
    /// Bed slopes on the grid being advanced.
    pub slopes: BedSlopes,
}

#[inline(always)]
fn axpy3(a: [f64; 3], s: f64, b: [f64; 3]) -> [f64; 3] {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

#[inline(always)]
fn finite3(q: &[f64; 3]) -> bool {
    q[0].is_finite() && q[1].is_finite() && q[2].is_finite()
}

/// Per-component C4 weighted sum over five consecutive entries `[i-2s ..= i+2s]`.
#[inline(always)]
fn c4_sum(f: &[[f64; 3]], i: usize, s: usize) -> [f64; 3] {
    let mut out = [0.0; 3];
    for c in 0..3 {
        out[c] = f[i - 2 * s][c] - f[i + 2 * s][c] + 8.0 * (f[i + s][c] - f[i - s][c]);
    }
    out
}

impl Stepper {
    /// Bundle the pieces; slopes must match the grid that will be stepped.
    pub fn new(params: PhysParams, config: StageConfig, slopes: BedSlopes) -> Self {
        Self {
            params,
            config,
            slopes,
        }
    }

    /// The explicit x-sweep `P1(τ)`.
    ///
    /// Called with `τ = k/2` this is the half step of the composed scheme:
    /// the coefficients `τ` and `τ²/2` become `k/2` and `k²/8`.
    pub fn stage_p1(&self, state: &FlowState, tau: f64) -> Result<FlowState, StepError> {
        self.explicit_x(state, tau, StageKind::ExplicitFirst)
    }

    fn explicit_x(&self, state: &FlowState, tau: f64, stage: StageKind) -> Result<FlowState, StepError> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(StepError::InvalidStep { k: tau });
        }
        let grid = state.grid;
        let nx = grid.nx();
        let dx = grid.dx();
        let g = self.params.g;
        let mut out = state.clone();
        let mut e = vec![[0.0; 3]; nx];
        let mut jac: Vec<Mat3> = vec![[[0.0; 3]; 3]; nx];
        let c_flux = -tau / (12.0 * dx);
        let c_corr = 0.5 * tau * tau / (2.0 * dx * 6.0 * dx);
        for p in grid.interior_p() {
            let row = p * nx;
            for l in 0..nx {
                let q = self.primitive(state, row + l);
                e[l] = flux_e(q.h, q.u, q.v, g).0;
                jac[l] = match self.config.jacobian {
                    JacobianForm::Primitive => jacobian_e(q.h, q.u, q.v, g),
                    JacobianForm::Conservative => jacobian_e_conservative(q.h, q.u, q.v, g),
                };
            }
            for l in grid.interior_l() {
                let d4 = c4_sum(&e, l, 1);
                // B3 at l+1 and F3 at l-1, times 6Δx.
                let mut back = [0.0; 3];
                let mut fwd = [0.0; 3];
                for c in 0..3 {
                    back[c] = e[l - 1][c] - 6.0 * e[l][c] + 3.0 * e[l + 1][c] + 2.0 * e[l + 2][c];
                    fwd[c] = -2.0 * e[l - 2][c] - 3.0 * e[l - 1][c] + 6.0 * e[l][c] - e[l + 1][c];
                }
                let right = mat_vec(&jac[l + 1], back);
                let left = mat_vec(&jac[l - 1], fwd);
                let corr = [right[0] - left[0], right[1] - left[1], right[2] - left[2]];
                let q = axpy3(axpy3(state.cons(row + l), c_flux, d4), c_corr, corr);
                if !finite3(&q) {
                    return Err(StepError::NonFinite {
                        stage,
                        l,
                        p,
                        t: state.t,
                    });
                }
                out.set_cons(row + l, q);
            }
        }
        Ok(out)
    }

    /// `F` on every node and `G` on the interior of `state`, with the wet set
    /// fixed by `wet` rather than by the depth of `state` itself.
    ///
    /// On a wet node the velocity is `m / max(h, h_eps)`; on a dry node it is
    /// zero. With `wet` taken from `state` this is exactly the dry-masked
    /// primitive form.
    fn flux_and_source(&self, state: &FlowState, wet: &[bool], f: &mut [[f64; 3]], src: &mut [[f64; 3]]) {
        let grid = state.grid;
        let (g, h_eps) = (self.params.g, self.params.h_eps);
        let prim = |i: usize| {
            let h = state.h[i];
            if wet[i] {
                let d = h.max(h_eps);
                (h, state.hu[i] / d, state.hv[i] / d)
            } else {
                (h, 0.0, 0.0)
            }
        };
        for (i, fi) in f.iter_mut().enumerate() {
            let (h, u, v) = prim(i);
            *fi = flux_f(h, u, v, g).0;
        }
        for p in grid.interior_p() {
            for l in grid.interior_l() {
                let i = grid.idx(l, p);
                let (h, u, v) = prim(i);
                let (sfx, sfy) = manning_friction(h, u, v, &self.params);
                src[i] = source_g(h, self.slopes.s0x[i], self.slopes.s0y[i], sfx, sfy, g).0;
            }
        }
    }

    /// Dry-masked primitive variables at node `i`.
    fn primitive(&self, state: &FlowState, i: usize) -> Primitive {
        state.primitive(i, self.params.h_eps)
    }

    /// `∂G/∂(h, hu, hv)` at node `i`. The slope part is exact; the friction
    /// part, present only on wet nodes with nonzero roughness, is a central
    /// difference.
    fn source_jacobian(&self, state: &FlowState, i: usize) -> Mat3 {
        let g = self.params.g;
        let (s0x, s0y) = (self.slopes.s0x[i], self.slopes.s0y[i]);
        let mut jac = [[0.0; 3], [g * s0x, 0.0, 0.0], [g * s0y, 0.0, 0.0]];
        let q = state.cons(i);
        if self.params.n_manning == 0.0 || q[0] < self.params.h_eps {
            return jac;
        }
        let friction = |q: [f64; 3]| {
            let h = q[0];
            let (sfx, sfy) = manning_friction(h, q[1] / h, q[2] / h, &self.params);
            [-g * h * sfx, -g * h * sfy]
        };
        for c in 0..3 {
            let step = 1e-7 * q[c].abs().max(q[0]).max(self.params.h_eps);
            let (mut up, mut down) = (q, q);
            up[c] += step;
            down[c] -= step;
            if down[0] < self.params.h_eps {
                down = q;
            }
            let (a, b) = (friction(up), friction(down));
            let width = up[c] - down[c];
            jac[1][c] += (a[0] - b[0]) / width;
            jac[2][c] += (a[1] - b[1]) / width;
        }
        jac
    }

    /// Nodes with `h ≥ h_eps`.
    fn wet_mask(&self, state: &FlowState) -> Vec<bool> {
        state.h.iter().map(|&h| h >= self.params.h_eps).collect()
    }

    /// `|||φ|||` over the interior: the three component norms combined.
    fn interior_norm(grid: &Grid, get: impl Fn(usize) -> [f64; 3]) -> f64 {
        let mut acc = 0.0;
        for p in grid.interior_p() {
            for l in grid.interior_l() {
                let q = get(grid.idx(l, p));
                acc += q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
            }
        }
        sqrt(acc * grid.dx() * grid.dy())
    }

    /// One application of the trapezoidal update to the iterate `current`:
    /// `φ* - (k/2) C4y [F(current) + F(φ*)] + (k/2) [G(current) + G(φ*)]`
    /// on interior nodes; boundary layers are copied from `star`.
    pub fn implicit_update(&self, star: &FlowState, current: &FlowState, k: f64) -> FlowState {
        let grid = star.grid;
        let n = grid.len();
        let mut f_star = vec![[0.0; 3]; n];
        let mut g_star = vec![[0.0; 3]; n];
        let mut f_cur = vec![[0.0; 3]; n];
        let mut g_cur = vec![[0.0; 3]; n];
        let wet = self.wet_mask(star);
        self.flux_and_source(star, &wet, &mut f_star, &mut g_star);
        self.flux_and_source(current, &wet, &mut f_cur, &mut g_cur);
        let mut out = star.clone();
        let (s, cf, hk) = (grid.nx(), -0.5 * k / (12.0 * grid.dy()), 0.5 * k);
        for p in grid.interior_p() {
            for l in grid.interior_l() {
                let i = grid.idx(l, p);
                let a = c4_sum(&f_star, i, s);
                let b = c4_sum(&f_cur, i, s);
                let mut q = star.cons(i);
                for c in 0..3 {
                    q[c] += cf * (a[c] + b[c]) + hk * (g_star[i][c] + g_cur[i][c]);
                }
                out.set_cons(i, q);
            }
        }
        out
    }

    /// The implicit y-sweep `P2(k)`.
    ///
    /// Returns the converged iterate and the residual history. The residual
    /// is `‖2φ** - P̄2 φ** - P̄2 φ*‖ / max(1, ‖φ*‖)` over the interior.
    pub fn stage_p2(&self, star: &FlowState, k: f64) -> Result<(FlowState, ImplicitReport), StepError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(StepError::InvalidStep { k });
        }
        let grid = star.grid;
        let n = grid.len();
        let s = grid.nx();
        let cf = -0.5 * k / (12.0 * grid.dy());
        let hk = 0.5 * k;

        // rhs0 = φ* - (k/2) C4y F(φ*) + (k/2) G(φ*)
        let mut f = vec![[0.0; 3]; n];
        let mut src = vec![[0.0; 3]; n];
        let wet = self.wet_mask(star);
        self.flux_and_source(star, &wet, &mut f, &mut src);
        let mut rhs0 = vec![[0.0; 3]; n];
        for p in grid.interior_p() {
            for l in grid.interior_l() {
                let i = grid.idx(l, p);
                let d = c4_sum(&f, i, s);
                let mut q = star.cons(i);
                for c in 0..3 {
                    q[c] += cf * d[c] + hk * src[i][c];
                }
                rhs0[i] = q;
            }
        }
        let scale = Self::interior_norm(&grid, |i| star.cons(i)).max(1.0);

        let mut chord = match self.config.linearization {
            Linearization::PicardOnly => None,
            Linearization::FrozenJacobian | Linearization::Linearized => {
                Some(ColumnSystems::assemble(self, star, k)?)
            }
        };

        let mut current = star.clone();
        let mut residual = vec![[0.0; 3]; n];
        let mut report = ImplicitReport::default();
        let omega = self.config.relaxation;
        let single = self.config.linearization == Linearization::Linearized;
        // The single solve still evaluates the residual of its result.
        let max_iters = if single { 2 } else { self.config.picard_max_iters };
        for iter in 0..max_iters {
            if iter > 0 {
                self.flux_and_source(&current, &wet, &mut f, &mut src);
            }
            let mut acc = 0.0;
            for p in grid.interior_p() {
                for l in grid.interior_l() {
                    let i = grid.idx(l, p);
                    let d = c4_sum(&f, i, s);
                    let q = current.cons(i);
                    let mut r = [0.0; 3];
                    for c in 0..3 {
                        let target = rhs0[i][c] + cf * d[c] + hk * src[i][c];
                        r[c] = q[c] - target;
                        acc += r[c] * r[c];
                    }
                    residual[i] = r;
                }
            }
            let rel = sqrt(acc * grid.dx() * grid.dy()) / scale;
            report.iterations = iter + 1;
            report.residuals.push(rel);
            if !rel.is_finite() {
                // Overflow after the first update means the iteration diverged,
                // not that the starting level was already unbounded.
                if iter > 0 && !single {
                    return Err(StepError::IterationFailure {
                        iterations: iter + 1,
                        residual: rel,
                        t: star.t,
                    });
                }
                let (l, p) = current.first_non_finite().unwrap_or((0, 0));
                return Err(StepError::NonFinite {
                    stage: StageKind::Implicit,
                    l,
                    p,
                    t: star.t,
                });
            }
            if rel <= self.config.picard_tol && !(single && iter == 0) {
                return Ok((current, report));
            }
            if single && iter > 0 {
                return Ok((current, report));
            }
            if let Some(sys) = chord.as_mut() {
                sys.solve(&grid, &mut residual);
            }
            for p in grid.interior_p() {
                for l in grid.interior_l() {
                    let i = grid.idx(l, p);
                    let q = axpy3(current.cons(i), -omega, residual[i]);
                    if !finite3(&q) {
                        return Err(if single {
                            StepError::NonFinite {
                                stage: StageKind::Implicit,
                                l,
                                p,
                                t: star.t,
                            }
                        } else {
                            StepError::IterationFailure {
                                iterations: iter + 1,
                                residual: f64::INFINITY,
                                t: star.t,
                            }
                        });
                    }
                    current.set_cons(i, q);
                }
            }
        }
        Err(StepError::IterationFailure {
            iterations: report.iterations,
            residual: report.final_residual(),
            t: star.t,
        })
    }

    /// Advance `state` by `k`: boundaries at `t`, `P1(k/2)`, `P2(k)`,
    /// `P1(k/2)`, boundaries at `t + k`, then `h := max(h, 0)`.
    ///
    /// Intermediate levels take boundary data at the start-of-step time.
    pub fn composed_step<B: BoundaryProvider + ?Sized>(
        &self,
        state: &FlowState,
        k: f64,
        bc: &B,
    ) -> Result<(FlowState, StepReport), StepError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(StepError::InvalidStep { k });
        }
        let t0 = state.t;
        let half = 0.5 * k;
        let mut start = state.clone();
        apply_boundaries(&mut start, bc, t0)?;
        let mut star = self.explicit_x(&start, half, StageKind::ExplicitFirst)?;
        apply_boundaries(&mut star, bc, t0)?;
        let (mut star2, implicit) = self.stage_p2(&star, k)?;
        apply_boundaries(&mut star2, bc, t0)?;
        let mut next = self.explicit_x(&star2, half, StageKind::ExplicitSecond)?;
        next.t = t0 + k;
        next.clamp_depth();
        if self.config.dry_momentum_zeroing {
            let h_eps = self.params.h_eps;
            for i in 0..next.h.len() {
                if next.h[i] < h_eps {
                    next.hu[i] = 0.0;
                    next.hv[i] = 0.0;
                }
            }
        }
        apply_boundaries(&mut next, bc, t0 + k)?;
        let report = StepReport {
            stages: [
                StageCall::ExplicitX(half),
                StageCall::ImplicitY(k),
                StageCall::ExplicitX(half),
            ],
            implicit,
        };
        Ok((next, report))
    }
}

/// Per-column banded factors of `I + (k/2) C4y J_F(φ*) - (k/2) J_G(φ*)`.
struct ColumnSystems {
    columns: Vec<BandedMatrix>,
    scratch: Vec<f64>,
}

/// Sub/super bandwidth of a column system: two neighbours of 3x3 blocks.
const COLUMN_BAND: usize = 8;

impl ColumnSystems {
    fn assemble(stepper: &Stepper, star: &FlowState, k: f64) -> Result<Self, StepError> {
        let grid = star.grid;
        let g = stepper.params.g;
        let rows = grid.my() - 3;
        let n = 3 * rows;
        let coeff = 0.5 * k / (12.0 * grid.dy());
        const W: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
        let mut columns = Vec::with_capacity(grid.mx() - 3);
        for l in grid.interior_l() {
            let mut m = BandedMatrix::zeros(n, COLUMN_BAND, COLUMN_BAND);
            for p in grid.interior_p() {
                let row0 = 3 * (p - 2);
                for (j, w) in W.iter().enumerate() {
                    let pp = p + j - 2;
                    if *w == 0.0 || pp < 2 || pp > grid.my() - 2 {
                        continue;
                    }
                    let q = stepper.primitive(star, grid.idx(l, pp));
                    let jf = jacobian_f_conservative(q.h, q.u, q.v, g);
                    let col0 = 3 * (pp - 2);
                    for r in 0..3 {
                        for c in 0..3 {
                            if jf[r][c] != 0.0 {
                                m.add(row0 + r, col0 + c, coeff * w * jf[r][c]);
                            }
                        }
                    }
                }
                let i = grid.idx(l, p);
                let jg = stepper.source_jacobian(star, i);
                for r in 0..3 {
                    m.add(row0 + r, row0 + r, 1.0);
                    for c in 0..3 {
                        if jg[r][c] != 0.0 {
                            m.add(row0 + r, row0 + c, -0.5 * k * jg[r][c]);
                        }
                    }
                }
            }
            if m.factorize().is_err() {
                return Err(StepError::IterationFailure {
                    iterations: 0,
                    residual: f64::INFINITY,
                    t: star.t,
                });
            }
            columns.push(m);
        }
        Ok(Self {
            columns,
            scratch: vec![0.0; n],
        })
    }

    /// Replace the interior residual by the chord correction, column by column.
    fn solve(&mut self, grid: &Grid, residual: &mut [[f64; 3]]) {
        for (m, l) in self.columns.iter().zip(grid.interior_l()) {
            for p in grid.interior_p() {
                let r = residual[grid.idx(l, p)];
                self.scratch[3 * (p - 2)..3 * (p - 2) + 3].copy_from_slice(&r);
            }
            m.solve_in_place(&mut self.scratch);
            for p in grid.interior_p() {
                let b = 3 * (p - 2);
                residual[grid.idx(l, p)] = [self.scratch[b], self.scratch[b + 1], self.scratch[b + 2]];
            }
        }
    }
}
