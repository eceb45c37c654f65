//! Time-step governors and the pentadiagonal-norm diagnostic.
//!
//! Two bounds are available: the wave-speed (CFL) guideline
//!
//! ```text
//! k ≤ min{ Δx / (u_max + √(g h_max)), Δy / (v_max + √(g h_max)) }
//! ```
//!
//! and the restriction
//!
//! ```text
//! k ≤ (48/γ) · min{ ‖β‖₀ / (√(Mx-3) |||u|||), |||u||| / |||u² + gh/2||| } · Δx
//! ```
//!
//! whose norms are maxima over all computed levels. The governor keeps
//! running maxima in a [`NormCache`] and re-evaluates the bound before every
//! step.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::grid::{FlowState, Grid};
use crate::math::sqrt;

/// Norms below this are treated as zero in the restriction's denominators.
pub const DEGENERATE_NORM: f64 = 1e-14;

/// Smallest admissible step cap.
pub const K_MAX_FLOOR: f64 = 1e-12;

/// Worst-case spectral radius of the centered fourth-order difference matrix.
pub const PENTA_BOUND: f64 = 18.0;

/// Rejected governor inputs.
#[derive(Debug, Clone, PartialEq)]
pub enum StabilityError {
    /// `γ` outside `(0, 18]`.
    Gamma(f64),
    /// `Mx ≤ 3`.
    TooFewCells(usize),
    /// Non-positive or non-finite spacing.
    Spacing(f64),
}

impl fmt::Display for StabilityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabilityError::Gamma(g) => write!(f, "gamma = {g} must lie in (0, 18]"),
            StabilityError::TooFewCells(m) => write!(f, "Mx = {m} must exceed 3"),
            StabilityError::Spacing(d) => write!(f, "mesh spacing {d} must be positive"),
        }
    }
}

impl core::error::Error for StabilityError {}

/// CFL guideline; `k_max` when both wave speeds vanish.
pub fn cfl_limit(u_max: f64, v_max: f64, h_max: f64, g: f64, dx: f64, dy: f64, k_max: f64) -> f64 {
    let c = sqrt(g * h_max.max(0.0));
    let sx = u_max.abs() + c;
    let sy = v_max.abs() + c;
    let bx = if sx > 0.0 { dx / sx } else { f64::INFINITY };
    let by = if sy > 0.0 { dy / sy } else { f64::INFINITY };
    let k = bx.min(by);
    if k.is_finite() {
        k
    } else {
        k_max
    }
}

/// Running `L∞(0,T;L²)` maxima needed by the restriction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormCache {
    /// `max_n ‖uⁿ‖₀`.
    pub u_inf_norm: f64,
    /// `max_n ‖(uⁿ)² + g hⁿ/2‖₀`.
    pub bernoulli_inf_norm: f64,
    /// `‖β‖₀` for `β ≡ 1`.
    pub beta_norm: f64,
    /// Levels folded in so far.
    pub levels: usize,
}

impl NormCache {
    /// Empty cache for `grid`.
    pub fn new(grid: &Grid) -> Self {
        Self {
            u_inf_norm: 0.0,
            bernoulli_inf_norm: 0.0,
            beta_norm: Self::beta_norm_for(grid),
            levels: 0,
        }
    }

    /// `√(ΔxΔy(Mx-3)(My-3))`.
    pub fn beta_norm_for(grid: &Grid) -> f64 {
        sqrt(grid.dx() * grid.dy() * grid.interior_count() as f64)
    }

    /// Current-level norms `(‖u‖₀, ‖u² + gh/2‖₀)` over the interior.
    pub fn level_norms(state: &FlowState, g: f64, h_eps: f64) -> (f64, f64) {
        let grid = state.grid;
        let (mut su, mut sb) = (0.0, 0.0);
        for p in grid.interior_p() {
            for l in grid.interior_l() {
                let q = state.primitive(grid.idx(l, p), h_eps);
                let b = q.u * q.u + 0.5 * g * q.h;
                su += q.u * q.u;
                sb += b * b;
            }
        }
        let w = grid.dx() * grid.dy();
        (sqrt(su * w), sqrt(sb * w))
    }

    /// Fold one computed level into the maxima.
    pub fn observe(&mut self, state: &FlowState, g: f64, h_eps: f64) {
        let (u, b) = Self::level_norms(state, g, h_eps);
        self.u_inf_norm = self.u_inf_norm.max(u);
        self.bernoulli_inf_norm = self.bernoulli_inf_norm.max(b);
        self.levels += 1;
    }
}

/// The restriction evaluated on the cache.
///
/// A quiescent history (`|||u||| < 1e-14`) imposes no limit, so `k_max` is
/// returned; otherwise a branch whose denominator vanishes drops out.
pub fn theorem1_limit(
    cache: &NormCache,
    dx: f64,
    mx: usize,
    gamma: f64,
    k_max: f64,
) -> Result<f64, StabilityError> {
    if !(gamma > 0.0 && gamma <= PENTA_BOUND) {
        return Err(StabilityError::Gamma(gamma));
    }
    if mx <= 3 {
        return Err(StabilityError::TooFewCells(mx));
    }
    if !(dx > 0.0 && dx.is_finite()) {
        return Err(StabilityError::Spacing(dx));
    }
    let u = cache.u_inf_norm;
    if u < DEGENERATE_NORM {
        return Ok(k_max);
    }
    let branch1 = cache.beta_norm / (sqrt((mx - 3) as f64) * u);
    let branch2 = if cache.bernoulli_inf_norm < DEGENERATE_NORM {
        f64::INFINITY
    } else {
        u / cache.bernoulli_inf_norm
    };
    Ok(48.0 / gamma * branch1.min(branch2) * dx)
}

/// Which bound decided a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundSource {
    /// Wave-speed guideline.
    Cfl,
    /// The `γ`-restriction.
    Theorem1,
    /// Fixed step supplied by the user.
    UserOverride,
}

impl BoundSource {
    /// Short label used in logs.
    pub fn label(self) -> &'static str {
        match self {
            BoundSource::Cfl => "cfl",
            BoundSource::Theorem1 => "theorem1",
            BoundSource::UserOverride => "override",
        }
    }
}

/// Both bounds at one level and the step actually taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBound {
    /// CFL value.
    pub k_cfl: f64,
    /// Restriction value.
    pub k_thm1: f64,
    /// `γ` used for `k_thm1`.
    pub gamma: f64,
    /// Step taken.
    pub chosen_k: f64,
    /// Decisive bound.
    pub source: BoundSource,
}

/// Step-size policy driven by both bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Governor {
    /// `γ ∈ (0, 18]`.
    pub gamma: f64,
    /// Take `min(k_cfl, k_thm1)` when set, else `k_thm1` alone.
    pub clamp: bool,
    /// Cap for degenerate branches.
    pub k_max: f64,
    /// Fixed step; bounds are still evaluated and logged.
    pub fixed_k: Option<f64>,
}

impl Governor {
    /// Adaptive governor with the default cap: the CFL value of `initial`.
    pub fn adaptive(initial: &FlowState, g: f64, h_eps: f64, gamma: f64, clamp: bool) -> Result<Self, StabilityError> {
        if !(gamma > 0.0 && gamma <= PENTA_BOUND) {
            return Err(StabilityError::Gamma(gamma));
        }
        let (h, u, v) = initial.maxima(h_eps);
        let grid = initial.grid;
        let k0 = cfl_limit(u, v, h, g, grid.dx(), grid.dy(), f64::INFINITY);
        let k_max = if k0.is_finite() { k0.max(K_MAX_FLOOR) } else { grid.dx().min(grid.dy()) };
        Ok(Self {
            gamma,
            clamp,
            k_max,
            fixed_k: None,
        })
    }

    /// Fixed step `k`, bounds evaluated with `γ` for the log.
    pub fn fixed(k: f64, gamma: f64, k_max: f64) -> Result<Self, StabilityError> {
        if !(gamma > 0.0 && gamma <= PENTA_BOUND) {
            return Err(StabilityError::Gamma(gamma));
        }
        Ok(Self {
            gamma,
            clamp: false,
            k_max: k_max.max(K_MAX_FLOOR),
            fixed_k: Some(k),
        })
    }

    /// Bounds for the next step from `state` (the newest level, already in `cache`).
    pub fn bound(&self, state: &FlowState, cache: &NormCache, g: f64, h_eps: f64) -> Result<StepBound, StabilityError> {
        let grid = state.grid;
        let (h, u, v) = state.maxima(h_eps);
        let k_cfl = cfl_limit(u, v, h, g, grid.dx(), grid.dy(), self.k_max);
        let k_thm1 = theorem1_limit(cache, grid.dx(), grid.mx(), self.gamma, self.k_max)?;
        let (chosen_k, source) = match self.fixed_k {
            Some(k) => (k, BoundSource::UserOverride),
            None if self.clamp && k_cfl < k_thm1 => (k_cfl, BoundSource::Cfl),
            None => (k_thm1, BoundSource::Theorem1),
        };
        Ok(StepBound {
            k_cfl,
            k_thm1,
            gamma: self.gamma,
            chosen_k,
            source,
        })
    }
}

/// Outcome of [`penta_norm_diagnostic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PentaNorm {
    /// `α₀ + 2(|α₁| + |α₂|) = 18`.
    pub bound: f64,
    /// Spectral norm from power iteration.
    pub computed_norm: f64,
    /// Power iterations used.
    pub iterations: usize,
}

/// `y = A x` for the antisymmetric pentadiagonal matrix with first
/// superdiagonal 8 and second superdiagonal -1.
pub fn penta_apply(x: &[f64], y: &mut [f64]) {
    let n = x.len();
    for i in 0..n {
        let mut acc = 0.0;
        if i + 1 < n {
            acc += 8.0 * x[i + 1];
        }
        if i + 2 < n {
            acc -= x[i + 2];
        }
        if i >= 1 {
            acc -= 8.0 * x[i - 1];
        }
        if i >= 2 {
            acc += x[i - 2];
        }
        y[i] = acc;
    }
}

/// Dense form of the pentadiagonal matrix, row-major.
pub fn penta_dense(n: usize) -> Vec<f64> {
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        if i + 1 < n {
            a[i * n + i + 1] = 8.0;
            a[(i + 1) * n + i] = -8.0;
        }
        if i + 2 < n {
            a[i * n + i + 2] = -1.0;
            a[(i + 2) * n + i] = 1.0;
        }
    }
    a
}

/// Spectral norm of the `n × n` pentadiagonal matrix against the bound 18.
///
/// Power iteration on `AᵀA`; stops when successive Rayleigh quotients agree
/// to `1e-10` relative, or after `max(2000, 4n²)` iterations. Every Rayleigh
/// quotient is a lower bound on `‖A‖²`.
pub fn penta_norm_diagnostic(n: usize) -> PentaNorm {
    let mut out = PentaNorm {
        bound: PENTA_BOUND,
        computed_norm: 0.0,
        iterations: 0,
    };
    if n < 2 {
        return out;
    }
    // deterministic start with components along every eigenvector
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.37 * ((i * 7919) % 101) as f64 / 101.0).collect();
    let mut ax = vec![0.0; n];
    let mut ata = vec![0.0; n];
    let norm = |v: &[f64]| sqrt(v.iter().map(|a| a * a).sum::<f64>());
    let s = norm(&x);
    x.iter_mut().for_each(|a| *a /= s);
    let cap = (4 * n * n).max(2000);
    let mut lambda = 0.0;
    for it in 1..=cap {
        penta_apply(&x, &mut ax);
        // Aᵀ = -A
        penta_apply(&ax, &mut ata);
        ata.iter_mut().for_each(|a| *a = -*a);
        let rq: f64 = ax.iter().map(|a| a * a).sum();
        let s = norm(&ata);
        out.iterations = it;
        if s == 0.0 {
            lambda = 0.0;
            break;
        }
        for (xi, ai) in x.iter_mut().zip(&ata) {
            *xi = ai / s;
        }
        let done = it > 1 && (rq - lambda).abs() <= 1e-10 * rq;
        lambda = rq;
        if done {
            break;
        }
    }
    out.computed_norm = sqrt(lambda);
    out
}
