//! Time marching with governor, blow-up detection and cadenced records.

use alloc::vec::Vec;

use crate::grid::FlowState;
use crate::stability::{BoundSource, Governor, NormCache, StabilityError, StepBound};
use crate::stepper::{BoundaryProvider, StepError, Stepper};
use crate::verification::l2_norm;

/// How the step size is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepPolicy {
    /// Constant `k`; both bounds are still evaluated for the governor log.
    Fixed {
        /// Step.
        k: f64,
        /// `γ` for the logged restriction.
        gamma: f64,
    },
    /// Step from the adaptive governor.
    Governed {
        /// `γ ∈ (0, 18]`.
        gamma: f64,
        /// Clamp to the CFL value as well.
        clamp: bool,
    },
}

/// What to run and what to keep.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPlan {
    /// Final time.
    pub t_end: f64,
    /// Step policy.
    pub policy: StepPolicy,
    /// Keep a [`RunRecord`] every this many levels (and always the last one).
    pub series_every: usize,
    /// Times at which a full state is kept; steps are shortened to land on them.
    pub snapshot_times: Vec<f64>,
    /// Blow-up when `‖h‖₀` exceeds this multiple of its initial value.
    pub blowup_factor: f64,
    /// Hard cap on the number of steps.
    pub max_steps: usize,
}

impl RunPlan {
    /// Plan with no snapshots, a record every level and the default detector.
    pub fn new(t_end: f64, policy: StepPolicy) -> Self {
        Self {
            t_end,
            policy,
            series_every: 1,
            snapshot_times: Vec::new(),
            blowup_factor: 1e6,
            max_steps: usize::MAX,
        }
    }
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    /// Reached `t_end`.
    Completed,
    /// First level with a non-finite value or an exploding depth norm.
    BlowUp {
        /// Offending level.
        n: usize,
        /// Its time.
        t: f64,
    },
    /// The implicit stage failed to converge.
    IterationFailure {
        /// Level being computed.
        n: usize,
        /// Time at its start.
        t: f64,
    },
    /// Step rejected for a reason other than divergence (bad boundary data,
    /// invalid step size, or the step cap).
    Aborted {
        /// Level being computed.
        n: usize,
        /// Time at its start.
        t: f64,
        /// Cause, when a step error was raised.
        error: Option<StepError>,
    },
}

impl RunStatus {
    /// Short label used in logs.
    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Completed => "completed",
            RunStatus::BlowUp { .. } => "blowup",
            RunStatus::IterationFailure { .. } => "iteration-failure",
            RunStatus::Aborted { .. } => "aborted",
        }
    }
}

/// Summary of one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunRecord {
    /// Level index.
    pub n: usize,
    /// Time.
    pub t: f64,
    /// Step that produced this level (0 for the initial level).
    pub k: f64,
    /// `‖h‖₀`.
    pub h_norm: f64,
    /// `‖u‖₀`.
    pub u_norm: f64,
    /// `‖v‖₀`.
    pub v_norm: f64,
    /// `max h`.
    pub h_max: f64,
    /// `max |u|`.
    pub u_max: f64,
    /// `max |v|`.
    pub v_max: f64,
    /// Bound that decided `k`.
    pub source: Option<BoundSource>,
}

impl RunRecord {
    /// Record for `state` at level `n`.
    pub fn of(n: usize, state: &FlowState, k: f64, source: Option<BoundSource>, h_eps: f64) -> Self {
        let (u, v) = state.primitive_velocities(h_eps);
        let (h_max, u_max, v_max) = state.maxima(h_eps);
        Self {
            n,
            t: state.t,
            k,
            h_norm: l2_norm(&state.h, &state.grid),
            u_norm: l2_norm(&u, &state.grid),
            v_norm: l2_norm(&v, &state.grid),
            h_max,
            u_max,
            v_max,
            source,
        }
    }
}

/// Bounds before one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GovernorRecord {
    /// Level the step starts from.
    pub n: usize,
    /// Its time.
    pub t: f64,
    /// Governor output; `chosen_k` is the step actually taken.
    pub bound: StepBound,
}

/// Callback invoked on every accepted level, including the initial one.
pub trait LevelObserver {
    /// Level `n` has been computed.
    fn level(&mut self, n: usize, state: &FlowState);
}

impl LevelObserver for () {
    fn level(&mut self, _n: usize, _state: &FlowState) {}
}

impl<F: FnMut(usize, &FlowState)> LevelObserver for F {
    fn level(&mut self, n: usize, state: &FlowState) {
        self(n, state)
    }
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    /// Terminal status.
    pub status: RunStatus,
    /// Steps accepted.
    pub steps: usize,
    /// Last accepted state.
    pub state: FlowState,
    /// Cadenced records.
    pub records: Vec<RunRecord>,
    /// One entry per attempted step.
    pub governor: Vec<GovernorRecord>,
    /// States at the requested snapshot times.
    pub snapshots: Vec<FlowState>,
    /// Norm maxima over the accepted levels.
    pub cache: NormCache,
    /// Implicit-stage iterations summed over all steps.
    pub implicit_iterations: usize,
}

/// Relative slack when deciding that a step lands on a target time.
const LANDING_SLACK: f64 = 1e-9;

/// March `initial` to `plan.t_end`.
///
/// Boundary data are applied to `initial` at its own time before anything
/// else. Errors in the policy (for example `γ` out of range) are returned
/// before the first step.
pub fn run<B, O>(
    stepper: &Stepper,
    initial: &FlowState,
    bc: &B,
    plan: &RunPlan,
    observer: &mut O,
) -> Result<RunSummary, StabilityError>
where
    B: BoundaryProvider + ?Sized,
    O: LevelObserver + ?Sized,
{
    let g = stepper.params.g;
    let h_eps = stepper.params.h_eps;
    let mut state = initial.clone();
    let mut summary = RunSummary {
        status: RunStatus::Completed,
        steps: 0,
        state: initial.clone(),
        records: Vec::new(),
        governor: Vec::new(),
        snapshots: Vec::new(),
        cache: NormCache::new(&initial.grid),
        implicit_iterations: 0,
    };
    let t0 = state.t;
    if let Err(e) = crate::stepper::apply_boundaries(&mut state, bc, t0) {
        summary.status = RunStatus::Aborted {
            n: 0,
            t: state.t,
            error: Some(e),
        };
        return Ok(summary);
    }
    let governor = match plan.policy {
        StepPolicy::Fixed { k, gamma } => {
            let probe = Governor::adaptive(&state, g, h_eps, gamma, true)?;
            Governor::fixed(k, gamma, probe.k_max)?
        }
        StepPolicy::Governed { gamma, clamp } => Governor::adaptive(&state, g, h_eps, gamma, clamp)?,
    };
    let mut snaps: Vec<f64> = plan.snapshot_times.iter().copied().filter(|s| s.is_finite()).collect();
    snaps.sort_by(f64::total_cmp);
    snaps.dedup();
    let mut next_snap = 0;
    let every = plan.series_every.max(1);
    let h0_norm = l2_norm(&state.h, &state.grid);
    let blowup_level = plan.blowup_factor * h0_norm.max(f64::MIN_POSITIVE);

    let take_snapshots = |state: &FlowState, next_snap: &mut usize, out: &mut Vec<FlowState>| {
        while *next_snap < snaps.len() && snaps[*next_snap] <= state.t * (1.0 + LANDING_SLACK) + LANDING_SLACK * 1e-3 {
            out.push(state.clone());
            *next_snap += 1;
        }
    };

    summary.cache.observe(&state, g, h_eps);
    observer.level(0, &state);
    summary.records.push(RunRecord::of(0, &state, 0.0, None, h_eps));
    take_snapshots(&state, &mut next_snap, &mut summary.snapshots);

    let mut n = 0usize;
    let mut last_pushed = 0usize;
    let mut last = (0.0, None);
    while state.t < plan.t_end {
        if n >= plan.max_steps {
            summary.status = RunStatus::Aborted {
                n,
                t: state.t,
                error: None,
            };
            break;
        }
        let mut bound = governor.bound(&state, &summary.cache, g, h_eps)?;
        let mut k = bound.chosen_k;
        let mut target = plan.t_end;
        if next_snap < snaps.len() && snaps[next_snap] < target {
            target = snaps[next_snap];
        }
        let remaining = target - state.t;
        if remaining <= k * (1.0 + LANDING_SLACK) {
            k = remaining;
        }
        bound.chosen_k = k;
        summary.governor.push(GovernorRecord { n, t: state.t, bound });
        let result = stepper.composed_step(&state, k, bc);
        let (mut next, report) = match result {
            Ok(v) => v,
            Err(e) => {
                summary.status = match e {
                    StepError::NonFinite { .. } => RunStatus::BlowUp {
                        n: n + 1,
                        t: state.t + k,
                    },
                    StepError::IterationFailure { .. } => RunStatus::IterationFailure { n: n + 1, t: state.t },
                    other => RunStatus::Aborted {
                        n: n + 1,
                        t: state.t,
                        error: Some(other),
                    },
                };
                break;
            }
        };
        if (target - next.t).abs() <= LANDING_SLACK * k {
            next.t = target;
        }
        summary.implicit_iterations += report.implicit.iterations;
        n += 1;
        let h_norm = l2_norm(&next.h, &next.grid);
        if !next.is_finite() || !(h_norm <= blowup_level) {
            summary.status = RunStatus::BlowUp { n, t: next.t };
            state = next;
            break;
        }
        state = next;
        summary.steps = n;
        summary.cache.observe(&state, g, h_eps);
        observer.level(n, &state);
        last = (k, Some(bound.source));
        if n % every == 0 {
            summary.records.push(RunRecord::of(n, &state, k, last.1, h_eps));
            last_pushed = n;
        }
        take_snapshots(&state, &mut next_snap, &mut summary.snapshots);
    }
    if summary.steps > last_pushed && summary.steps > 0 {
        let accepted = if matches!(summary.status, RunStatus::BlowUp { .. }) {
            None
        } else {
            Some(&state)
        };
        if let Some(s) = accepted {
            summary.records.push(RunRecord::of(summary.steps, s, last.0, last.1, h_eps));
        }
    }
    summary.state = state;
    Ok(summary)
}
