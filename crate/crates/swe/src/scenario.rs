//! Scenario description, loading from a [`Document`], and execution.

use swe_core::run::{run, LevelObserver, RunPlan, RunSummary, StepPolicy};
use swe_core::stepper::{FixedBoundary, JacobianForm, Linearization};
use swe_core::verification::{thacker_exact, Example, ExactBoundary, ThackerParams};
use swe_core::{BedSlopes, BoundaryProvider, FlowState, Grid, PhysParams, Primitive, StageConfig, Stepper};

use crate::config::{ConfigError, Document, FromValue};

/// Bed slope field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Topography {
    /// `S0 = 0`.
    Flat,
    /// Uniform slopes.
    Constant {
        /// `S0x`.
        s0x: f64,
        /// `S0y`.
        s0y: f64,
    },
    /// Paraboloid `z = h0 (r²/d² - 1)` about the domain centre.
    Paraboloid {
        /// Depth scale.
        h0: f64,
        /// Radius of zero elevation.
        d: f64,
        /// `true`: `S0 = -∇z`; `false`: `S0 = ∇z`.
        descent: bool,
        /// Centre; the domain centre when `None`.
        center: Option<(f64, f64)>,
    },
}

impl Topography {
    /// Slopes on `grid`.
    pub fn slopes(&self, grid: &Grid) -> BedSlopes {
        match *self {
            Topography::Flat => BedSlopes::zeros(grid),
            Topography::Constant { s0x, s0y } => BedSlopes::constant(grid, s0x, s0y),
            Topography::Paraboloid { h0, d, descent, center } => {
                let c = center.unwrap_or((grid.x0() + 0.5 * grid.lx(), grid.y0() + 0.5 * grid.ly()));
                let s = swe_core::physics::paraboloid_slopes(grid, h0, d, c);
                if descent {
                    s.negated()
                } else {
                    s
                }
            }
        }
    }
}

/// Initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    /// Exact basin solution at `t = 0`.
    Thacker {
        /// Which solution.
        example: Example,
        /// Its parameters.
        params: ThackerParams,
    },
    /// Constant depth and velocity.
    Uniform {
        /// Depth.
        depth: f64,
        /// x velocity.
        u: f64,
        /// y velocity.
        v: f64,
    },
    /// Still water for `y < dam_y`, moving water beyond it.
    Dam {
        /// Dam position.
        dam_y: f64,
        /// Upstream depth.
        upstream_depth: f64,
        /// Downstream depth.
        downstream_depth: f64,
        /// Downstream x velocity.
        downstream_u: f64,
        /// Downstream y velocity.
        downstream_v: f64,
    },
}

impl InitialCondition {
    /// Primitive value at `(x, y)`.
    pub fn value(&self, x: f64, y: f64) -> Primitive {
        match *self {
            InitialCondition::Thacker { example, params } => thacker_exact(example, x, y, 0.0, &params),
            InitialCondition::Uniform { depth, u, v } => Primitive { h: depth, u, v },
            InitialCondition::Dam {
                dam_y,
                upstream_depth,
                downstream_depth,
                downstream_u,
                downstream_v,
            } => {
                if y < dam_y {
                    Primitive {
                        h: upstream_depth,
                        u: 0.0,
                        v: 0.0,
                    }
                } else {
                    Primitive {
                        h: downstream_depth,
                        u: downstream_u,
                        v: downstream_v,
                    }
                }
            }
        }
    }
}

/// Boundary data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Exact basin solution (needs a Thacker initial condition).
    Exact,
    /// Initial boundary values held fixed.
    Fixed,
    /// Initial boundary depth held fixed, velocities zero.
    Wall,
}

/// Snapshot file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotFormat {
    /// `snapshot_t<time>.csv`.
    Csv,
    /// `snapshot_t<time>.f64` raw block.
    F64,
}

/// What to write.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputPlan {
    /// Series cadence in levels.
    pub series_every: usize,
    /// Snapshot times.
    pub snapshot_times: Vec<f64>,
    /// Snapshot format.
    pub snapshot_format: SnapshotFormat,
}

impl Default for OutputPlan {
    fn default() -> Self {
        Self {
            series_every: 1,
            snapshot_times: Vec::new(),
            snapshot_format: SnapshotFormat::Csv,
        }
    }
}

/// A complete, validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Mesh.
    pub grid: Grid,
    /// Physical constants.
    pub physics: PhysParams,
    /// Bed slopes.
    pub topography: Topography,
    /// Initial state.
    pub initial: InitialCondition,
    /// Boundary data.
    pub boundary: BoundaryKind,
    /// Final time.
    pub t_end: f64,
    /// Step policy.
    pub policy: StepPolicy,
    /// Stage solver settings.
    pub stage: StageConfig,
    /// Outputs.
    pub output: OutputPlan,
}

/// Boundary provider built from a [`Scenario`].
#[derive(Debug, Clone)]
pub enum ScenarioBoundary {
    /// Exact solution.
    Exact(ExactBoundary),
    /// Stored values.
    Fixed(FixedBoundary),
}

impl BoundaryProvider for ScenarioBoundary {
    fn prescribe(&self, grid: &Grid, l: usize, p: usize, t: f64) -> Primitive {
        match self {
            ScenarioBoundary::Exact(b) => b.prescribe(grid, l, p, t),
            ScenarioBoundary::Fixed(b) => b.prescribe(grid, l, p, t),
        }
    }
}

impl Scenario {
    /// Parse and validate a configuration text.
    pub fn load(text: &str) -> Result<Self, ConfigError> {
        let mut doc = Document::parse(text)?;
        let s = read_scenario(&mut doc)?;
        doc.finish()?;
        // finish() fails whenever a required key was missing, so `s` is set.
        s.ok_or_else(|| ConfigError::general("incomplete scenario"))
    }

    /// Basin verification scenario with exact boundaries over `periods`
    /// oscillations.
    pub fn thacker(example: Example, params: ThackerParams, dx: f64, h_eps: f64, policy: StepPolicy, periods: f64) -> Result<Self, ConfigError> {
        params
            .validate()
            .map_err(|e| ConfigError::general(e.to_string()))?;
        let grid = swe_core::verification::thacker_grid(&params, dx).map_err(|e| ConfigError::general(e.to_string()))?;
        Ok(Self {
            grid,
            physics: params.physics(h_eps),
            topography: Topography::Paraboloid {
                h0: params.h0,
                d: params.d,
                descent: true,
                center: None,
            },
            initial: InitialCondition::Thacker { example, params },
            boundary: BoundaryKind::Exact,
            t_end: periods * params.period(example),
            policy,
            stage: StageConfig::default(),
            output: OutputPlan::default(),
        })
    }

    /// Initial state at `t = 0`.
    pub fn initial_state(&self) -> FlowState {
        FlowState::from_fn(self.grid, 0.0, |x, y| self.initial.value(x, y))
    }

    /// Boundary provider for this scenario.
    pub fn boundary_provider(&self, initial: &FlowState) -> ScenarioBoundary {
        match (self.boundary, self.initial) {
            (BoundaryKind::Exact, InitialCondition::Thacker { example, params }) => {
                ScenarioBoundary::Exact(ExactBoundary { example, params })
            }
            (BoundaryKind::Wall, _) => {
                let mut b = FixedBoundary::from_state(initial, self.physics.h_eps);
                let g = self.grid;
                g.for_each_boundary_node(|l, p| {
                    let h = initial.h[g.idx(l, p)];
                    b.set(l, p, Primitive { h, u: 0.0, v: 0.0 });
                });
                ScenarioBoundary::Fixed(b)
            }
            _ => ScenarioBoundary::Fixed(FixedBoundary::from_state(initial, self.physics.h_eps)),
        }
    }

    /// Stepper for this scenario.
    pub fn stepper(&self) -> Stepper {
        Stepper::new(self.physics, self.stage, self.topography.slopes(&self.grid))
    }

    /// Run plan for this scenario.
    pub fn plan(&self) -> RunPlan {
        let mut plan = RunPlan::new(self.t_end, self.policy);
        plan.series_every = self.output.series_every;
        plan.snapshot_times = self.output.snapshot_times.clone();
        plan
    }

    /// March to `t_end` (or termination), reporting each level to `observer`.
    pub fn execute_with<O: LevelObserver + ?Sized>(&self, observer: &mut O) -> Result<RunSummary, ConfigError> {
        let initial = self.initial_state();
        let bc = self.boundary_provider(&initial);
        run(&self.stepper(), &initial, &bc, &self.plan(), observer).map_err(|e| ConfigError::general(e.to_string()))
    }

    /// March to `t_end` (or termination).
    pub fn execute(&self) -> Result<RunSummary, ConfigError> {
        self.execute_with(&mut ())
    }
}

/// Remove a value and check it against `ok`, reporting `what` on failure.
fn checked<T: FromValue + Copy>(
    doc: &mut Document,
    section: &str,
    key: &str,
    required: bool,
    ok: impl Fn(T) -> bool,
    what: &str,
) -> Result<Option<T>, ConfigError> {
    let line = doc.line_of(section, key);
    let v = if required { doc.req::<T>(section, key)? } else { doc.opt::<T>(section, key)? };
    match (v, line) {
        (Some(x), Some(line)) if !ok(x) => Err(ConfigError::at(line, format!("`{section}.{key}` must be {what}"))),
        _ => Ok(v),
    }
}

fn positive(doc: &mut Document, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
    checked(doc, section, key, true, |x: f64| x > 0.0, "positive")
}

fn positive_or(doc: &mut Document, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
    Ok(checked(doc, section, key, false, |x: f64| x > 0.0, "positive")?.unwrap_or(default))
}

fn non_negative_or(doc: &mut Document, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
    Ok(checked(doc, section, key, false, |x: f64| x >= 0.0, "non-negative")?.unwrap_or(default))
}

fn choice<'a>(doc: &mut Document, section: &str, key: &str, options: &[&'a str]) -> Result<Option<&'a str>, ConfigError> {
    let line = doc.line_of(section, key);
    let Some(v) = doc.req::<String>(section, key)? else {
        return Ok(None);
    };
    match options.iter().find(|o| **o == v) {
        Some(o) => Ok(Some(*o)),
        None => Err(ConfigError::at(
            line.unwrap_or(0),
            format!("`{section}.{key}` must be one of {}, found `{v}`", options.join(" | ")),
        )),
    }
}

fn choice_or<'a>(doc: &mut Document, section: &str, key: &str, options: &[&'a str]) -> Result<&'a str, ConfigError> {
    if doc.line_of(section, key).is_none() {
        return Ok(options[0]);
    }
    Ok(choice(doc, section, key, options)?.unwrap_or(options[0]))
}

/// Read every section. Returns `Ok(None)` when a required key is missing
/// (recorded in `doc`), so that all missing keys are reported at once.
fn read_scenario(doc: &mut Document) -> Result<Option<Scenario>, ConfigError> {
    // [grid]
    let x0 = doc.or("grid", "x0", 0.0)?;
    let y0 = doc.or("grid", "y0", 0.0)?;
    let lx = positive(doc, "grid", "lx")?;
    let ly = positive(doc, "grid", "ly")?;
    let mx = checked(doc, "grid", "mx", true, |m: usize| m >= swe_core::grid::MIN_CELLS, "at least 5")?;
    let my = checked(doc, "grid", "my", true, |m: usize| m >= swe_core::grid::MIN_CELLS, "at least 5")?;

    // [physics]
    let defaults = PhysParams::default();
    let physics = PhysParams {
        g: positive_or(doc, "physics", "g", defaults.g)?,
        n_manning: non_negative_or(doc, "physics", "n_manning", defaults.n_manning)?,
        c0: positive_or(doc, "physics", "c0", defaults.c0)?,
        h_eps: positive_or(doc, "physics", "h_eps", defaults.h_eps)?,
    };

    // [topography]
    let topography = match choice(doc, "topography", "kind", &["flat", "constant", "paraboloid"])? {
        Some("flat") => Some(Topography::Flat),
        Some("constant") => Some(Topography::Constant {
            s0x: doc.or("topography", "s0x", 0.0)?,
            s0y: doc.or("topography", "s0y", 0.0)?,
        }),
        Some(_) => {
            let h0 = positive(doc, "topography", "h0")?;
            let d = positive(doc, "topography", "d")?;
            let descent = choice_or(doc, "topography", "slope", &["descent", "gradient"])? == "descent";
            let cx = doc.opt::<f64>("topography", "center_x")?;
            let cy = doc.opt::<f64>("topography", "center_y")?;
            let center = match (cx, cy) {
                (Some(x), Some(y)) => Some((x, y)),
                (None, None) => None,
                _ => return Err(ConfigError::general("`topography.center_x` and `topography.center_y` go together")),
            };
            match (h0, d) {
                (Some(h0), Some(d)) => Some(Topography::Paraboloid { h0, d, descent, center }),
                _ => None,
            }
        }
        None => None,
    };

    // [initial]
    let kind_line = doc.line_of("initial", "kind");
    let initial = match choice(doc, "initial", "kind", &["thacker1", "thacker2", "uniform", "dam"])? {
        Some(kind @ ("thacker1" | "thacker2")) => {
            let example = if kind == "thacker1" { Example::One } else { Example::Two };
            let base = ThackerParams::default();
            let h0 = positive_or(doc, "initial", "h0", base.h0)?;
            let d = positive_or(doc, "initial", "d", base.d)?;
            let r0 = positive_or(doc, "initial", "r0", base.r0)?;
            let eta = positive_or(doc, "initial", "eta", base.eta)?;
            match (lx, ly) {
                (Some(lx), Some(ly)) => {
                    if lx != ly {
                        return Err(ConfigError::at(kind_line.unwrap_or(0), "basin solutions need a square domain (lx = ly)"));
                    }
                    let params = ThackerParams {
                        l: lx,
                        h0,
                        d,
                        g: physics.g,
                        r0,
                        eta,
                    };
                    params
                        .validate()
                        .map_err(|e| ConfigError::at(kind_line.unwrap_or(0), e.to_string()))?;
                    Some(InitialCondition::Thacker { example, params })
                }
                _ => None,
            }
        }
        Some("uniform") => {
            let depth = checked(doc, "initial", "depth", true, |x: f64| x >= 0.0, "non-negative")?;
            let u = doc.or("initial", "u", 0.0)?;
            let v = doc.or("initial", "v", 0.0)?;
            depth.map(|depth| InitialCondition::Uniform { depth, u, v })
        }
        Some(_) => {
            let dam_y = doc.req::<f64>("initial", "dam_y")?;
            let up = checked(doc, "initial", "upstream_depth", true, |x: f64| x >= 0.0, "non-negative")?;
            let down = checked(doc, "initial", "downstream_depth", true, |x: f64| x >= 0.0, "non-negative")?;
            let downstream_u = doc.or("initial", "downstream_u", 0.0)?;
            let downstream_v = doc.or("initial", "downstream_v", 0.0)?;
            match (dam_y, up, down) {
                (Some(dam_y), Some(upstream_depth), Some(downstream_depth)) => Some(InitialCondition::Dam {
                    dam_y,
                    upstream_depth,
                    downstream_depth,
                    downstream_u,
                    downstream_v,
                }),
                _ => None,
            }
        }
        None => None,
    };

    // [boundary]
    let boundary_line = doc.line_of("boundary", "kind");
    let boundary = match choice(doc, "boundary", "kind", &["exact", "fixed", "wall"])? {
        Some("exact") => Some(BoundaryKind::Exact),
        Some("fixed") => Some(BoundaryKind::Fixed),
        Some(_) => Some(BoundaryKind::Wall),
        None => None,
    };
    if let (Some(BoundaryKind::Exact), Some(init)) = (boundary, initial) {
        if !matches!(init, InitialCondition::Thacker { .. }) {
            return Err(ConfigError::at(
                boundary_line.unwrap_or(0),
                "`boundary.kind = exact` needs a thacker1 or thacker2 initial condition",
            ));
        }
    }

    // [time]
    let t_end = positive(doc, "time", "t_end")?;
    let gamma = checked(doc, "time", "gamma", false, |g: f64| g > 0.0 && g <= 18.0, "in (0, 18]")?.unwrap_or(18.0);
    let policy = match choice(doc, "time", "policy", &["governor", "fixed"])? {
        Some("fixed") => positive(doc, "time", "k")?.map(|k| StepPolicy::Fixed { k, gamma }),
        Some(_) => {
            let clamp = doc.or("time", "clamp", true)?;
            Some(StepPolicy::Governed { gamma, clamp })
        }
        None => None,
    };

    // [solver]
    let base = StageConfig::default();
    let stage = StageConfig {
        picard_max_iters: checked(doc, "solver", "picard_max_iters", false, |n: usize| n >= 1, "at least 1")?
            .unwrap_or(base.picard_max_iters),
        picard_tol: positive_or(doc, "solver", "picard_tol", base.picard_tol)?,
        relaxation: checked(doc, "solver", "relaxation", false, |w: f64| w > 0.0 && w <= 1.0, "in (0, 1]")?
            .unwrap_or(base.relaxation),
        linearization: match choice_or(doc, "solver", "linearization", &["picard", "chord", "linearized"])? {
            "picard" => Linearization::PicardOnly,
            "chord" => Linearization::FrozenJacobian,
            _ => Linearization::Linearized,
        },
        jacobian: match choice_or(doc, "solver", "jacobian", &["conservative", "primitive"])? {
            "conservative" => JacobianForm::Conservative,
            _ => JacobianForm::Primitive,
        },
        dry_momentum_zeroing: doc.or("solver", "dry_momentum_zeroing", base.dry_momentum_zeroing)?,
    };

    // [output]
    let series_every = checked(doc, "output", "series_every", false, |n: usize| n >= 1, "at least 1")?.unwrap_or(1);
    let times_line = doc.line_of("output", "snapshot_times");
    let snapshot_times = doc.opt::<Vec<f64>>("output", "snapshot_times")?.unwrap_or_default();
    if snapshot_times.iter().any(|t| *t < 0.0) {
        return Err(ConfigError::at(times_line.unwrap_or(0), "`output.snapshot_times` must be non-negative"));
    }
    let snapshot_format = match choice_or(doc, "output", "snapshot_format", &["csv", "f64"])? {
        "csv" => SnapshotFormat::Csv,
        _ => SnapshotFormat::F64,
    };

    let (Some(lx), Some(ly), Some(mx), Some(my)) = (lx, ly, mx, my) else {
        return Ok(None);
    };
    let grid = Grid::new(x0, y0, lx, ly, mx, my).map_err(|e| ConfigError::general(e.to_string()))?;
    let (Some(topography), Some(initial), Some(boundary), Some(t_end), Some(policy)) =
        (topography, initial, boundary, t_end, policy)
    else {
        return Ok(None);
    };
    Ok(Some(Scenario {
        grid,
        physics,
        topography,
        initial,
        boundary,
        t_end,
        policy,
        stage,
        output: OutputPlan {
            series_every,
            snapshot_times,
            snapshot_format,
        },
    }))
}
