//! Flood presets for the Logone catchment.
//!
//! Lengths, steps and the final time are taken as printed, in one abstract
//! unit system: the catchment is 80 by 1000 units, `Δx = 8.89`, `Δy = 12.36`,
//! `k = 0.33` and `T = 3` (months). The mesh is therefore coarse, 9 by 81
//! cells.

use std::fmt;
use std::str::FromStr;

use swe_core::run::StepPolicy;
use swe_core::stepper::Linearization;
use swe_core::{Grid, PhysParams, StageConfig};

use crate::config::ConfigError;
use crate::scenario::{BoundaryKind, InitialCondition, OutputPlan, Scenario, Topography};

/// Bed state downstream of the dam.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bed {
    /// `h0 = 0.176`.
    Wet,
    /// `h0 = 0.0014`.
    Dry,
}

/// Annual discharge statistic used for the initial velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Discharge {
    /// 16 m³/s.
    Min,
    /// 492 m³/s.
    Avg,
    /// 2420 m³/s.
    Max,
}

impl Bed {
    /// Downstream initial depth.
    pub fn depth(self) -> f64 {
        match self {
            Bed::Wet => 0.176,
            Bed::Dry => 0.0014,
        }
    }
}

impl Discharge {
    /// Discharge `q_x = q_y`.
    pub fn q(self) -> f64 {
        match self {
            Discharge::Min => 16.0,
            Discharge::Avg => 492.0,
            Discharge::Max => 2420.0,
        }
    }
}

/// A preset choice; parses from `logone:<wet|dry>:<min|avg|max>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogonePreset {
    /// Downstream bed.
    pub bed: Bed,
    /// Discharge statistic.
    pub discharge: Discharge,
}

impl FromStr for LogonePreset {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConfigError::general(format!("unknown preset `{s}`; expected logone:<wet|dry>:<min|avg|max>"));
        let mut parts = s.split(':');
        if parts.next() != Some("logone") {
            return Err(bad());
        }
        let bed = match parts.next() {
            Some("wet") => Bed::Wet,
            Some("dry") => Bed::Dry,
            _ => return Err(bad()),
        };
        let discharge = match parts.next() {
            Some("min") => Discharge::Min,
            Some("avg") => Discharge::Avg,
            Some("max") => Discharge::Max,
            _ => return Err(bad()),
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Self { bed, discharge })
    }
}

impl fmt::Display for LogonePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bed = match self.bed {
            Bed::Wet => "wet",
            Bed::Dry => "dry",
        };
        let q = match self.discharge {
            Discharge::Min => "min",
            Discharge::Avg => "avg",
            Discharge::Max => "max",
        };
        write!(f, "logone:{bed}:{q}")
    }
}

/// Every number that defines a preset run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogoneSetup {
    /// Upstream depth behind the dam.
    pub h0_up: f64,
    /// Downstream depth.
    pub h0_down: f64,
    /// Discharge.
    pub q: f64,
    /// Initial downstream velocity `q / h0_down`, both components.
    pub u0: f64,
    /// Mesh spacing in x.
    pub dx: f64,
    /// Mesh spacing in y.
    pub dy: f64,
    /// Cells in x.
    pub mx: usize,
    /// Cells in y.
    pub my: usize,
    /// Catchment width.
    pub lx: f64,
    /// Catchment length.
    pub ly: f64,
    /// Dam position along y.
    pub dam_y: f64,
    /// Time step.
    pub k: f64,
    /// Final time.
    pub t_end: f64,
    /// Friction constant.
    pub c0: f64,
    /// Manning roughness.
    pub n_manning: f64,
    /// Gravity.
    pub g: f64,
}

impl LogonePreset {
    /// The numbers behind this preset.
    pub fn setup(self) -> LogoneSetup {
        let (dx, dy, lx, ly) = (8.89, 12.36, 80.0, 1000.0);
        let h0_down = self.bed.depth();
        let q = self.discharge.q();
        LogoneSetup {
            h0_up: 0.1,
            h0_down,
            q,
            u0: q / h0_down,
            dx,
            dy,
            mx: (lx / dx).round() as usize,
            my: (ly / dy).round() as usize,
            lx,
            ly,
            dam_y: 0.5 * ly,
            k: 0.33,
            t_end: 3.0,
            c0: 40.0,
            n_manning: 0.025,
            g: 10.0,
        }
    }

    /// The scenario: dam at mid-length, walls all round, slopes
    /// `S0x = 2 h0 (x - 40)`, `S0y = 2 h0 (y - 500)` with `h0` the downstream
    /// depth. The implicit stage is a single linearized solve: at
    /// `k = 0.33` the y Courant number of the initial flow is well above
    /// one and the fixed-point iterations diverge.
    pub fn scenario(self) -> Scenario {
        let s = self.setup();
        let grid = Grid::with_spacing(0.0, 0.0, s.dx, s.dy, s.mx, s.my).expect("preset grid is valid");
        Scenario {
            grid,
            physics: PhysParams {
                g: s.g,
                n_manning: s.n_manning,
                c0: s.c0,
                ..PhysParams::default()
            },
            topography: Topography::Paraboloid {
                h0: s.h0_down,
                d: 1.0,
                descent: false,
                center: Some((0.5 * s.lx, 0.5 * s.ly)),
            },
            initial: InitialCondition::Dam {
                dam_y: s.dam_y,
                upstream_depth: s.h0_up,
                downstream_depth: s.h0_down,
                downstream_u: s.u0,
                downstream_v: s.u0,
            },
            boundary: BoundaryKind::Wall,
            t_end: s.t_end,
            policy: StepPolicy::Fixed { k: s.k, gamma: 18.0 },
            stage: StageConfig {
                linearization: Linearization::Linearized,
                ..StageConfig::default()
            },
            output: OutputPlan::default(),
        }
    }
}
