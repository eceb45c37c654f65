//! Structured-grid solver for the two-dimensional shallow-water equations.
//!
//! The scheme advances the conservative field `(h, hu, hv)` with a symmetric
//! locally-one-dimensional split step: an explicit x-sweep over half a step,
//! an implicit (trapezoidal) y-sweep over a full step, and a second explicit
//! x-sweep over half a step. Spatial derivatives use fourth-order centered
//! differences; the explicit sweep carries a second-order-in-time correction
//! built from third-order one-sided differences.
//!
//! The crate is `no_std` (it needs `alloc`) and does no IO. File formats,
//! scenario configuration and the command line live in the `swe` crate.
//!
//! Module map:
//! - [`grid`]: grid geometry, flow state, node classification
//! - [`stencil`]: one-dimensional difference operators
//! - [`physics`]: fluxes, Jacobians, friction and bed slopes
//! - [`stepper`]: the split stages and the composed step
//! - [`banded`]: banded LU used by the linearized implicit stage
//! - [`stability`]: time-step governors and the pentadiagonal norm check
//! - [`verification`]: analytic paraboloid solutions, norms, convergence orders
//! - [`run`]: time marching with blow-up detection and records
#![cfg_attr(not(test), no_std)]
#![warn(missing_docs)]

extern crate alloc;

pub mod banded;
pub mod grid;
pub mod physics;
pub mod run;
pub mod stability;
pub mod stencil;
pub mod stepper;
pub mod verification;

pub(crate) mod math;

pub use grid::{FlowState, Grid, GridError, NodeClass, Primitive};
pub use physics::{BedSlopes, CellVec3, PhysParams};
pub use run::{RunPlan, RunRecord, RunStatus, RunSummary, StepPolicy};
pub use stability::{Governor, NormCache, StepBound};
pub use stepper::{BoundaryProvider, StageConfig, StepError, Stepper};
