//! Scenario files, presets, output formats and ladder orchestration for the
//! `swe-core` solver. The `swe` binary is a thin CLI over this library.

#![warn(missing_docs)]

pub mod config;
pub mod ladder;
pub mod output;
pub mod preset;
pub mod scenario;

use std::path::Path;

use swe_core::run::{RunStatus, RunSummary};

pub use config::ConfigError;
pub use output::OutputError;
pub use preset::{Bed, Discharge, LogonePreset};
pub use scenario::Scenario;

/// Exit code for a configuration error.
pub const EXIT_CONFIG: i32 = 4;

/// Process exit code for a terminal status: 0 completed, 2 blow-up,
/// 3 iteration failure, 1 for any other abort.
pub fn exit_code(status: &RunStatus) -> i32 {
    match status {
        RunStatus::Completed => 0,
        RunStatus::BlowUp { .. } => 2,
        RunStatus::IterationFailure { .. } => 3,
        RunStatus::Aborted { .. } => 1,
    }
}

/// Write `series.csv`, `governor.csv` and the snapshots of `summary` into `dir`.
pub fn write_run(dir: &Path, scenario: &Scenario, summary: &RunSummary) -> Result<(), OutputError> {
    std::fs::create_dir_all(dir).map_err(|source| OutputError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    output::write_series(&dir.join("series.csv"), &summary.records)?;
    output::write_governor(&dir.join("governor.csv"), &summary.governor)?;
    let h_eps = scenario.physics.h_eps;
    for s in &summary.snapshots {
        match scenario.output.snapshot_format {
            scenario::SnapshotFormat::Csv => {
                output::write_snapshot_csv(&dir.join(output::snapshot_name(s.t, "csv")), s, h_eps)?
            }
            scenario::SnapshotFormat::F64 => {
                output::write_snapshot_f64(&dir.join(output::snapshot_name(s.t, "f64")), s, h_eps)?
            }
        }
    }
    Ok(())
}
