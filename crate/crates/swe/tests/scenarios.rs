//! Scenario loading, presets, file formats and reproducibility.

use std::fs;

use swe::output::{read_series, read_snapshot_f64, write_series, write_snapshot_csv, write_snapshot_f64};
use swe::{write_run, Bed, Discharge, LogonePreset, Scenario};
use swe_core::run::{RunRecord, RunStatus};
use swe_core::verification::{Example, ErrorAccumulator};
use swe_core::{FlowState, Grid, Primitive};

const THACKER: &str = "\
[grid]
lx = 4
ly = 4
mx = 36
my = 36

[physics]
g = 10
n_manning = 0
h_eps = 1e-3

[topography]
kind = paraboloid
h0 = 0.1
d = 1
slope = descent

[initial]
kind = thacker1

[boundary]
kind = exact

[time]
t_end = 0.5
policy = fixed
k = 0.0013717421124828531   # 3^-6
";

const POOL: &str = "\
[grid]
lx = 1
ly = 1
mx = 8
my = 8
[topography]
kind = flat
[initial]
kind = uniform
depth = 0.7
[boundary]
kind = wall
[time]
t_end = 0.05
policy = fixed
k = 0.01
[output]
snapshot_times = 0.02, 0.05
snapshot_format = f64
";

fn line_containing(text: &str, needle: &str) -> usize {
    text.lines().position(|l| l.contains(needle)).expect("needle present") + 1
}

fn error_line(text: &str) -> Option<usize> {
    Scenario::load(text).unwrap_err().line
}

#[test]
fn config_errors_carry_line_numbers() {
    let bad_value = THACKER.replace("mx = 36", "mx = lots");
    assert_eq!(error_line(&bad_value), Some(line_containing(THACKER, "mx =")));
    let negative = THACKER.replace("h0 = 0.1", "h0 = -0.1");
    assert_eq!(error_line(&negative), Some(line_containing(THACKER, "h0 =")));
    let unknown = format!("{THACKER}[output]\nseries_evry = 3\n");
    let e = Scenario::load(&unknown).unwrap_err();
    assert!(e.message.contains("output.series_evry"), "{e}");
    assert_eq!(e.line, Some(THACKER.lines().count() + 2));
    let choice = THACKER.replace("kind = exact", "kind = open");
    assert_eq!(error_line(&choice), Some(line_containing(THACKER, "kind = exact")));
    let tiny = POOL.replace("mx = 8", "mx = 4");
    assert_eq!(error_line(&tiny), Some(line_containing(POOL, "mx =")));
    let gamma = format!("{THACKER}gamma = 20\n");
    assert_eq!(error_line(&gamma), Some(THACKER.lines().count() + 1));
}

#[test]
fn empty_document_lists_every_required_key() {
    let e = Scenario::load("").unwrap_err();
    assert_eq!(e.line, None);
    for key in ["grid.lx", "grid.ly", "grid.mx", "grid.my", "topography.kind", "initial.kind", "boundary.kind", "time.t_end", "time.policy"] {
        assert!(e.message.contains(key), "{key} missing from `{e}`");
    }
}

#[test]
fn exact_boundary_needs_a_basin() {
    let e = Scenario::load(&POOL.replace("kind = wall", "kind = exact")).unwrap_err();
    assert!(e.line.is_some());
}

#[test]
fn basin_document_runs_close_to_the_exact_solution() {
    let s = Scenario::load(THACKER).unwrap();
    assert_eq!((s.grid.mx(), s.grid.my()), (36, 36));
    let (example, params) = match s.initial {
        swe::scenario::InitialCondition::Thacker { example, params } => (example, params),
        _ => panic!("expected a basin initial condition"),
    };
    assert_eq!(example, Example::One);
    let mut acc = ErrorAccumulator::new(example, params, s.physics.h_eps);
    let summary = s.execute_with(&mut acc).unwrap();
    assert_eq!(summary.status, RunStatus::Completed);
    assert!(acc.e_h < 5e-2, "e_h = {}", acc.e_h);
}

#[test]
fn preset_fields() {
    let wet_min: LogonePreset = "logone:wet:min".parse().unwrap();
    let s = wet_min.setup();
    assert_eq!(s.h0_down, 0.176);
    assert_eq!(s.q, 16.0);
    assert_eq!(s.u0, 16.0 / 0.176);
    assert!((s.u0 - 90.91).abs() < 5e-3);
    assert_eq!((s.dx, s.dy, s.k, s.t_end), (8.89, 12.36, 0.33, 3.0));
    assert_eq!((s.c0, s.n_manning, s.g), (40.0, 0.025, 10.0));
    let dry = LogonePreset {
        bed: Bed::Dry,
        discharge: Discharge::Max,
    }
    .setup();
    assert_eq!(dry.h0_down, 0.0014);
    assert_eq!(dry.q, 2420.0);
    assert_eq!(Discharge::Avg.q(), 492.0);
    let sc = wet_min.scenario();
    assert_eq!(sc.grid.dx(), 8.89);
    assert_eq!(sc.grid.dy(), 12.36);
}

#[test]
fn series_round_trips_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    let records: Vec<RunRecord> = (0..5)
        .map(|n| RunRecord {
            n,
            t: n as f64 / 3.0,
            k: 1.0 / 3.0,
            h_norm: (n as f64).sqrt() * 0.1,
            u_norm: 1e-300 * n as f64,
            v_norm: -0.0,
            h_max: std::f64::consts::PI,
            u_max: 6.02214076e23,
            v_max: f64::MIN_POSITIVE,
            source: None,
        })
        .collect();
    write_series(&path, &records).unwrap();
    let back = read_series(&path).unwrap();
    assert_eq!(back.len(), records.len());
    for ((r, source), want) in back.iter().zip(&records) {
        assert_eq!(source, "");
        let bits = |r: &RunRecord| [r.t, r.k, r.h_norm, r.u_norm, r.v_norm, r.h_max, r.u_max, r.v_max].map(f64::to_bits);
        assert_eq!(r.n, want.n);
        assert_eq!(bits(r), bits(want));
    }

    write_series(&path, &[]).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 1);
    assert!(read_series(&path).unwrap().is_empty());
}

#[test]
fn snapshots_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let grid = Grid::new(0.0, 0.0, 1.0, 1.0, 5, 5).unwrap();
    let state = FlowState::from_fn(grid, 0.25, |x, y| Primitive::new(1.0 + x, 0.1 * y, -x * y / 3.0));
    let csv = dir.path().join("s.csv");
    write_snapshot_csv(&csv, &state, 1e-6).unwrap();
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 37);
    assert_eq!(text.lines().next().unwrap(), "x,y,h,u,v");

    let raw = dir.path().join("s.f64");
    write_snapshot_f64(&raw, &state, 1e-6).unwrap();
    let back = read_snapshot_f64(&raw).unwrap();
    let (u, v) = state.primitive_velocities(1e-6);
    assert_eq!((back.nx, back.ny, back.t), (6, 6, 0.25));
    assert_eq!(back.h, state.h);
    assert_eq!(back.u, u);
    assert_eq!(back.v, v);

    fs::write(&raw, b"SWE0 short").unwrap();
    assert!(read_snapshot_f64(&raw).is_err());
}

#[test]
fn run_writes_requested_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let s = Scenario::load(POOL).unwrap();
    let summary = s.execute().unwrap();
    assert_eq!(summary.status, RunStatus::Completed);
    write_run(dir.path(), &s, &summary).unwrap();
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["governor.csv", "series.csv", "snapshot_t0.02.f64", "snapshot_t0.05.f64"]);
    let snap = read_snapshot_f64(&dir.path().join("snapshot_t0.05.f64")).unwrap();
    assert!(snap.h.iter().all(|h| (h - 0.7).abs() < 1e-12));
}

#[test]
fn repeated_runs_are_bit_identical() {
    let s = Scenario::load(&THACKER.replace("t_end = 0.5", "t_end = 0.1")).unwrap();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let summary = s.execute().unwrap();
        write_run(d.path(), &s, &summary).unwrap();
    }
    let a = fs::read(dirs[0].path().join("series.csv")).unwrap();
    let b = fs::read(dirs[1].path().join("series.csv")).unwrap();
    assert!(a.len() > 100);
    assert_eq!(a, b);
}

// Fails: the quiescent first step runs at the initial CFL step, where 25
// fixed-point iterations do not converge on this mesh; with more iterations
// the run stalls at t = 0.71 instead.
#[test]
#[ignore = "known failure on the 36 x 36 mesh"]
fn governed_basin_period_on_coarse_mesh() {
    let text = THACKER.replace("t_end = 0.5", "t_end = 2.221441469079183").replace("policy = fixed", "policy = governor");
    let text = text.lines().filter(|l| !l.starts_with("k =")).collect::<Vec<_>>().join("\n");
    let s = Scenario::load(&text).unwrap();
    let swe::scenario::InitialCondition::Thacker { example, params } = s.initial else {
        unreachable!()
    };
    let mut acc = ErrorAccumulator::new(example, params, s.physics.h_eps);
    let summary = s.execute_with(&mut acc).unwrap();
    assert_eq!(summary.status, RunStatus::Completed);
    let err = acc.e_h;
    assert!(err < 1e-2, "e_h = {err}");
}
