use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use swe::ladder::{run_ladder, worker_count};
use swe::output::{fmt_f64, write_convergence, write_governor, write_series};
use swe::{exit_code, write_run, ConfigError, LogonePreset, Scenario, EXIT_CONFIG};
use swe_core::run::{RunStatus, StepPolicy};
use swe_core::stability::{penta_norm_diagnostic, Governor, NormCache};
use swe_core::verification::{spatial_ladder, temporal_ladder, Example, Rung, THACKER_H_EPS};

#[derive(Parser)]
#[command(name = "swe", version, about = "Split explicit/implicit shallow-water solver")]
struct Cli {
    /// Directory for every output file.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Spatial,
    Temporal,
}

#[derive(Subcommand)]
enum Command {
    /// One basin run against its exact solution.
    Verify {
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        example: u8,
        /// Mesh spacing (both axes).
        #[arg(long, default_value_t = 1.0 / 27.0)]
        dx: f64,
        /// Fixed step; the adaptive governor is used when omitted.
        #[arg(long)]
        k: Option<f64>,
        #[arg(long, default_value_t = 18.0)]
        gamma: f64,
        /// Number of oscillation periods.
        #[arg(long, default_value_t = 3.0)]
        periods: f64,
        #[arg(long, default_value_t = THACKER_H_EPS)]
        h_eps: f64,
    },
    /// Refinement ladder and observed orders.
    Convergence {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        example: u8,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Run a scenario file or a preset.
    Run {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        /// `logone:<wet|dry>:<min|avg|max>`.
        #[arg(long)]
        preset: Option<String>,
    },
    /// Step bounds at the initial state of a scenario.
    StabilityReport {
        #[arg(long)]
        config: PathBuf,
    },
    /// Norm of the skew pentadiagonal matrix against its bound.
    PentaCheck {
        #[arg(long)]
        n: usize,
    },
}

enum Failure {
    Config(ConfigError),
    Other(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<swe::OutputError> for Failure {
    fn from(e: swe::OutputError) -> Self {
        Failure::Other(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32, Failure> {
    let out = cli.out.as_path();
    std::fs::create_dir_all(out).map_err(|e| Failure::Other(format!("{}: {e}", out.display())))?;
    match &cli.command {
        Command::Verify {
            example,
            dx,
            k,
            gamma,
            periods,
            h_eps,
        } => verify(out, *example, *dx, *k, *gamma, *periods, *h_eps),
        Command::Convergence { example, mode } => convergence(out, *example, *mode),
        Command::Run { config, preset } => {
            let scenario = match (config, preset) {
                (Some(path), _) => Scenario::load(&read(path)?)?,
                (None, Some(p)) => p.parse::<LogonePreset>()?.scenario(),
                (None, None) => unreachable!("clap requires one of the two"),
            };
            run_scenario(out, &scenario)
        }
        Command::StabilityReport { config } => stability_report(out, &Scenario::load(&read(config)?)?),
        Command::PentaCheck { n } => {
            if *n == 0 {
                return Err(ConfigError::general("--n must be at least 1").into());
            }
            let r = penta_norm_diagnostic(*n);
            let ok = r.computed_norm <= r.bound + 1e-9;
            println!(
                "n = {n}: ||A||_2 = {} (bound {}, {} iterations) {}",
                fmt_f64(r.computed_norm),
                r.bound,
                r.iterations,
                if ok { "within bound" } else { "EXCEEDS bound" }
            );
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| ConfigError::general(format!("{}: {e}", path.display())).into())
}

fn status_line(status: &RunStatus) -> String {
    match status {
        RunStatus::Completed => "completed".to_string(),
        RunStatus::BlowUp { n, t } => format!("blow-up at level {n}, t = {t}"),
        RunStatus::IterationFailure { n, t } => format!("implicit stage failed at level {n}, t = {t}"),
        RunStatus::Aborted { n, t, error } => match error {
            Some(e) => format!("aborted at level {n}, t = {t}: {e}"),
            None => format!("aborted at level {n}, t = {t}: step cap reached"),
        },
    }
}

fn run_scenario(out: &Path, scenario: &Scenario) -> Result<i32, Failure> {
    let summary = scenario.execute()?;
    write_run(out, scenario, &summary)?;
    println!(
        "{} after {} steps, t = {}",
        status_line(&summary.status),
        summary.steps,
        summary.state.t
    );
    Ok(exit_code(&summary.status))
}

fn verify(out: &Path, example: u8, dx: f64, k: Option<f64>, gamma: f64, periods: f64, h_eps: f64) -> Result<i32, Failure> {
    let example = Example::from_number(example).expect("clap restricts the range");
    if !(gamma > 0.0 && gamma <= 18.0) {
        return Err(ConfigError::general("--gamma must lie in (0, 18]").into());
    }
    for (name, v) in [("--dx", dx), ("--periods", periods), ("--h-eps", h_eps)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(ConfigError::general(format!("{name} must be positive")).into());
        }
    }
    let policy = match k {
        Some(k) if k > 0.0 && k.is_finite() => StepPolicy::Fixed { k, gamma },
        Some(_) => return Err(ConfigError::general("--k must be positive").into()),
        None => StepPolicy::Governed { gamma, clamp: true },
    };
    let mut rung = Rung::new(example, dx, policy);
    rung.t_end = periods * rung.params.period(example);
    rung.h_eps = h_eps;
    let scenario = Scenario::thacker(example, rung.params, dx, h_eps, policy, periods)?;
    let mut acc = swe_core::verification::ErrorAccumulator::new(example, rung.params, h_eps);
    let summary = scenario.execute_with(&mut acc)?;
    write_series(&out.join("series.csv"), &summary.records)?;
    write_governor(&out.join("governor.csv"), &summary.governor)?;
    println!("example {} dx = {} steps = {}", example.number(), scenario.grid.dx(), summary.steps);
    println!("status: {}", status_line(&summary.status));
    println!("e_h = {:.6e}  e_u = {:.6e}  e_v = {:.6e}", acc.e_h, acc.e_u, acc.e_v);
    println!("norm envelope / exact = {:.4}", acc.envelope_ratio());
    Ok(exit_code(&summary.status))
}

fn convergence(out: &Path, example: u8, mode: Mode) -> Result<i32, Failure> {
    let example = Example::from_number(example).expect("clap restricts the range");
    let third = |e: i32| 3f64.powi(-e);
    let (rungs, name) = match (example, mode) {
        (Example::One, Mode::Spatial) => (spatial_ladder(example, &[2, 3, 4], third(6), 18.0), "spatial"),
        (Example::Two, Mode::Spatial) => (spatial_ladder(example, &[2, 3], third(5), 12.0), "spatial"),
        (Example::One, Mode::Temporal) => (temporal_ladder(example, third(4), &[4, 5, 6], 18.0), "temporal"),
        (Example::Two, Mode::Temporal) => (temporal_ladder(example, third(3), &[3, 4, 5], 12.0), "temporal"),
    };
    let reports = run_ladder(&rungs, worker_count()).map_err(|e| Failure::Other(e.to_string()))?;
    let path = out.join(format!("convergence_ex{}_{name}.csv", example.number()));
    write_convergence(&path, &reports)?;
    let mut code = 0;
    for r in &reports {
        let o = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
        println!(
            "dx = {:.6} k = {:.6e}  e_h = {:.4e} ({})  e_u = {:.4e} ({})  e_v = {:.4e} ({})  {}",
            r.dx,
            r.k,
            r.e_h,
            o(r.order_h),
            r.e_u,
            o(r.order_u),
            r.e_v,
            o(r.order_v),
            status_line(&r.status)
        );
        if code == 0 {
            code = exit_code(&r.status);
        }
    }
    println!("wrote {}", path.display());
    Ok(code)
}

fn stability_report(out: &Path, scenario: &Scenario) -> Result<i32, Failure> {
    let state = scenario.initial_state();
    let (g, h_eps) = (scenario.physics.g, scenario.physics.h_eps);
    let (gamma, clamp, fixed) = match scenario.policy {
        StepPolicy::Fixed { k, gamma } => (gamma, true, Some(k)),
        StepPolicy::Governed { gamma, clamp } => (gamma, clamp, None),
    };
    let stab = |e: swe_core::stability::StabilityError| ConfigError::general(e.to_string());
    let mut governor = Governor::adaptive(&state, g, h_eps, gamma, clamp).map_err(stab)?;
    governor.fixed_k = fixed;
    let mut cache = NormCache::new(&state.grid);
    cache.observe(&state, g, h_eps);
    let b = governor.bound(&state, &cache, g, h_eps).map_err(stab)?;
    let path = out.join("stability.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
    let rows = [
        ["k_cfl".to_string(), fmt_f64(b.k_cfl)],
        ["k_thm1".to_string(), fmt_f64(b.k_thm1)],
        ["gamma".to_string(), fmt_f64(b.gamma)],
        ["chosen_k".to_string(), fmt_f64(b.chosen_k)],
        ["source".to_string(), b.source.label().to_string()],
    ];
    let io = |e: csv::Error| Failure::Other(format!("{}: {e}", path.display()));
    w.write_record(["quantity", "value"]).map_err(io)?;
    for r in &rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush().map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
    println!("CFL bound        k_cfl  = {:.6e}", b.k_cfl);
    println!("stability bound  k_thm1 = {:.6e} (gamma = {})", b.k_thm1, b.gamma);
    println!("step taken       k      = {:.6e} ({})", b.chosen_k, b.source.label());
    if let Some(k) = fixed {
        let ok = k <= b.k_thm1;
        println!("fixed step {} the stability bound", if ok { "satisfies" } else { "VIOLATES" });
    }
    Ok(0)
}
