//! The subcommands. Each one resolves the config, runs the library and
//! writes its artifacts into the output directory.

use std::fs;
use std::path::Path;

use preisach::{
    dead_zone_start, drive_pulse, evaluate_output, half_period_samples, max_gain, remnant_extrema,
    run_controller, sector_bounds, ControlStatus, ControlTrace, ControllerConfig, Error, GainMode,
    OracleComparison, SectorBounds,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{AutoOr, ExperimentConfig, Setup, SweepParameter, Target};
use crate::output::{ensure_finite, write_csv, write_json};
use crate::CliError;

/// Oracle samples per pulse.
const ORACLE_SAMPLES_PER_PULSE: usize = 1000;
/// Largest deviation, relative to the remnant range, that `oracle-check`
/// accepts at the fine lattice.
pub const ORACLE_TOLERANCE: f64 = 0.01;

fn lib_err(e: Error) -> CliError {
    match e {
        Error::EmptyIntersection | Error::DegenerateBounds => CliError::Degenerate(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

/// Setup plus everything derived from the sector bounds.
struct Analysis {
    setup: Setup,
    bounds: SectorBounds,
    gamma_max: f64,
    gamma_min: f64,
    gamma_initial: f64,
    max_gain: f64,
}

fn analyze(cfg: &ExperimentConfig) -> Result<Analysis, CliError> {
    let setup = cfg.resolve()?;
    let mode = cfg.controller.mode;
    let bounds = sector_bounds(&setup.mu, &setup.q, cfg.resolution).map_err(lib_err)?;
    setup
        .q
        .check_sign(&setup.mu, mode == GainMode::Positive, cfg.resolution)
        .map_err(lib_err)?;
    let gain = max_gain(&bounds, mode).map_err(lib_err)?;
    let (a, b) = remnant_extrema(&setup.mu, &setup.iface0, &setup.q).map_err(lib_err)?;
    let gamma_initial = evaluate_output(&setup.mu, &setup.iface0).map_err(lib_err)?;
    if a == b {
        return Err(CliError::Degenerate("remnant range is empty".into()));
    }
    Ok(Analysis {
        setup,
        bounds,
        gamma_max: a.max(b),
        gamma_min: a.min(b),
        gamma_initial,
        max_gain: gain,
    })
}

fn ensure_dir(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    #[serde(flatten)]
    pub bounds: SectorBounds,
    pub gamma_max: f64,
    pub gamma_min: f64,
    pub gamma_initial: f64,
    pub max_gain: f64,
    pub mode: GainMode,
    pub alpha2: f64,
    pub beta2: f64,
}

/// Sector constants, reachable remnants and the largest admissible gain.
/// Writes `bounds.json` when `out` is given.
pub fn cmd_bounds(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<BoundsReport, CliError> {
    let a = analyze(cfg)?;
    let report = BoundsReport {
        bounds: a.bounds,
        gamma_max: a.gamma_max,
        gamma_min: a.gamma_min,
        gamma_initial: a.gamma_initial,
        max_gain: a.max_gain,
        mode: cfg.controller.mode,
        alpha2: a.setup.q.alpha2,
        beta2: a.setup.q.beta2,
    };
    if let Some(out) = out {
        ensure_dir(out)?;
        write_json(&out.join("bounds.json"), &report)?;
    }
    Ok(report)
}

fn controller_config(cfg: &ExperimentConfig, a: &Analysis) -> Result<ControllerConfig, CliError> {
    let c = &cfg.controller;
    let gamma_d = match c.gamma_d {
        Target::Value(v) => v,
        Target::Fraction { fraction } => a.gamma_min + fraction * (a.gamma_max - a.gamma_min),
    };
    let lambda = match c.lambda {
        AutoOr::Auto(_) => 0.95 * a.max_gain,
        AutoOr::Value(v) => v,
    };
    let w0 = match c.w0 {
        AutoOr::Auto(_) => {
            dead_zone_start(&a.setup.mu, &a.setup.iface0, gamma_d, &a.setup.q, c.mode).map_err(lib_err)?
        }
        AutoOr::Value(v) => v,
    };
    let mut cc = ControllerConfig::new(gamma_d, lambda, w0, a.setup.q);
    cc.tolerance = c.tolerance;
    cc.max_pulses = c.max_pulses;
    cc.mode = c.mode;
    cc.tau = cfg.tau;
    cc.sample_step = cfg.sample_step;
    Ok(cc)
}

#[derive(Debug, Clone, Serialize)]
struct TraceRow {
    k: usize,
    w_k: f64,
    gamma_k: f64,
    e_k: f64,
    clamped: bool,
}

#[derive(Debug, Clone, Serialize)]
struct SignalRow {
    t: f64,
    u: f64,
    y: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ControlSummary {
    pub status: ControlStatus,
    pub converged: bool,
    pub pulses: usize,
    pub final_w: f64,
    pub final_gamma: f64,
    pub final_error: f64,
    pub gamma_d: f64,
    pub lambda: f64,
    pub w0: f64,
    pub tolerance: f64,
    pub gamma_max: f64,
    pub gamma_min: f64,
    pub max_gain: f64,
    pub tau: f64,
    pub mode: GainMode,
    pub seed: u64,
}

fn write_trace(out: &Path, trace: &ControlTrace) -> Result<(), CliError> {
    let rows: Vec<TraceRow> = trace
        .records
        .iter()
        .map(|r| TraceRow {
            k: r.k,
            w_k: r.w,
            gamma_k: r.gamma,
            e_k: r.error,
            clamped: r.clamped,
        })
        .collect();
    ensure_finite("trace", rows.iter().flat_map(|r| [r.w_k, r.gamma_k, r.e_k]))?;
    write_csv(&out.join("trace.csv"), &rows)
}

fn write_signal(out: &Path, rows: &[SignalRow]) -> Result<(), CliError> {
    ensure_finite("signal", rows.iter().flat_map(|r| [r.t, r.u, r.y]))?;
    write_csv(&out.join("signal.csv"), rows)
}

fn control_run(
    cfg: &ExperimentConfig,
    a: &Analysis,
    cc: &ControllerConfig,
    out: &Path,
    with_signal: bool,
) -> Result<ControlSummary, CliError> {
    let mut cc = cc.clone();
    cc.record_signal = with_signal;
    let trace = run_controller(&a.setup.mu, &a.setup.iface0, &cc).map_err(lib_err)?;
    ensure_dir(out)?;
    write_trace(out, &trace)?;
    if with_signal {
        let rows: Vec<SignalRow> = trace
            .signal
            .iter()
            .map(|s| SignalRow {
                t: s.t,
                u: s.u,
                y: s.y,
            })
            .collect();
        write_signal(out, &rows)?;
    }
    let last = trace.final_record();
    let summary = ControlSummary {
        status: trace.status,
        converged: trace.converged(),
        pulses: trace.records.len(),
        final_w: last.w,
        final_gamma: last.gamma,
        final_error: last.error,
        gamma_d: cc.gamma_d,
        lambda: cc.lambda,
        w0: cc.w0,
        tolerance: trace.tolerance,
        gamma_max: trace.gamma_max,
        gamma_min: trace.gamma_min,
        max_gain: a.max_gain,
        tau: cc.tau,
        mode: cc.mode,
        seed: cfg.seed,
    };
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Runs the controller and writes `trace.csv`, `signal.csv` and
/// `summary.json`. A run that hits `max_pulses` still writes everything.
pub fn cmd_control(cfg: &ExperimentConfig, out: &Path) -> Result<ControlSummary, CliError> {
    let a = analyze(cfg)?;
    let cc = controller_config(cfg, &a)?;
    control_run(cfg, &a, &cc, out, true)
}

#[derive(Debug, Clone, Serialize)]
struct RemnantRow {
    k: usize,
    w_k: f64,
    gamma_k: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub pulses: usize,
    pub initial_gamma: f64,
    pub final_gamma: f64,
    pub tau: f64,
}

/// Open-loop pulse plan: writes `remnants.csv`, `signal.csv` and
/// `summary.json`.
pub fn cmd_simulate(cfg: &ExperimentConfig, out: &Path) -> Result<SimulateSummary, CliError> {
    let plan = cfg
        .plan
        .as_ref()
        .ok_or_else(|| CliError::Config("simulate needs a \"plan\" array of amplitudes".into()))?;
    let setup = cfg.resolve()?;
    let n_half = half_period_samples(cfg.tau, cfg.sample_step);
    let dt = cfg.tau / (2 * n_half) as f64;
    let initial_gamma = evaluate_output(&setup.mu, &setup.iface0).map_err(lib_err)?;
    let mut signal = vec![SignalRow {
        t: 0.0,
        u: 0.0,
        y: initial_gamma,
    }];
    let mut remnants = Vec::with_capacity(plan.len());
    let mut iface = setup.iface0.clone();
    let mut failure = None;
    for (k, &w) in plan.iter().enumerate() {
        iface = drive_pulse(&iface, w, n_half, |j, u, cur| {
            match evaluate_output(&setup.mu, cur) {
                Ok(y) => signal.push(SignalRow {
                    t: k as f64 * cfg.tau + j as f64 * dt,
                    u,
                    y,
                }),
                Err(e) => failure = Some(e),
            }
        });
        if let Some(e) = failure.take() {
            return Err(lib_err(e));
        }
        remnants.push(RemnantRow {
            k,
            w_k: w,
            gamma_k: evaluate_output(&setup.mu, &iface).map_err(lib_err)?,
        });
    }
    ensure_dir(out)?;
    ensure_finite("remnants", remnants.iter().flat_map(|r| [r.w_k, r.gamma_k]))?;
    write_csv(&out.join("remnants.csv"), &remnants)?;
    write_signal(out, &signal)?;
    let summary = SimulateSummary {
        pulses: plan.len(),
        initial_gamma,
        final_gamma: remnants.last().map_or(initial_gamma, |r| r.gamma_k),
        tau: cfg.tau,
    };
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
struct OracleRow {
    k: usize,
    w_k: f64,
    gamma_exact: f64,
    gamma_coarse: f64,
    gamma_fine: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub pulses: usize,
    pub n_coarse: usize,
    pub n_fine: usize,
    pub deviation_coarse: f64,
    pub deviation_fine: f64,
    /// `deviation_coarse / deviation_fine`, 0 when both vanish.
    pub shrink_factor: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Replays the control trace through relay lattices of `oracle_n / 2` and
/// `oracle_n` relays per axis and compares per-pulse remnants, normalized by
/// the remnant range. Writes `oracle.csv` and `oracle.json`.
pub fn cmd_oracle_check(cfg: &ExperimentConfig, out: &Path) -> Result<OracleReport, CliError> {
    let a = analyze(cfg)?;
    let cc = controller_config(cfg, &a)?;
    let trace = run_controller(&a.setup.mu, &a.setup.iface0, &cc).map_err(lib_err)?;
    let amplitudes: Vec<f64> = trace.records.iter().map(|r| r.w).collect();
    let scale = a.gamma_max - a.gamma_min;
    let n_fine = cfg.oracle_n;
    let n_coarse = (n_fine / 2).max(1);
    let n_half = ORACLE_SAMPLES_PER_PULSE / 2;
    let (coarse, fine) = rayon::join(
        || OracleComparison::run(&a.setup.mu, &a.setup.iface0, &amplitudes, n_coarse, n_half, scale),
        || OracleComparison::run(&a.setup.mu, &a.setup.iface0, &amplitudes, n_fine, n_half, scale),
    );
    let (coarse, fine) = (coarse.map_err(lib_err)?, fine.map_err(lib_err)?);
    let rows: Vec<OracleRow> = (0..amplitudes.len())
        .map(|k| OracleRow {
            k,
            w_k: amplitudes[k],
            gamma_exact: fine.exact[k],
            gamma_coarse: coarse.oracle[k],
            gamma_fine: fine.oracle[k],
        })
        .collect();
    ensure_finite(
        "oracle comparison",
        rows.iter()
            .flat_map(|r| [r.w_k, r.gamma_exact, r.gamma_coarse, r.gamma_fine]),
    )?;
    let shrink_factor = if fine.max_deviation > 0.0 {
        coarse.max_deviation / fine.max_deviation
    } else {
        0.0
    };
    let report = OracleReport {
        pulses: amplitudes.len(),
        n_coarse,
        n_fine,
        deviation_coarse: coarse.max_deviation,
        deviation_fine: fine.max_deviation,
        shrink_factor,
        tolerance: ORACLE_TOLERANCE,
        pass: fine.max_deviation <= ORACLE_TOLERANCE,
    };
    ensure_dir(out)?;
    write_csv(&out.join("oracle.csv"), &rows)?;
    write_json(&out.join("oracle.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
struct SweepRow {
    run: usize,
    value: f64,
    gamma_d: f64,
    lambda: f64,
    status: ControlStatus,
    pulses: usize,
    final_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub runs: usize,
    pub converged: usize,
    pub longest: usize,
}

/// Runs the controller once per sweep value, in parallel, each into
/// `run_NNN/`, and collects `sweep.csv` and `sweep.json`.
pub fn cmd_sweep(cfg: &ExperimentConfig, out: &Path) -> Result<SweepReport, CliError> {
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("sweep needs a \"sweep\" section".into()))?;
    let values: Vec<f64> = match (&spec.values, &spec.random) {
        (Some(v), _) => v.clone(),
        (None, Some(r)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..r.count).map(|_| rng.gen_range(r.low..=r.high)).collect()
        }
        (None, None) => return Err(CliError::Config("sweep needs values or random".into())),
    };
    let a = analyze(cfg)?;
    let base = controller_config(cfg, &a)?;
    let configs = values
        .iter()
        .map(|&v| {
            let mut cc = base.clone();
            match spec.parameter {
                SweepParameter::GammaD => cc.gamma_d = v,
                SweepParameter::GammaFraction => cc.gamma_d = a.gamma_min + v * (a.gamma_max - a.gamma_min),
                SweepParameter::Lambda => cc.lambda = v,
                SweepParameter::LambdaFraction => cc.lambda = v * a.max_gain,
            }
            if matches!(
                spec.parameter,
                SweepParameter::GammaD | SweepParameter::GammaFraction
            ) && matches!(cfg.controller.w0, AutoOr::Auto(_))
            {
                cc.w0 = dead_zone_start(&a.setup.mu, &a.setup.iface0, cc.gamma_d, &a.setup.q, cc.mode)
                    .map_err(lib_err)?;
            }
            Ok(cc)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    ensure_dir(out)?;
    let summaries = configs
        .par_iter()
        .enumerate()
        .map(|(i, cc)| control_run(cfg, &a, cc, &out.join(format!("run_{i:03}")), false))
        .collect::<Result<Vec<_>, CliError>>()?;
    let rows: Vec<SweepRow> = summaries
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(run, (s, &value))| SweepRow {
            run,
            value,
            gamma_d: s.gamma_d,
            lambda: s.lambda,
            status: s.status,
            pulses: s.pulses,
            final_error: s.final_error,
        })
        .collect();
    write_csv(&out.join("sweep.csv"), &rows)?;
    let report = SweepReport {
        runs: rows.len(),
        converged: summaries.iter().filter(|s| s.converged).count(),
        longest: summaries.iter().map(|s| s.pulses).max().unwrap_or(0),
    };
    write_json(&out.join("sweep.json"), &report)?;
    Ok(report)
}
