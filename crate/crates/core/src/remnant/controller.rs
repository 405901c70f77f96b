//! Recursive amplitude update driving the remnant to a set point.

use serde::{Deserialize, Serialize};

use super::pulse::{drive_pulse, half_period_samples};
use super::{check_admissible, dead_zone, remnant_extrema, GainMode};
use crate::error::{Error, Result};
use crate::interface::MemoryInterface;
use crate::weighting::bounds::QRegion;
use crate::weighting::{evaluate_output, WeightingField};

pub const DEFAULT_MAX_PULSES: usize = 200;
pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_SAMPLE_STEP: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    pub gamma_d: f64,
    pub lambda: f64,
    pub w0: f64,
    pub q: QRegion,
    /// Absolute stopping tolerance on `|e_k|`. `None` means
    /// `1e-6 * (gamma_max - gamma_min)`.
    pub tolerance: Option<f64>,
    pub max_pulses: usize,
    pub mode: GainMode,
    pub tau: f64,
    /// Time between input samples while a pulse is replayed.
    pub sample_step: f64,
    /// Keep `(t, u, y)` at every input sample.
    pub record_signal: bool,
}

impl ControllerConfig {
    pub fn new(gamma_d: f64, lambda: f64, w0: f64, q: QRegion) -> Self {
        Self {
            gamma_d,
            lambda,
            w0,
            q,
            tolerance: None,
            max_pulses: DEFAULT_MAX_PULSES,
            mode: GainMode::Positive,
            tau: 1.0,
            sample_step: DEFAULT_SAMPLE_STEP,
            record_signal: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseRecord {
    pub k: usize,
    pub w: f64,
    pub gamma: f64,
    pub error: f64,
    /// The update for this amplitude left `[beta2, alpha2]` and was clamped.
    pub clamped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalRecord {
    pub t: f64,
    pub u: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlStatus {
    Converged,
    MaxPulses,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlTrace {
    pub records: Vec<PulseRecord>,
    pub signal: Vec<SignalRecord>,
    pub status: ControlStatus,
    pub gamma_max: f64,
    pub gamma_min: f64,
    pub tolerance: f64,
    pub final_interface: MemoryInterface,
}

impl ControlTrace {
    pub fn final_record(&self) -> &PulseRecord {
        self.records.last().expect("a run records at least one pulse")
    }

    pub fn converged(&self) -> bool {
        self.status == ControlStatus::Converged
    }
}

/// Starting amplitude on the edge of the initial dead zone facing the
/// target. With a nonnegative weighting that is `M` when the target lies
/// above the current remnant and `m` when it lies below; the negative mode
/// swaps them. The first pulse then switches relays whichever way it moves.
pub fn dead_zone_start(
    mu: &WeightingField,
    iface0: &MemoryInterface,
    gamma_d: f64,
    q: &QRegion,
    mode: GainMode,
) -> Result<f64> {
    let (m, big_m) = dead_zone(iface0)?;
    let gamma0 = evaluate_output(mu, iface0)?;
    let rising = (gamma_d >= gamma0) == (mode == GainMode::Positive);
    let w = if rising { big_m } else { m };
    Ok(w.clamp(q.beta2, q.alpha2))
}

fn validate(cfg: &ControllerConfig) -> Result<()> {
    let q = &cfg.q;
    QRegion::new(q.alpha2, q.beta2)?;
    if !(cfg.lambda.is_finite() && cfg.lambda > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "gain {} must be positive",
            cfg.lambda
        )));
    }
    if !(cfg.w0 >= q.beta2 && cfg.w0 <= q.alpha2) {
        return Err(Error::InvalidConfig(format!(
            "w0 = {} outside [{}, {}]",
            cfg.w0, q.beta2, q.alpha2
        )));
    }
    if !cfg.gamma_d.is_finite() {
        return Err(Error::InvalidConfig("target remnant is not finite".into()));
    }
    if !(cfg.tau.is_finite() && cfg.tau > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "pulse period {} must be positive",
            cfg.tau
        )));
    }
    if !(cfg.sample_step.is_finite() && cfg.sample_step > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "sample step {} must be positive",
            cfg.sample_step
        )));
    }
    if cfg.max_pulses == 0 {
        return Err(Error::InvalidConfig("max_pulses must be at least 1".into()));
    }
    if let Some(t) = cfg.tolerance {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance {t} must be nonnegative")));
        }
    }
    Ok(())
}

/// Runs the update `w_{k+1} = clamp(w_k -+ lambda * e_k)` until `|e_k|` is
/// within tolerance or `max_pulses` pulses were applied.
///
/// Pulse `k` is applied to the interface left by pulse `k - 1` (pulse 0 to
/// `iface0`) and its remnant defines `e_k`. Every pulse is replayed sample by
/// sample through the interface.
pub fn run_controller(
    mu: &WeightingField,
    iface0: &MemoryInterface,
    cfg: &ControllerConfig,
) -> Result<ControlTrace> {
    validate(cfg)?;
    check_admissible(iface0, &cfg.q)?;
    // the negative mode reaches its largest remnant at beta2
    let (at_alpha2, at_beta2) = remnant_extrema(mu, iface0, &cfg.q)?;
    let (gamma_max, gamma_min) = (at_alpha2.max(at_beta2), at_alpha2.min(at_beta2));
    if cfg.gamma_d > gamma_max || cfg.gamma_d < gamma_min {
        return Err(Error::InvalidConfig(format!(
            "target {} outside the reachable remnants [{gamma_min}, {gamma_max}]",
            cfg.gamma_d
        )));
    }
    let tolerance = cfg
        .tolerance
        .unwrap_or(DEFAULT_RELATIVE_TOLERANCE * (gamma_max - gamma_min));
    let n_half = half_period_samples(cfg.tau, cfg.sample_step);
    let dt = cfg.tau / (2 * n_half) as f64;
    let sign = cfg.mode.update_sign();

    let mut records = Vec::new();
    let mut signal = Vec::new();
    let mut iface = iface0.clone();
    let mut w = cfg.w0;
    let mut clamped = false;
    if cfg.record_signal {
        signal.push(SignalRecord {
            t: 0.0,
            u: 0.0,
            y: evaluate_output(mu, iface0)?,
        });
    }
    let status = loop {
        let k = records.len();
        let mut failure = None;
        iface = drive_pulse(&iface, w, n_half, |j, u, cur| {
            if cfg.record_signal && failure.is_none() {
                match evaluate_output(mu, cur) {
                    Ok(y) => signal.push(SignalRecord {
                        t: k as f64 * cfg.tau + j as f64 * dt,
                        u,
                        y,
                    }),
                    Err(e) => failure = Some(e),
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        let gamma = evaluate_output(mu, &iface)?;
        let error = gamma - cfg.gamma_d;
        records.push(PulseRecord {
            k,
            w,
            gamma,
            error,
            clamped,
        });
        if error.abs() <= tolerance {
            break ControlStatus::Converged;
        }
        if records.len() >= cfg.max_pulses {
            break ControlStatus::MaxPulses;
        }
        let raw = w - sign * cfg.lambda * error;
        w = raw.clamp(cfg.q.beta2, cfg.q.alpha2);
        clamped = w != raw;
    };
    Ok(ControlTrace {
        records,
        signal,
        status,
        gamma_max,
        gamma_min,
        tolerance,
        final_interface: iface,
    })
}
