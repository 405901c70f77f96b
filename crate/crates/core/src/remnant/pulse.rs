//! Triangular pulse trains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interface::MemoryInterface;

/// Unit triangular pulse number `k` of period `tau`, evaluated at `t`.
pub fn pulse_value(k: u64, t: f64, tau: f64) -> f64 {
    let s = t - k as f64 * tau;
    if !(0.0..=tau).contains(&s) {
        return 0.0;
    }
    let half = 0.5 * tau;
    if s <= half {
        s / half
    } else {
        (tau - s) / half
    }
}

/// Unit triangle at sample `j` of `2 * n_half` per period. Sample `n_half`
/// is exactly 1 and samples 0 and `2 * n_half` are exactly 0.
pub fn triangle_sample(j: usize, n_half: usize) -> f64 {
    let n = n_half.max(1);
    if j <= n {
        j as f64 / n as f64
    } else {
        (2 * n).saturating_sub(j) as f64 / n as f64
    }
}

/// Samples per half period for a step of `sample_step` time units.
pub fn half_period_samples(tau: f64, sample_step: f64) -> usize {
    let n = (0.5 * tau / sample_step).round();
    if n.is_finite() && n >= 1.0 {
        n as usize
    } else {
        1
    }
}

/// Replays the samples of one pulse of amplitude `w` through the interface,
/// calling `each(j, u, iface)` after every sample `j = 1..=2 * n_half`.
pub fn drive_pulse(
    iface: &MemoryInterface,
    w: f64,
    n_half: usize,
    mut each: impl FnMut(usize, f64, &MemoryInterface),
) -> MemoryInterface {
    let mut cur = iface.clone();
    for j in 1..=2 * n_half.max(1) {
        let u = w * triangle_sample(j, n_half);
        cur = cur.push_extremum(u);
        each(j, u, &cur);
    }
    cur
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulsePlan {
    pub tau: f64,
    pub amplitudes: Vec<f64>,
}

impl PulsePlan {
    pub fn new(tau: f64, amplitudes: Vec<f64>) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "pulse period {tau} must be positive"
            )));
        }
        if let Some(w) = amplitudes.iter().find(|w| !w.is_finite()) {
            return Err(Error::InvalidConfig(format!("non-finite amplitude {w}")));
        }
        Ok(Self { tau, amplitudes })
    }

    pub fn horizon(&self) -> f64 {
        self.tau * self.amplitudes.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSample {
    pub t: f64,
    pub u: f64,
}

/// Samples of the pulse train, `2 * n_half + 1` per pulse with the shared
/// boundary samples emitted once. Boundary samples are exactly zero.
pub fn render_signal(plan: &PulsePlan, sample_step: f64) -> Vec<SignalSample> {
    let n_half = half_period_samples(plan.tau, sample_step);
    let dt = plan.tau / (2 * n_half) as f64;
    let mut out = Vec::with_capacity(plan.amplitudes.len() * 2 * n_half + 1);
    if plan.amplitudes.is_empty() {
        out.push(SignalSample { t: 0.0, u: 0.0 });
    }
    for (k, &w) in plan.amplitudes.iter().enumerate() {
        let start = if k == 0 { 0 } else { 1 };
        for j in start..=2 * n_half {
            out.push(SignalSample {
                t: k as f64 * plan.tau + j as f64 * dt,
                u: w * triangle_sample(j, n_half),
            });
        }
    }
    out
}
