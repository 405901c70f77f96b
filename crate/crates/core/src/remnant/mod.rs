//! Remnant of a single triangular pulse, its explicit increment, extrema,
//! admissibility of the initial interface, and gain limits.

pub mod controller;
pub mod pulse;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interface::{Ell, MemoryInterface};
use crate::weighting::bounds::{QRegion, SectorBounds};
use crate::weighting::{evaluate_output, WeightingField};

/// Sign of the weighting on `Q`, which fixes the direction of the update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GainMode {
    #[default]
    Positive,
    Negative,
}

impl GainMode {
    /// `+1` when the update subtracts `lambda * e`, `-1` when it adds it.
    pub fn update_sign(self) -> f64 {
        match self {
            Self::Positive => 1.0,
            Self::Negative => -1.0,
        }
    }
}

/// Interface after one triangular pulse of amplitude `w` starting and ending
/// at zero input.
pub fn apply_pulse(iface: &MemoryInterface, w: f64) -> MemoryInterface {
    if w == 0.0 {
        return iface.clone();
    }
    iface.push_extremum(w).push_extremum(0.0)
}

/// Output at zero input after a pulse of amplitude `w`, with the new
/// interface.
pub fn remnant(mu: &WeightingField, iface: &MemoryInterface, w: f64) -> Result<(f64, MemoryInterface)> {
    let next = apply_pulse(iface, w);
    let gamma = evaluate_output(mu, &next)?;
    Ok((gamma, next))
}

/// The amplitudes `(m, M)` between which a pulse switches no relay: the
/// lowest point of the interface on `alpha = 0` and its rightmost point on
/// `beta = 0`.
pub fn dead_zone(iface: &MemoryInterface) -> Result<(f64, f64)> {
    Ok((iface.ell(0.0, Ell::BetaMin)?, iface.ell(0.0, Ell::AlphaMax)?))
}

/// Remnant change caused by a pulse of amplitude `w_next` applied to
/// `iface_next`, computed from the switched region alone.
///
/// Above the dead zone the switched relays form the region between `alpha =
/// M` and `alpha = w_next` under `beta = 0` and above the interface; below it
/// they form the region between `beta = w_next` and `beta = m` right of
/// `alpha = 0` and left of the interface. Each piece is split at the
/// interface corners so that its far boundary is a single line.
pub fn delta_remnant_explicit(mu: &WeightingField, iface_next: &MemoryInterface, w_next: f64) -> Result<f64> {
    let (m, big_m) = dead_zone(iface_next)?;
    let corners = iface_next.corners();
    if w_next > big_m {
        let mut cuts: Vec<f64> = corners
            .iter()
            .map(|c| c.alpha)
            .filter(|&a| a > big_m && a < w_next)
            .collect();
        cuts.insert(0, big_m);
        cuts.push(w_next);
        let mut total = 0.0;
        for s in cuts.windows(2) {
            let mid = 0.5 * (s[0] + s[1]);
            let floor = iface_next.ell(mid, Ell::BetaMax).unwrap_or(f64::NEG_INFINITY);
            total += mu.strip_mass(s[0], s[1], 0.0) - mu.strip_mass(s[0], s[1], floor);
        }
        Ok(2.0 * total)
    } else if w_next < m {
        let mut cuts: Vec<f64> = corners
            .iter()
            .map(|c| c.beta)
            .filter(|&b| b > w_next && b < m)
            .collect();
        cuts.insert(0, w_next);
        cuts.push(m);
        cuts.sort_by(f64::total_cmp);
        let mut total = 0.0;
        for s in cuts.windows(2) {
            let mid = 0.5 * (s[0] + s[1]);
            let right = iface_next.ell(mid, Ell::AlphaMin).unwrap_or(f64::INFINITY);
            total += mu.rect_mass(0.0, right, s[0], s[1]);
        }
        Ok(-2.0 * total)
    } else {
        Ok(0.0)
    }
}

/// Whether the interface stays clear of the two strips beside `Q`:
/// `{alpha > alpha2, beta2 < beta <= 0}` and `{beta < beta2, 0 <= alpha <
/// alpha2}`. Only the part of the curve inside the input range of the
/// support box is considered, since the weighting vanishes beyond it.
pub fn validate_initial_interface(iface: &MemoryInterface, q: &QRegion) -> bool {
    let (a2, b2) = (q.alpha2, q.beta2);
    iface.segments().all(|(p, r)| {
        // p is the end nearer the diagonal
        let (a_lo, a_hi) = (p.alpha, r.alpha);
        let (b_lo, b_hi) = (r.beta, p.beta);
        let hits_right = a_hi > a2 && b_hi > b2 && b_lo <= 0.0;
        let hits_below = b_lo < b2 && a_lo < a2 && a_hi >= 0.0;
        !(hits_right || hits_below)
    })
}

/// Makes an initial interface admissible for `q` by pulsing to `alpha2` or
/// `beta2`. A single pulse is not always enough: a pulse to `alpha2` leaves
/// the curve beyond `alpha2` untouched, a pulse to `beta2` the curve below
/// `beta2`. When neither single pulse works, both are applied.
pub fn repair_initial_interface(iface: &MemoryInterface, q: &QRegion) -> MemoryInterface {
    if iface.contains_origin() && validate_initial_interface(iface, q) {
        return iface.clone();
    }
    for w in [q.alpha2, q.beta2] {
        let once = apply_pulse(iface, w);
        if validate_initial_interface(&once, q) {
            return once;
        }
    }
    apply_pulse(&apply_pulse(iface, q.beta2), q.alpha2)
}

/// Remnants after pulses of amplitude `alpha2` and `beta2` on copies of
/// `iface0`: the largest and smallest remnants reachable from it.
pub fn remnant_extrema(mu: &WeightingField, iface0: &MemoryInterface, q: &QRegion) -> Result<(f64, f64)> {
    check_admissible(iface0, q)?;
    let (gmax, _) = remnant(mu, iface0, q.alpha2)?;
    let (gmin, _) = remnant(mu, iface0, q.beta2)?;
    Ok((gmax, gmin))
}

pub(crate) fn check_admissible(iface0: &MemoryInterface, q: &QRegion) -> Result<()> {
    if !iface0.contains_origin() {
        return Err(Error::Inadmissible(
            "initial interface does not pass through (0, 0)".into(),
        ));
    }
    if !validate_initial_interface(iface0, q) {
        return Err(Error::Inadmissible(
            "initial interface enters the strips beside Q; apply a pulse of amplitude alpha2 or beta2 first"
                .into(),
        ));
    }
    Ok(())
}

/// Largest admissible gain: `2 / max(G2+Q, G1-Q)` for a nonnegative
/// weighting on `Q`, `2 / |min(G2-Q, G1+Q)|` for a nonpositive one.
pub fn max_gain(bounds: &SectorBounds, mode: GainMode) -> Result<f64> {
    let divisor = match mode {
        GainMode::Positive => bounds.gamma2_plus_q.max(bounds.gamma1_minus_q),
        GainMode::Negative => bounds.gamma2_minus_q.min(bounds.gamma1_plus_q).abs(),
    };
    if divisor > 0.0 && divisor.is_finite() {
        Ok(2.0 / divisor)
    } else {
        Err(Error::DegenerateBounds)
    }
}
