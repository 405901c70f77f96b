use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A relay threshold pair. `alpha` is the switch-up threshold and `beta` the
/// switch-down threshold; relays live on the half-plane `alpha >= beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub alpha: f64,
    pub beta: f64,
}

impl PlanePoint {
    pub const fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    /// Checked constructor: finite coordinates with `alpha >= beta`.
    pub fn in_plane(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidPoint {
                alpha,
                beta,
                reason: "non-finite coordinate",
            });
        }
        if alpha < beta {
            return Err(Error::InvalidPoint {
                alpha,
                beta,
                reason: "alpha < beta",
            });
        }
        Ok(Self { alpha, beta })
    }

    pub fn is_in_plane(&self) -> bool {
        self.alpha >= self.beta
    }
}

/// State of a single relay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelaySign {
    Plus,
    Minus,
}

impl RelaySign {
    pub fn value(self) -> f64 {
        match self {
            RelaySign::Plus => 1.0,
            RelaySign::Minus => -1.0,
        }
    }
}

/// Axis-aligned rectangle `[alpha_lo, alpha_hi] x [beta_lo, beta_hi]` that
/// contains all nonzero weighting mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportBox {
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub beta_lo: f64,
    pub beta_hi: f64,
}

impl SupportBox {
    pub fn new(alpha_lo: f64, alpha_hi: f64, beta_lo: f64, beta_hi: f64) -> Result<Self> {
        let all = [alpha_lo, alpha_hi, beta_lo, beta_hi];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBox("non-finite bound".into()));
        }
        if alpha_lo >= alpha_hi || beta_lo >= beta_hi {
            return Err(Error::InvalidBox(format!(
                "empty box [{alpha_lo}, {alpha_hi}] x [{beta_lo}, {beta_hi}]"
            )));
        }
        Ok(Self {
            alpha_lo,
            alpha_hi,
            beta_lo,
            beta_hi,
        })
    }

    pub fn contains(&self, p: PlanePoint) -> bool {
        p.alpha >= self.alpha_lo
            && p.alpha <= self.alpha_hi
            && p.beta >= self.beta_lo
            && p.beta <= self.beta_hi
    }

    pub fn contains_box(&self, other: &SupportBox) -> bool {
        self.alpha_lo <= other.alpha_lo
            && self.alpha_hi >= other.alpha_hi
            && self.beta_lo <= other.beta_lo
            && self.beta_hi >= other.beta_hi
    }

    /// Input range `[lo, hi]` inside which every relay of the box can be
    /// switched. Always contains 0. Input extrema are clamped to this range
    /// and the interface's infinite tail is cut at its edges.
    pub fn input_range(&self) -> (f64, f64) {
        let lo = self.alpha_lo.min(self.beta_lo).min(0.0);
        let hi = self.alpha_hi.max(self.beta_hi).max(0.0);
        (lo, hi)
    }

    pub fn width(&self) -> f64 {
        self.alpha_hi - self.alpha_lo
    }

    pub fn height(&self) -> f64 {
        self.beta_hi - self.beta_lo
    }

    /// Part of the box inside the quadrant `alpha >= 0, beta <= 0`, if it has
    /// positive area.
    pub fn remnant_quadrant(&self) -> Option<SupportBox> {
        let a0 = self.alpha_lo.max(0.0);
        let b1 = self.beta_hi.min(0.0);
        if a0 < self.alpha_hi && self.beta_lo < b1 {
            Some(SupportBox {
                alpha_lo: a0,
                alpha_hi: self.alpha_hi,
                beta_lo: self.beta_lo,
                beta_hi: b1,
            })
        } else {
            None
        }
    }
}
