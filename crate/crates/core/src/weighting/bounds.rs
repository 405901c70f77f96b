//! Sector bounds on the remnant response and the sign-definite box `Q`.

use serde::{Deserialize, Serialize};

use super::WeightingField;
use crate::error::{Error, Result};
use crate::plane::{PlanePoint, SupportBox};

/// Default number of scan lines per axis for analytic fields.
pub const DEFAULT_RESOLUTION: usize = 512;

/// The box `[0, alpha2] x [beta2, 0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QRegion {
    pub alpha2: f64,
    pub beta2: f64,
}

impl QRegion {
    pub fn new(alpha2: f64, beta2: f64) -> Result<Self> {
        if !(alpha2.is_finite() && alpha2 > 0.0) {
            return Err(Error::InvalidQRegion(format!(
                "alpha2 = {alpha2} must be positive"
            )));
        }
        if !(beta2.is_finite() && beta2 < 0.0) {
            return Err(Error::InvalidQRegion(format!("beta2 = {beta2} must be negative")));
        }
        Ok(Self { alpha2, beta2 })
    }

    pub fn as_box(&self) -> SupportBox {
        SupportBox {
            alpha_lo: 0.0,
            alpha_hi: self.alpha2,
            beta_lo: self.beta2,
            beta_hi: 0.0,
        }
    }

    pub fn contains(&self, p: PlanePoint) -> bool {
        self.as_box().contains(p)
    }

    /// `Q` clipped to the support of `mu`, if that has positive area.
    pub fn clipped_to(&self, mu: &WeightingField) -> Option<SupportBox> {
        let b = mu.support_box();
        let a0 = b.alpha_lo.max(0.0);
        let a1 = b.alpha_hi.min(self.alpha2);
        let b0 = b.beta_lo.max(self.beta2);
        let b1 = b.beta_hi.min(0.0);
        (a0 < a1 && b0 < b1).then_some(SupportBox {
            alpha_lo: a0,
            alpha_hi: a1,
            beta_lo: b0,
            beta_hi: b1,
        })
    }

    /// Checks that `mu` is nonnegative (or nonpositive, with `positive` set
    /// to false) on `Q`. Grids are checked cell by cell; analytic fields on a
    /// `resolution x resolution` lattice spanning `Q`.
    pub fn check_sign(&self, mu: &WeightingField, positive: bool, resolution: usize) -> Result<()> {
        let Some(region) = self.clipped_to(mu) else {
            return Err(Error::InvalidQRegion(
                "Q does not meet the weighting support".into(),
            ));
        };
        let ok = |v: f64| if positive { v >= 0.0 } else { v <= 0.0 };
        let bad = match mu {
            WeightingField::Grid(g) => g.find_cell_violating(&region, ok),
            WeightingField::Analytic(_) => {
                let n = resolution.max(2);
                let mut found = None;
                'scan: for i in 0..n {
                    let a = region.alpha_lo + region.width() * i as f64 / (n - 1) as f64;
                    for j in 0..n {
                        let b = region.beta_lo + region.height() * j as f64 / (n - 1) as f64;
                        let v = mu.eval_mu(PlanePoint::new(a, b));
                        if !ok(v) {
                            found = Some((PlanePoint::new(a, b), v));
                            break 'scan;
                        }
                    }
                }
                found
            }
        };
        match bad {
            None => Ok(()),
            Some((p, value)) => Err(Error::NegativeOnQ {
                alpha: p.alpha,
                beta: p.beta,
                value,
            }),
        }
    }
}

/// Bounds on `delta gamma / delta w` between consecutive pulses.
///
/// The unsuffixed constants range over the whole part of the support in the
/// quadrant `alpha >= 0, beta <= 0`; the `_q` constants over `Q` only.
/// For rising amplitudes `gamma1_plus <= dg/dw <= gamma2_plus`; for falling
/// amplitudes `gamma2_minus <= dg/dw <= gamma1_minus`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorBounds {
    pub gamma1_plus: f64,
    pub gamma2_plus: f64,
    pub gamma1_minus: f64,
    pub gamma2_minus: f64,
    pub gamma1_plus_q: f64,
    pub gamma2_plus_q: f64,
    pub gamma1_minus_q: f64,
    pub gamma2_minus_q: f64,
}

fn extremes(mu: &WeightingField, region: &SupportBox, resolution: usize) -> ((f64, f64), (f64, f64)) {
    match mu {
        WeightingField::Grid(g) => (
            g.column_integral_extremes(region),
            g.row_integral_extremes(region),
        ),
        WeightingField::Analytic(m) => (
            m.column_integral_extremes(region, resolution),
            m.row_integral_extremes(region, resolution),
        ),
    }
}

/// Computes all eight sector constants.
///
/// Column integrals `int_{b1}^{0} mu d beta` and row integrals
/// `int_{0}^{a1} mu d alpha` are scanned over the region. Grid fields are
/// scanned at every cell edge, which is exact; `resolution` is ignored for
/// them. Analytic fields are scanned on `resolution` lines per axis.
pub fn sector_bounds(mu: &WeightingField, q: &QRegion, resolution: usize) -> Result<SectorBounds> {
    let general = mu
        .support_box()
        .remnant_quadrant()
        .ok_or(Error::EmptyIntersection)?;
    let qbox = q
        .clipped_to(mu)
        .ok_or_else(|| Error::InvalidQRegion("Q does not meet the weighting support".into()))?;
    let ((c_lo, c_hi), (r_lo, r_hi)) = extremes(mu, &general, resolution);
    let ((cq_lo, cq_hi), (rq_lo, rq_hi)) = extremes(mu, &qbox, resolution);
    Ok(SectorBounds {
        gamma1_plus: 2.0 * c_lo,
        gamma2_plus: 2.0 * c_hi,
        gamma1_minus: 2.0 * r_hi,
        gamma2_minus: 2.0 * r_lo,
        gamma1_plus_q: 2.0 * cq_lo,
        gamma2_plus_q: 2.0 * cq_hi,
        gamma1_minus_q: 2.0 * rq_hi,
        gamma2_minus_q: 2.0 * rq_lo,
    })
}
