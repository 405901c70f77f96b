//! Synthetic butterfly weighting: one positive lobe centered in `Q` and
//! negative lobes off the remnant quadrant.

use serde::{Deserialize, Serialize};

use super::bounds::QRegion;
use super::{GaussianComponent, WeightingField};
use crate::error::{Error, Result};
use crate::plane::SupportBox;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ButterflySpec {
    pub support_box: SupportBox,
    pub positive: GaussianComponent,
    pub negatives: Vec<GaussianComponent>,
    pub q: QRegion,
    /// Lattice size per axis for the sign check on `Q`.
    pub check_resolution: usize,
}

impl Default for ButterflySpec {
    /// Input range of +-1500 with `Q = [0, 1400] x [-850, 0]`.
    ///
    /// The positive lobe is broad in `alpha` and narrower in `beta`, so the
    /// largest row integral over `Q` is about twice the largest column
    /// integral above the -800 shelf. The remnant range is close to 575.
    fn default() -> Self {
        let amplitude = 3.2e-4;
        Self {
            support_box: SupportBox {
                alpha_lo: -1500.0,
                alpha_hi: 1500.0,
                beta_lo: -1500.0,
                beta_hi: 1500.0,
            },
            positive: GaussianComponent {
                amplitude,
                alpha_center: 700.0,
                beta_center: -400.0,
                alpha_width: 1200.0,
                beta_width: 350.0,
            },
            negatives: vec![
                GaussianComponent {
                    amplitude: -4.0 * amplitude,
                    alpha_center: -900.0,
                    beta_center: -1150.0,
                    alpha_width: 150.0,
                    beta_width: 150.0,
                },
                GaussianComponent {
                    amplitude: -4.0 * amplitude,
                    alpha_center: 1150.0,
                    beta_center: 900.0,
                    alpha_width: 150.0,
                    beta_width: 150.0,
                },
            ],
            q: QRegion {
                alpha2: 1400.0,
                beta2: -850.0,
            },
            check_resolution: 100,
        }
    }
}

/// Builds the mixture and checks that it is nonnegative on `Q`.
pub fn make_butterfly(spec: &ButterflySpec) -> Result<WeightingField> {
    let q = QRegion::new(spec.q.alpha2, spec.q.beta2)?;
    let p = &spec.positive;
    if !(p.amplitude.is_finite() && p.amplitude > 0.0) {
        return Err(Error::InvalidButterfly(
            "positive lobe needs a positive amplitude".into(),
        ));
    }
    if !(p.alpha_center > 0.0 && p.alpha_center < q.alpha2 && p.beta_center > q.beta2 && p.beta_center < 0.0)
    {
        return Err(Error::InvalidButterfly(format!(
            "positive lobe center ({}, {}) is not inside Q",
            p.alpha_center, p.beta_center
        )));
    }
    for (k, n) in spec.negatives.iter().enumerate() {
        if !(n.amplitude.is_finite() && n.amplitude < 0.0) {
            return Err(Error::InvalidButterfly(format!(
                "negative lobe {k} has amplitude {}",
                n.amplitude
            )));
        }
        if !(n.alpha_center < 0.0 || n.beta_center > 0.0) {
            return Err(Error::InvalidButterfly(format!(
                "negative lobe {k} center ({}, {}) lies in the remnant quadrant",
                n.alpha_center, n.beta_center
            )));
        }
    }
    let mut components = vec![*p];
    components.extend(spec.negatives.iter().copied());
    let mu = WeightingField::gaussians(spec.support_box, components)?;
    q.check_sign(&mu, true, spec.check_resolution)
        .map_err(|e| Error::InvalidButterfly(format!("negative lobes intrude into Q: {e}")))?;
    Ok(mu)
}
