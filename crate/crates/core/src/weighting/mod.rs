//! Weighting fields and integration over the regions cut by an interface.

mod analytic;
pub mod bounds;
pub mod butterfly;
mod grid;

pub use analytic::{GaussianComponent, GaussianMixture};
pub use grid::GridField;

use crate::error::{Error, Result};
use crate::interface::MemoryInterface;
use crate::plane::{PlanePoint, SupportBox};

/// Signed weighting density, zero outside its support box and above the
/// diagonal.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightingField {
    Grid(GridField),
    Analytic(GaussianMixture),
}

impl From<GridField> for WeightingField {
    fn from(g: GridField) -> Self {
        Self::Grid(g)
    }
}

impl From<GaussianMixture> for WeightingField {
    fn from(m: GaussianMixture) -> Self {
        Self::Analytic(m)
    }
}

impl WeightingField {
    /// Constant density over the whole box.
    pub fn uniform(support_box: SupportBox, value: f64) -> Result<Self> {
        GridField::uniform(support_box, value).map(Self::Grid)
    }

    pub fn gaussians(support_box: SupportBox, components: Vec<GaussianComponent>) -> Result<Self> {
        GaussianMixture::new(support_box, components).map(Self::Analytic)
    }

    pub fn support_box(&self) -> SupportBox {
        match self {
            Self::Grid(g) => g.support_box(),
            Self::Analytic(m) => m.support_box(),
        }
    }

    pub fn eval_mu(&self, p: PlanePoint) -> f64 {
        match self {
            Self::Grid(g) => g.eval(p),
            Self::Analytic(m) => m.eval(p),
        }
    }

    /// Mass of `{a0 <= alpha <= a1, beta <= h}`. Callers keep `h` at or
    /// below the diagonal on the strip.
    pub fn strip_mass(&self, a0: f64, a1: f64, h: f64) -> f64 {
        match self {
            Self::Grid(g) => g.strip_mass(a0, a1, h),
            Self::Analytic(m) => m.strip_mass(a0, a1, h),
        }
    }

    /// Mass of `{a0 <= alpha <= a1, beta <= alpha}`.
    pub fn diagonal_mass(&self, a0: f64, a1: f64) -> f64 {
        match self {
            Self::Grid(g) => g.diagonal_mass(a0, a1),
            Self::Analytic(m) => m.diagonal_mass(a0, a1),
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.diagonal_mass(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Integral of `|mu|` for grids; for Gaussian mixtures the sum of the
    /// absolute component masses, which bounds it from above.
    pub fn abs_mass(&self) -> f64 {
        match self {
            Self::Grid(g) => g.abs_mass(),
            Self::Analytic(m) => m.abs_mass(),
        }
    }

    /// Mass of the rectangle `[a0, a1] x [b0, b1]`, assumed below the diagonal.
    pub fn rect_mass(&self, a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
        if a1 <= a0 || b1 <= b0 {
            return 0.0;
        }
        self.strip_mass(a0, a1, b1) - self.strip_mass(a0, a1, b0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Relays in the `+1` state.
    Below,
    /// Relays in the `-1` state.
    Above,
}

fn check_support(mu: &WeightingField, iface: &MemoryInterface) -> Result<()> {
    if iface.support_box().contains_box(&mu.support_box()) {
        Ok(())
    } else {
        Err(Error::SupportMismatch)
    }
}

/// Mass below the staircase, walking corner to corner.
fn mass_below(mu: &WeightingField, iface: &MemoryInterface) -> f64 {
    let c = iface.corners();
    let mut total = mu.diagonal_mass(f64::NEG_INFINITY, c[0].alpha);
    for w in c.windows(2) {
        if w[1].alpha > w[0].alpha {
            total += mu.strip_mass(w[0].alpha, w[1].alpha, w[1].beta);
        }
    }
    total
}

/// Integral of `mu` over the relays on one side of the interface.
pub fn integrate_staircase_region(mu: &WeightingField, iface: &MemoryInterface, side: Side) -> Result<f64> {
    check_support(mu, iface)?;
    let below = mass_below(mu, iface);
    Ok(match side {
        Side::Below => below,
        Side::Above => mu.total_mass() - below,
    })
}

/// Operator output: mass below minus mass above the interface.
pub fn evaluate_output(mu: &WeightingField, iface: &MemoryInterface) -> Result<f64> {
    check_support(mu, iface)?;
    Ok(2.0 * mass_below(mu, iface) - mu.total_mass())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_q() -> (SupportBox, WeightingField) {
        let bx = SupportBox::new(0.0, 1.0, -1.0, 0.0).unwrap();
        (bx, WeightingField::uniform(bx, 1.0).unwrap())
    }

    #[test]
    fn eval_mu_examples() {
        let (_, mu) = unit_q();
        assert_eq!(mu.eval_mu(PlanePoint::new(0.5, -0.5)), 1.0);
        assert_eq!(mu.eval_mu(PlanePoint::new(2.0, -0.5)), 0.0);
        let bx = SupportBox::new(-2.0, 2.0, -2.0, 2.0).unwrap();
        let g = WeightingField::gaussians(
            bx,
            vec![GaussianComponent {
                amplitude: 1.0,
                alpha_center: 0.5,
                beta_center: -0.5,
                alpha_width: 0.3,
                beta_width: 0.3,
            }],
        )
        .unwrap();
        assert_eq!(g.eval_mu(PlanePoint::new(0.5, -0.5)), 1.0);
    }

    #[test]
    fn output_examples_on_unit_square() {
        let (bx, mu) = unit_q();
        let virgin = MemoryInterface::virgin(bx);
        assert_eq!(evaluate_output(&mu, &virgin).unwrap(), -1.0);
        let full = virgin.push_extremum(1.0).push_extremum(0.0);
        assert_eq!(evaluate_output(&mu, &full).unwrap(), 1.0);
        let half = virgin.push_extremum(0.5).push_extremum(0.0);
        assert_eq!(evaluate_output(&mu, &half).unwrap(), 0.0);
    }

    #[test]
    fn region_examples() {
        let (bx, mu) = unit_q();
        let virgin = MemoryInterface::virgin(bx);
        assert_eq!(
            integrate_staircase_region(&mu, &virgin, Side::Above).unwrap(),
            1.0
        );
        assert_eq!(
            integrate_staircase_region(&mu, &virgin, Side::Below).unwrap(),
            0.0
        );
        let half = virgin.push_extremum(0.5).push_extremum(0.0);
        assert_eq!(integrate_staircase_region(&mu, &half, Side::Below).unwrap(), 0.5);
    }

    #[test]
    fn support_mismatch() {
        let (_, mu) = unit_q();
        let small = SupportBox::new(0.0, 0.5, -1.0, 0.0).unwrap();
        let iface = MemoryInterface::virgin(small);
        assert!(matches!(
            evaluate_output(&mu, &iface),
            Err(Error::SupportMismatch)
        ));
    }

    #[test]
    fn triangle_below_diagonal_counts() {
        // box straddling the diagonal: positive saturation gives the full mass
        let bx = SupportBox::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let mu = WeightingField::uniform(bx, 1.0).unwrap();
        assert!((mu.total_mass() - 2.0).abs() < 1e-15);
        let pos = MemoryInterface::positive_saturation(bx);
        assert!((evaluate_output(&mu, &pos).unwrap() - 2.0).abs() < 1e-15);
        let neg = MemoryInterface::negative_saturation(bx);
        assert!((evaluate_output(&mu, &neg).unwrap() + 2.0).abs() < 1e-15);
    }
}
