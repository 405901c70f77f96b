//! Sums of axis-aligned Gaussian lobes truncated to a support box.
//!
//! Rectangle integrals are evaluated in closed form through `erf`. Integrals
//! whose upper `beta` limit follows the diagonal use composite 8-point
//! Gauss-Legendre quadrature in `alpha`, on panels no wider than a quarter of
//! the narrowest lobe width, with the inner `beta` integral still in closed
//! form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::{PlanePoint, SupportBox};

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];
const MAX_PANELS: usize = 20_000;

/// One signed lobe `amplitude * exp(-(da/wa)^2 / 2 - (db/wb)^2 / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    pub amplitude: f64,
    pub alpha_center: f64,
    pub beta_center: f64,
    pub alpha_width: f64,
    pub beta_width: f64,
}

impl GaussianComponent {
    pub fn eval(&self, alpha: f64, beta: f64) -> f64 {
        let da = (alpha - self.alpha_center) / self.alpha_width;
        let db = (beta - self.beta_center) / self.beta_width;
        self.amplitude * (-0.5 * (da * da + db * db)).exp()
    }

    fn alpha_profile(&self, alpha: f64) -> f64 {
        let da = (alpha - self.alpha_center) / self.alpha_width;
        (-0.5 * da * da).exp()
    }

    fn alpha_segment(&self, x0: f64, x1: f64) -> f64 {
        segment(self.alpha_center, self.alpha_width, x0, x1)
    }

    fn beta_segment(&self, y0: f64, y1: f64) -> f64 {
        segment(self.beta_center, self.beta_width, y0, y1)
    }
}

/// `erf(x1) - erf(x0)` without cancellation in the tails.
fn erf_diff(x0: f64, x1: f64) -> f64 {
    if x0 >= 0.0 {
        libm::erfc(x0) - libm::erfc(x1)
    } else if x1 <= 0.0 {
        libm::erfc(-x1) - libm::erfc(-x0)
    } else {
        libm::erf(x1) - libm::erf(x0)
    }
}

/// `int_{x0}^{x1} exp(-((x - c) / s)^2 / 2) dx`.
fn segment(c: f64, s: f64, x0: f64, x1: f64) -> f64 {
    if x1 <= x0 {
        return 0.0;
    }
    let k = std::f64::consts::SQRT_2 * s;
    s * (std::f64::consts::PI / 2.0).sqrt() * erf_diff((x0 - c) / k, (x1 - c) / k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    support_box: SupportBox,
    components: Vec<GaussianComponent>,
}

impl GaussianMixture {
    pub fn new(support_box: SupportBox, components: Vec<GaussianComponent>) -> Result<Self> {
        for (k, c) in components.iter().enumerate() {
            let finite = [
                c.amplitude,
                c.alpha_center,
                c.beta_center,
                c.alpha_width,
                c.beta_width,
            ]
            .iter()
            .all(|v| v.is_finite());
            if !finite || c.alpha_width <= 0.0 || c.beta_width <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "gaussian component {k} needs finite parameters and positive widths"
                )));
            }
        }
        Ok(Self {
            support_box,
            components,
        })
    }

    pub fn support_box(&self) -> SupportBox {
        self.support_box
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn eval(&self, p: PlanePoint) -> f64 {
        if !self.support_box.contains(p) || p.alpha < p.beta {
            return 0.0;
        }
        self.components.iter().map(|c| c.eval(p.alpha, p.beta)).sum()
    }

    pub fn strip_mass(&self, a0: f64, a1: f64, h: f64) -> f64 {
        let b = &self.support_box;
        let x0 = a0.max(b.alpha_lo);
        let x1 = a1.min(b.alpha_hi);
        let top = h.min(b.beta_hi);
        if x1 <= x0 || top <= b.beta_lo {
            return 0.0;
        }
        self.components
            .iter()
            .map(|c| c.amplitude * c.alpha_segment(x0, x1) * c.beta_segment(b.beta_lo, top))
            .sum()
    }

    pub fn diagonal_mass(&self, a0: f64, a1: f64) -> f64 {
        self.diagonal_mass_by(a0, a1, |c| c.amplitude)
    }

    /// Sum of the component masses with absolute amplitudes; an upper bound
    /// on the integral of `|mu|`, exact when the lobes share one sign.
    pub fn abs_mass(&self) -> f64 {
        self.diagonal_mass_by(f64::NEG_INFINITY, f64::INFINITY, |c| c.amplitude.abs())
    }

    fn diagonal_mass_by(&self, a0: f64, a1: f64, amp: impl Fn(&GaussianComponent) -> f64) -> f64 {
        let b = &self.support_box;
        let x0 = a0.max(b.alpha_lo).max(b.beta_lo);
        let x1 = a1.min(b.alpha_hi);
        if x1 <= x0 {
            return 0.0;
        }
        // beyond beta_hi the upper limit is constant
        let split = x1.min(b.beta_hi).max(x0);
        let mut total: f64 = self
            .components
            .iter()
            .map(|c| amp(c) * c.alpha_segment(split, x1) * c.beta_segment(b.beta_lo, b.beta_hi))
            .sum();
        if split > x0 {
            let narrowest = self
                .components
                .iter()
                .map(|c| c.alpha_width.min(c.beta_width))
                .fold(f64::INFINITY, f64::min);
            if narrowest.is_finite() {
                let panels = (((split - x0) / (0.25 * narrowest)).ceil() as usize).clamp(1, MAX_PANELS);
                let width = (split - x0) / panels as f64;
                let f = |a: f64| -> f64 {
                    self.components
                        .iter()
                        .map(|c| amp(c) * c.alpha_profile(a) * c.beta_segment(b.beta_lo, a))
                        .sum()
                };
                for p in 0..panels {
                    let mid = x0 + (p as f64 + 0.5) * width;
                    let half = 0.5 * width;
                    let mut acc = 0.0;
                    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
                        acc += w * (f(mid - half * x) + f(mid + half * x));
                    }
                    total += half * acc;
                }
            }
        }
        total
    }

    /// `int_{b1}^{0} mu(alpha, beta) d beta`.
    fn column_integral(&self, alpha: f64, b1: f64) -> f64 {
        let b = &self.support_box;
        let y0 = b1.max(b.beta_lo);
        let y1 = b.beta_hi.min(0.0);
        if alpha < b.alpha_lo || alpha > b.alpha_hi || y1 <= y0 {
            return 0.0;
        }
        self.components
            .iter()
            .map(|c| c.amplitude * c.alpha_profile(alpha) * c.beta_segment(y0, y1))
            .sum()
    }

    /// `int_{0}^{a1} mu(alpha, beta) d alpha`.
    fn row_integral(&self, a1: f64, beta: f64) -> f64 {
        let b = &self.support_box;
        let x0 = b.alpha_lo.max(0.0);
        let x1 = a1.min(b.alpha_hi);
        if beta < b.beta_lo || beta > b.beta_hi || x1 <= x0 {
            return 0.0;
        }
        self.components
            .iter()
            .map(|c| {
                let db = (beta - c.beta_center) / c.beta_width;
                c.amplitude * (-0.5 * db * db).exp() * c.alpha_segment(x0, x1)
            })
            .sum()
    }

    pub(crate) fn column_integral_extremes(&self, region: &SupportBox, resolution: usize) -> (f64, f64) {
        scan_extremes(region, resolution, |a, b| self.column_integral(a, b))
    }

    pub(crate) fn row_integral_extremes(&self, region: &SupportBox, resolution: usize) -> (f64, f64) {
        scan_extremes(region, resolution, |a, b| self.row_integral(a, b))
    }
}

/// Min and max of `f` over a `resolution x resolution` lattice spanning
/// `region` edge to edge. Always includes 0.
fn scan_extremes(region: &SupportBox, resolution: usize, f: impl Fn(f64, f64) -> f64) -> (f64, f64) {
    let n = resolution.max(2);
    let (mut lo, mut hi) = (0.0_f64, 0.0_f64);
    for i in 0..n {
        let a = region.alpha_lo + region.width() * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let b = region.beta_lo + region.height() * j as f64 / (n - 1) as f64;
            let v = f(a, b);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lobe(amplitude: f64, a: f64, b: f64, wa: f64, wb: f64) -> GaussianComponent {
        GaussianComponent {
            amplitude,
            alpha_center: a,
            beta_center: b,
            alpha_width: wa,
            beta_width: wb,
        }
    }

    #[test]
    fn peak_value() {
        let bx = SupportBox::new(-5.0, 5.0, -5.0, 5.0).unwrap();
        let m = GaussianMixture::new(bx, vec![lobe(1.0, 1.0, -1.0, 0.5, 0.7)]).unwrap();
        assert_eq!(m.eval(PlanePoint::new(1.0, -1.0)), 1.0);
        assert_eq!(m.eval(PlanePoint::new(6.0, -1.0)), 0.0);
        // above the diagonal
        assert_eq!(m.eval(PlanePoint::new(-1.0, 1.0)), 0.0);
    }

    #[test]
    fn segment_matches_full_gaussian() {
        let full = segment(0.3, 0.2, -50.0, 50.0);
        assert!((full - 0.2 * (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-14);
        let tail = segment(0.0, 1.0, 8.0, 9.0);
        assert!(tail > 0.0 && tail < 1e-14);
    }

    #[test]
    fn diagonal_mass_matches_brute_force_midpoint() {
        // lobe centered on the diagonal so the triangular clip matters
        let bx = SupportBox::new(-3.0, 3.0, -3.0, 3.0).unwrap();
        let m = GaussianMixture::new(
            bx,
            vec![lobe(2.0, 0.2, 0.1, 0.6, 0.9), lobe(-0.5, 1.0, -1.5, 0.4, 0.3)],
        )
        .unwrap();
        let n = 1500;
        let h = 6.0 / n as f64;
        let mut brute = 0.0;
        for i in 0..n {
            let a = -3.0 + (i as f64 + 0.5) * h;
            for j in 0..n {
                let b = -3.0 + (j as f64 + 0.5) * h;
                brute += m.eval(PlanePoint::new(a, b)) * h * h;
            }
        }
        let exact = m.diagonal_mass(f64::NEG_INFINITY, f64::INFINITY);
        // the midpoint rule is first order along the diagonal cut
        assert!((exact - brute).abs() < 5e-3, "{exact} vs {brute}");
    }

    #[test]
    fn strip_mass_is_separable_closed_form() {
        let bx = SupportBox::new(0.0, 1.0, -1.0, 0.0).unwrap();
        let c = lobe(1.0, 0.5, -0.5, 0.2, 0.3);
        let m = GaussianMixture::new(bx, vec![c]).unwrap();
        let expect = segment(0.5, 0.2, 0.1, 0.4) * segment(-0.5, 0.3, -1.0, -0.2);
        assert!((m.strip_mass(0.1, 0.4, -0.2) - expect).abs() < 1e-16);
    }
}
