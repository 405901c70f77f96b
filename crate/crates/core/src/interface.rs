//! Staircase memory interface.
//!
//! The interface is stored as its corner list, ordered from the diagonal
//! outward. Consecutive corners share exactly one coordinate, so segments
//! alternate between horizontal (constant `beta`, increasing `alpha`) and
//! vertical (constant `alpha`, decreasing `beta`). The infinite tail of the
//! curve is cut where it leaves the input range of the support box: the last
//! corner always sits on the floor (`beta == lo`) or on the right wall
//! (`alpha == hi`), which also fixes the direction of the tail.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::plane::{PlanePoint, RelaySign, SupportBox};

/// Absolute tolerance below which corner coordinates are merged.
pub const MERGE_TOL: f64 = 1e-12;

/// Selector for the four line/interface intersection queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ell {
    /// Largest `beta` on the vertical line `alpha = value`.
    BetaMax,
    /// Smallest `beta` on the vertical line `alpha = value`.
    BetaMin,
    /// Largest `alpha` on the horizontal line `beta = value`.
    AlphaMax,
    /// Smallest `alpha` on the horizontal line `beta = value`.
    AlphaMin,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MemoryInterface {
    corners: Vec<PlanePoint>,
    #[serde(skip)]
    support_box: SupportBox,
}

impl MemoryInterface {
    /// Input at zero after negative saturation: every relay with `alpha > 0`
    /// is `-1`, every relay with `alpha < 0` is `+1`.
    pub fn virgin(support_box: SupportBox) -> Self {
        let corners = canonicalize(vec![PlanePoint::new(0.0, 0.0)], &support_box, true);
        Self { corners, support_box }
    }

    /// Every relay of the box in the `-1` state.
    pub fn negative_saturation(support_box: SupportBox) -> Self {
        let (lo, _) = support_box.input_range();
        Self {
            corners: vec![PlanePoint::new(lo, lo)],
            support_box,
        }
    }

    /// Every relay of the box in the `+1` state.
    pub fn positive_saturation(support_box: SupportBox) -> Self {
        let (_, hi) = support_box.input_range();
        Self {
            corners: vec![PlanePoint::new(hi, hi)],
            support_box,
        }
    }

    /// Negative saturation followed by monotone sweeps to each value in turn.
    pub fn from_extrema(extrema: &[f64], support_box: SupportBox) -> Result<Self> {
        if let Some(v) = extrema.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInterface(format!("non-finite extremum {v}")));
        }
        Ok(extrema
            .iter()
            .fold(Self::negative_saturation(support_box), |iface, &v| {
                iface.push_extremum(v)
            }))
    }

    /// Builds an interface from an explicit corner list.
    ///
    /// The list must start on the diagonal and move outward along axis-aligned
    /// segments (`alpha` nondecreasing, `beta` nonincreasing). Collinear and
    /// near-duplicate corners are merged, and a missing tail corner is added.
    /// A single diagonal corner gets a vertical tail.
    pub fn from_corners(corners: Vec<PlanePoint>, support_box: SupportBox) -> Result<Self> {
        let (lo, hi) = support_box.input_range();
        let Some(first) = corners.first() else {
            return Err(Error::InvalidInterface("no corners".into()));
        };
        if (first.alpha - first.beta).abs() > MERGE_TOL {
            return Err(Error::InvalidInterface(format!(
                "first corner ({}, {}) is not on the diagonal",
                first.alpha, first.beta
            )));
        }
        for (i, c) in corners.iter().enumerate() {
            if !c.alpha.is_finite() || !c.beta.is_finite() {
                return Err(Error::InvalidInterface(format!("corner {i} is not finite")));
            }
            let inside = |x: f64| x >= lo - MERGE_TOL && x <= hi + MERGE_TOL;
            if !inside(c.alpha) || !inside(c.beta) {
                return Err(Error::InvalidInterface(format!(
                    "corner {i} ({}, {}) outside input range [{lo}, {hi}]",
                    c.alpha, c.beta
                )));
            }
        }
        for (i, w) in corners.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            if b.alpha < a.alpha - MERGE_TOL || b.beta > a.beta + MERGE_TOL {
                return Err(Error::InvalidInterface(format!(
                    "corner {} is not outward of corner {i}",
                    i + 1
                )));
            }
            let shares_axis = (b.alpha - a.alpha).abs() <= MERGE_TOL || (b.beta - a.beta).abs() <= MERGE_TOL;
            if !shares_axis {
                return Err(Error::InvalidInterface(format!(
                    "segment {i} is not axis-aligned"
                )));
            }
        }
        let mut pts: Vec<PlanePoint> = corners
            .into_iter()
            .map(|c| PlanePoint::new(c.alpha.clamp(lo, hi), c.beta.clamp(lo, hi)))
            .collect();
        pts[0].beta = pts[0].alpha;
        Ok(Self {
            corners: canonicalize(pts, &support_box, true),
            support_box,
        })
    }

    /// Parses a JSON array of `{"alpha": .., "beta": ..}` corner objects.
    pub fn from_json(text: &str, support_box: SupportBox) -> Result<Self> {
        let corners: Vec<PlanePoint> = serde_json::from_str(text)?;
        Self::from_corners(corners, support_box)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.corners).expect("corner list serializes")
    }

    pub fn corners(&self) -> &[PlanePoint] {
        &self.corners
    }

    pub fn support_box(&self) -> SupportBox {
        self.support_box
    }

    /// The input value encoded by the diagonal corner.
    pub fn current_input(&self) -> f64 {
        self.corners[0].alpha
    }

    /// Whether `(0, 0)` lies on the interface, i.e. the state is reachable at
    /// a zero input.
    pub fn contains_origin(&self) -> bool {
        self.corners[0].alpha == 0.0
    }

    /// State of the relay `p` as encoded by this interface. Points on the
    /// curve itself count as below (`+1`).
    pub fn relay_state(&self, p: PlanePoint) -> RelaySign {
        let below = self
            .corners
            .iter()
            .any(|c| p.alpha <= c.alpha && p.beta <= c.beta);
        if below {
            RelaySign::Plus
        } else {
            RelaySign::Minus
        }
    }

    /// Interface after a monotone input sweep from the current input to `v`.
    ///
    /// `v` is clamped to the input range of the support box. Non-finite
    /// values other than infinities leave the interface unchanged.
    pub fn push_extremum(&self, v: f64) -> Self {
        if v.is_nan() {
            return self.clone();
        }
        let (lo, hi) = self.support_box.input_range();
        let mut v = v.clamp(lo, hi);
        let u = self.current_input();
        // reuse a stored threshold that the new extremum merely grazes
        let near = self.corners.iter().find_map(|c| {
            if (c.alpha - v).abs() <= MERGE_TOL {
                Some(c.alpha)
            } else if (c.beta - v).abs() <= MERGE_TOL {
                Some(c.beta)
            } else {
                None
            }
        });
        if let Some(x) = near {
            v = x;
        }
        if (v - u).abs() <= MERGE_TOL {
            return self.clone();
        }
        let mut pts = Vec::with_capacity(self.corners.len() + 2);
        pts.push(PlanePoint::new(v, v));
        if v > u {
            // relays with alpha < v switch up; drop down from (v, v) until the
            // old curve is met
            match self.corners.iter().position(|c| c.alpha >= v) {
                Some(i) => {
                    pts.push(PlanePoint::new(v, self.corners[i].beta));
                    pts.extend_from_slice(&self.corners[i..]);
                }
                None => pts.push(PlanePoint::new(v, lo)),
            }
        } else {
            match self.corners.iter().position(|c| c.beta <= v) {
                Some(i) => {
                    pts.push(PlanePoint::new(self.corners[i].alpha, v));
                    pts.extend_from_slice(&self.corners[i..]);
                }
                None => pts.push(PlanePoint::new(hi, v)),
            }
        }
        Self {
            corners: canonicalize(pts, &self.support_box, true),
            support_box: self.support_box,
        }
    }

    /// Segments of the stored curve. A single-corner interface yields one
    /// degenerate segment.
    pub fn segments(&self) -> impl Iterator<Item = (PlanePoint, PlanePoint)> + '_ {
        let single = (self.corners.len() == 1).then(|| (self.corners[0], self.corners[0]));
        self.corners.windows(2).map(|w| (w[0], w[1])).chain(single)
    }

    /// Extreme coordinate of the interface along the line `alpha = value`
    /// (for [`Ell::BetaMax`], [`Ell::BetaMin`]) or `beta = value` (for
    /// [`Ell::AlphaMax`], [`Ell::AlphaMin`]).
    pub fn ell(&self, value: f64, which: Ell) -> Result<f64> {
        let mut hits: Vec<f64> = Vec::new();
        for (a, b) in self.segments() {
            match which {
                Ell::BetaMax | Ell::BetaMin => {
                    if a.alpha == b.alpha {
                        if (value - a.alpha).abs() <= MERGE_TOL {
                            hits.extend([a.beta, b.beta]);
                        }
                    } else if value >= a.alpha - MERGE_TOL && value <= b.alpha + MERGE_TOL {
                        hits.push(a.beta);
                    }
                }
                Ell::AlphaMax | Ell::AlphaMin => {
                    if a.beta == b.beta {
                        if (value - a.beta).abs() <= MERGE_TOL {
                            hits.extend([a.alpha, b.alpha]);
                        }
                    } else if value <= a.beta + MERGE_TOL && value >= b.beta - MERGE_TOL {
                        hits.push(a.alpha);
                    }
                }
            }
        }
        let reduce = match which {
            Ell::BetaMax | Ell::AlphaMax => f64::max,
            Ell::BetaMin | Ell::AlphaMin => f64::min,
        };
        hits.into_iter().reduce(reduce).ok_or(Error::OutOfRange {
            axis: match which {
                Ell::BetaMax | Ell::BetaMin => "alpha",
                Ell::AlphaMax | Ell::AlphaMin => "beta",
            },
            value,
        })
    }

    /// Corner-wise comparison within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.support_box == other.support_box
            && self.corners.len() == other.corners.len()
            && self
                .corners
                .iter()
                .zip(&other.corners)
                .all(|(a, b)| (a.alpha - b.alpha).abs() <= tol && (a.beta - b.beta).abs() <= tol)
    }

    /// Checks every structural invariant of the canonical form.
    pub fn is_canonical(&self) -> bool {
        let (lo, hi) = self.support_box.input_range();
        let c = &self.corners;
        if c.is_empty() || c[0].alpha != c[0].beta {
            return false;
        }
        if c.iter()
            .any(|p| p.alpha < lo || p.alpha > hi || p.beta < lo || p.beta > hi)
        {
            return false;
        }
        for w in c.windows(2) {
            let (a, b) = (w[0], w[1]);
            let horizontal = a.beta == b.beta && b.alpha - a.alpha > MERGE_TOL;
            let vertical = a.alpha == b.alpha && a.beta - b.beta > MERGE_TOL;
            if !(horizontal || vertical) {
                return false;
            }
        }
        for w in c.windows(3) {
            let collinear = (w[0].alpha == w[1].alpha && w[1].alpha == w[2].alpha)
                || (w[0].beta == w[1].beta && w[1].beta == w[2].beta);
            if collinear {
                return false;
            }
        }
        let last = c[c.len() - 1];
        last.beta == lo || last.alpha == hi
    }
}

fn push_corner(out: &mut Vec<PlanePoint>, mut p: PlanePoint) {
    if let Some(&prev) = out.last() {
        if (p.alpha - prev.alpha).abs() <= MERGE_TOL {
            p.alpha = prev.alpha;
        }
        if (p.beta - prev.beta).abs() <= MERGE_TOL {
            p.beta = prev.beta;
        }
        if p == prev {
            return;
        }
        if out.len() >= 2 {
            let before = out[out.len() - 2];
            let collinear = (before.alpha == prev.alpha && prev.alpha == p.alpha)
                || (before.beta == prev.beta && prev.beta == p.beta);
            if collinear {
                out.pop();
            }
        }
    }
    out.push(p);
}

/// Merges near-duplicate and collinear corners and appends the tail corner
/// when the list does not yet end on the floor or the right wall.
fn canonicalize(points: Vec<PlanePoint>, support_box: &SupportBox, single_vertical: bool) -> Vec<PlanePoint> {
    let (lo, hi) = support_box.input_range();
    let mut out = Vec::with_capacity(points.len() + 1);
    for p in points {
        push_corner(&mut out, p);
    }
    let last = *out.last().expect("at least one corner");
    if last.beta > lo && last.alpha < hi {
        let vertical = match out.len() {
            1 => single_vertical,
            n => out[n - 2].alpha == last.alpha,
        };
        let tail = if vertical {
            PlanePoint::new(last.alpha, lo)
        } else {
            PlanePoint::new(hi, last.beta)
        };
        push_corner(&mut out, tail);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> SupportBox {
        SupportBox::new(0.0, 1.0, -1.0, 0.0).unwrap()
    }

    fn pts(c: &[(f64, f64)]) -> Vec<PlanePoint> {
        c.iter().map(|&(a, b)| PlanePoint::new(a, b)).collect()
    }

    #[test]
    fn virgin_is_vertical_drop_at_origin() {
        let v = MemoryInterface::virgin(unit_box());
        assert_eq!(v.corners(), pts(&[(0.0, 0.0), (0.0, -1.0)]).as_slice());
        assert!(v.is_canonical());
        assert!(v.contains_origin());
    }

    #[test]
    fn relay_state_examples() {
        let b = unit_box();
        let virgin = MemoryInterface::virgin(b);
        assert_eq!(virgin.relay_state(PlanePoint::new(1.0, -1.0)), RelaySign::Minus);
        let iface = virgin.push_extremum(0.75).push_extremum(0.0);
        assert_eq!(iface.relay_state(PlanePoint::new(0.3, -0.5)), RelaySign::Plus);
        assert_eq!(iface.relay_state(PlanePoint::new(0.9, -0.5)), RelaySign::Minus);
        // on the curve counts as below
        assert_eq!(iface.relay_state(PlanePoint::new(0.75, -0.5)), RelaySign::Plus);
        assert_eq!(iface.relay_state(PlanePoint::new(0.5, 0.0)), RelaySign::Plus);
    }

    #[test]
    fn sweep_up_then_down() {
        let iface = MemoryInterface::virgin(unit_box())
            .push_extremum(0.75)
            .push_extremum(0.0);
        assert_eq!(
            iface.corners(),
            pts(&[(0.0, 0.0), (0.75, 0.0), (0.75, -1.0)]).as_slice()
        );
        assert!(iface.is_canonical());
    }

    #[test]
    fn repeated_extremum_is_idempotent() {
        let a = MemoryInterface::virgin(unit_box()).push_extremum(0.5);
        let b = a.push_extremum(0.5);
        assert_eq!(a, b);
    }

    #[test]
    fn dominated_extremum_is_wiped() {
        let v = MemoryInterface::virgin(unit_box());
        assert_eq!(v.push_extremum(0.3).push_extremum(0.75), v.push_extremum(0.75));
        let down = v.push_extremum(0.6).push_extremum(-0.2);
        assert_eq!(
            down.push_extremum(-0.4).push_extremum(-0.9),
            down.push_extremum(-0.9)
        );
    }

    #[test]
    fn nested_history_corners() {
        let b = SupportBox::new(-2.0, 2.0, -2.0, 2.0).unwrap();
        let iface = MemoryInterface::from_extrema(&[1.0, -0.5, 0.5, -0.2, 0.0], b).unwrap();
        assert_eq!(
            iface.corners(),
            pts(&[
                (0.0, 0.0),
                (0.0, -0.2),
                (0.5, -0.2),
                (0.5, -0.5),
                (1.0, -0.5),
                (1.0, -2.0)
            ])
            .as_slice()
        );
        assert!(iface.is_canonical());
        // a larger maximum wipes the inner max/min pair
        let wiped = iface.push_extremum(0.7).push_extremum(0.0);
        assert_eq!(
            wiped.corners(),
            pts(&[(0.0, 0.0), (0.7, 0.0), (0.7, -0.5), (1.0, -0.5), (1.0, -2.0)]).as_slice()
        );
    }

    #[test]
    fn extrema_are_clamped_to_input_range() {
        let v = MemoryInterface::virgin(unit_box());
        assert_eq!(v.push_extremum(5.0), v.push_extremum(1.0));
        assert_eq!(v.push_extremum(f64::INFINITY), v.push_extremum(1.0));
        assert_eq!(v.push_extremum(f64::NAN), v);
    }

    #[test]
    fn saturation_constructors() {
        let b = unit_box();
        let neg = MemoryInterface::negative_saturation(b);
        let pos = MemoryInterface::positive_saturation(b);
        assert!(neg.is_canonical() && pos.is_canonical());
        assert_eq!(neg.relay_state(PlanePoint::new(0.5, -0.5)), RelaySign::Minus);
        assert_eq!(pos.relay_state(PlanePoint::new(0.5, -0.5)), RelaySign::Plus);
    }

    #[test]
    fn ell_examples() {
        let v = MemoryInterface::virgin(unit_box());
        let iface = v.push_extremum(0.75).push_extremum(0.0);
        assert_eq!(iface.ell(0.0, Ell::AlphaMax).unwrap(), 0.75);
        assert_eq!(iface.ell(0.0, Ell::BetaMin).unwrap(), 0.0);
        assert_eq!(iface.ell(0.75, Ell::BetaMin).unwrap(), -1.0);
        assert_eq!(iface.ell(0.75, Ell::BetaMax).unwrap(), 0.0);
        assert_eq!(iface.ell(-0.5, Ell::AlphaMin).unwrap(), 0.75);
        assert_eq!(v.ell(0.0, Ell::BetaMax).unwrap(), 0.0);
        // single-point touch: max == min
        assert_eq!(
            iface.ell(0.4, Ell::BetaMax).unwrap(),
            iface.ell(0.4, Ell::BetaMin).unwrap()
        );
    }

    #[test]
    fn ell_misses_outside_curve() {
        let v = MemoryInterface::virgin(unit_box());
        assert!(matches!(
            v.ell(0.5, Ell::BetaMax),
            Err(Error::OutOfRange { axis: "alpha", .. })
        ));
    }

    #[test]
    fn json_round_trip_and_format() {
        let iface = MemoryInterface::virgin(unit_box())
            .push_extremum(0.75)
            .push_extremum(0.0);
        let text = iface.to_json();
        assert_eq!(
            text,
            r#"[{"alpha":0.0,"beta":0.0},{"alpha":0.75,"beta":0.0},{"alpha":0.75,"beta":-1.0}]"#
        );
        let back = MemoryInterface::from_json(&text, unit_box()).unwrap();
        assert_eq!(back, iface);
    }

    #[test]
    fn from_corners_rejects_bad_staircases() {
        let b = unit_box();
        assert!(MemoryInterface::from_corners(vec![], b).is_err());
        assert!(MemoryInterface::from_corners(pts(&[(0.1, 0.0)]), b).is_err());
        // diagonal move
        assert!(MemoryInterface::from_corners(pts(&[(0.0, 0.0), (0.5, -0.5)]), b).is_err());
        // moving inward
        assert!(MemoryInterface::from_corners(pts(&[(0.0, 0.0), (-0.5, 0.0)]), b).is_err());
        // outside the input range
        assert!(MemoryInterface::from_corners(pts(&[(0.0, 0.0), (3.0, 0.0)]), b).is_err());
    }

    #[test]
    fn from_corners_merges_and_anchors() {
        let b = unit_box();
        let iface = MemoryInterface::from_corners(pts(&[(0.0, 0.0), (0.2, 0.0), (0.5, 0.0), (0.5, -0.3)]), b)
            .unwrap();
        assert_eq!(
            iface.corners(),
            pts(&[(0.0, 0.0), (0.5, 0.0), (0.5, -1.0)]).as_slice()
        );
        let single = MemoryInterface::from_corners(pts(&[(0.0, 0.0)]), b).unwrap();
        assert_eq!(single, MemoryInterface::virgin(b));
    }

    #[test]
    fn near_equal_extrema_merge() {
        let v = MemoryInterface::virgin(unit_box());
        let a = v.push_extremum(0.5).push_extremum(0.0);
        let b = a.push_extremum(0.5 + 1e-14).push_extremum(0.0);
        assert_eq!(a, b);
    }
}
