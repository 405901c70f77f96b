#![allow(dead_code)]

use preisach::{
    apply_pulse, make_butterfly, ButterflySpec, GridField, MemoryInterface, QRegion, SupportBox,
    WeightingField,
};
use rand::Rng;

pub fn random_box(rng: &mut impl Rng) -> SupportBox {
    SupportBox::new(
        rng.gen_range(-2.0..-0.1),
        rng.gen_range(0.5..3.0),
        rng.gen_range(-3.0..-0.5),
        rng.gen_range(0.1..2.0),
    )
    .unwrap()
}

/// Grid with values in `[-1, 1]`.
pub fn random_signed_grid(rng: &mut impl Rng) -> WeightingField {
    let bx = random_box(rng);
    let na = rng.gen_range(1..12);
    let nb = rng.gen_range(1..12);
    let values = (0..na * nb).map(|_| rng.gen_range(-1.0..1.0)).collect();
    WeightingField::Grid(GridField::new(bx, na, nb, values).unwrap())
}

/// Grid that is nonnegative on every cell meeting `Q` and signed elsewhere,
/// with a `Q` inside the box quadrant.
pub fn random_q_field(rng: &mut impl Rng) -> (WeightingField, QRegion) {
    let bx = random_box(rng);
    let q = QRegion::new(
        rng.gen_range(0.2..=1.0) * bx.alpha_hi,
        rng.gen_range(0.2..=1.0) * bx.beta_lo,
    )
    .unwrap();
    let na = rng.gen_range(1..12);
    let nb = rng.gen_range(1..12);
    let da = bx.width() / na as f64;
    let db = bx.height() / nb as f64;
    let mut values = Vec::with_capacity(na * nb);
    for j in 0..nb {
        let (b0, b1) = (bx.beta_lo + j as f64 * db, bx.beta_lo + (j + 1) as f64 * db);
        for i in 0..na {
            let (a0, a1) = (bx.alpha_lo + i as f64 * da, bx.alpha_lo + (i + 1) as f64 * da);
            let meets_q = a1 > 0.0 && a0 < q.alpha2 && b1 > q.beta2 && b0 < 0.0;
            values.push(if meets_q {
                rng.gen_range(0.0..1.0)
            } else {
                rng.gen_range(-1.0..1.0)
            });
        }
    }
    (
        WeightingField::Grid(GridField::new(bx, na, nb, values).unwrap()),
        q,
    )
}

/// Amplitude in the input range, sometimes landing exactly on an existing
/// threshold of `iface` or on zero.
pub fn random_amplitude(rng: &mut impl Rng, iface: &MemoryInterface) -> f64 {
    let (lo, hi) = iface.support_box().input_range();
    match rng.gen_range(0..10) {
        0 => {
            let c = iface.corners()[rng.gen_range(0..iface.corners().len())];
            if rng.gen() {
                c.alpha
            } else {
                c.beta
            }
        }
        1 => 0.0,
        _ => rng.gen_range(lo..=hi),
    }
}

/// Interface after a random history of pulses from the virgin state, and
/// the amplitude of the last pulse.
pub fn random_pulse_history(rng: &mut impl Rng, bx: SupportBox) -> (MemoryInterface, f64) {
    let mut iface = MemoryInterface::virgin(bx);
    let mut last = 0.0;
    for _ in 0..rng.gen_range(1..7) {
        last = random_amplitude(rng, &iface);
        iface = apply_pulse(&iface, last);
    }
    (iface, last)
}

/// Random history followed by pulses of `beta2` and `alpha2` in random
/// order, which always yields an admissible initial interface. Returns the
/// last amplitude as well.
pub fn random_admissible_initial(
    rng: &mut impl Rng,
    mu: &WeightingField,
    q: &QRegion,
) -> (MemoryInterface, f64) {
    let (iface, _) = random_pulse_history(rng, mu.support_box());
    let order = if rng.gen() {
        [q.beta2, q.alpha2]
    } else {
        [q.alpha2, q.beta2]
    };
    let iface = order.iter().fold(iface, |i, &w| apply_pulse(&i, w));
    (iface, order[1])
}

/// The default butterfly with its lobes moved, stretched and rescaled.
pub fn random_butterfly(rng: &mut impl Rng) -> (WeightingField, QRegion) {
    loop {
        let mut spec = ButterflySpec::default();
        let p = &mut spec.positive;
        p.amplitude *= rng.gen_range(0.5..2.0);
        p.alpha_center = rng.gen_range(400.0..1000.0);
        p.beta_center = rng.gen_range(-600.0..-250.0);
        p.alpha_width = rng.gen_range(700.0..1500.0);
        p.beta_width = rng.gen_range(250.0..450.0);
        let base = p.amplitude;
        for n in &mut spec.negatives {
            n.amplitude = -base * rng.gen_range(2.0..6.0);
            n.alpha_center += rng.gen_range(-100.0..100.0);
            n.beta_center += rng.gen_range(-100.0..100.0);
            n.alpha_width *= rng.gen_range(0.8..1.2);
            n.beta_width *= rng.gen_range(0.8..1.2);
        }
        if let Ok(mu) = make_butterfly(&spec) {
            return (mu, spec.q);
        }
    }
}
