//! Brute-force relay lattice.
//!
//! Relays sit at the centers of an `n x n` lattice over the support box and
//! carry the weight of the part of their cell with `alpha >= beta`: the
//! overlap with each grid cell times its value for grid fields, `mu` at the
//! relay times the area for analytic ones. A cell cut by the
//! diagonal whose center lies above it gets a relay on the diagonal instead,
//! at the point nearest its center. Each input sample switches relays exactly
//! as the two-threshold relay rule says: up when the input exceeds `alpha`,
//! down when it drops below `beta`.

use crate::error::{Error, Result};
use crate::interface::MemoryInterface;
use crate::plane::{PlanePoint, RelaySign, SupportBox};
use crate::remnant::apply_pulse;
use crate::remnant::pulse::triangle_sample;
use crate::weighting::{evaluate_output, GridField, WeightingField};

#[derive(Debug, Clone)]
pub struct RelayGrid {
    n: usize,
    support_box: SupportBox,
    /// Ascending relay thresholds.
    alphas: Vec<f64>,
    betas: Vec<f64>,
    /// `weights[j * n + i]` for relay `(alphas[i], betas[j])`; zero when
    /// `alpha < beta`.
    weights: Vec<f64>,
    states: Vec<i8>,
    /// Relays on the diagonal, `(threshold, weight, state)`, ascending.
    diagonal: Vec<(f64, f64, i8)>,
    output: f64,
    last_input: Option<f64>,
}

/// Area of `[a0, a1] x [b0, b0 + h]` with `alpha >= beta`.
fn area_below_diagonal(a0: f64, a1: f64, b0: f64, h: f64) -> f64 {
    let g = |t: f64| {
        if t <= 0.0 {
            0.0
        } else if t <= h {
            0.5 * t * t
        } else {
            0.5 * h * h + h * (t - h)
        }
    };
    g(a1 - b0) - g(a0 - b0)
}

/// Integral of a grid field over `[a0, a1] x [b0, b1]` restricted to
/// `alpha >= beta`, from the overlap with every grid cell.
fn grid_cell_weight(g: &GridField, a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    let (na, nb) = g.dims();
    let mut total = 0.0;
    for j in 0..nb {
        let y0 = b0.max(g.beta_edge(j));
        let y1 = b1.min(g.beta_edge(j + 1));
        if y1 <= y0 {
            continue;
        }
        for i in 0..na {
            let x0 = a0.max(g.alpha_edge(i));
            let x1 = a1.min(g.alpha_edge(i + 1));
            if x1 <= x0 {
                continue;
            }
            total += g.value(i, j) * area_below_diagonal(x0, x1, y0, y1 - y0);
        }
    }
    total
}

fn sign_of(r: RelaySign) -> i8 {
    match r {
        RelaySign::Plus => 1,
        RelaySign::Minus => -1,
    }
}

impl RelayGrid {
    pub fn new(mu: &WeightingField, init: &MemoryInterface, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig(
                "oracle lattice size must be positive".into(),
            ));
        }
        let support_box = mu.support_box();
        let da = support_box.width() / n as f64;
        let db = support_box.height() / n as f64;
        let alphas: Vec<f64> = (0..n)
            .map(|i| support_box.alpha_lo + (i as f64 + 0.5) * da)
            .collect();
        let betas: Vec<f64> = (0..n)
            .map(|j| support_box.beta_lo + (j as f64 + 0.5) * db)
            .collect();
        let mut weights = vec![0.0; n * n];
        let mut states = vec![0_i8; n * n];
        let mut diagonal = Vec::new();
        let mut output = 0.0;
        for (j, &b) in betas.iter().enumerate() {
            for (i, &a) in alphas.iter().enumerate() {
                let area = area_below_diagonal(a - 0.5 * da, a + 0.5 * da, b - 0.5 * db, db);
                if area <= 0.0 {
                    continue;
                }
                let p = if a >= b {
                    PlanePoint::new(a, b)
                } else {
                    let m = 0.5 * (a + b);
                    PlanePoint::new(m, m)
                };
                let w = match mu {
                    WeightingField::Grid(g) => {
                        grid_cell_weight(g, a - 0.5 * da, a + 0.5 * da, b - 0.5 * db, b + 0.5 * db)
                    }
                    WeightingField::Analytic(_) => mu.eval_mu(p) * area,
                };
                let s = sign_of(init.relay_state(p));
                output += f64::from(s) * w;
                if a >= b {
                    weights[j * n + i] = w;
                    states[j * n + i] = s;
                } else {
                    diagonal.push((p.alpha, w, s));
                }
            }
        }
        diagonal.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(Self {
            n,
            support_box,
            alphas,
            betas,
            weights,
            states,
            diagonal,
            output,
            last_input: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support_box(&self) -> SupportBox {
        self.support_box
    }

    pub fn output(&self) -> f64 {
        self.output
    }

    /// State of the lattice relay nearest to `p`.
    pub fn nearest_state(&self, p: PlanePoint) -> RelaySign {
        let pick = |xs: &[f64], v: f64| {
            let k = xs.partition_point(|&x| x < v);
            if k == 0 {
                0
            } else if k == xs.len() || (v - xs[k - 1]) <= (xs[k] - v) {
                k - 1
            } else {
                k
            }
        };
        let i = pick(&self.alphas, p.alpha);
        let j = pick(&self.betas, p.beta);
        if self.states[j * self.n + i] > 0 {
            RelaySign::Plus
        } else {
            RelaySign::Minus
        }
    }

    fn set(&mut self, i: usize, j: usize, s: i8) {
        let k = j * self.n + i;
        if self.states[k] != s && self.alphas[i] >= self.betas[j] {
            self.output += 2.0 * f64::from(s) * self.weights[k];
            self.states[k] = s;
        }
    }

    /// Diagonal relays with `lo <= threshold < hi` switch up.
    fn raise_diagonal(&mut self, lo: f64, hi: f64) {
        for (m, w, st) in self.diagonal.iter_mut() {
            if *m >= lo && *m < hi && *st != 1 {
                self.output += 2.0 * *w;
                *st = 1;
            }
        }
    }

    /// Diagonal relays with `lo < threshold <= hi` switch down.
    fn lower_diagonal(&mut self, lo: f64, hi: f64) {
        for (m, w, st) in self.diagonal.iter_mut() {
            if *m > lo && *m <= hi && *st != -1 {
                self.output -= 2.0 * *w;
                *st = -1;
            }
        }
    }

    fn raise_columns(&mut self, i0: usize, i1: usize) {
        for i in i0..i1 {
            for j in 0..self.n {
                self.set(i, j, 1);
            }
        }
    }

    fn lower_rows(&mut self, j0: usize, j1: usize) {
        for j in j0..j1 {
            for i in 0..self.n {
                self.set(i, j, -1);
            }
        }
    }

    /// Applies one input sample and returns the output.
    ///
    /// After any sample `u`, relays with `alpha < u` are up and relays with
    /// `beta > u` are down, so only thresholds between the previous and the
    /// current sample need visiting.
    pub fn apply(&mut self, u: f64) -> f64 {
        let cols_below = |v: f64| self.alphas.partition_point(|&a| a < v);
        let rows_at_or_below = |v: f64| self.betas.partition_point(|&b| b <= v);
        match self.last_input {
            None => {
                let ic = cols_below(u);
                let jr = rows_at_or_below(u);
                self.raise_columns(0, ic);
                self.lower_rows(jr, self.n);
                self.raise_diagonal(f64::NEG_INFINITY, u);
                self.lower_diagonal(u, f64::INFINITY);
            }
            Some(last) if u > last => {
                let (i0, i1) = (cols_below(last), cols_below(u));
                self.raise_columns(i0, i1);
                self.raise_diagonal(last, u);
            }
            Some(last) if u < last => {
                let (j0, j1) = (rows_at_or_below(u), rows_at_or_below(last));
                self.lower_rows(j0, j1);
                self.lower_diagonal(u, last);
            }
            Some(_) => {}
        }
        self.last_input = Some(u);
        self.output
    }

    /// Applies one sample by visiting every relay. Slow; kept to cross-check
    /// [`RelayGrid::apply`].
    pub fn apply_full(&mut self, u: f64) -> f64 {
        for j in 0..self.n {
            for i in 0..self.n {
                if u > self.alphas[i] {
                    self.set(i, j, 1);
                } else if u < self.betas[j] {
                    self.set(i, j, -1);
                }
            }
        }
        for (m, w, st) in self.diagonal.iter_mut() {
            let s = if u > *m {
                1
            } else if u < *m {
                -1
            } else {
                *st
            };
            if s != *st {
                self.output += 2.0 * f64::from(s) * *w;
                *st = s;
            }
        }
        self.last_input = Some(u);
        self.output
    }

    /// Output recomputed from scratch as the weighted sum of states.
    pub fn recomputed_output(&self) -> f64 {
        let lattice: f64 = self
            .states
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| f64::from(s) * w)
            .sum();
        lattice
            + self
                .diagonal
                .iter()
                .map(|&(_, w, s)| f64::from(s) * w)
                .sum::<f64>()
    }
}

/// Output of the relay lattice at every input sample.
pub fn oracle_simulate(
    mu: &WeightingField,
    init: &MemoryInterface,
    u_samples: &[f64],
    n: usize,
) -> Result<Vec<f64>> {
    let mut grid = RelayGrid::new(mu, init, n)?;
    Ok(u_samples.iter().map(|&u| grid.apply(u)).collect())
}

/// Per-pulse remnants of the exact engine and of the relay lattice for the
/// same amplitude sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison {
    pub n: usize,
    pub exact: Vec<f64>,
    pub oracle: Vec<f64>,
    /// Largest `|exact - oracle| / scale` over the pulses.
    pub max_deviation: f64,
}

impl OracleComparison {
    /// Replays `amplitudes` from `init`, each pulse sampled with `n_half`
    /// samples per half period, and compares the remnants. `scale` is the
    /// normalization of the deviation, typically `gamma_max - gamma_min`.
    pub fn run(
        mu: &WeightingField,
        init: &MemoryInterface,
        amplitudes: &[f64],
        n: usize,
        n_half: usize,
        scale: f64,
    ) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "deviation scale {scale} must be positive"
            )));
        }
        let mut grid = RelayGrid::new(mu, init, n)?;
        let mut iface = init.clone();
        let mut exact = Vec::with_capacity(amplitudes.len());
        let mut oracle = Vec::with_capacity(amplitudes.len());
        grid.apply(0.0);
        for &w in amplitudes {
            iface = apply_pulse(&iface, w);
            exact.push(evaluate_output(mu, &iface)?);
            let mut y = grid.output();
            for j in 1..=2 * n_half.max(1) {
                y = grid.apply(w * triangle_sample(j, n_half));
            }
            oracle.push(y);
        }
        let max_deviation = exact
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).abs() / scale)
            .fold(0.0, f64::max);
        Ok(Self {
            n,
            exact,
            oracle,
            max_deviation,
        })
    }
}
