//! Piecewise-constant weighting on a uniform cell lattice.
//!
//! File format (CSV): one header line with the six values
//! `alpha_lo,alpha_hi,beta_lo,beta_hi,n_alpha,n_beta`, then `n_beta` rows of
//! `n_alpha` cell values. Each row holds a fixed `beta` band with `alpha`
//! ascending; rows are ordered by ascending `beta`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::plane::{PlanePoint, SupportBox};

const HEADER_NAMES: &str = "alpha_lo,alpha_hi,beta_lo,beta_hi,n_alpha,n_beta";

#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    support_box: SupportBox,
    n_alpha: usize,
    n_beta: usize,
    /// Row-major by beta band: `values[j * n_alpha + i]`.
    values: Vec<f64>,
    /// Per column, cumulative integral in beta from `beta_lo` up to each
    /// edge: `col_prefix[i * (n_beta + 1) + j]`.
    col_prefix: Vec<f64>,
    abs_total: f64,
}

impl GridField {
    pub fn new(support_box: SupportBox, n_alpha: usize, n_beta: usize, values: Vec<f64>) -> Result<Self> {
        if n_alpha == 0 || n_beta == 0 {
            return Err(Error::InvalidGrid("grid dimensions must be at least 1x1".into()));
        }
        let expected = n_alpha
            .checked_mul(n_beta)
            .ok_or_else(|| Error::InvalidGrid("grid too large".into()))?;
        if values.len() != expected {
            return Err(Error::InvalidGrid(format!(
                "expected {expected} values, got {}",
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite value at index {k}")));
        }
        let mut grid = Self {
            support_box,
            n_alpha,
            n_beta,
            values,
            col_prefix: Vec::new(),
            abs_total: 0.0,
        };
        let abs: Vec<f64> = grid.values.iter().map(|v| v.abs()).collect();
        let abs_prefix = grid.prefix_of(&abs);
        grid.abs_total = grid.diagonal_mass_with(&abs_prefix, &abs, f64::NEG_INFINITY, f64::INFINITY);
        grid.col_prefix = grid.prefix_of(&grid.values);
        Ok(grid)
    }

    /// A single cell with constant value over the whole box.
    pub fn uniform(support_box: SupportBox, value: f64) -> Result<Self> {
        Self::new(support_box, 1, 1, vec![value])
    }

    /// Samples `f` at cell centers.
    pub fn from_fn(
        support_box: SupportBox,
        n_alpha: usize,
        n_beta: usize,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(n_alpha.saturating_mul(n_beta));
        let da = support_box.width() / n_alpha as f64;
        let db = support_box.height() / n_beta as f64;
        for j in 0..n_beta {
            let b = support_box.beta_lo + (j as f64 + 0.5) * db;
            for i in 0..n_alpha {
                let a = support_box.alpha_lo + (i as f64 + 0.5) * da;
                values.push(f(a, b));
            }
        }
        Self::new(support_box, n_alpha, n_beta, values)
    }

    pub fn support_box(&self) -> SupportBox {
        self.support_box
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n_alpha, self.n_beta)
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.n_alpha + i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `alpha` coordinate of column edge `i` (0..=n_alpha).
    pub fn alpha_edge(&self, i: usize) -> f64 {
        if i == self.n_alpha {
            return self.support_box.alpha_hi;
        }
        self.support_box.alpha_lo + self.support_box.width() * i as f64 / self.n_alpha as f64
    }

    /// `beta` coordinate of row edge `j` (0..=n_beta).
    pub fn beta_edge(&self, j: usize) -> f64 {
        if j == self.n_beta {
            return self.support_box.beta_hi;
        }
        self.support_box.beta_lo + self.support_box.height() * j as f64 / self.n_beta as f64
    }

    fn column_of(&self, alpha: f64) -> usize {
        let t = (alpha - self.support_box.alpha_lo) / self.support_box.width() * self.n_alpha as f64;
        (t.max(0.0) as usize).min(self.n_alpha - 1)
    }

    fn row_of(&self, beta: f64) -> usize {
        let t = (beta - self.support_box.beta_lo) / self.support_box.height() * self.n_beta as f64;
        (t.max(0.0) as usize).min(self.n_beta - 1)
    }

    pub fn eval(&self, p: PlanePoint) -> f64 {
        if !self.support_box.contains(p) || p.alpha < p.beta {
            return 0.0;
        }
        self.value(self.column_of(p.alpha), self.row_of(p.beta))
    }

    pub fn abs_mass(&self) -> f64 {
        self.abs_total
    }

    fn prefix_of(&self, values: &[f64]) -> Vec<f64> {
        let n = self.n_beta + 1;
        let mut prefix = vec![0.0; self.n_alpha * n];
        for i in 0..self.n_alpha {
            let mut acc = 0.0;
            for j in 0..self.n_beta {
                acc += values[j * self.n_alpha + i] * (self.beta_edge(j + 1) - self.beta_edge(j));
                prefix[i * n + j + 1] = acc;
            }
        }
        prefix
    }

    /// `int_{beta_lo}^{h} mu(alpha_i, beta) d beta` for column `i`.
    fn column_up_to(&self, prefix: &[f64], values: &[f64], i: usize, h: f64) -> f64 {
        let n = self.n_beta + 1;
        if h <= self.support_box.beta_lo {
            return 0.0;
        }
        if h >= self.support_box.beta_hi {
            return prefix[i * n + self.n_beta];
        }
        let j = self.row_of(h);
        prefix[i * n + j] + values[j * self.n_alpha + i] * (h - self.beta_edge(j))
    }

    /// Column-wise `(alpha range of column i) ∩ [a0, a1]`.
    fn column_overlaps(&self, a0: f64, a1: f64) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        let lo = a0.max(self.support_box.alpha_lo);
        let hi = a1.min(self.support_box.alpha_hi);
        let (i0, i1) = if hi > lo {
            (self.column_of(lo), self.column_of(hi))
        } else {
            (1, 0)
        };
        (i0..=i1).filter_map(move |i| {
            let x0 = lo.max(self.alpha_edge(i));
            let x1 = hi.min(self.alpha_edge(i + 1));
            (x1 > x0).then_some((i, x0, x1))
        })
    }

    /// `int_{a0}^{a1} int_{-inf}^{h} mu d beta d alpha`.
    pub fn strip_mass(&self, a0: f64, a1: f64, h: f64) -> f64 {
        if h <= self.support_box.beta_lo {
            return 0.0;
        }
        self.column_overlaps(a0, a1)
            .map(|(i, x0, x1)| (x1 - x0) * self.column_up_to(&self.col_prefix, &self.values, i, h))
            .sum()
    }

    /// `int_{a0}^{a1} int_{-inf}^{alpha} mu d beta d alpha`.
    pub fn diagonal_mass(&self, a0: f64, a1: f64) -> f64 {
        self.diagonal_mass_with(&self.col_prefix, &self.values, a0, a1)
    }

    fn diagonal_mass_with(&self, prefix: &[f64], values: &[f64], a0: f64, a1: f64) -> f64 {
        let a0 = a0.max(self.support_box.beta_lo);
        let mut total = 0.0;
        for (i, x0, x1) in self.column_overlaps(a0, a1) {
            // the inner integral is piecewise linear in alpha with kinks at
            // the beta edges, so trapezoids between kinks are exact
            let mut knots = vec![x0];
            for j in 0..=self.n_beta {
                let e = self.beta_edge(j);
                if e > x0 && e < x1 {
                    knots.push(e);
                }
            }
            knots.push(x1);
            for w in knots.windows(2) {
                let f0 = self.column_up_to(prefix, values, i, w[0]);
                let f1 = self.column_up_to(prefix, values, i, w[1]);
                total += 0.5 * (w[1] - w[0]) * (f0 + f1);
            }
        }
        total
    }

    /// Extremes over `(alpha, b1)` in `region` of `int_{b1}^{0} mu d beta`.
    pub(crate) fn column_integral_extremes(&self, region: &SupportBox) -> (f64, f64) {
        let (mut lo, mut hi) = (0.0_f64, 0.0_f64);
        let mut cuts = vec![region.beta_lo, region.beta_hi];
        cuts.extend(
            (0..=self.n_beta)
                .map(|j| self.beta_edge(j))
                .filter(|&e| e > region.beta_lo && e < region.beta_hi),
        );
        for (i, _, _) in self.column_overlaps(region.alpha_lo, region.alpha_hi) {
            let top = self.column_up_to(&self.col_prefix, &self.values, i, 0.0);
            for &b1 in &cuts {
                let v = top - self.column_up_to(&self.col_prefix, &self.values, i, b1);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// Extremes over `(a1, beta)` in `region` of `int_{0}^{a1} mu d alpha`.
    pub(crate) fn row_integral_extremes(&self, region: &SupportBox) -> (f64, f64) {
        let (mut lo, mut hi) = (0.0_f64, 0.0_f64);
        let rb0 = region.beta_lo.max(self.support_box.beta_lo);
        let rb1 = region.beta_hi.min(self.support_box.beta_hi);
        if rb1 <= rb0 {
            return (lo, hi);
        }
        for j in self.row_of(rb0)..=self.row_of(rb1) {
            let y0 = rb0.max(self.beta_edge(j));
            let y1 = rb1.min(self.beta_edge(j + 1));
            if y1 <= y0 {
                continue;
            }
            // running integral from alpha = 0 across columns
            let mut acc = 0.0;
            let mut consider = |x: f64, acc: f64| {
                if x >= region.alpha_lo && x <= region.alpha_hi {
                    lo = lo.min(acc);
                    hi = hi.max(acc);
                }
            };
            for (i, x0, x1) in self.column_overlaps(0.0, region.alpha_hi) {
                consider(x0, acc);
                let v = self.value(i, j);
                if region.alpha_lo > x0 && region.alpha_lo < x1 {
                    consider(region.alpha_lo, acc + v * (region.alpha_lo - x0));
                }
                acc += v * (x1 - x0);
                consider(x1, acc);
            }
        }
        (lo, hi)
    }

    /// Whether every cell overlapping `region` with positive area satisfies
    /// `pred`. Returns the first violating cell center otherwise.
    pub(crate) fn find_cell_violating(
        &self,
        region: &SupportBox,
        pred: impl Fn(f64) -> bool,
    ) -> Option<(PlanePoint, f64)> {
        for (i, x0, x1) in self.column_overlaps(region.alpha_lo, region.alpha_hi) {
            for j in 0..self.n_beta {
                let y0 = region.beta_lo.max(self.beta_edge(j));
                let y1 = region.beta_hi.min(self.beta_edge(j + 1));
                if y1 <= y0 {
                    continue;
                }
                let v = self.value(i, j);
                if !pred(v) {
                    return Some((PlanePoint::new(0.5 * (x0 + x1), 0.5 * (y0 + y1)), v));
                }
            }
        }
        None
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (mut line_no, mut header) = lines.next().ok_or(Error::GridParse {
            line: 1,
            message: "empty file".into(),
        })?;
        if header == HEADER_NAMES {
            (line_no, header) = lines.next().ok_or(Error::GridParse {
                line: line_no + 1,
                message: "missing header values".into(),
            })?;
        }
        let fields: Vec<&str> = header.split(',').map(str::trim).collect();
        if fields.len() != 6 {
            return Err(Error::GridParse {
                line: line_no,
                message: format!("header needs 6 fields, found {}", fields.len()),
            });
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|e| Error::GridParse {
                line: line_no,
                message: format!("bad number {s:?}: {e}"),
            })
        };
        let count = |s: &str| -> Result<usize> {
            s.parse::<usize>().map_err(|e| Error::GridParse {
                line: line_no,
                message: format!("bad count {s:?}: {e}"),
            })
        };
        let support_box =
            SupportBox::new(num(fields[0])?, num(fields[1])?, num(fields[2])?, num(fields[3])?)?;
        let n_alpha = count(fields[4])?;
        let n_beta = count(fields[5])?;
        if n_alpha == 0 || n_beta == 0 {
            return Err(Error::GridParse {
                line: line_no,
                message: "grid dimensions must be at least 1x1".into(),
            });
        }
        let mut values = Vec::new();
        let mut rows = 0usize;
        for (line, row) in lines {
            if rows == n_beta {
                return Err(Error::GridParse {
                    line,
                    message: format!("more than {n_beta} rows"),
                });
            }
            let mut cols = 0usize;
            for cell in row.split(',') {
                let v: f64 = cell.trim().parse().map_err(|e| Error::GridParse {
                    line,
                    message: format!("bad value {cell:?}: {e}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::GridParse {
                        line,
                        message: format!("non-finite value {cell:?}"),
                    });
                }
                values.push(v);
                cols += 1;
            }
            if cols != n_alpha {
                return Err(Error::GridParse {
                    line,
                    message: format!("expected {n_alpha} values, found {cols}"),
                });
            }
            rows += 1;
        }
        if rows != n_beta {
            return Err(Error::GridParse {
                line: line_no,
                message: format!("expected {n_beta} rows, found {rows}"),
            });
        }
        Self::new(support_box, n_alpha, n_beta, values)
    }

    pub fn to_csv(&self) -> String {
        let b = self.support_box;
        let mut out = format!(
            "{},{},{},{},{},{}\n",
            b.alpha_lo, b.alpha_hi, b.beta_lo, b.beta_hi, self.n_alpha, self.n_beta
        );
        for j in 0..self.n_beta {
            for i in 0..self.n_alpha {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", self.value(i, j));
            }
            out.push('\n');
        }
        out
    }
}
