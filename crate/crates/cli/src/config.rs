//! Experiment configuration: a JSON document naming the weighting, the
//! initial interface, `Q`, the controller settings and the pulse timing.
//!
//! Defaults: the butterfly weighting starts from the shelf interface and its
//! own `Q`; every other weighting starts from the virgin interface with
//! `Q = [0, alpha_hi] x [beta_lo, 0]` taken from its support box.

use std::fs;
use std::path::{Path, PathBuf};

use preisach::{
    make_butterfly, ButterflySpec, GainMode, GaussianComponent, GridField, MemoryInterface, PlanePoint,
    QRegion, SupportBox, WeightingField, DEFAULT_RESOLUTION,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub weighting: WeightingSpec,
    #[serde(default)]
    pub initial_interface: Option<InterfaceSpec>,
    #[serde(default)]
    pub q: Option<QRegion>,
    #[serde(default)]
    pub controller: ControllerSpec,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_sample_step")]
    pub sample_step: f64,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_oracle_n")]
    pub oracle_n: usize,
    #[serde(default)]
    pub seed: u64,
    /// Open-loop amplitudes for `simulate`.
    #[serde(default)]
    pub plan: Option<Vec<f64>>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

fn default_tau() -> f64 {
    1.0
}

fn default_sample_step() -> f64 {
    preisach::remnant::controller::DEFAULT_SAMPLE_STEP
}

fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}

fn default_oracle_n() -> usize {
    300
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightingSpec {
    /// Synthetic butterfly preset with its default parameters.
    Butterfly,
    Uniform {
        #[serde(default = "unit_box")]
        support_box: SupportBox,
        #[serde(default = "one")]
        value: f64,
    },
    /// Identically zero weighting.
    Zero {
        #[serde(default = "unit_box")]
        support_box: SupportBox,
    },
    /// Grid CSV file, relative paths resolved against the config file.
    Grid { path: PathBuf },
    Gaussians {
        support_box: SupportBox,
        components: Vec<GaussianComponent>,
    },
}

fn unit_box() -> SupportBox {
    SupportBox {
        alpha_lo: 0.0,
        alpha_hi: 1.0,
        beta_lo: -1.0,
        beta_hi: 0.0,
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InterfaceSpec {
    Virgin,
    /// Sweeps to `alpha`, then `beta`, then back to 0.
    Shelf {
        #[serde(default = "shelf_alpha")]
        alpha: f64,
        #[serde(default = "shelf_beta")]
        beta: f64,
    },
    /// Sweeps from negative saturation to each value in turn.
    Extrema {
        values: Vec<f64>,
    },
    Corners {
        corners: Vec<PlanePoint>,
    },
}

fn shelf_alpha() -> f64 {
    1400.0
}

fn shelf_beta() -> f64 {
    -800.0
}

/// A number, or `{"fraction": f}` of the way from `gamma_min` to `gamma_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Target {
    Value(f64),
    Fraction { fraction: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Auto {
    Auto,
}

/// `"auto"` or a number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutoOr {
    Auto(Auto),
    Value(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSpec {
    #[serde(default = "default_target")]
    pub gamma_d: Target,
    /// `"auto"` is 0.95 of the largest admissible gain.
    #[serde(default = "auto")]
    pub lambda: AutoOr,
    /// `"auto"` starts on the edge of the initial dead zone facing the target.
    #[serde(default = "auto")]
    pub w0: AutoOr,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default = "default_max_pulses")]
    pub max_pulses: usize,
    #[serde(default)]
    pub mode: GainMode,
}

fn default_target() -> Target {
    Target::Fraction { fraction: 0.6 }
}

fn auto() -> AutoOr {
    AutoOr::Auto(Auto::Auto)
}

fn default_max_pulses() -> usize {
    preisach::remnant::controller::DEFAULT_MAX_PULSES
}

impl Default for ControllerSpec {
    fn default() -> Self {
        Self {
            gamma_d: default_target(),
            lambda: auto(),
            w0: auto(),
            tolerance: None,
            max_pulses: default_max_pulses(),
            mode: GainMode::Positive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Target as a fraction of the remnant range.
    GammaFraction,
    GammaD,
    /// Gain as a fraction of the largest admissible gain.
    LambdaFraction,
    Lambda,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    /// Explicit values; otherwise `random` draws from `seed`.
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub random: Option<RandomValues>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomValues {
    pub count: usize,
    pub low: f64,
    pub high: f64,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn finite(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(config_err(format!("{name} must be finite")))
    }
}

impl ExperimentConfig {
    /// Parses and checks everything that does not need the file system.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        if let WeightingSpec::Grid { path: grid } = &mut cfg.weighting {
            if grid.is_relative() {
                if let Some(dir) = path.parent() {
                    *grid = dir.join(&*grid);
                }
            }
        }
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(config_err("tau must be positive"));
        }
        if !(self.sample_step.is_finite() && self.sample_step > 0.0) {
            return Err(config_err("sample_step must be positive"));
        }
        if self.resolution < 2 {
            return Err(config_err("resolution must be at least 2"));
        }
        if self.oracle_n < 2 {
            return Err(config_err("oracle_n must be at least 2"));
        }
        let c = &self.controller;
        match c.gamma_d {
            Target::Value(v) => finite("gamma_d", v)?,
            Target::Fraction { fraction } => {
                if !(0.0..=1.0).contains(&fraction) {
                    return Err(config_err("gamma_d fraction must lie in [0, 1]"));
                }
            }
        }
        if let AutoOr::Value(v) = c.lambda {
            if !(v.is_finite() && v > 0.0) {
                return Err(config_err("lambda must be positive"));
            }
        }
        if let AutoOr::Value(v) = c.w0 {
            finite("w0", v)?;
        }
        if let Some(t) = c.tolerance {
            if !(t.is_finite() && t >= 0.0) {
                return Err(config_err("tolerance must be nonnegative"));
            }
        }
        if c.max_pulses == 0 {
            return Err(config_err("max_pulses must be at least 1"));
        }
        if let Some(plan) = &self.plan {
            for &w in plan {
                finite("plan amplitude", w)?;
            }
        }
        if let Some(s) = &self.sweep {
            match (&s.values, &s.random) {
                (Some(v), None) => {
                    for &x in v {
                        finite("sweep value", x)?;
                    }
                }
                (None, Some(r)) => {
                    finite("sweep low", r.low)?;
                    finite("sweep high", r.high)?;
                    if r.low > r.high {
                        return Err(config_err("sweep low exceeds high"));
                    }
                }
                _ => return Err(config_err("sweep needs exactly one of values and random")),
            }
        }
        Ok(())
    }

    /// Builds the weighting, the initial interface and `Q`.
    pub fn resolve(&self) -> Result<Setup, CliError> {
        let lib = |e: preisach::Error| config_err(e.to_string());
        let (mu, default_q) = match &self.weighting {
            WeightingSpec::Butterfly => {
                let spec = ButterflySpec::default();
                (make_butterfly(&spec).map_err(lib)?, Some(spec.q))
            }
            WeightingSpec::Uniform { support_box, value } => {
                let bx = checked_box(support_box)?;
                finite("uniform value", *value)?;
                (WeightingField::uniform(bx, *value).map_err(lib)?, None)
            }
            WeightingSpec::Zero { support_box } => {
                let bx = checked_box(support_box)?;
                (WeightingField::uniform(bx, 0.0).map_err(lib)?, None)
            }
            WeightingSpec::Grid { path } => {
                let text = fs::read_to_string(path)
                    .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
                (
                    WeightingField::Grid(GridField::from_csv(&text).map_err(lib)?),
                    None,
                )
            }
            WeightingSpec::Gaussians {
                support_box,
                components,
            } => {
                let bx = checked_box(support_box)?;
                (
                    WeightingField::gaussians(bx, components.clone()).map_err(lib)?,
                    None,
                )
            }
        };
        let bx = mu.support_box();
        let q = match (self.q, default_q) {
            (Some(q), _) | (None, Some(q)) => q,
            (None, None) => QRegion {
                alpha2: bx.alpha_hi,
                beta2: bx.beta_lo,
            },
        };
        let q = QRegion::new(q.alpha2, q.beta2).map_err(lib)?;
        let spec = self.initial_interface.clone().unwrap_or(match self.weighting {
            WeightingSpec::Butterfly => InterfaceSpec::Shelf {
                alpha: shelf_alpha(),
                beta: shelf_beta(),
            },
            _ => InterfaceSpec::Virgin,
        });
        let iface0 = match spec {
            InterfaceSpec::Virgin => MemoryInterface::virgin(bx),
            InterfaceSpec::Shelf { alpha, beta } => {
                MemoryInterface::from_extrema(&[alpha, beta, 0.0], bx).map_err(lib)?
            }
            InterfaceSpec::Extrema { values } => MemoryInterface::from_extrema(&values, bx).map_err(lib)?,
            InterfaceSpec::Corners { corners } => MemoryInterface::from_corners(corners, bx).map_err(lib)?,
        };
        Ok(Setup { mu, iface0, q })
    }
}

fn checked_box(b: &SupportBox) -> Result<SupportBox, CliError> {
    SupportBox::new(b.alpha_lo, b.alpha_hi, b.beta_lo, b.beta_hi).map_err(|e| config_err(e.to_string()))
}

/// The objects a command runs on.
#[derive(Debug, Clone)]
pub struct Setup {
    pub mu: WeightingField,
    pub iface0: MemoryInterface,
    pub q: QRegion,
}
