//! Scenario files: TOML parsing, defaults and validation.
//!
//! Parsing is two-staged. [`RawConfig`] mirrors the file with every field
//! optional; [`ScenarioConfig::resolve`] fills in the defaults and checks
//! the invariants, reporting the first violation.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::{Path, PathBuf};

use precursor_core::cv::GaussianState;
use precursor_core::dv::dv_initial_system;
use precursor_core::precursors::Metric;
use precursor_core::{CVParams, DVParams, Window};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{CliError, Result};

pub const DEFAULT_THETA_SA: f64 = 0.05 * FRAC_PI_2;
pub const DEFAULT_THETA_AA: f64 = 0.9 * FRAC_PI_2;
pub const DEFAULT_STEPS: usize = 120;
pub const DEFAULT_DV_WINDOW: usize = 4;
pub const DEFAULT_OUTPUT_DIR: &str = "output";

/// Qubit chains are dense: 2^(ancillae + 1) is the joint dimension.
pub const MAX_DV_ANCILLAS: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Dv,
    Cv,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Dv => "dv",
            Model::Cv => "cv",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricName {
    Bures,
    Trace,
}

impl From<MetricName> for Metric {
    fn from(m: MetricName) -> Self {
        match m {
            MetricName::Bures => Metric::Bures,
            MetricName::Trace => Metric::Trace,
        }
    }
}

/// `window = 4` or `window = "full"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum RawWindow {
    Size(i64),
    Name(String),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDv {
    alpha1: Option<f64>,
    alpha2: Option<f64>,
    ancilla_excitation: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCv {
    nbar1: Option<f64>,
    r1: Option<f64>,
    nbar2: Option<f64>,
    r2: Option<f64>,
    ancilla_nbar: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: Model,
    theta_sa: Option<f64>,
    theta_aa: Option<f64>,
    steps: Option<i64>,
    window: Option<RawWindow>,
    hierarchy_levels: Option<Vec<i64>>,
    metric: Option<MetricName>,
    erase_correlations: Option<bool>,
    revival_eps: Option<f64>,
    output_dir: Option<PathBuf>,
    dv: Option<RawDv>,
    cv: Option<RawCv>,
}

/// Qubit system states `α|0⟩ + √(1−α²)|1⟩` and the fresh-ancilla population.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DvBlock {
    pub alpha1: f64,
    pub alpha2: f64,
    pub ancilla_excitation: f64,
}

/// Thermal squeezed system states and the fresh-ancilla occupation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CvBlock {
    pub nbar1: f64,
    pub r1: f64,
    pub nbar2: f64,
    pub r2: f64,
    pub ancilla_nbar: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelBlock {
    Dv(DvBlock),
    Cv(CvBlock),
}

/// A fully resolved scenario. Serializes back to a config that resolves to
/// itself, with every default spelled out.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub model: Model,
    pub theta_sa: f64,
    pub theta_aa: f64,
    pub steps: usize,
    #[serde(serialize_with = "serialize_window")]
    pub window: Window,
    pub hierarchy_levels: Vec<usize>,
    pub metric: MetricName,
    pub erase_correlations: bool,
    pub revival_eps: f64,
    pub output_dir: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dv: Option<DvBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cv: Option<CvBlock>,
}

fn serialize_window<S: Serializer>(w: &Window, s: S) -> std::result::Result<S::Ok, S::Error> {
    match *w {
        Window::Fixed(n) => s.serialize_u64(n as u64),
        Window::Full => s.serialize_str("full"),
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Level 0, the powers of two below `capacity`, then `capacity` itself.
fn log_levels(capacity: usize) -> Vec<usize> {
    std::iter::once(0)
        .chain(std::iter::successors(Some(1usize), |k| k.checked_mul(2)).take_while(|&k| k < capacity))
        .chain(std::iter::once(capacity))
        .collect()
}

fn finite(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(format!("{name} must be finite, got {x}")))
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| invalid(e.message().to_string()))?;
        Self::resolve(raw)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
        Self::from_toml_str(&text)
    }

    fn resolve(raw: RawConfig) -> Result<Self> {
        let model = raw.model;
        match (model, raw.dv.is_some(), raw.cv.is_some()) {
            (_, true, true) => return Err(invalid("exactly one of the [dv] and [cv] blocks may be present")),
            (Model::Dv, false, _) => return Err(invalid("model \"dv\" requires a [dv] block")),
            (Model::Cv, _, false) => return Err(invalid("model \"cv\" requires a [cv] block")),
            _ => {}
        }

        let steps = match raw.steps {
            None => DEFAULT_STEPS,
            Some(n) if n >= 1 => n as usize,
            Some(n) => return Err(invalid(format!("steps ≥ 1 required, got {n}"))),
        };
        let window = match raw.window {
            None if model == Model::Dv => Window::Fixed(DEFAULT_DV_WINDOW),
            None => Window::Full,
            Some(RawWindow::Size(w)) if w >= 2 => Window::Fixed(w as usize),
            Some(RawWindow::Size(w)) => return Err(invalid(format!("window ≥ 2 required, got {w}"))),
            Some(RawWindow::Name(s)) if s == "full" => Window::Full,
            Some(RawWindow::Name(s)) => return Err(invalid(format!("window must be an integer or \"full\", got \"{s}\""))),
        };
        let capacity = window.capacity(steps);
        let hierarchy_levels = match raw.hierarchy_levels {
            None => match window {
                Window::Fixed(w) => (0..=w).collect(),
                Window::Full => log_levels(capacity),
            },
            Some(levels) => {
                if levels.is_empty() {
                    return Err(invalid("hierarchy_levels must not be empty"));
                }
                let mut out = Vec::with_capacity(levels.len());
                for k in levels {
                    if k < 0 || k as u64 > capacity as u64 {
                        return Err(invalid(format!("hierarchy level {k} outside [0, window = {capacity}]")));
                    }
                    out.push(k as usize);
                }
                out.sort_unstable();
                out.dedup();
                out
            }
        };

        let metric = raw.metric.unwrap_or(MetricName::Bures);
        if model == Model::Cv && metric == MetricName::Trace {
            return Err(invalid("metric \"trace\" is not available for model \"cv\" (no Gaussian closed form)"));
        }
        let revival_eps = raw.revival_eps.unwrap_or(precursor_core::precursors::REVIVAL_EPS);
        if !(revival_eps > 0.0 && revival_eps.is_finite()) {
            return Err(invalid(format!("revival_eps must be positive and finite, got {revival_eps}")));
        }
        if model == Model::Dv && capacity > MAX_DV_ANCILLAS {
            return Err(invalid(format!(
                "dv runs retain at most {MAX_DV_ANCILLAS} ancillae (joint dimension 2^{}), this window retains {capacity}",
                MAX_DV_ANCILLAS + 1
            )));
        }

        let cfg = ScenarioConfig {
            model,
            theta_sa: finite("theta_sa", raw.theta_sa.unwrap_or(DEFAULT_THETA_SA))?,
            theta_aa: finite("theta_aa", raw.theta_aa.unwrap_or(DEFAULT_THETA_AA))?,
            steps,
            window,
            hierarchy_levels,
            metric,
            erase_correlations: raw.erase_correlations.unwrap_or(false),
            revival_eps,
            output_dir: raw.output_dir.unwrap_or_else(|| DEFAULT_OUTPUT_DIR.into()),
            dv: raw.dv.map(|d| DvBlock {
                alpha1: d.alpha1.unwrap_or(0.0),
                alpha2: d.alpha2.unwrap_or(1.0),
                ancilla_excitation: d.ancilla_excitation.unwrap_or(0.0),
            }),
            cv: raw.cv.map(|c| CvBlock {
                nbar1: c.nbar1.unwrap_or(0.0),
                r1: c.r1.unwrap_or(0.5),
                nbar2: c.nbar2.unwrap_or(0.0),
                r2: c.r2.unwrap_or(0.0),
                ancilla_nbar: c.ancilla_nbar.unwrap_or(0.0),
            }),
        };
        cfg.check_states()?;
        Ok(cfg)
    }

    /// Builds the initial states and step parameters once, without running
    /// anything, so physical-range errors surface as config errors.
    fn check_states(&self) -> Result<()> {
        let core = |e: precursor_core::Error| invalid(e.to_string());
        match self.block() {
            ModelBlock::Dv(d) => {
                self.dv_params().validate().map_err(core)?;
                dv_initial_system(d.alpha1).map_err(|e| invalid(format!("alpha1: {e}")))?;
                dv_initial_system(d.alpha2).map_err(|e| invalid(format!("alpha2: {e}")))?;
            }
            ModelBlock::Cv(c) => {
                self.cv_params().validate().map_err(core)?;
                self.cv_params().fresh_ancilla().map_err(|e| invalid(format!("ancilla_nbar: {e}")))?;
                GaussianState::thermal_squeezed(c.nbar1, c.r1).map_err(|e| invalid(format!("nbar1/r1: {e}")))?;
                GaussianState::thermal_squeezed(c.nbar2, c.r2).map_err(|e| invalid(format!("nbar2/r2: {e}")))?;
            }
        }
        Ok(())
    }

    pub fn block(&self) -> ModelBlock {
        match (&self.dv, &self.cv) {
            (Some(d), _) => ModelBlock::Dv(d.clone()),
            (_, Some(c)) => ModelBlock::Cv(c.clone()),
            _ => unreachable!("resolve guarantees one block"),
        }
    }

    pub fn dv_params(&self) -> DVParams {
        DVParams {
            theta_sa: self.theta_sa,
            theta_aa: self.theta_aa,
            ancilla_excitation: self.dv.as_ref().map_or(0.0, |d| d.ancilla_excitation),
            window: self.window,
            steps: self.steps,
        }
    }

    pub fn cv_params(&self) -> CVParams {
        CVParams {
            theta_sa: self.theta_sa,
            theta_aa: self.theta_aa,
            ancilla_nbar: self.cv.as_ref().map_or(0.0, |c| c.ancilla_nbar),
            window: self.window,
            steps: self.steps,
        }
    }

    /// Largest number of ancillae the chain holds.
    pub fn capacity(&self) -> usize {
        self.window.capacity(self.steps)
    }

    /// No ancilla is ever traced out, so the bound is exact.
    pub fn is_exact(&self) -> bool {
        match self.window {
            Window::Full => true,
            Window::Fixed(w) => self.steps < w,
        }
    }

    /// The information split needs the trace distance on the whole chain.
    pub fn has_info_decomposition(&self) -> bool {
        self.model == Model::Dv && self.is_exact()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes to TOML")
    }
}
