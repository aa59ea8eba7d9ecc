//! Resolved run configuration: defaults, then a JSON file of flat dotted
//! keys, then command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub constants: ConstantsConfig,
    pub time: TimeConfig,
    pub norms: NormsConfig,
    pub example: ExampleConfig,
    pub solve: SolveConfig,
    pub probe: ProbeConfig,
    pub kernel: KernelConfig,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    /// Box length `L = 2π·2^box_exp`.
    pub box_exp: i32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub mu0: f64,
    #[serde(rename = "C0")]
    pub c0: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub ppo: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormsConfig {
    pub stride: usize,
    pub delta_cap: Option<f64>,
    pub alphas: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleConfig {
    pub eps: f64,
    #[serde(rename = "M")]
    pub m: f64,
    /// Target energy; `None` picks the energy that puts the lowest block at 0.
    #[serde(rename = "E")]
    pub energy: Option<f64>,
    pub spread: u32,
    pub sweep: Vec<u32>,
    pub sweep_ppo: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Picard,
    Etd,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub mode: Mode,
    pub eps: f64,
    pub tol_rel: f64,
    pub max_iter: usize,
    pub dealias: bool,
    pub h: f64,
    pub scheme: mildns::duhamel::Scheme,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    /// Restrict to one estimate (`nonlinear-late`, `nonlinear-early`, `fractional-energy`).
    pub lemma: Option<String>,
    pub count: usize,
    pub amplitude: f64,
    pub band: [i32; 2],
    pub delta: f64,
    #[serde(rename = "T_star")]
    pub t_star: f64,
    pub alphas: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    /// Sample times; empty means a decade from the bottom of the window.
    pub times: Vec<f64>,
    /// Shell window for the far-field slope, in units of `√t` and `L`.
    pub slope_lo_sqrt_t: f64,
    pub slope_hi_box: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig { n: 64, box_exp: 0 },
            constants: ConstantsConfig { mu0: 1.0, c0: 1.0 },
            time: TimeConfig { ppo: 8 },
            norms: NormsConfig {
                stride: 2,
                delta_cap: None,
                alphas: vec![0.0, 0.25, 0.5, 0.75],
            },
            example: ExampleConfig {
                eps: 0.05,
                m: 1.0,
                energy: None,
                spread: 0,
                sweep: Vec::new(),
                sweep_ppo: 8,
            },
            solve: SolveConfig {
                mode: Mode::Picard,
                eps: 0.05,
                tol_rel: 1e-8,
                max_iter: 60,
                dealias: true,
                h: 0.01,
                scheme: mildns::duhamel::Scheme::EtdRk4,
            },
            probe: ProbeConfig {
                lemma: None,
                count: 20,
                amplitude: 0.1,
                band: [0, 1],
                delta: 0.05,
                t_star: 1.0,
                alphas: vec![0.0, 0.25, 0.5, 0.75],
            },
            kernel: KernelConfig {
                times: Vec::new(),
                slope_lo_sqrt_t: 6.0,
                slope_hi_box: 0.25,
            },
            seed: 0,
            out: PathBuf::from("out"),
        }
    }
}

/// Sets `root[a][b]… = value` for the dotted key `a.b…`.
fn set_dotted(root: &mut Value, key: &str, value: Value) -> Result<()> {
    let mut cur = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, p) in parts.iter().enumerate() {
        let obj = cur
            .as_object_mut()
            .with_context(|| format!("config key '{key}': '{p}' is not a section"))?;
        if i + 1 == parts.len() {
            if !obj.contains_key(*p) {
                bail!("unknown config key '{key}'");
            }
            obj.insert((*p).to_string(), value);
            return Ok(());
        }
        cur = obj
            .get_mut(*p)
            .with_context(|| format!("unknown config key '{key}'"))?;
    }
    unreachable!()
}

/// Resolves defaults, then `file` (a JSON object of dotted keys), then
/// `overrides` (dotted key, JSON value), in that order.
pub fn resolve(file: Option<&Path>, overrides: &[(String, Value)]) -> Result<RunConfig> {
    let mut root = serde_json::to_value(RunConfig::default())?;
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let map: Map<String, Value> =
            serde_json::from_str(&text).with_context(|| format!("config {} is not a JSON object", path.display()))?;
        for (k, v) in map {
            set_dotted(&mut root, &k, v)?;
        }
    }
    for (k, v) in overrides {
        set_dotted(&mut root, k, v.clone())?;
    }
    serde_json::from_value(root).context("invalid configuration value")
}
