//! Run configurations. TOML is the primary format; a file ending in
//! `.json` is read as JSON. Unknown keys are rejected and every error names
//! the offending key path.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use ghlab_core::channel::LogBase;
use ghlab_core::exact::{HamiltonianModel, Sector};

/// Either an explicit list or an inclusive arithmetic range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl Grid {
    /// Range points are `start + k·step` rounded to 12 decimals, up to
    /// `stop` inclusive.
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            Grid::List(v) => {
                if v.is_empty() {
                    bail!("grid list is empty");
                }
                Ok(v.clone())
            }
            Grid::Range { start, stop, step } => {
                if !(step.is_finite() && *step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
                    bail!("bad range start={start} stop={stop} step={step}");
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                Ok((0..=n)
                    .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
                    .collect())
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableConfig {
    pub name: String,
    /// `O = (1/n) Σ B̃_p` over these plaquette ids.
    pub plaquettes: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    /// Plaquettes averaged into `O_G`; the central pair when absent.
    #[serde(default)]
    pub plaquettes: Option<Vec<usize>>,
    /// Logical operator `L₀` as a Pauli string, `L_x` when absent.
    #[serde(default)]
    pub logical: Option<String>,
    #[serde(default = "default_dt")]
    pub dt: Vec<f64>,
}

fn default_dt() -> Vec<f64> {
    vec![ghlab_core::stability::DEFAULT_DT]
}

fn default_model() -> HamiltonianModel {
    HamiltonianModel::Tc
}

fn default_cap() -> usize {
    ghlab_core::channel::DEFAULT_KRAUS_CAP
}

fn default_sector() -> Sector {
    Sector::PLUS
}

/// Shared by `scan` and `stability`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub lx: usize,
    pub ly: usize,
    #[serde(default = "default_model")]
    pub model: HamiltonianModel,
    pub j: Grid,
    pub p_x: Grid,
    /// Defaults to one observable `o_g` on the central plaquette pair.
    #[serde(default)]
    pub observables: Vec<ObservableConfig>,
    #[serde(default)]
    pub top_k: Option<usize>,
    #[serde(default)]
    pub log_base: LogBase,
    #[serde(default = "default_cap")]
    pub kraus_cap: usize,
    #[serde(default = "default_sector")]
    pub sector: Sector,
    #[serde(default)]
    pub seed: u64,
    /// Used by `stability`.
    #[serde(default)]
    pub coupling: Option<CouplingConfig>,
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum McLine {
    /// `β = artanh(1 - 2p)`.
    Nishimori,
    /// Every `p` is combined with every `β` from the `beta` grid.
    FixedBeta,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McRunConfig {
    pub sizes: Vec<usize>,
    pub line: McLine,
    pub p: Grid,
    #[serde(default)]
    pub beta: Option<Grid>,
    pub sweeps: usize,
    pub thermalization: usize,
    pub replicas: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
}

fn parse_str<T: DeserializeOwned>(text: &str, json: bool) -> Result<T> {
    if json {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| anyhow::anyhow!("at `{}`: {}", e.path(), e.inner()))
    } else {
        let de = toml::Deserializer::parse(text).map_err(|e| anyhow::anyhow!("{e}"))?;
        serde_path_to_error::deserialize(de).map_err(|e| anyhow::anyhow!("at `{}`: {}", e.path(), e.inner()))
    }
}

/// Parse `text` as TOML, or as JSON when `json` is set.
pub fn parse_config<T: DeserializeOwned>(text: &str, json: bool) -> Result<T> {
    parse_str(text, json)
}

pub fn load_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    parse_str(&text, json).with_context(|| format!("invalid config {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_grid_is_inclusive_and_clean() {
        let g = Grid::Range {
            start: 0.0,
            stop: 0.5,
            step: 0.025,
        };
        let v = g.values().unwrap();
        assert_eq!(v.len(), 21);
        assert_eq!(v[3], 0.075);
        assert_eq!(*v.last().unwrap(), 0.5);
    }

    #[test]
    fn unknown_key_names_its_path() {
        let text = "lx = 3\nly = 2\nj = [0.0]\np_x = [0.1]\n[[observables]]\nname = \"a\"\nplaquets = [2]\n";
        let err = format!("{:#}", parse_config::<ScanConfig>(text, false).unwrap_err());
        assert!(err.contains("observables"), "{err}");
        assert!(err.contains("plaquets"), "{err}");
    }

    #[test]
    fn json_and_toml_agree() {
        let t: ScanConfig = parse_config("lx = 3\nly = 2\nj = { start = 0.0, stop = 1.0, step = 0.25 }\np_x = [0.1]\n", false).unwrap();
        let j: ScanConfig = parse_config(
            r#"{"lx": 3, "ly": 2, "j": {"start": 0.0, "stop": 1.0, "step": 0.25}, "p_x": [0.1]}"#,
            true,
        )
        .unwrap();
        assert_eq!(serde_json::to_string(&t).unwrap(), serde_json::to_string(&j).unwrap());
        assert_eq!(t.j.values().unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
