use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dispersion::{make_dispersion, DispersionKind, DispersionRelation, DispersionSystem};
use crate::error::{Error, Result};
use crate::resonance::{GridMode, Phase, SignPair};
use crate::spectral::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentName {
    WavePacket,
    ResonantGrowth,
    NormalFormCheck,
    VectorFieldCheck,
    CutoffDecomposition,
    BilinearStrichartz,
    ClassificationSuite,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 7] = [
        ExperimentName::WavePacket,
        ExperimentName::ResonantGrowth,
        ExperimentName::NormalFormCheck,
        ExperimentName::VectorFieldCheck,
        ExperimentName::CutoffDecomposition,
        ExperimentName::BilinearStrichartz,
        ExperimentName::ClassificationSuite,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::WavePacket => "wave_packet",
            ExperimentName::ResonantGrowth => "resonant_growth",
            ExperimentName::NormalFormCheck => "normal_form_check",
            ExperimentName::VectorFieldCheck => "vector_field_check",
            ExperimentName::CutoffDecomposition => "cutoff_decomposition",
            ExperimentName::BilinearStrichartz => "bilinear_strichartz",
            ExperimentName::ClassificationSuite => "classification_suite",
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentName::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = ExperimentName::ALL.iter().map(|e| e.as_str()).collect();
                Error::Config(format!("unknown experiment {s:?}; expected one of {}", known.join(", ")))
            })
    }
}

/// One dispersion relation. `alpha` is read by `homogeneous`, `mass` by
/// `klein_gordon`, `samples` (pairs `[r, P(r)]`) by `custom_radial`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionConfig {
    pub kind: DispersionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<[f64; 2]>>,
}

impl DispersionConfig {
    pub fn of_kind(kind: DispersionKind) -> Self {
        DispersionConfig {
            kind,
            alpha: None,
            mass: None,
            samples: None,
        }
    }

    pub fn build(&self, dim: usize) -> Result<DispersionRelation> {
        match self.kind {
            DispersionKind::CustomRadial => {
                let samples = self
                    .samples
                    .as_ref()
                    .ok_or_else(|| Error::Config("custom_radial needs \"samples\"".into()))?;
                let pairs: Vec<(f64, f64)> = samples.iter().map(|p| (p[0], p[1])).collect();
                DispersionRelation::custom_radial(&pairs, dim)
            }
            kind => make_dispersion(kind, self.alpha.unwrap_or(2.0), self.mass.unwrap_or(1.0), dim),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Spatial dimension, 1 or 2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Nodes per axis.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Period `L` of every axis.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dealias: Option<bool>,
}

/// Experiment-specific knobs; each runner documents which it reads and
/// falls back to its own defaults for the rest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub packet_pair: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resonant_pairs: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonresonant_pairs: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    /// Largest lattice index carried by random initial data.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmax: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_times: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub codim: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratios: Option<Vec<f64>>,
    /// Gaussian annulus width relative to its radius.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annulus_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_list: Option<Vec<SignPair>>,
    /// Spacing of the (ξ,η) sampling grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<GridMode>,
    /// Phase indices `(i, j, k)` into `system`, 1-based.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub indices: Option<[usize; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radial: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
}

/// Full experiment description, read from JSON.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dispersion: Option<DispersionConfig>,
    /// Diagonal system; takes precedence over `dispersion` where phases
    /// are built.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<Vec<DispersionConfig>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signs: Option<SignPair>,
    pub grid: GridConfig,
    pub solver: SolverConfig,
    pub params: Params,
    /// Overrides of verdict tolerances by verdict name.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn for_experiment(name: ExperimentName) -> Self {
        ExperimentConfig {
            experiment: Some(name),
            ..Default::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file; errors name the path.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub(crate) fn signs_or(&self, default: SignPair) -> SignPair {
        self.signs.unwrap_or(default)
    }

    pub(crate) fn relation_or(&self, default: DispersionKind, dim: usize) -> Result<DispersionRelation> {
        self.dispersion
            .clone()
            .unwrap_or_else(|| DispersionConfig::of_kind(default))
            .build(dim)
    }

    /// Phase from `system` + `params.indices` when a system is given,
    /// otherwise the scalar phase of `dispersion`.
    pub(crate) fn phase_or(&self, default: DispersionKind, default_signs: SignPair, dim: usize) -> Result<Phase> {
        let signs = self.signs_or(default_signs);
        match &self.system {
            Some(parts) => {
                let rels = parts.iter().map(|p| p.build(dim)).collect::<Result<Vec<_>>>()?;
                let n = rels.len();
                let [i, j, k] = self.params.indices.unwrap_or([1, n.min(2), n.min(3)]);
                Phase::new(DispersionSystem::new(rels)?, i, j, k, signs)
                    .map_err(|e| Error::Config(format!("phase indices: {e}")))
            }
            None => Ok(Phase::scalar(self.relation_or(default, dim)?, signs)),
        }
    }

    pub(crate) fn grid_or(&self, dim: usize, n: usize, period: f64) -> Result<Grid> {
        Grid::new(
            self.grid.dim.unwrap_or(dim),
            self.grid.n.unwrap_or(n),
            self.grid.period.unwrap_or(period),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_unknown_fields() {
        let text = r#"{
            "experiment": "wave_packet",
            "dispersion": {"kind": "homogeneous", "alpha": 3.0},
            "signs": "+-",
            "grid": {"n": 64, "period": 6.283185307179586},
            "solver": {"dt": 0.01, "t_final": 1.0, "dealias": true},
            "params": {"xi0": 5.0, "times": [1, 2]},
            "tolerances": {"velocity": 0.05},
            "seed": 7
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.experiment, Some(ExperimentName::WavePacket));
        assert_eq!(cfg.signs, Some(SignPair::PM));
        assert_eq!(cfg.params.times.as_deref(), Some(&[1.0, 2.0][..]));
        let again = ExperimentConfig::from_json(&cfg.to_json().to_string()).unwrap();
        assert_eq!(again, cfg);
        assert!(ExperimentConfig::from_json(r#"{"gird": {}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"params": {"xi_0": 1}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "nope"}"#).is_err());
    }

    #[test]
    fn names_parse() {
        for e in ExperimentName::ALL {
            assert_eq!(e.as_str().parse::<ExperimentName>().unwrap(), e);
        }
        assert!("wave".parse::<ExperimentName>().is_err());
    }

    #[test]
    fn missing_file_names_the_path() {
        let err = ExperimentConfig::load(Path::new("/nonexistent/cfg.json")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/cfg.json"));
    }
}
