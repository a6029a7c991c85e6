//! Experiment configuration (`segbench run --config`).

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use segbench_core::grabcut::GrabCutParams;
use segbench_core::graphcut::GraphCutParams;
use segbench_core::interaction::{CannySegmenter, ForestRefiner, RegionGrowRefiner, SimulatedUserParams};

use crate::dataset::{generate, load_dataset, Sample, SyntheticSpec};
use crate::error::{BenchError, Result};
use crate::external::{load_external_masks, ExternalMaskManifest, ExternalMasks};
use crate::io::read_json;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetSource {
    /// A directory with `manifest.json`, relative to the config file.
    Path(PathBuf),
    Synthetic(SyntheticSpec),
    /// A named synthetic preset, e.g. `noisy_disk`.
    Preset(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    NaiveOtsu,
    NaiveCanny,
    NaiveRegiongrow,
    MlForest,
    Graphcut,
    Grabcut,
    External,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 7] = [
        AlgorithmKind::NaiveOtsu,
        AlgorithmKind::NaiveCanny,
        AlgorithmKind::NaiveRegiongrow,
        AlgorithmKind::MlForest,
        AlgorithmKind::Graphcut,
        AlgorithmKind::Grabcut,
        AlgorithmKind::External,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::NaiveOtsu => "naive_otsu",
            AlgorithmKind::NaiveCanny => "naive_canny",
            AlgorithmKind::NaiveRegiongrow => "naive_regiongrow",
            AlgorithmKind::MlForest => "ml_forest",
            AlgorithmKind::Graphcut => "graphcut",
            AlgorithmKind::Grabcut => "grabcut",
            AlgorithmKind::External => "external",
        }
    }

    /// Segments without seeds.
    pub fn is_automatic(self) -> bool {
        matches!(
            self,
            AlgorithmKind::NaiveOtsu | AlgorithmKind::NaiveCanny | AlgorithmKind::MlForest | AlgorithmKind::External
        )
    }

    /// Segments from seeds.
    pub fn is_seeded(self) -> bool {
        matches!(
            self,
            AlgorithmKind::NaiveRegiongrow | AlgorithmKind::MlForest | AlgorithmKind::Graphcut | AlgorithmKind::Grabcut
        )
    }

    /// The refiner used by the hybrid protocol unless overridden.
    pub fn default_refiner(self) -> AlgorithmKind {
        if self.is_seeded() {
            self
        } else {
            AlgorithmKind::Graphcut
        }
    }
}

impl FromStr for AlgorithmKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| BenchError::Config(format!("unknown algorithm kind {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PaintMode {
    Paint,
    GraphcutRefine,
}

/// One interaction protocol. Written as `algorithm_assists_user(paint)`,
/// `algorithm_assists_user(graphcut_refine)`, `user_assists_algorithm`,
/// `hybrid` or `hybrid(<refiner kind>)`; the string is also the protocol id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ProtocolSpec {
    AlgorithmAssistsUser(PaintMode),
    UserAssistsAlgorithm,
    Hybrid(Option<AlgorithmKind>),
}

impl fmt::Display for ProtocolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolSpec::AlgorithmAssistsUser(PaintMode::Paint) => f.write_str("algorithm_assists_user(paint)"),
            ProtocolSpec::AlgorithmAssistsUser(PaintMode::GraphcutRefine) => {
                f.write_str("algorithm_assists_user(graphcut_refine)")
            }
            ProtocolSpec::UserAssistsAlgorithm => f.write_str("user_assists_algorithm"),
            ProtocolSpec::Hybrid(None) => f.write_str("hybrid"),
            ProtocolSpec::Hybrid(Some(k)) => write!(f, "hybrid({})", k.name()),
        }
    }
}

impl FromStr for ProtocolSpec {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once('(') {
            Some((h, rest)) => {
                let arg = rest
                    .strip_suffix(')')
                    .ok_or_else(|| BenchError::Config(format!("unbalanced parenthesis in protocol {s:?}")))?;
                (h, Some(arg))
            }
            None => (s, None),
        };
        match (head, arg) {
            ("algorithm_assists_user", None | Some("paint")) => Ok(ProtocolSpec::AlgorithmAssistsUser(PaintMode::Paint)),
            ("algorithm_assists_user", Some("graphcut_refine")) => {
                Ok(ProtocolSpec::AlgorithmAssistsUser(PaintMode::GraphcutRefine))
            }
            ("user_assists_algorithm", None) => Ok(ProtocolSpec::UserAssistsAlgorithm),
            ("hybrid", None) => Ok(ProtocolSpec::Hybrid(None)),
            ("hybrid", Some(k)) => Ok(ProtocolSpec::Hybrid(Some(k.parse()?))),
            _ => Err(BenchError::Config(format!("unknown protocol {s:?}"))),
        }
    }
}

impl TryFrom<String> for ProtocolSpec {
    type Error = BenchError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ProtocolSpec> for String {
    fn from(p: ProtocolSpec) -> String {
        p.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub id: String,
    pub kind: AlgorithmKind,
    /// Kind-specific parameters; omitted fields take their defaults.
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dataset: DatasetSource,
    pub algorithms: Vec<AlgorithmSpec>,
    pub protocols: Vec<ProtocolSpec>,
    #[serde(default)]
    pub user: SimulatedUserParams,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub rng_seed: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExternalParams {
    /// Mask manifest, relative to the config file.
    pub manifest: PathBuf,
}

/// Typed parameters of one algorithm.
#[derive(Clone, Debug)]
pub enum AlgorithmParams {
    Otsu,
    Canny(CannySegmenter),
    RegionGrow(RegionGrowRefiner),
    Forest(ForestRefiner),
    GraphCut(GraphCutParams),
    GrabCut(GrabCutParams),
    External(ExternalMasks),
}

#[derive(Clone, Debug)]
pub struct PreparedAlgorithm {
    pub id: String,
    pub kind: AlgorithmKind,
    pub params: AlgorithmParams,
}

/// A validated configuration with its dataset and external masks loaded.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub algorithms: Vec<PreparedAlgorithm>,
    pub protocols: Vec<ProtocolSpec>,
    pub samples: Vec<Sample>,
    pub user: SimulatedUserParams,
    pub rng_seed: u64,
}

impl AlgorithmParams {
    /// Parses the parameters of a built-in algorithm; `null` selects the
    /// defaults. External masks need a dataset and are loaded separately.
    pub fn parse(kind: AlgorithmKind, id: &str, v: &serde_json::Value) -> Result<Self> {
        Ok(match kind {
            AlgorithmKind::NaiveOtsu => AlgorithmParams::Otsu,
            AlgorithmKind::NaiveCanny => AlgorithmParams::Canny(parse_params(id, v)?),
            AlgorithmKind::NaiveRegiongrow => AlgorithmParams::RegionGrow(parse_params(id, v)?),
            AlgorithmKind::MlForest => AlgorithmParams::Forest(parse_params(id, v)?),
            AlgorithmKind::Graphcut => AlgorithmParams::GraphCut(parse_params(id, v)?),
            AlgorithmKind::Grabcut => AlgorithmParams::GrabCut(parse_params(id, v)?),
            AlgorithmKind::External => {
                return Err(BenchError::Config(format!("algorithm {id:?}: external masks need a manifest")))
            }
        })
    }
}

fn parse_params<T: serde::de::DeserializeOwned + Default>(id: &str, v: &serde_json::Value) -> Result<T> {
    if v.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(v.clone()).map_err(|e| BenchError::Config(format!("algorithm {id:?}: bad params: {e}")))
}

/// Whether `kind` can take part in `protocol`.
pub fn check_compatible(kind: AlgorithmKind, protocol: ProtocolSpec) -> std::result::Result<(), String> {
    match protocol {
        ProtocolSpec::AlgorithmAssistsUser(_) if !kind.is_automatic() => {
            Err(format!("{} needs seeds and cannot start {protocol}", kind.name()))
        }
        ProtocolSpec::UserAssistsAlgorithm if !kind.is_seeded() => {
            Err(format!("{} cannot segment from seeds for {protocol}", kind.name()))
        }
        ProtocolSpec::Hybrid(Some(r)) if !r.is_seeded() => Err(format!("{} cannot refine from seeds", r.name())),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        match read_json(path) {
            Err(BenchError::Json { path, source }) => Err(BenchError::Config(format!("{}: {source}", path.display()))),
            other => other,
        }
    }

    /// Checks structure, parses parameters and loads the images. Relative
    /// paths resolve against `base_dir`.
    pub fn prepare(&self, base_dir: &Path) -> Result<Prepared> {
        if self.algorithms.is_empty() {
            return Err(BenchError::Config("at least one algorithm is required".into()));
        }
        if self.protocols.is_empty() {
            return Err(BenchError::Config("at least one protocol is required".into()));
        }
        let mut ids = BTreeSet::new();
        for a in &self.algorithms {
            if a.id.is_empty() || !ids.insert(a.id.as_str()) {
                return Err(BenchError::Config(format!("algorithm ids must be unique and nonempty: {:?}", a.id)));
            }
        }
        let mut protos = BTreeSet::new();
        for p in &self.protocols {
            if !protos.insert(*p) {
                return Err(BenchError::Config(format!("duplicate protocol {p}")));
            }
        }
        let u = &self.user;
        if !(u.target_iou > 0.0 && u.target_iou <= 1.0) {
            return Err(BenchError::Config("user.target_iou must be in (0, 1]".into()));
        }
        if u.brush_radius == 0 {
            return Err(BenchError::Config("user.brush_radius must be >= 1".into()));
        }
        if !(u.seconds_per_interaction >= 0.0 && u.seconds_per_interaction.is_finite()) {
            return Err(BenchError::Config("user.seconds_per_interaction must be finite and >= 0".into()));
        }
        for a in &self.algorithms {
            for &p in &self.protocols {
                check_compatible(a.kind, p).map_err(|e| BenchError::Config(format!("algorithm {:?}: {e}", a.id)))?;
            }
        }
        let samples = match &self.dataset {
            DatasetSource::Path(p) => load_dataset(base_dir.join(p))?,
            DatasetSource::Synthetic(spec) => generate(spec)?,
            DatasetSource::Preset(name) => generate(
                &SyntheticSpec::preset(name).ok_or_else(|| BenchError::Config(format!("unknown preset {name:?}")))?,
            )?,
        };
        if samples.is_empty() {
            return Err(BenchError::Config("dataset has no images".into()));
        }
        let algorithms = self
            .algorithms
            .iter()
            .map(|a| {
                let params = match a.kind {
                    AlgorithmKind::External => {
                        let p: ExternalParams = parse_params(&a.id, &a.params)?;
                        let path = base_dir.join(&p.manifest);
                        let manifest: ExternalMaskManifest = read_json(&path)?;
                        let dir = path.parent().unwrap_or(Path::new("."));
                        AlgorithmParams::External(load_external_masks(&manifest, dir, &samples)?)
                    }
                    kind => AlgorithmParams::parse(kind, &a.id, &a.params)?,
                };
                Ok(PreparedAlgorithm {
                    id: a.id.clone(),
                    kind: a.kind,
                    params,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Prepared {
            algorithms,
            protocols: self.protocols.clone(),
            samples,
            user: self.user.clone(),
            rng_seed: self.rng_seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn protocol_strings_round_trip() {
        for s in [
            "algorithm_assists_user(paint)",
            "algorithm_assists_user(graphcut_refine)",
            "user_assists_algorithm",
            "hybrid",
            "hybrid(grabcut)",
        ] {
            assert_eq!(s.parse::<ProtocolSpec>().unwrap().to_string(), s);
        }
        assert_eq!(
            "algorithm_assists_user".parse::<ProtocolSpec>().unwrap(),
            ProtocolSpec::AlgorithmAssistsUser(PaintMode::Paint)
        );
        for bad in ["hybrid(", "hybrid(svm)", "paint", "user_assists_algorithm(x)"] {
            assert!(bad.parse::<ProtocolSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn compatibility() {
        use AlgorithmKind::*;
        let aau = ProtocolSpec::AlgorithmAssistsUser(PaintMode::Paint);
        assert!(check_compatible(NaiveOtsu, aau).is_ok());
        assert!(check_compatible(Graphcut, aau).is_err());
        assert!(check_compatible(NaiveOtsu, ProtocolSpec::UserAssistsAlgorithm).is_err());
        assert!(check_compatible(NaiveRegiongrow, ProtocolSpec::UserAssistsAlgorithm).is_ok());
        assert!(check_compatible(External, ProtocolSpec::Hybrid(None)).is_ok());
        assert!(check_compatible(Graphcut, ProtocolSpec::Hybrid(Some(NaiveCanny))).is_err());
        assert_eq!(NaiveCanny.default_refiner(), Graphcut);
        assert_eq!(MlForest.default_refiner(), MlForest);
    }

    fn config(json: &str) -> Result<Prepared> {
        let cfg: RunConfig = serde_json::from_str(json).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.prepare(Path::new("."))
    }

    #[test]
    fn config_errors() {
        let ok = r#"{"dataset":{"preset":"bimodal_disk"},"algorithms":[{"id":"o","kind":"naive_otsu"}],"protocols":["hybrid"]}"#;
        assert_eq!(config(ok).unwrap().samples.len(), 10);
        for bad in [
            r#"{"dataset":{"preset":"bimodal_disk"},"algorithms":[],"protocols":["hybrid"]}"#,
            r#"{"dataset":{"preset":"bimodal_disk"},"algorithms":[{"id":"o","kind":"naive_otsu"}],"protocols":[]}"#,
            r#"{"dataset":{"preset":"bimodal_disk"},"algorithms":[{"id":"o","kind":"naive_otsu"},{"id":"o","kind":"graphcut"}],"protocols":["hybrid"]}"#,
            r#"{"dataset":{"preset":"nope"},"algorithms":[{"id":"o","kind":"naive_otsu"}],"protocols":["hybrid"]}"#,
            r#"{"dataset":{"preset":"bimodal_disk"},"algorithms":[{"id":"g","kind":"graphcut"}],"protocols":["algorithm_assists_user(paint)"]}"#,
            r#"{"dataset":{"preset":"bimodal_disk"},"algorithms":[{"id":"r","kind":"naive_regiongrow","params":{"tau":"x"}}],"protocols":["hybrid"]}"#,
            r#"{"dataset":{"preset":"bimodal_disk"},"algorithms":[{"id":"o","kind":"naive_otsu"}],"protocols":["hybrid"],"user":{"target_iou":0}}"#,
        ] {
            assert!(matches!(config(bad), Err(BenchError::Config(_))), "{bad}");
        }
    }

    #[test]
    fn typed_params() {
        let p = config(
            r#"{"dataset":{"preset":"bimodal_disk"},"algorithms":[{"id":"r","kind":"naive_regiongrow","params":{"tau":7}}],"protocols":["user_assists_algorithm"]}"#,
        )
        .unwrap();
        assert!(matches!(p.algorithms[0].params, AlgorithmParams::RegionGrow(RegionGrowRefiner { tau }) if tau == 7.0));
    }
}
