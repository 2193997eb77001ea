use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::classify::ClassifierSpec;
use crate::corpus::synthetic::SyntheticSpec;
use crate::corpus::{default_schedule, DependencyKind, IssueSchema};
use crate::error::{Error, Result};
use crate::harness::{CostMode, Scenario, DEFAULT_EPSILON_F1, DEFAULT_EPSILON_ROI};
use crate::roi::CostParameters;

/// Where the pair corpus comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetConfig {
    /// An issue-tracker CSV export; pairs are mined from its links.
    Issues {
        path: PathBuf,
        #[serde(default = "IssueSchema::bugzilla")]
        schema: IssueSchema,
        #[serde(default = "default_kind")]
        dependency_kind: DependencyKind,
        #[serde(default = "default_min_words")]
        min_words: usize,
    },
    /// A pair corpus CSV written by `pairs`.
    Corpus { path: PathBuf },
    /// A generated corpus.
    Synthetic {
        #[serde(default)]
        spec: SyntheticSpec,
    },
}

fn default_kind() -> DependencyKind {
    DependencyKind::Requires
}

fn default_min_words() -> usize {
    3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    pub seed: Option<u64>,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default = "default_schedule")]
    pub fractions: Vec<f64>,
}

fn default_test_fraction() -> f64 {
    0.2
}

/// Predictions produced outside the toolkit, one file per training fraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalConfig {
    pub label: String,
    /// Glob; each file name carries its fraction, e.g. `preds_0.40.csv`.
    pub predictions: String,
}

/// A cost-parameter block: a preset, explicit parameters, or either with
/// individual fields overridden.
struct ParameterSource<'a> {
    preset: &'a Option<String>,
    parameters: &'a Option<CostParameters>,
    overrides: &'a serde_json::Map<String, Value>,
}

impl ParameterSource<'_> {
    fn resolve(&self, field: &str, base: Option<&CostParameters>) -> Result<CostParameters> {
        let start = match (self.preset, self.parameters, base) {
            (Some(_), Some(_), _) => {
                return Err(Error::config(field, "give either `preset` or `parameters`, not both"));
            }
            (Some(name), None, _) => CostParameters::preset(name).ok_or_else(|| {
                Error::config(
                    format!("{field}.preset"),
                    format!("unknown preset `{name}`; known: {}", CostParameters::PRESET_NAMES.join(", ")),
                )
            })?,
            (None, Some(p), _) => p.clone(),
            (None, None, Some(b)) => b.clone(),
            (None, None, None) => {
                return Err(Error::config(field, "missing `preset` or `parameters`"));
            }
        };
        if self.overrides.is_empty() {
            return Ok(start);
        }
        let mut value = serde_json::to_value(&start)?;
        let map = value.as_object_mut().expect("parameters serialize to an object");
        for (k, v) in self.overrides {
            map.insert(k.clone(), v.clone());
        }
        serde_json::from_value(value).map_err(|e| Error::config(format!("{field}.overrides"), e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    /// Starts from the baseline economics when no preset or parameters are given.
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub parameters: Option<CostParameters>,
    #[serde(default)]
    pub overrides: serde_json::Map<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomicsConfig {
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub parameters: Option<CostParameters>,
    #[serde(default)]
    pub overrides: serde_json::Map<String, Value>,
    #[serde(default)]
    pub cost_mode: CostMode,
    #[serde(default)]
    pub scenarios: Vec<ScenarioConfig>,
    #[serde(default = "default_eps_f1")]
    pub epsilon_f1: f64,
    #[serde(default = "default_eps_roi")]
    pub epsilon_roi: f64,
}

fn default_eps_f1() -> f64 {
    DEFAULT_EPSILON_F1
}

fn default_eps_roi() -> f64 {
    DEFAULT_EPSILON_ROI
}

/// Everything one run needs. Relative paths resolve against the directory
/// of the configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: DatasetConfig,
    pub sampling: SamplingConfig,
    /// Built-in classifier; omitted when only external predictions are used.
    #[serde(default)]
    pub classifier: Option<ClassifierSpec>,
    #[serde(default)]
    pub external: Vec<ExternalConfig>,
    pub economics: EconomicsConfig,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub fractions: Option<Vec<f64>>,
    pub external_preds: Option<String>,
}

/// Label used for `--external-preds` when the file declares no external entry.
pub const DEFAULT_EXTERNAL_LABEL: &str = "external";

/// A validated configuration with absolute paths and resolved economics.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub config: RunConfig,
    pub seed: u64,
    pub parameters: CostParameters,
    pub scenarios: Vec<Scenario>,
    pub output: PathBuf,
    pub config_path: PathBuf,
    pub config_bytes: Vec<u8>,
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    serde_json::from_str(text).map_err(|e| Error::config("<config>", e.to_string()))
}

fn anchor(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn check_ratio(field: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0 && x < 1.0) {
        return Err(Error::config(field, format!("must lie in (0, 1), got {x}")));
    }
    Ok(())
}

/// Parse, apply overrides, and validate. Paths must exist.
pub fn load(path: &Path, overrides: &Overrides) -> Result<Resolved> {
    let bytes = std::fs::read(path).map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| Error::config("<config>", "file is not UTF-8"))?;
    let mut config = parse_config(text)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();

    if let Some(seed) = overrides.seed {
        config.sampling.seed = Some(seed);
    }
    if let Some(f) = &overrides.fractions {
        config.sampling.fractions = f.clone();
    }
    if let Some(glob) = &overrides.external_preds {
        let glob = std::path::absolute(glob)
            .map_err(|e| Error::config("--external-preds", e.to_string()))?
            .to_string_lossy()
            .into_owned();
        match config.external.as_mut_slice() {
            [] => config.external.push(ExternalConfig {
                label: DEFAULT_EXTERNAL_LABEL.into(),
                predictions: glob,
            }),
            [only] => only.predictions = glob,
            _ => {
                return Err(Error::config(
                    "--external-preds",
                    "config lists several external sources; edit the file instead",
                ))
            }
        }
    }

    let seed = config
        .sampling
        .seed
        .ok_or_else(|| Error::config("sampling.seed", "required; give it in the config or with --seed"))?;
    check_ratio("sampling.test_fraction", config.sampling.test_fraction)?;
    let fractions = &config.sampling.fractions;
    if fractions.is_empty() {
        return Err(Error::config("sampling.fractions", "must not be empty"));
    }
    for (i, &f) in fractions.iter().enumerate() {
        check_ratio(&format!("sampling.fractions[{i}]"), f)?;
        if i > 0 && f <= fractions[i - 1] {
            return Err(Error::config("sampling.fractions", "must strictly increase"));
        }
        if f > 1.0 - config.sampling.test_fraction + 1e-9 {
            return Err(Error::config(
                format!("sampling.fractions[{i}]"),
                format!("{f} leaves no room for the test fraction {}", config.sampling.test_fraction),
            ));
        }
    }

    match &mut config.dataset {
        DatasetConfig::Issues { path, .. } | DatasetConfig::Corpus { path } => {
            *path = anchor(&base, path);
            if !path.is_file() {
                return Err(Error::config("dataset.path", format!("{} does not exist", path.display())));
            }
        }
        DatasetConfig::Synthetic { .. } => {}
    }
    for (i, ext) in config.external.iter_mut().enumerate() {
        if ext.label.trim().is_empty() {
            return Err(Error::config(format!("external[{i}].label"), "must not be empty"));
        }
        let pattern = anchor(&base, Path::new(&ext.predictions));
        ext.predictions = pattern.to_string_lossy().into_owned();
        glob::Pattern::new(&ext.predictions)
            .map_err(|e| Error::config(format!("external[{i}].predictions"), e.to_string()))?;
    }
    if config.classifier.is_none() && config.external.is_empty() {
        config.classifier = Some(ClassifierSpec::default());
    }
    if let Some(spec) = &config.classifier {
        if !(spec.alpha.is_finite() && spec.alpha > 0.0) {
            return Err(Error::config("classifier.alpha", "must be positive"));
        }
        if spec.forest.n_trees == 0 || spec.forest.min_samples_leaf == 0 || spec.forest.max_depth == Some(0) {
            return Err(Error::config("classifier.forest", "n_trees, min_samples_leaf and max_depth must be positive"));
        }
    }

    let economics = &config.economics;
    for (field, eps) in [("economics.epsilon_f1", economics.epsilon_f1), ("economics.epsilon_roi", economics.epsilon_roi)] {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::config(field, "must be positive"));
        }
    }
    let parameters = ParameterSource {
        preset: &economics.preset,
        parameters: &economics.parameters,
        overrides: &economics.overrides,
    }
    .resolve("economics", None)?;
    parameters
        .validate()
        .map_err(|e| Error::config("economics", e.to_string()))?;
    let mut scenarios = Vec::new();
    for (i, s) in economics.scenarios.iter().enumerate() {
        let field = format!("economics.scenarios[{i}]");
        let p = ParameterSource {
            preset: &s.preset,
            parameters: &s.parameters,
            overrides: &s.overrides,
        }
        .resolve(&field, Some(&parameters))?;
        p.validate().map_err(|e| Error::config(&field, e.to_string()))?;
        if scenarios.iter().any(|x: &Scenario| x.name == s.name) {
            return Err(Error::config(format!("{field}.name"), format!("duplicate scenario `{}`", s.name)));
        }
        scenarios.push(Scenario {
            name: s.name.clone(),
            parameters: p,
        });
    }

    let output = match (&overrides.out, &config.output) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => anchor(&base, o),
        (None, None) => return Err(Error::config("output", "give an output directory in the config or with --out")),
    };
    config.output = Some(output.clone());

    Ok(Resolved {
        config,
        seed,
        parameters,
        scenarios,
        output,
        config_path: path.to_path_buf(),
        config_bytes: bytes,
    })
}

/// Fraction encoded in a prediction file name: the last number in the stem,
/// read as a percentage when above 1 (`preds_0.40.csv`, `rf-40.csv`).
pub fn fraction_from_file_name(path: &Path) -> Option<f64> {
    let stem = path.file_stem()?.to_str()?;
    let bytes = stem.as_bytes();
    let end = bytes.iter().rposition(u8::is_ascii_digit)? + 1;
    let mut start = end;
    while start > 0 && (bytes[start - 1].is_ascii_digit() || bytes[start - 1] == b'.') {
        start -= 1;
    }
    let token = stem[start..end].trim_start_matches('.');
    let v: f64 = token.parse().ok()?;
    let f = if v > 1.0 { v / 100.0 } else { v };
    (f > 0.0 && f < 1.0).then_some(f)
}
