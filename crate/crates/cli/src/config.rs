//! Campaign configuration: line-oriented `key=value` (repeated keys make
//! lists) or a JSON object with the same field names.

use std::path::PathBuf;

use rrc_core::BaseSpec;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("missing required key {0:?}")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
}

/// Base classifier kinds selectable in a campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseKind {
    KdeBayes,
    Knn,
    GainRatioTree,
    NearestCentroid,
}

impl BaseKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::KdeBayes => "kde",
            Self::Knn => "knn",
            Self::GainRatioTree => "tree",
            Self::NearestCentroid => "centroid",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "kde" => Some(Self::KdeBayes),
            "knn" => Some(Self::Knn),
            "tree" => Some(Self::GainRatioTree),
            "centroid" => Some(Self::NearestCentroid),
            _ => None,
        }
    }

    /// Spec for this kind; `k` is only meaningful for `Knn`.
    pub fn spec(self, k: usize) -> BaseSpec {
        match self {
            Self::KdeBayes => BaseSpec::KdeBayes,
            Self::Knn => BaseSpec::Knn { k },
            Self::GainRatioTree => BaseSpec::GainRatioTree,
            Self::NearestCentroid => BaseSpec::NearestCentroid,
        }
    }
}

/// What gets trained and scored per base classifier: the plain model, or
/// its corrected version over one of the two reference score families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Raw,
    BetaScm,
    TruncnormScm,
}

pub const ALL_VARIANTS: [Variant; 3] = [Variant::Raw, Variant::BetaScm, Variant::TruncnormScm];

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Self::Raw => "raw",
            Self::BetaScm => "beta-scm",
            Self::TruncnormScm => "truncnorm-scm",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "raw" => Some(Self::Raw),
            "beta-scm" => Some(Self::BetaScm),
            "truncnorm-scm" => Some(Self::TruncnormScm),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub datasets: Vec<PathBuf>,
    pub kinds: Vec<BaseKind>,
    pub variants: Vec<Variant>,
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub ks: Vec<usize>,
    pub reps: usize,
    pub folds: usize,
    pub seed: u64,
    pub output: PathBuf,
    pub feature_selection: bool,
    pub workers: usize,
    /// Record wall-clock millis per record. Off by default so reruns with
    /// the same seed are byte-identical.
    pub timings: bool,
}

pub fn default_betas() -> Vec<f64> {
    (1..=21).map(|b| b as f64).collect()
}

pub fn default_gammas() -> Vec<f64> {
    (1..=10).map(|g| g as f64 / 10.0).collect()
}

pub fn default_ks() -> Vec<usize> {
    (1..=11).collect()
}

/// All optional so both formats share the fill-in-defaults step.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    datasets: Vec<String>,
    #[serde(default)]
    kinds: Vec<String>,
    #[serde(default)]
    variants: Vec<String>,
    betas: Option<Vec<f64>>,
    gammas: Option<Vec<f64>>,
    ks: Option<Vec<usize>>,
    reps: Option<usize>,
    folds: Option<usize>,
    seed: Option<u64>,
    output: Option<String>,
    cfs: Option<bool>,
    workers: Option<usize>,
    timings: Option<bool>,
}

fn parse_bool(value: &str, line: usize) -> Result<bool, ConfigError> {
    match value {
        "on" | "true" | "yes" => Ok(true),
        "off" | "false" | "no" => Ok(false),
        _ => Err(ConfigError::Parse {
            line,
            message: format!("expected on/off, got {:?}", value),
        }),
    }
}

fn parse_num<T: std::str::FromStr>(value: &str, line: usize) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::Parse {
        line,
        message: format!("bad value {:?}", value),
    })
}

fn parse_keyvalue(text: &str) -> Result<RawConfig, ConfigError> {
    let mut raw = RawConfig::default();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        let lineno = i + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
            line: lineno,
            message: "expected key=value".into(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "dataset" => raw.datasets.push(value.to_string()),
            "kind" => raw.kinds.push(value.to_string()),
            "variant" => raw.variants.push(value.to_string()),
            "beta" => raw
                .betas
                .get_or_insert_with(Vec::new)
                .push(parse_num(value, lineno)?),
            "gamma" => raw
                .gammas
                .get_or_insert_with(Vec::new)
                .push(parse_num(value, lineno)?),
            "k" => raw
                .ks
                .get_or_insert_with(Vec::new)
                .push(parse_num(value, lineno)?),
            "reps" => raw.reps = Some(parse_num(value, lineno)?),
            "folds" => raw.folds = Some(parse_num(value, lineno)?),
            "seed" => raw.seed = Some(parse_num(value, lineno)?),
            "output" => raw.output = Some(value.to_string()),
            "cfs" => raw.cfs = Some(parse_bool(value, lineno)?),
            "workers" => raw.workers = Some(parse_num(value, lineno)?),
            "timings" => raw.timings = Some(parse_bool(value, lineno)?),
            _ => {
                return Err(ConfigError::Parse {
                    line: lineno,
                    message: format!("unknown key {:?}", key),
                })
            }
        }
    }
    Ok(raw)
}

fn finish(raw: RawConfig) -> Result<CampaignConfig, ConfigError> {
    if raw.datasets.is_empty() {
        return Err(ConfigError::Missing("dataset"));
    }
    if raw.kinds.is_empty() {
        return Err(ConfigError::Missing("kind"));
    }
    let seed = raw.seed.ok_or(ConfigError::Missing("seed"))?;
    let kinds = raw
        .kinds
        .iter()
        .map(|k| {
            BaseKind::parse(k).ok_or_else(|| ConfigError::Invalid(format!("unknown kind {:?}", k)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let variants = if raw.variants.is_empty() {
        ALL_VARIANTS.to_vec()
    } else {
        raw.variants
            .iter()
            .map(|v| {
                Variant::parse(v)
                    .ok_or_else(|| ConfigError::Invalid(format!("unknown variant {:?}", v)))
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    let config = CampaignConfig {
        datasets: raw.datasets.into_iter().map(PathBuf::from).collect(),
        kinds,
        variants,
        betas: raw.betas.unwrap_or_else(default_betas),
        gammas: raw.gammas.unwrap_or_else(default_gammas),
        ks: raw.ks.unwrap_or_else(default_ks),
        reps: raw.reps.unwrap_or(10),
        folds: raw.folds.unwrap_or(5),
        seed,
        output: PathBuf::from(raw.output.unwrap_or_else(|| "results".into())),
        feature_selection: raw.cfs.unwrap_or(false),
        workers: raw.workers.unwrap_or(1).max(1),
        timings: raw.timings.unwrap_or(false),
    };
    if config.reps == 0 {
        return Err(ConfigError::Invalid("reps must be at least 1".into()));
    }
    if config.folds < 2 {
        return Err(ConfigError::Invalid("folds must be at least 2".into()));
    }
    if config.betas.is_empty() || config.betas.iter().any(|b| !b.is_finite() || *b <= 0.0) {
        return Err(ConfigError::Invalid("beta grid must be positive".into()));
    }
    if config.gammas.is_empty()
        || config.gammas.iter().any(|g| !(*g > 0.0 && *g <= 1.0))
    {
        return Err(ConfigError::Invalid("gamma grid must lie in (0, 1]".into()));
    }
    if config.ks.is_empty() || config.ks.contains(&0) {
        return Err(ConfigError::Invalid("k grid must be positive".into()));
    }
    Ok(config)
}

/// Parse either format; JSON is detected by a leading `{`.
pub fn parse_config(text: &str) -> Result<CampaignConfig, ConfigError> {
    let raw = if text.trim_start().starts_with('{') {
        serde_json::from_str(text)?
    } else {
        parse_keyvalue(text)?
    };
    finish(raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
# two sets, one kind
dataset = a.arff
dataset = b.csv
kind = centroid
seed = 42
";

    #[test]
    fn keyvalue_with_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.datasets.len(), 2);
        assert_eq!(c.kinds, vec![BaseKind::NearestCentroid]);
        assert_eq!(c.variants, ALL_VARIANTS.to_vec());
        assert_eq!(c.betas.len(), 21);
        assert_eq!(c.betas[0], 1.0);
        assert_eq!(c.betas[20], 21.0);
        assert_eq!(c.gammas.len(), 10);
        assert_eq!(c.gammas[0], 0.1);
        assert_eq!(c.gammas[9], 1.0);
        assert_eq!(c.ks, (1..=11).collect::<Vec<_>>());
        assert_eq!((c.reps, c.folds, c.seed), (10, 5, 42));
        assert!(!c.feature_selection);
        assert!(!c.timings);
        assert_eq!(c.workers, 1);
    }

    #[test]
    fn seed_is_mandatory() {
        let text = "dataset = a.arff\nkind = knn\n";
        match parse_config(text).unwrap_err() {
            ConfigError::Missing(key) => assert_eq!(key, "seed"),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn repeated_keys_build_grids() {
        let text = "\
dataset = a.arff
kind = knn
variant = raw
variant = truncnorm-scm
beta = 1
beta = 5
gamma = 0.5
k = 3
seed = 7
reps = 2
folds = 3
cfs = on
workers = 4
timings = on
output = out
";
        let c = parse_config(text).unwrap();
        assert_eq!(c.betas, vec![1.0, 5.0]);
        assert_eq!(c.gammas, vec![0.5]);
        assert_eq!(c.ks, vec![3]);
        assert_eq!(c.variants, vec![Variant::Raw, Variant::TruncnormScm]);
        assert!(c.feature_selection && c.timings);
        assert_eq!(c.workers, 4);
        assert_eq!(c.output, PathBuf::from("out"));
    }

    #[test]
    fn json_form_accepted() {
        let text = r#"{
            "datasets": ["a.arff"],
            "kinds": ["tree", "kde"],
            "seed": 11,
            "gammas": [0.2, 0.4],
            "cfs": true
        }"#;
        let c = parse_config(text).unwrap();
        assert_eq!(c.kinds, vec![BaseKind::GainRatioTree, BaseKind::KdeBayes]);
        assert_eq!(c.gammas, vec![0.2, 0.4]);
        assert!(c.feature_selection);
    }

    #[test]
    fn bad_values_are_rejected() {
        assert!(matches!(
            parse_config("dataset=a\nkind=knn\nseed=1\ngamma=1.5\n"),
            Err(ConfigError::Invalid(_))
        ));
        assert!(matches!(
            parse_config("dataset=a\nkind=svm\nseed=1\n"),
            Err(ConfigError::Invalid(_))
        ));
        assert!(matches!(
            parse_config("dataset=a\nkind=knn\nseed=1\nfolds=1\n"),
            Err(ConfigError::Invalid(_))
        ));
        match parse_config("dataset=a\nbogus\n").unwrap_err() {
            ConfigError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {:?}", other),
        }
        assert!(parse_config("{\"datasets\": [\"a\"], \"oops\": 1}").is_err());
    }
}
