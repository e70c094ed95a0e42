//! Campaign execution: repeated stratified cross-validation per dataset
//! and classifier kind, per-fold hyperparameter tuning, training of the
//! requested variants, and persistence of the per-fold results.
//!
//! Every random stream is derived from the master seed and task indices,
//! so outcomes are independent of worker count and rerunning a config
//! reproduces the results file byte for byte (with timings off).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::time::Instant;

use rayon::prelude::*;
use rrc_core::{
    build_scm, compute_losses, normalize_features, stratified_kfold, tune_knn_k, tune_scm,
    BaseSpec, ConfusionCounts, Dataset, LossReport, ScoreFamily, SeededRng, DEFAULT_TOL,
};
use serde::Serialize;
use thiserror::Error;

use crate::cfs::cfs_select;
use crate::config::{BaseKind, CampaignConfig, Variant};
use crate::ingest;

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("no dataset could be loaded")]
    NothingToRun,
}

/// One scored (dataset, kind, variant, repetition, fold) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub dataset: String,
    pub kind: String,
    pub variant: String,
    pub rep: usize,
    pub fold: usize,
    pub beta: f64,
    pub gamma: f64,
    pub k: usize,
    pub losses: LossReport,
    pub millis: u64,
}

pub const RESULT_HEADER: &str =
    "dataset,kind,variant,rep,fold,beta,gamma,K,zero_one,ma_fdr,ma_fnr,ma_f1,mi_fdr,mi_fnr,mi_f1,millis";

impl ResultRecord {
    fn write_csv_row(&self, out: &mut String) {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{}",
            self.dataset, self.kind, self.variant, self.rep, self.fold, self.beta, self.gamma,
            self.k
        );
        for v in self.losses.values() {
            let _ = write!(out, ",{}", v);
        }
        let _ = writeln!(out, ",{}", self.millis);
    }

    fn parse_csv_row(line: &str, lineno: usize) -> Result<Self, String> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 16 {
            return Err(format!("line {}: expected 16 fields, found {}", lineno, fields.len()));
        }
        let num = |i: usize| -> Result<f64, String> {
            fields[i]
                .parse()
                .map_err(|_| format!("line {}: bad number {:?}", lineno, fields[i]))
        };
        let int = |i: usize| -> Result<usize, String> {
            fields[i]
                .parse()
                .map_err(|_| format!("line {}: bad integer {:?}", lineno, fields[i]))
        };
        Ok(ResultRecord {
            dataset: fields[0].to_string(),
            kind: fields[1].to_string(),
            variant: fields[2].to_string(),
            rep: int(3)?,
            fold: int(4)?,
            beta: num(5)?,
            gamma: num(6)?,
            k: int(7)?,
            losses: LossReport {
                zero_one: num(8)?,
                macro_fdr: num(9)?,
                macro_fnr: num(10)?,
                macro_f1_loss: num(11)?,
                micro_fdr: num(12)?,
                micro_fnr: num(13)?,
                micro_f1_loss: num(14)?,
            },
            millis: int(15)? as u64,
        })
    }
}

pub fn records_to_csv(records: &[ResultRecord]) -> String {
    let mut out = String::from(RESULT_HEADER);
    out.push('\n');
    for r in records {
        r.write_csv_row(&mut out);
    }
    out
}

pub fn records_from_csv(text: &str) -> Result<Vec<ResultRecord>, String> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == RESULT_HEADER => {}
        _ => return Err("missing or unexpected results header".into()),
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| ResultRecord::parse_csv_row(l, i + 1))
        .collect()
}

#[derive(Debug)]
pub struct CampaignOutcome {
    pub records: Vec<ResultRecord>,
    pub failures: Vec<String>,
}

/// Stable id used in random stream derivation, independent of the order
/// variants are listed in the config.
fn variant_id(v: Variant) -> u64 {
    match v {
        Variant::Raw => 0,
        Variant::BetaScm => 1,
        Variant::TruncnormScm => 2,
    }
}

struct Task {
    ds: usize,
    set: usize,
    kind: usize,
    rep: usize,
}

/// Run the full campaign and persist results.csv plus summary.json in
/// the configured output directory.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignOutcome, CampaignError> {
    let mut failures = Vec::new();
    // (config index, data); the config index keys the random streams so
    // one bad path does not shift every later dataset's streams
    let mut sets: Vec<(usize, Dataset)> = Vec::new();
    for (i, path) in config.datasets.iter().enumerate() {
        match ingest::load_dataset(path) {
            Ok(out) => {
                if out.dropped_rows > 0 {
                    eprintln!(
                        "warning: {} dropped {} rows with missing values",
                        path.display(),
                        out.dropped_rows
                    );
                }
                if sets.iter().any(|(_, d)| d.name == out.data.name) {
                    failures.push(format!(
                        "{}: duplicate dataset name {:?}",
                        path.display(),
                        out.data.name
                    ));
                } else {
                    sets.push((i, out.data));
                }
            }
            Err(e) => failures.push(format!("{}: {}", path.display(), e)),
        }
    }
    if sets.is_empty() {
        return Err(CampaignError::NothingToRun);
    }

    let root = SeededRng::new(config.seed);
    let mut tasks = Vec::new();
    for (set, &(ds, _)) in sets.iter().enumerate() {
        for kind in 0..config.kinds.len() {
            for rep in 0..config.reps {
                tasks.push(Task { ds, set, kind, rep });
            }
        }
    }
    let run = |t: &Task| run_task(config, &root, &sets[t.set].1, t);
    let outputs: Vec<(Vec<ResultRecord>, Vec<String>)> = if config.workers <= 1 {
        tasks.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| CampaignError::Pool(e.to_string()))?;
        pool.install(|| tasks.par_iter().map(run).collect())
    };
    let mut records = Vec::new();
    for (recs, fails) in outputs {
        records.extend(recs);
        failures.extend(fails);
    }

    fs::create_dir_all(&config.output)?;
    fs::write(config.output.join("results.csv"), records_to_csv(&records))?;
    fs::write(
        config.output.join("summary.json"),
        summary_json(config, &sets, &records, &failures),
    )?;
    Ok(CampaignOutcome { records, failures })
}

fn run_task(
    config: &CampaignConfig,
    root: &SeededRng,
    data: &Dataset,
    task: &Task,
) -> (Vec<ResultRecord>, Vec<String>) {
    let kind = config.kinds[task.kind];
    let (ds, ki, rep) = (task.ds as u64, task.kind as u64, task.rep as u64);
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut split_rng = root.derive(&[0, ds, rep]);
    let split = match stratified_kfold(
        data.labels(),
        data.class_count(),
        config.folds,
        &mut split_rng,
    ) {
        Ok(s) => s,
        Err(e) => {
            failures.push(format!("{} rep {}: {}", data.name, task.rep, e));
            return (records, failures);
        }
    };
    for (fold, (train_rows, test_rows)) in split.iter().enumerate() {
        if test_rows.is_empty() {
            continue;
        }
        let (mut train, scaler) = normalize_features(&data.select(train_rows));
        let mut test = scaler.transform(&data.select(test_rows));
        if config.feature_selection && train.dims() >= 2 {
            let cols = cfs_select(&train);
            train = train.select_features(&cols);
            test = test.select_features(&cols);
        }
        let tune_rng = root.derive(&[1, ds, ki, rep, fold as u64]);
        let scm_specs: Vec<(usize, BaseSpec)> = if kind == BaseKind::Knn {
            config.ks.iter().map(|&k| (k, BaseSpec::Knn { k })).collect()
        } else {
            vec![(0, kind.spec(0))]
        };
        for &variant in &config.variants {
            let started = Instant::now();
            let bank_rng = root.derive(&[2, ds, ki, rep, fold as u64, variant_id(variant)]);
            match score_variant(config, kind, variant, &train, &test, &scm_specs, &tune_rng, bank_rng)
            {
                Ok((beta, gamma, k, losses)) => records.push(ResultRecord {
                    dataset: data.name.clone(),
                    kind: kind.name().to_string(),
                    variant: variant.name().to_string(),
                    rep: task.rep,
                    fold,
                    beta,
                    gamma,
                    k,
                    losses,
                    millis: if config.timings {
                        started.elapsed().as_millis() as u64
                    } else {
                        0
                    },
                }),
                Err(message) => failures.push(format!(
                    "{} {} {} rep {} fold {}: {}",
                    data.name,
                    kind.name(),
                    variant.name(),
                    task.rep,
                    fold,
                    message
                )),
            }
        }
    }
    (records, failures)
}

#[allow(clippy::too_many_arguments)]
fn score_variant(
    config: &CampaignConfig,
    kind: BaseKind,
    variant: Variant,
    train: &Dataset,
    test: &Dataset,
    scm_specs: &[(usize, BaseSpec)],
    tune_rng: &SeededRng,
    mut bank_rng: SeededRng,
) -> Result<(f64, f64, usize, LossReport), String> {
    let mut counts = ConfusionCounts::new(train.class_count());
    match variant {
        Variant::Raw => {
            let (spec, k) = if kind == BaseKind::Knn {
                let (k, _) = tune_knn_k(train, &config.ks, tune_rng).ok_or("no viable K")?;
                (BaseSpec::Knn { k }, k)
            } else {
                (kind.spec(0), 0)
            };
            let model = spec.train(train).map_err(|e| e.to_string())?;
            for i in 0..test.len() {
                let pred = model.predict(test.row(i)).map_err(|e| e.to_string())?;
                counts.record(test.label(i), pred);
            }
            Ok((0.0, 0.0, k, compute_losses(&counts)))
        }
        Variant::BetaScm | Variant::TruncnormScm => {
            let families: Vec<(f64, ScoreFamily)> = if variant == Variant::BetaScm {
                vec![(0.0, ScoreFamily::Beta)]
            } else {
                config
                    .gammas
                    .iter()
                    .map(|&g| (g, ScoreFamily::Normal { gamma: g }))
                    .collect()
            };
            let choice = tune_scm(train, scm_specs, &families, &config.betas, DEFAULT_TOL, tune_rng)
                .ok_or("no viable grid cell")?;
            let spec = if kind == BaseKind::Knn {
                BaseSpec::Knn { k: choice.k }
            } else {
                kind.spec(0)
            };
            let family = if variant == Variant::BetaScm {
                ScoreFamily::Beta
            } else {
                ScoreFamily::Normal {
                    gamma: choice.gamma,
                }
            };
            let model = build_scm(&spec, train, family, choice.beta, DEFAULT_TOL, &mut bank_rng)
                .map_err(|e| e.to_string())?;
            for i in 0..test.len() {
                let pred = model.predict(test.row(i)).map_err(|e| e.to_string())?;
                counts.record(test.label(i), pred);
            }
            Ok((choice.beta, choice.gamma, choice.k, compute_losses(&counts)))
        }
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    seed: u64,
    reps: usize,
    folds: usize,
    datasets: Vec<&'a str>,
    kinds: Vec<&'static str>,
    variants: Vec<&'static str>,
    records: usize,
    failures: &'a [String],
    mean_zero_one: BTreeMap<String, f64>,
}

fn summary_json(
    config: &CampaignConfig,
    sets: &[(usize, Dataset)],
    records: &[ResultRecord],
    failures: &[String],
) -> String {
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for r in records {
        let entry = sums.entry(format!("{}/{}", r.kind, r.variant)).or_insert((0.0, 0));
        entry.0 += r.losses.zero_one;
        entry.1 += 1;
    }
    let summary = Summary {
        seed: config.seed,
        reps: config.reps,
        folds: config.folds,
        datasets: sets.iter().map(|(_, d)| d.name.as_str()).collect(),
        kinds: config.kinds.iter().map(|k| k.name()).collect(),
        variants: config.variants.iter().map(|v| v.name()).collect(),
        records: records.len(),
        failures,
        mean_zero_one: sums
            .into_iter()
            .map(|(k, (s, n))| (k, s / n as f64))
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&summary).expect("serializable summary");
    text.push('\n');
    text
}
