//! Loss criteria, stratified cross-validation, and hyperparameter search.

use std::cmp::Ordering;

use thiserror::Error;

use crate::baseclf::{BaseSpec, ClassifierError};
use crate::dataset::Dataset;
use crate::rng::SeededRng;
use crate::rrc::ScoreFamily;
use crate::scm::{collect_bank_supports, corrected_posterior, gaussian_weights, local_confusion, ScmError};
use crate::support::decide;

/// Folds used by the inner cross-validation of the grid search.
pub const INNER_FOLDS: usize = 5;

#[derive(Debug, Error)]
pub enum FoldError {
    #[error("cannot split {rows} rows into {folds} folds")]
    BadFoldCount { folds: usize, rows: usize },
}

/// Integer confusion matrix, rows by true class, columns by predicted class.
#[derive(Debug, Clone)]
pub struct ConfusionCounts {
    class_count: usize,
    counts: Vec<usize>,
    total: usize,
}

impl ConfusionCounts {
    pub fn new(class_count: usize) -> Self {
        Self {
            class_count,
            counts: vec![0; class_count * class_count],
            total: 0,
        }
    }

    pub fn record(&mut self, truth: usize, predicted: usize) {
        self.counts[truth * self.class_count + predicted] += 1;
        self.total += 1;
    }

    pub fn count(&self, truth: usize, predicted: usize) -> usize {
        self.counts[truth * self.class_count + predicted]
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn total(&self) -> usize {
        self.total
    }
}

/// The seven loss criteria, all in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport {
    pub zero_one: f64,
    pub macro_fdr: f64,
    pub macro_fnr: f64,
    pub macro_f1_loss: f64,
    pub micro_fdr: f64,
    pub micro_fnr: f64,
    pub micro_f1_loss: f64,
}

/// Column names for the criteria, in `LossReport::values` order.
pub const LOSS_NAMES: [&str; 7] = [
    "zero_one", "ma_fdr", "ma_fnr", "ma_f1", "mi_fdr", "mi_fnr", "mi_f1",
];

impl LossReport {
    pub fn values(&self) -> [f64; 7] {
        [
            self.zero_one,
            self.macro_fdr,
            self.macro_fnr,
            self.macro_f1_loss,
            self.micro_fdr,
            self.micro_fnr,
            self.micro_f1_loss,
        ]
    }
}

/// Macro losses average per-class precision, recall, and F1 complements
/// over classes present in the fold; a present class the classifier never
/// predicts contributes precision 0. Micro losses pool the integer counts
/// first, which for single-label data makes them bit-identical to the
/// zero-one loss.
pub fn compute_losses(c: &ConfusionCounts) -> LossReport {
    assert!(c.total > 0, "empty confusion matrix");
    let m = c.class_count;
    let mut tp_sum = 0usize;
    let mut fp_sum = 0usize;
    let mut fn_sum = 0usize;
    let mut present = 0usize;
    let mut prec_sum = 0.0f64;
    let mut rec_sum = 0.0f64;
    let mut f1_sum = 0.0f64;
    for class in 0..m {
        let tp = c.count(class, class);
        let fp: usize = (0..m).filter(|&t| t != class).map(|t| c.count(t, class)).sum();
        let fnc: usize = (0..m).filter(|&p| p != class).map(|p| c.count(class, p)).sum();
        tp_sum += tp;
        fp_sum += fp;
        fn_sum += fnc;
        if tp + fnc == 0 {
            continue;
        }
        present += 1;
        let prec = if tp + fp > 0 {
            tp as f64 / (tp + fp) as f64
        } else {
            0.0
        };
        let rec = tp as f64 / (tp + fnc) as f64;
        if prec + rec > 0.0 {
            f1_sum += 2.0 * prec * rec / (prec + rec);
        }
        prec_sum += prec;
        rec_sum += rec;
    }
    let pf = present as f64;
    LossReport {
        zero_one: (c.total - tp_sum) as f64 / c.total as f64,
        macro_fdr: 1.0 - prec_sum / pf,
        macro_fnr: 1.0 - rec_sum / pf,
        macro_f1_loss: 1.0 - f1_sum / pf,
        micro_fdr: fp_sum as f64 / (tp_sum + fp_sum) as f64,
        micro_fnr: fn_sum as f64 / (tp_sum + fn_sum) as f64,
        micro_f1_loss: (fp_sum + fn_sum) as f64 / (2 * tp_sum + fp_sum + fn_sum) as f64,
    }
}

/// Stratified k-fold split: per-class shuffled round-robin assignment with a
/// fold pointer rolling across classes, keeping both overall and per-class
/// fold sizes within one instance of each other. Returns sorted
/// (train, test) index pairs.
pub fn stratified_kfold(
    labels: &[usize],
    class_count: usize,
    folds: usize,
    rng: &mut SeededRng,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>, FoldError> {
    if folds == 0 || folds > labels.len() {
        return Err(FoldError::BadFoldCount {
            folds,
            rows: labels.len(),
        });
    }
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); class_count];
    for (i, &y) in labels.iter().enumerate() {
        per_class[y].push(i);
    }
    let mut fold_of = vec![0usize; labels.len()];
    let mut ptr = 0usize;
    for mut members in per_class {
        rng.shuffle(&mut members);
        for i in members {
            fold_of[i] = ptr % folds;
            ptr += 1;
        }
    }
    Ok((0..folds)
        .map(|f| {
            let mut train = Vec::new();
            let mut test = Vec::new();
            for (i, &fi) in fold_of.iter().enumerate() {
                if fi == f {
                    test.push(i);
                } else {
                    train.push(i);
                }
            }
            (train, test)
        })
        .collect())
}

/// Winning grid cell of the correction hyperparameter search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridChoice {
    pub beta: f64,
    pub gamma: f64,
    pub k: usize,
    pub mean_loss: f64,
}

/// Grid search for the corrected classifier: inner 5-fold cross-validation
/// over every (classifier, score family, beta) cell, minimizing mean
/// macro-F1 loss. `specs` pairs each candidate base classifier with the K
/// value to report; `families` pairs each score family with its gamma.
/// Banks are rebuilt per (fold, classifier) and shared across gamma and
/// beta; query distances are shared across everything. Ties prefer the
/// smaller beta, then gamma, then K. A cell that fails on any fold is
/// disqualified; `None` means no cell survived.
pub fn tune_scm(
    data: &Dataset,
    specs: &[(usize, BaseSpec)],
    families: &[(f64, ScoreFamily)],
    betas: &[f64],
    tol: f64,
    rng: &SeededRng,
) -> Option<GridChoice> {
    let folds = INNER_FOLDS.min(data.len());
    let mut fold_rng = rng.derive(&[0]);
    let split = stratified_kfold(data.labels(), data.class_count(), folds, &mut fold_rng).ok()?;
    let m = data.class_count();
    let n_cells = specs.len() * families.len() * betas.len();
    if n_cells == 0 {
        return None;
    }
    let cell = |si: usize, gi: usize, bi: usize| (si * families.len() + gi) * betas.len() + bi;
    let mut sums = vec![0.0f64; n_cells];
    let mut used = vec![0usize; n_cells];
    let mut dead = vec![false; n_cells];

    for (f, (train_rows, test_rows)) in split.iter().enumerate() {
        if test_rows.is_empty() {
            continue;
        }
        let train = data.select(train_rows);
        let d2: Vec<Vec<f64>> = test_rows
            .iter()
            .map(|&t| {
                let x = data.row(t);
                train_rows
                    .iter()
                    .map(|&b| data.row(b).iter().zip(x).map(|(a, q)| (a - q) * (a - q)).sum())
                    .collect()
            })
            .collect();
        let weights: Vec<Vec<Vec<f64>>> = betas
            .iter()
            .map(|&b| d2.iter().map(|row| gaussian_weights(row, b)).collect())
            .collect();
        for (si, (_, spec)) in specs.iter().enumerate() {
            let mut bank_rng = rng.derive(&[1, f as u64, si as u64]);
            let built: Result<_, ScmError> = collect_bank_supports(spec, &train, &mut bank_rng)
                .and_then(|(model, bank)| {
                    let tests = test_rows
                        .iter()
                        .map(|&t| model.predict_support(data.row(t)).map(|s| s.values().to_vec()))
                        .collect::<Result<Vec<_>, ClassifierError>>()?;
                    Ok((bank, tests))
                });
            let (bank_supports, test_supports) = match built {
                Ok(v) => v,
                Err(_) => {
                    for gi in 0..families.len() {
                        for bi in 0..betas.len() {
                            dead[cell(si, gi, bi)] = true;
                        }
                    }
                    continue;
                }
            };
            for (gi, (_, family)) in families.iter().enumerate() {
                let prepared = bank_supports.with_family(*family, tol).and_then(|bank| {
                    let q = test_supports
                        .iter()
                        .map(|s| family.probabilities(s, tol).map(|p| p.values().to_vec()))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok((bank, q))
                });
                let (bank, query) = match prepared {
                    Ok(v) => v,
                    Err(_) => {
                        for bi in 0..betas.len() {
                            dead[cell(si, gi, bi)] = true;
                        }
                        continue;
                    }
                };
                for bi in 0..betas.len() {
                    let id = cell(si, gi, bi);
                    if dead[id] {
                        continue;
                    }
                    let mut counts = ConfusionCounts::new(m);
                    for (ti, &t) in test_rows.iter().enumerate() {
                        let conf = local_confusion(&bank, &weights[bi][ti]);
                        let post = corrected_posterior(&conf, &query[ti]);
                        counts.record(data.label(t), decide(&post));
                    }
                    sums[id] += compute_losses(&counts).macro_f1_loss;
                    used[id] += 1;
                }
            }
        }
    }

    let mut best: Option<(f64, f64, f64, usize)> = None;
    for (si, &(k, _)) in specs.iter().enumerate() {
        for (gi, &(gamma, _)) in families.iter().enumerate() {
            for (bi, &beta) in betas.iter().enumerate() {
                let id = cell(si, gi, bi);
                if dead[id] || used[id] == 0 {
                    continue;
                }
                let cand = (sums[id] / used[id] as f64, beta, gamma, k);
                if best.map_or(true, |b| cand.partial_cmp(&b) == Some(Ordering::Less)) {
                    best = Some(cand);
                }
            }
        }
    }
    best.map(|(mean_loss, beta, gamma, k)| GridChoice {
        beta,
        gamma,
        k,
        mean_loss,
    })
}

/// Neighbour-count search for the plain nearest-neighbour classifier, same
/// protocol and objective as `tune_scm`. Ties prefer the smaller K.
pub fn tune_knn_k(data: &Dataset, ks: &[usize], rng: &SeededRng) -> Option<(usize, f64)> {
    let folds = INNER_FOLDS.min(data.len());
    let mut fold_rng = rng.derive(&[0]);
    let split = stratified_kfold(data.labels(), data.class_count(), folds, &mut fold_rng).ok()?;
    let m = data.class_count();
    let mut sums = vec![0.0f64; ks.len()];
    let mut used = vec![0usize; ks.len()];
    let mut dead = vec![false; ks.len()];
    for (train_rows, test_rows) in &split {
        if test_rows.is_empty() {
            continue;
        }
        let train = data.select(train_rows);
        for (ki, &k) in ks.iter().enumerate() {
            if dead[ki] {
                continue;
            }
            let outcome: Result<ConfusionCounts, ClassifierError> =
                BaseSpec::Knn { k }.train(&train).and_then(|model| {
                    let mut counts = ConfusionCounts::new(m);
                    for &t in test_rows {
                        counts.record(data.label(t), model.predict(data.row(t))?);
                    }
                    Ok(counts)
                });
            match outcome {
                Ok(counts) => {
                    sums[ki] += compute_losses(&counts).macro_f1_loss;
                    used[ki] += 1;
                }
                Err(_) => dead[ki] = true,
            }
        }
    }
    let mut best: Option<(f64, usize)> = None;
    for (ki, &k) in ks.iter().enumerate() {
        if dead[ki] || used[ki] == 0 {
            continue;
        }
        let cand = (sums[ki] / used[ki] as f64, k);
        if best.map_or(true, |b| cand.partial_cmp(&b) == Some(Ordering::Less)) {
            best = Some(cand);
        }
    }
    best.map(|(loss, k)| (k, loss))
}
