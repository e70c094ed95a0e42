//! Soft confusion matrix correction.
//!
//! A validation bank holds cross-predicted class probabilities for every
//! training instance. At query time the bank is weighted by a Gaussian
//! potential around the query, summed into a local confusion matrix, and
//! the column-normalized matrix redistributes the query's own class
//! probabilities into a corrected posterior.

use thiserror::Error;

use crate::baseclf::{BaseSpec, ClassifierError, TrainedClassifier};
use crate::dataset::Dataset;
use crate::eval::stratified_kfold;
use crate::quad::QuadError;
use crate::rng::SeededRng;
use crate::rrc::ScoreFamily;
use crate::support::{decide, SupportVector};

/// Folds used for cross-predicting the bank's support vectors.
pub const BANK_FOLDS: usize = 5;

#[derive(Debug, Error)]
pub enum ScmError {
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Out-of-fold base classifier supports for a training set, before any
/// reference-classifier smoothing is applied.
#[derive(Debug, Clone)]
pub struct BankSupports {
    dims: usize,
    class_count: usize,
    features: Vec<f64>,
    labels: Vec<usize>,
    supports: Vec<Vec<f64>>,
}

/// Cross-predict a support vector for every training instance, then retrain
/// the classifier on the full set. Each instance's support comes from a
/// model that never saw it.
pub fn collect_bank_supports(
    spec: &BaseSpec,
    train: &Dataset,
    rng: &mut SeededRng,
) -> Result<(TrainedClassifier, BankSupports), ScmError> {
    let folds = BANK_FOLDS.min(train.len());
    let split = stratified_kfold(train.labels(), train.class_count(), folds, rng)
        .expect("fold count capped by training size");
    let mut supports: Vec<Vec<f64>> = vec![Vec::new(); train.len()];
    for (train_rows, test_rows) in &split {
        if test_rows.is_empty() {
            continue;
        }
        let model = spec.train(&train.select(train_rows))?;
        for &i in test_rows {
            supports[i] = model.predict_support(train.row(i))?.values().to_vec();
        }
    }
    let model = spec.train(train)?;
    let mut features = Vec::with_capacity(train.len() * train.dims());
    for i in 0..train.len() {
        features.extend_from_slice(train.row(i));
    }
    Ok((
        model,
        BankSupports {
            dims: train.dims(),
            class_count: train.class_count(),
            features,
            labels: train.labels().to_vec(),
            supports,
        },
    ))
}

impl BankSupports {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Convert raw supports into reference-classifier probabilities.
    pub fn with_family(&self, family: ScoreFamily, tol: f64) -> Result<ValidationBank, QuadError> {
        let rrc = self
            .supports
            .iter()
            .map(|s| family.probabilities(s, tol).map(|p| p.values().to_vec()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ValidationBank {
            dims: self.dims,
            class_count: self.class_count,
            features: self.features.clone(),
            labels: self.labels.clone(),
            rrc,
        })
    }
}

/// Validation instances with their reference-classifier probability vectors.
#[derive(Debug, Clone)]
pub struct ValidationBank {
    dims: usize,
    class_count: usize,
    features: Vec<f64>,
    labels: Vec<usize>,
    rrc: Vec<Vec<f64>>,
}

impl ValidationBank {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn probabilities(&self, k: usize) -> &[f64] {
        &self.rrc[k]
    }

    pub fn squared_distances(&self, x: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let row = &self.features[k * self.dims..(k + 1) * self.dims];
                row.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum()
            })
            .collect()
    }
}

/// Gaussian potential weights exp(-beta d^2) from squared distances.
pub fn gaussian_weights(d2: &[f64], beta: f64) -> Vec<f64> {
    d2.iter().map(|&d| (-beta * d).exp()).collect()
}

/// Locally weighted confusion mass, rows by true class, columns by
/// predicted class. Entries are unnormalized.
#[derive(Debug, Clone)]
pub struct SoftMatrix {
    class_count: usize,
    eps: Vec<f64>,
}

impl SoftMatrix {
    pub fn from_entries(class_count: usize, eps: Vec<f64>) -> Self {
        assert_eq!(eps.len(), class_count * class_count);
        Self { class_count, eps }
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn entry(&self, truth: usize, predicted: usize) -> f64 {
        self.eps[truth * self.class_count + predicted]
    }

    /// True when the matrix carries no mass at all.
    pub fn is_degenerate(&self) -> bool {
        !self.eps.iter().any(|&e| e > 0.0)
    }
}

pub fn local_confusion(bank: &ValidationBank, weights: &[f64]) -> SoftMatrix {
    assert_eq!(weights.len(), bank.len());
    let m = bank.class_count;
    let mut eps = vec![0.0f64; m * m];
    for k in 0..bank.len() {
        let w = weights[k];
        if w == 0.0 {
            continue;
        }
        let row = &mut eps[bank.labels[k] * m..(bank.labels[k] + 1) * m];
        for (e, p) in row.iter_mut().zip(&bank.rrc[k]) {
            *e += w * p;
        }
    }
    SoftMatrix { class_count: m, eps }
}

/// Redistribute the query's class probabilities through the column
/// normalized confusion matrix. Columns without mass fall back to the
/// identity, so a fully degenerate matrix leaves the input unchanged.
pub fn corrected_posterior(conf: &SoftMatrix, rrc_query: &[f64]) -> SupportVector {
    let m = conf.class_count;
    assert_eq!(rrc_query.len(), m);
    let mut out = vec![0.0f64; m];
    for s in 0..m {
        let col_mass: f64 = (0..m).map(|t| conf.entry(t, s)).sum();
        if col_mass > 0.0 {
            for (t, o) in out.iter_mut().enumerate() {
                *o += rrc_query[s] * conf.entry(t, s) / col_mass;
            }
        } else {
            out[s] += rrc_query[s];
        }
    }
    SupportVector::from_masses(out).expect("query probabilities carry mass")
}

/// A base classifier wrapped with soft confusion matrix correction.
#[derive(Debug, Clone)]
pub struct ScmClassifier {
    base: TrainedClassifier,
    bank: ValidationBank,
    family: ScoreFamily,
    beta: f64,
    tol: f64,
}

pub fn build_scm(
    spec: &BaseSpec,
    train: &Dataset,
    family: ScoreFamily,
    beta: f64,
    tol: f64,
    rng: &mut SeededRng,
) -> Result<ScmClassifier, ScmError> {
    let (base, supports) = collect_bank_supports(spec, train, rng)?;
    let bank = supports.with_family(family, tol)?;
    Ok(ScmClassifier {
        base,
        bank,
        family,
        beta,
        tol,
    })
}

impl ScmClassifier {
    pub fn from_parts(
        base: TrainedClassifier,
        bank: ValidationBank,
        family: ScoreFamily,
        beta: f64,
        tol: f64,
    ) -> Self {
        Self {
            base,
            bank,
            family,
            beta,
            tol,
        }
    }

    pub fn base(&self) -> &TrainedClassifier {
        &self.base
    }

    pub fn predict_support(&self, x: &[f64]) -> Result<SupportVector, ScmError> {
        let support = self.base.predict_support(x)?;
        let rrc = self.family.probabilities(support.values(), self.tol)?;
        let weights = gaussian_weights(&self.bank.squared_distances(x), self.beta);
        let conf = local_confusion(&self.bank, &weights);
        Ok(corrected_posterior(&conf, rrc.values()))
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize, ScmError> {
        Ok(decide(&self.predict_support(x)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bank_2d(points: Vec<(f64, usize, Vec<f64>)>) -> ValidationBank {
        let mut features = Vec::new();
        let mut labels = Vec::new();
        let mut rrc = Vec::new();
        for (x, y, p) in points {
            features.push(x);
            labels.push(y);
            rrc.push(p);
        }
        ValidationBank {
            dims: 1,
            class_count: 2,
            features,
            labels,
            rrc,
        }
    }

    #[test]
    fn posterior_mixes_columns() {
        // columns already sum to one, so the result is a plain
        // matrix-vector product
        let conf = SoftMatrix::from_entries(2, vec![0.9, 0.2, 0.1, 0.8]);
        let post = corrected_posterior(&conf, &[0.6, 0.4]);
        assert!((post.values()[0] - 0.62).abs() < 1e-15);
        assert!((post.values()[1] - 0.38).abs() < 1e-15);
    }

    #[test]
    fn diagonal_matrix_is_identity_correction() {
        let conf = SoftMatrix::from_entries(2, vec![3.0, 0.0, 0.0, 0.25]);
        let rrc = [0.7, 0.3];
        let post = corrected_posterior(&conf, &rrc);
        for (got, want) in post.values().iter().zip(&rrc) {
            assert!((got - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn uniform_columns_destroy_information() {
        let conf = SoftMatrix::from_entries(2, vec![0.5, 2.0, 0.5, 2.0]);
        let post = corrected_posterior(&conf, &[0.95, 0.05]);
        for &v in post.values() {
            assert!((v - 0.5).abs() <= 1e-12);
        }
    }

    #[test]
    fn empty_matrix_falls_back_to_query() {
        let conf = SoftMatrix::from_entries(2, vec![0.0; 4]);
        assert!(conf.is_degenerate());
        let post = corrected_posterior(&conf, &[0.6, 0.4]);
        assert!((post.values()[0] - 0.6).abs() <= 1e-15);
    }

    #[test]
    fn single_point_confusion() {
        let bank = bank_2d(vec![(0.0, 0, vec![1.0, 0.0])]);
        let conf = local_confusion(&bank, &gaussian_weights(&bank.squared_distances(&[0.0]), 3.0));
        assert_eq!(conf.entry(0, 0), 1.0);
        assert_eq!(conf.entry(0, 1), 0.0);
        assert_eq!(conf.entry(1, 0), 0.0);
        assert_eq!(conf.entry(1, 1), 0.0);
    }

    #[test]
    fn zero_beta_gives_global_matrix() {
        let bank = bank_2d(vec![
            (0.0, 0, vec![0.8, 0.2]),
            (5.0, 0, vec![0.6, 0.4]),
            (9.0, 1, vec![0.1, 0.9]),
        ]);
        let conf = local_confusion(&bank, &gaussian_weights(&bank.squared_distances(&[2.0]), 0.0));
        assert!((conf.entry(0, 0) - 1.4).abs() < 1e-15);
        assert!((conf.entry(0, 1) - 0.6).abs() < 1e-15);
        assert!((conf.entry(1, 0) - 0.1).abs() < 1e-15);
        assert!((conf.entry(1, 1) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn huge_beta_isolates_collocated_point() {
        let bank = bank_2d(vec![(0.0, 0, vec![0.7, 0.3]), (1.0, 1, vec![0.2, 0.8])]);
        let conf = local_confusion(&bank, &gaussian_weights(&bank.squared_distances(&[0.0]), 1e4));
        assert!((conf.entry(0, 0) - 0.7).abs() < 1e-15);
        assert!((conf.entry(0, 1) - 0.3).abs() < 1e-15);
        assert!(conf.entry(1, 0) < 1e-300);
        assert!(conf.entry(1, 1) < 1e-300);
    }

    #[test]
    fn distant_errors_leave_local_matrix_diagonal() {
        // the classifier is wrong only around x=10; a query at the origin
        // should see an almost diagonal local matrix
        let bank = bank_2d(vec![
            (0.0, 0, vec![0.9995, 0.0005]),
            (0.2, 1, vec![0.0005, 0.9995]),
            (10.0, 0, vec![0.05, 0.95]),
            (10.2, 1, vec![0.9, 0.1]),
        ]);
        let conf = local_confusion(&bank, &gaussian_weights(&bank.squared_distances(&[0.1]), 2.0));
        for s in 0..2 {
            let col: f64 = (0..2).map(|t| conf.entry(t, s)).sum();
            let off: f64 = (0..2).filter(|&t| t != s).map(|t| conf.entry(t, s)).sum();
            assert!(off / col < 1e-3, "column {} off mass {}", s, off / col);
        }
    }

    fn blob_dataset(n_per: usize) -> Dataset {
        // two clusters on a line, easily separable
        let mut f = Vec::new();
        let mut y = Vec::new();
        for i in 0..n_per {
            f.push(0.1 * i as f64 / n_per as f64);
            y.push(0);
        }
        for i in 0..n_per {
            f.push(1.0 + 0.1 * i as f64 / n_per as f64);
            y.push(1);
        }
        Dataset::new("blobs", f, 1, y, 2).unwrap()
    }

    #[test]
    fn bank_covers_every_training_row() {
        let data = blob_dataset(10);
        let mut rng = SeededRng::new(7);
        let (_, supports) = collect_bank_supports(&BaseSpec::Knn { k: 1 }, &data, &mut rng).unwrap();
        assert_eq!(supports.len(), data.len());
        for s in &supports.supports {
            assert_eq!(s.len(), 2);
            assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn separable_bank_probabilities_concentrate_on_truth() {
        let data = blob_dataset(10);
        let mut rng = SeededRng::new(7);
        let (_, supports) = collect_bank_supports(&BaseSpec::Knn { k: 1 }, &data, &mut rng).unwrap();
        let bank = supports.with_family(ScoreFamily::Beta, 1e-6).unwrap();
        for k in 0..bank.len() {
            let p = bank.probabilities(k);
            let best = if p[0] >= p[1] { 0 } else { 1 };
            assert_eq!(best, data.label(k), "bank point {}", k);
        }
    }

    #[test]
    fn families_share_bank_structure() {
        let data = blob_dataset(8);
        let mut rng = SeededRng::new(11);
        let (_, supports) = collect_bank_supports(&BaseSpec::NearestCentroid, &data, &mut rng).unwrap();
        let beta = supports.with_family(ScoreFamily::Beta, 1e-6).unwrap();
        let norm = supports
            .with_family(ScoreFamily::Normal { gamma: 0.5 }, 1e-6)
            .unwrap();
        assert_eq!(beta.labels, norm.labels);
        assert_eq!(beta.features, norm.features);
        assert!(beta.rrc != norm.rrc);
    }

    #[test]
    fn scm_classifier_is_deterministic() {
        let data = blob_dataset(10);
        let family = ScoreFamily::Normal { gamma: 0.5 };
        let run = |seed: u64| {
            let mut rng = SeededRng::new(seed);
            let clf = build_scm(
                &BaseSpec::NearestCentroid,
                &data,
                family,
                2.0,
                1e-8,
                &mut rng,
            )
            .unwrap();
            clf.predict_support(&[0.4]).unwrap().values().to_vec()
        };
        let a = run(42);
        let b = run(42);
        assert_eq!(a, b);
        let s: f64 = a.iter().sum();
        assert_eq!(s, 1.0);
    }

    #[test]
    fn correction_keeps_separable_decisions() {
        let data = blob_dataset(10);
        let mut rng = SeededRng::new(3);
        let clf = build_scm(
            &BaseSpec::Knn { k: 3 },
            &data,
            ScoreFamily::Beta,
            5.0,
            1e-8,
            &mut rng,
        )
        .unwrap();
        assert_eq!(clf.predict(&[0.02]).unwrap(), 0);
        assert_eq!(clf.predict(&[1.05]).unwrap(), 1);
    }
}
