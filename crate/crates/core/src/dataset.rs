//! In-memory dataset representation with dense labels and min-max scaling.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("feature matrix has {cells} cells, expected {rows} x {cols}")]
    ShapeMismatch { cells: usize, rows: usize, cols: usize },
    #[error("label count {labels} != instance count {rows}")]
    LabelCount { labels: usize, rows: usize },
    #[error("label {label} out of range for {classes} classes")]
    LabelRange { label: usize, classes: usize },
    #[error("non-finite feature value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("need at least 2 classes, got {0}")]
    TooFewClasses(usize),
    #[error("dataset is empty")]
    Empty,
}

/// Dense dataset: row-major feature matrix plus labels in `0..class_count`.
///
/// Class labels are densified at load time; `class_names[label]` remembers
/// the original naming.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    features: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
    labels: Vec<usize>,
    class_count: usize,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        features: Vec<f64>,
        n_cols: usize,
        labels: Vec<usize>,
        class_count: usize,
    ) -> Result<Self, DatasetError> {
        if class_count < 2 {
            return Err(DatasetError::TooFewClasses(class_count));
        }
        if n_cols == 0 || labels.is_empty() {
            return Err(DatasetError::Empty);
        }
        let n_rows = labels.len();
        if features.len() != n_rows * n_cols {
            return Err(DatasetError::ShapeMismatch {
                cells: features.len(),
                rows: n_rows,
                cols: n_cols,
            });
        }
        for (i, &v) in features.iter().enumerate() {
            if !v.is_finite() {
                return Err(DatasetError::NonFinite {
                    row: i / n_cols,
                    col: i % n_cols,
                });
            }
        }
        for &label in &labels {
            if label >= class_count {
                return Err(DatasetError::LabelRange {
                    label,
                    classes: class_count,
                });
            }
        }
        let feature_names = (1..=n_cols).map(|j| format!("x{j}")).collect();
        let class_names = (0..class_count).map(|c| format!("c{c}")).collect();
        Ok(Self {
            name: name.into(),
            features,
            n_rows,
            n_cols,
            labels,
            class_count,
            feature_names,
            class_names,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n_rows == 0
    }

    #[inline]
    pub fn dims(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn class_count(&self) -> usize {
        self.class_count
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_cols..(i + 1) * self.n_cols]
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    #[inline]
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Instances per class, indexed by label.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.class_count];
        for &label in &self.labels {
            sizes[label] += 1;
        }
        sizes
    }

    /// Row subset (class universe is kept even if a class drops out).
    pub fn select(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.n_cols);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Dataset {
            name: self.name.clone(),
            features,
            n_rows: indices.len(),
            n_cols: self.n_cols,
            labels,
            class_count: self.class_count,
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    /// Column subset, in the order given.
    pub fn select_features(&self, cols: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(self.n_rows * cols.len());
        for i in 0..self.n_rows {
            let row = self.row(i);
            for &j in cols {
                features.push(row[j]);
            }
        }
        Dataset {
            name: self.name.clone(),
            features,
            n_rows: self.n_rows,
            n_cols: cols.len(),
            labels: self.labels.clone(),
            class_count: self.class_count,
            feature_names: cols.iter().map(|&j| self.feature_names[j].clone()).collect(),
            class_names: self.class_names.clone(),
        }
    }

    pub fn summarize(&self) -> DatasetSummary {
        let sizes = self.class_sizes();
        let largest = sizes.iter().copied().max().unwrap_or(0) as f64;
        let ir = sizes
            .iter()
            .map(|&s| if s == 0 { f64::INFINITY } else { largest / s as f64 })
            .sum::<f64>()
            / self.class_count as f64;
        DatasetSummary {
            name: self.name.clone(),
            instances: self.n_rows,
            features: self.n_cols,
            classes: self.class_count,
            imbalance_ratio: ir,
        }
    }
}

/// Shape and imbalance summary (IR = mean over classes of largest/size).
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSummary {
    pub name: String,
    pub instances: usize,
    pub features: usize,
    pub classes: usize,
    pub imbalance_ratio: f64,
}

impl fmt::Display for DatasetSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: |S|={}, d={}, C={}, IR={:.2}",
            self.name, self.instances, self.features, self.classes, self.imbalance_ratio
        )
    }
}

/// Per-feature affine map sending the fitted min/max to [0, 1].
///
/// Constant features map to 0. Values outside the fitted range extend
/// affinely; they are deliberately not clamped.
#[derive(Debug, Clone)]
pub struct FeatureScaler {
    mins: Vec<f64>,
    ranges: Vec<f64>,
}

impl FeatureScaler {
    pub fn fit(data: &Dataset) -> Self {
        let d = data.dims();
        let mut mins = vec![f64::INFINITY; d];
        let mut maxs = vec![f64::NEG_INFINITY; d];
        for i in 0..data.len() {
            for (j, &v) in data.row(i).iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        let ranges = mins.iter().zip(&maxs).map(|(&lo, &hi)| hi - lo).collect();
        Self { mins, ranges }
    }

    #[inline]
    pub fn transform_value(&self, j: usize, v: f64) -> f64 {
        if self.ranges[j] > 0.0 {
            (v - self.mins[j]) / self.ranges[j]
        } else {
            0.0
        }
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, &v)| self.transform_value(j, v))
            .collect()
    }

    pub fn transform(&self, data: &Dataset) -> Dataset {
        let mut out = data.clone();
        for i in 0..out.n_rows {
            for j in 0..out.n_cols {
                let v = out.features[i * out.n_cols + j];
                out.features[i * out.n_cols + j] = self.transform_value(j, v);
            }
        }
        out
    }
}

/// Fits a scaler on `data` and returns the scaled copy alongside it.
pub fn normalize_features(data: &Dataset) -> (Dataset, FeatureScaler) {
    let scaler = FeatureScaler::fit(data);
    (scaler.transform(data), scaler)
}
