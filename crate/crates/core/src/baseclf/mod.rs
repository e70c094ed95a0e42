//! Base classifiers that map feature vectors to class support vectors.

mod centroid;
mod kde_bayes;
mod knn;
mod tree;

pub use centroid::NearestCentroid;
pub use kde_bayes::KdeBayes;
pub use knn::Knn;
pub use tree::GainRatioTree;

use thiserror::Error;

use crate::dataset::Dataset;
use crate::support::{decide, SupportVector};

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("feature count {got} does not match training dimension {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("cannot train on an empty dataset")]
    EmptyTraining,
}

pub(crate) fn check_dims(got: usize, want: usize) -> Result<(), ClassifierError> {
    if got == want {
        Ok(())
    } else {
        Err(ClassifierError::DimensionMismatch { got, want })
    }
}

/// Base classifier selector, carrying any hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseSpec {
    KdeBayes,
    Knn { k: usize },
    GainRatioTree,
    NearestCentroid,
}

impl BaseSpec {
    pub fn train(&self, data: &Dataset) -> Result<TrainedClassifier, ClassifierError> {
        Ok(match self {
            BaseSpec::KdeBayes => TrainedClassifier::KdeBayes(KdeBayes::fit(data)?),
            BaseSpec::Knn { k } => TrainedClassifier::Knn(Knn::fit(data, *k)?),
            BaseSpec::GainRatioTree => TrainedClassifier::GainRatioTree(GainRatioTree::fit(data)?),
            BaseSpec::NearestCentroid => {
                TrainedClassifier::NearestCentroid(NearestCentroid::fit(data)?)
            }
        })
    }
}

/// A trained base classifier of any kind.
#[derive(Debug, Clone)]
pub enum TrainedClassifier {
    KdeBayes(KdeBayes),
    Knn(Knn),
    GainRatioTree(GainRatioTree),
    NearestCentroid(NearestCentroid),
}

impl TrainedClassifier {
    pub fn predict_support(&self, x: &[f64]) -> Result<SupportVector, ClassifierError> {
        match self {
            TrainedClassifier::KdeBayes(c) => c.predict_support(x),
            TrainedClassifier::Knn(c) => c.predict_support(x),
            TrainedClassifier::GainRatioTree(c) => c.predict_support(x),
            TrainedClassifier::NearestCentroid(c) => c.predict_support(x),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize, ClassifierError> {
        Ok(decide(&self.predict_support(x)?))
    }
}
