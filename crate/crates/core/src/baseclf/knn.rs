//! k-nearest-neighbour classifier with Laplace-smoothed vote supports.

use super::{check_dims, ClassifierError};
use crate::dataset::Dataset;
use crate::support::SupportVector;

#[derive(Debug, Clone)]
pub struct Knn {
    k: usize,
    dims: usize,
    class_count: usize,
    features: Vec<f64>,
    labels: Vec<usize>,
}

impl Knn {
    pub fn fit(data: &Dataset, k: usize) -> Result<Self, ClassifierError> {
        if data.is_empty() {
            return Err(ClassifierError::EmptyTraining);
        }
        let mut features = Vec::with_capacity(data.len() * data.dims());
        for i in 0..data.len() {
            features.extend_from_slice(data.row(i));
        }
        Ok(Self {
            k: k.max(1),
            dims: data.dims(),
            class_count: data.class_count(),
            features,
            labels: data.labels().to_vec(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn predict_support(&self, x: &[f64]) -> Result<SupportVector, ClassifierError> {
        check_dims(x.len(), self.dims)?;
        let n = self.labels.len();
        let mut order: Vec<(f64, usize)> = (0..n)
            .map(|i| {
                let row = &self.features[i * self.dims..(i + 1) * self.dims];
                let d2: f64 = row.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, i)
            })
            .collect();
        // index tiebreak keeps equidistant neighbours deterministic
        order.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let kk = self.k.min(n);
        let mut counts = vec![0usize; self.class_count];
        for &(_, i) in &order[..kk] {
            counts[self.labels[i]] += 1;
        }
        let denom = (kk + self.class_count) as f64;
        let masses: Vec<f64> = counts.iter().map(|&c| (c as f64 + 1.0) / denom).collect();
        Ok(SupportVector::from_masses(masses).expect("positive masses"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::decide;

    #[test]
    fn laplace_smoothed_votes() {
        // train points 0.0, 0.1 (class 0) and 1.0 (class 1); all three are
        // the 3 nearest of x=0.05, so supports are (2+1)/5 and (1+1)/5
        let d = Dataset::new("line", vec![0.0, 0.1, 1.0], 1, vec![0, 0, 1], 2).unwrap();
        let clf = Knn::fit(&d, 3).unwrap();
        let s = clf.predict_support(&[0.05]).unwrap();
        assert!((s.values()[0] - 0.6).abs() < 1e-15);
        assert!((s.values()[1] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn k_capped_at_training_size() {
        let d = Dataset::new("tiny", vec![0.0, 1.0], 1, vec![0, 1], 2).unwrap();
        let clf = Knn::fit(&d, 25).unwrap();
        let s = clf.predict_support(&[0.9]).unwrap();
        // both points vote: (1+1)/(2+2) each
        assert!((s.values()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn equidistant_tie_prefers_lower_index() {
        // x sits exactly between a class-1 point (index 0) and a class-0
        // point (index 1); with k=1 the lower index wins
        let d = Dataset::new("tie", vec![1.0, -1.0], 1, vec![1, 0], 2).unwrap();
        let clf = Knn::fit(&d, 1).unwrap();
        assert_eq!(decide(&clf.predict_support(&[0.0]).unwrap()), 1);
    }

    #[test]
    fn nearest_class_wins() {
        let d = Dataset::new(
            "two",
            vec![0.0, 0.0, 0.1, 0.1, 1.0, 1.0, 0.9, 1.1],
            2,
            vec![0, 0, 1, 1],
            2,
        )
        .unwrap();
        let clf = Knn::fit(&d, 3).unwrap();
        assert_eq!(decide(&clf.predict_support(&[0.05, 0.0]).unwrap()), 0);
        assert_eq!(decide(&clf.predict_support(&[1.0, 0.95]).unwrap()), 1);
    }
}
