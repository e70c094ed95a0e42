//! Nearest-centroid classifier with inverse-distance supports.

use super::{check_dims, ClassifierError};
use crate::dataset::Dataset;
use crate::support::SupportVector;

#[derive(Debug, Clone)]
pub struct NearestCentroid {
    dims: usize,
    // one mean vector per class; None when the class has no training rows
    centroids: Vec<Option<Vec<f64>>>,
}

impl NearestCentroid {
    pub fn fit(data: &Dataset) -> Result<Self, ClassifierError> {
        if data.is_empty() {
            return Err(ClassifierError::EmptyTraining);
        }
        let d = data.dims();
        let mut sums = vec![vec![0.0f64; d]; data.class_count()];
        let mut counts = vec![0usize; data.class_count()];
        for i in 0..data.len() {
            let c = data.label(i);
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(data.row(i)) {
                *s += v;
            }
        }
        let centroids = sums
            .into_iter()
            .zip(&counts)
            .map(|(sum, &n)| {
                if n == 0 {
                    None
                } else {
                    Some(sum.into_iter().map(|s| s / n as f64).collect())
                }
            })
            .collect();
        Ok(Self { dims: d, centroids })
    }

    pub fn predict_support(&self, x: &[f64]) -> Result<SupportVector, ClassifierError> {
        check_dims(x.len(), self.dims)?;
        let masses: Vec<f64> = self
            .centroids
            .iter()
            .map(|c| match c {
                None => 0.0,
                Some(mu) => {
                    let d2: f64 = mu.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                    1.0 / (d2.sqrt() + 1e-9)
                }
            })
            .collect();
        Ok(SupportVector::from_masses(masses).expect("some class is non-empty"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::decide;

    #[test]
    fn centroids_are_class_means() {
        let d = Dataset::new(
            "means",
            vec![0.0, 0.0, 2.0, 0.0, 10.0, 4.0],
            2,
            vec![0, 0, 1],
            2,
        )
        .unwrap();
        let clf = NearestCentroid::fit(&d).unwrap();
        assert_eq!(clf.centroids[0].as_deref(), Some(&[1.0, 0.0][..]));
        assert_eq!(clf.centroids[1].as_deref(), Some(&[10.0, 4.0][..]));
    }

    #[test]
    fn inverse_distance_weights() {
        let d = Dataset::new("w", vec![0.0, 4.0], 1, vec![0, 1], 2).unwrap();
        let clf = NearestCentroid::fit(&d).unwrap();
        // x=1: distances 1 and 3, so supports 1/(1+1e-9) and 1/(3+1e-9),
        // normalized to 3/4 and 1/4
        let s = clf.predict_support(&[1.0]).unwrap();
        assert!((s.values()[0] - 0.75).abs() < 1e-9);
        assert!((s.values()[1] - 0.25).abs() < 1e-9);
        assert_eq!(decide(&s), 0);
    }

    #[test]
    fn exact_hit_dominates() {
        let d = Dataset::new("hit", vec![0.0, 1.0], 1, vec![0, 1], 2).unwrap();
        let clf = NearestCentroid::fit(&d).unwrap();
        let s = clf.predict_support(&[0.0]).unwrap();
        assert!(s.values()[0] > 1.0 - 1e-8);
    }

    #[test]
    fn missing_class_gets_zero_mass() {
        let d = Dataset::new("gap", vec![0.0, 1.0], 1, vec![0, 2], 3).unwrap();
        let clf = NearestCentroid::fit(&d).unwrap();
        let s = clf.predict_support(&[0.4]).unwrap();
        assert_eq!(s.values()[1], 0.0);
        assert!((s.values().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
