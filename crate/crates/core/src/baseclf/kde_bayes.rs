//! Naive Bayes whose per-feature class densities are Gaussian kernel
//! density estimates.

use super::{check_dims, ClassifierError};
use crate::dataset::Dataset;
use crate::support::SupportVector;

const LN_SQRT_2PI: f64 = 0.918938533204672742;

#[derive(Debug, Clone)]
struct FeatureKde {
    values: Vec<f64>,
    bandwidth: f64,
}

impl FeatureKde {
    // Silverman's rule with a floor that also covers constant features.
    fn fit(values: Vec<f64>) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let bandwidth = (1.06 * var.sqrt() * n.powf(-0.2)).max(1e-6);
        Self { values, bandwidth }
    }

    fn log_density(&self, x: f64) -> f64 {
        // log mean kernel via log-sum-exp so lone far-away kernels survive
        let mut max_e = f64::NEG_INFINITY;
        let mut exps = Vec::with_capacity(self.values.len());
        for &v in &self.values {
            let z = (x - v) / self.bandwidth;
            let e = -0.5 * z * z;
            max_e = max_e.max(e);
            exps.push(e);
        }
        let sum: f64 = exps.iter().map(|e| (e - max_e).exp()).sum();
        max_e + sum.ln() - (self.values.len() as f64).ln() - self.bandwidth.ln() - LN_SQRT_2PI
    }
}

#[derive(Debug, Clone)]
pub struct KdeBayes {
    dims: usize,
    log_priors: Vec<f64>,
    // one KDE per feature for every non-empty class
    models: Vec<Option<Vec<FeatureKde>>>,
}

impl KdeBayes {
    pub fn fit(data: &Dataset) -> Result<Self, ClassifierError> {
        if data.is_empty() {
            return Err(ClassifierError::EmptyTraining);
        }
        let m = data.class_count();
        let n = data.len() as f64;
        let mut log_priors = Vec::with_capacity(m);
        let mut models = Vec::with_capacity(m);
        for c in 0..m {
            let rows: Vec<usize> = (0..data.len()).filter(|&i| data.label(i) == c).collect();
            if rows.is_empty() {
                log_priors.push(f64::NEG_INFINITY);
                models.push(None);
                continue;
            }
            log_priors.push((rows.len() as f64 / n).ln());
            let feats = (0..data.dims())
                .map(|j| FeatureKde::fit(rows.iter().map(|&i| data.row(i)[j]).collect()))
                .collect();
            models.push(Some(feats));
        }
        Ok(Self {
            dims: data.dims(),
            log_priors,
            models,
        })
    }

    pub fn predict_support(&self, x: &[f64]) -> Result<SupportVector, ClassifierError> {
        check_dims(x.len(), self.dims)?;
        let mut log_joint = Vec::with_capacity(self.models.len());
        for (c, model) in self.models.iter().enumerate() {
            match model {
                None => log_joint.push(f64::NEG_INFINITY),
                Some(feats) => {
                    let mut ll = self.log_priors[c];
                    for (j, kde) in feats.iter().enumerate() {
                        ll += kde.log_density(x[j]);
                    }
                    log_joint.push(ll);
                }
            }
        }
        let top = log_joint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let masses: Vec<f64> = log_joint
            .iter()
            .map(|&ll| (ll - top).exp().max(1e-15))
            .collect();
        Ok(SupportVector::from_masses(masses).expect("at least one finite joint"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::decide;

    fn two_blob_data() -> Dataset {
        // class 0 clustered near the origin, class 1 near (4, 4)
        let pts: Vec<(f64, f64, usize)> = vec![
            (0.0, 0.1, 0),
            (0.2, -0.1, 0),
            (-0.1, 0.2, 0),
            (0.1, 0.0, 0),
            (4.0, 4.1, 1),
            (4.2, 3.9, 1),
            (3.9, 4.2, 1),
            (4.1, 4.0, 1),
        ];
        let mut f = Vec::new();
        let mut y = Vec::new();
        for (a, b, c) in pts {
            f.push(a);
            f.push(b);
            y.push(c);
        }
        Dataset::new("blobs", f, 2, y, 2).unwrap()
    }

    #[test]
    fn separates_blobs() {
        let clf = KdeBayes::fit(&two_blob_data()).unwrap();
        assert_eq!(decide(&clf.predict_support(&[0.05, 0.05]).unwrap()), 0);
        assert_eq!(decide(&clf.predict_support(&[4.05, 4.05]).unwrap()), 1);
        let s = clf.predict_support(&[0.05, 0.05]).unwrap();
        assert!(s.values()[0] > 0.99);
    }

    #[test]
    fn symmetric_point_gets_even_support() {
        let clf = KdeBayes::fit(&two_blob_data()).unwrap();
        // KDE mass decays identically toward both blobs from far away only
        // at the midpoint of the configuration
        let s = clf.predict_support(&[2.05, 2.05]).unwrap();
        assert!((s.values()[0] - 0.5).abs() < 0.05, "{:?}", s.values());
    }

    #[test]
    fn constant_feature_stays_finite() {
        let d = Dataset::new(
            "const",
            vec![1.0, 0.0, 1.0, 0.2, 1.0, 3.0, 1.0, 3.3],
            2,
            vec![0, 0, 1, 1],
            2,
        )
        .unwrap();
        let clf = KdeBayes::fit(&d).unwrap();
        let s = clf.predict_support(&[1.0, 0.1]).unwrap();
        assert!(s.values().iter().all(|v| v.is_finite()));
        assert_eq!(decide(&s), 0);
    }

    #[test]
    fn far_point_keeps_normalized_support() {
        let clf = KdeBayes::fit(&two_blob_data()).unwrap();
        let s = clf.predict_support(&[1e4, -1e4]).unwrap();
        assert_eq!(s.values().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let clf = KdeBayes::fit(&two_blob_data()).unwrap();
        assert!(clf.predict_support(&[1.0]).is_err());
    }
}
