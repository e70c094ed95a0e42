//! Correlation-based feature subset selection.
//!
//! Merit of a k-feature subset is k*rcf / sqrt(k + k(k-1)*rff), where rcf
//! averages the absolute Pearson correlation between each feature and the
//! per-class one-vs-rest indicators, and rff averages absolute pairwise
//! feature correlations. Forward search keeps the best subset seen and
//! stops after 5 expansions without improvement.

use rrc_core::Dataset;

const MAX_STALL: usize = 5;

/// |Pearson correlation|; 0 when either input has no variance.
fn abs_pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va <= 0.0 || vb <= 0.0 {
        return 0.0;
    }
    (cov / (va * vb).sqrt()).abs()
}

fn merit(subset: &[usize], rcf: &[f64], rff: &[Vec<f64>]) -> f64 {
    let k = subset.len() as f64;
    let rcf_bar = subset.iter().map(|&f| rcf[f]).sum::<f64>() / k;
    let mut rff_sum = 0.0;
    for (i, &a) in subset.iter().enumerate() {
        for &b in &subset[i + 1..] {
            rff_sum += rff[a][b];
        }
    }
    let pairs = k * (k - 1.0) / 2.0;
    let rff_bar = if pairs > 0.0 { rff_sum / pairs } else { 0.0 };
    k * rcf_bar / (k + k * (k - 1.0) * rff_bar).sqrt()
}

/// Indices of the selected features, ascending; always at least one.
pub fn cfs_select(data: &Dataset) -> Vec<usize> {
    let d = data.dims();
    assert!(d >= 1);
    if d == 1 {
        return vec![0];
    }
    let n = data.len();
    let columns: Vec<Vec<f64>> = (0..d)
        .map(|j| (0..n).map(|i| data.row(i)[j]).collect())
        .collect();
    let rcf: Vec<f64> = columns
        .iter()
        .map(|col| {
            (0..data.class_count())
                .map(|c| {
                    let indicator: Vec<f64> = data
                        .labels()
                        .iter()
                        .map(|&y| if y == c { 1.0 } else { 0.0 })
                        .collect();
                    abs_pearson(col, &indicator)
                })
                .sum::<f64>()
                / data.class_count() as f64
        })
        .collect();
    let rff: Vec<Vec<f64>> = (0..d)
        .map(|a| {
            (0..d)
                .map(|b| {
                    if a == b {
                        1.0
                    } else {
                        abs_pearson(&columns[a], &columns[b])
                    }
                })
                .collect()
        })
        .collect();

    let mut selected: Vec<usize> = Vec::new();
    let mut best_subset: Vec<usize> = Vec::new();
    let mut best_merit = f64::NEG_INFINITY;
    let mut stall = 0;
    while stall < MAX_STALL && selected.len() < d {
        let mut candidate = None;
        let mut candidate_merit = f64::NEG_INFINITY;
        for f in 0..d {
            if selected.contains(&f) {
                continue;
            }
            selected.push(f);
            let m = merit(&selected, &rcf, &rff);
            selected.pop();
            if m > candidate_merit {
                candidate_merit = m;
                candidate = Some(f);
            }
        }
        selected.push(candidate.expect("unselected feature exists"));
        if candidate_merit > best_merit {
            best_merit = candidate_merit;
            best_subset = selected.clone();
            stall = 0;
        } else {
            stall += 1;
        }
    }
    best_subset.sort_unstable();
    best_subset
}
