//! Rank statistics for comparing classifiers across datasets: average
//! ranks, the Friedman test, pairwise Wilcoxon signed-rank tests, and
//! family-wise error control over the resulting hypothesis families.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::special::{chi2_sf, erfc};

/// Largest effective sample enumerated exactly by the signed-rank test.
pub const WILCOXON_EXACT_LIMIT: usize = 12;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("table is not rectangular at row {row}")]
    NotRectangular { row: usize },
    #[error("invalid name {name:?}: names must be non-empty and comma-free")]
    BadName { name: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("hypothesis family of size {size} is too large to enumerate")]
    FamilyTooLarge { size: usize },
}

/// Loss values for one criterion: rows are datasets, columns classifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    dataset_names: Vec<String>,
    classifier_names: Vec<String>,
    losses: Vec<f64>,
}

fn check_name(name: &str) -> Result<(), StatsError> {
    if name.is_empty() || name.contains(',') || name.contains('\n') {
        return Err(StatsError::BadName {
            name: name.to_string(),
        });
    }
    Ok(())
}

impl MetricTable {
    pub fn new(
        dataset_names: Vec<String>,
        classifier_names: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self, StatsError> {
        for name in dataset_names.iter().chain(&classifier_names) {
            check_name(name)?;
        }
        if rows.len() != dataset_names.len() {
            return Err(StatsError::NotRectangular { row: rows.len() });
        }
        let mut losses = Vec::with_capacity(rows.len() * classifier_names.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != classifier_names.len() || row.iter().any(|v| !v.is_finite()) {
                return Err(StatsError::NotRectangular { row: i });
            }
            losses.extend_from_slice(row);
        }
        Ok(Self {
            dataset_names,
            classifier_names,
            losses,
        })
    }

    pub fn datasets(&self) -> usize {
        self.dataset_names.len()
    }

    pub fn classifiers(&self) -> usize {
        self.classifier_names.len()
    }

    pub fn dataset_names(&self) -> &[String] {
        &self.dataset_names
    }

    pub fn classifier_names(&self) -> &[String] {
        &self.classifier_names
    }

    pub fn loss(&self, dataset: usize, classifier: usize) -> f64 {
        self.losses[dataset * self.classifiers() + classifier]
    }

    pub fn column(&self, classifier: usize) -> Vec<f64> {
        (0..self.datasets()).map(|d| self.loss(d, classifier)).collect()
    }

    /// One row per dataset, one column per classifier. Float formatting is
    /// shortest-round-trip, so reading the text back reproduces the exact
    /// values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dataset");
        for name in &self.classifier_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (d, name) in self.dataset_names.iter().enumerate() {
            out.push_str(name);
            for c in 0..self.classifiers() {
                let _ = write!(out, ",{}", self.loss(d, c));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, StatsError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(StatsError::Parse {
            line: 1,
            message: "empty file".into(),
        })?;
        let mut cols = header.trim_end_matches('\r').split(',');
        if cols.next() != Some("dataset") {
            return Err(StatsError::Parse {
                line: 1,
                message: "header must start with 'dataset'".into(),
            });
        }
        let classifier_names: Vec<String> = cols.map(str::to_string).collect();
        if classifier_names.is_empty() {
            return Err(StatsError::Parse {
                line: 1,
                message: "no classifier columns".into(),
            });
        }
        let mut dataset_names = Vec::new();
        let mut rows = Vec::new();
        for (i, line) in lines {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            dataset_names.push(fields.next().unwrap_or("").to_string());
            let row: Vec<f64> = fields
                .map(|f| {
                    f.parse::<f64>().map_err(|_| StatsError::Parse {
                        line: i + 1,
                        message: format!("bad number {:?}", f),
                    })
                })
                .collect::<Result<_, _>>()?;
            if row.len() != classifier_names.len() {
                return Err(StatsError::Parse {
                    line: i + 1,
                    message: format!(
                        "expected {} values, found {}",
                        classifier_names.len(),
                        row.len()
                    ),
                });
            }
            rows.push(row);
        }
        Self::new(dataset_names, classifier_names, rows)
    }
}

/// Per-dataset ranks (ties averaged) and their column means.
#[derive(Debug, Clone, PartialEq)]
pub struct RankSummary {
    pub average: Vec<f64>,
    pub per_dataset: Vec<Vec<f64>>,
}

/// Rank a row ascending, sharing the mean position among ties.
fn rank_row(row: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..row.len()).collect();
    idx.sort_by(|&a, &b| row[a].partial_cmp(&row[b]).unwrap().then(a.cmp(&b)));
    let mut out = vec![0.0; row.len()];
    let mut i = 0;
    while i < row.len() {
        let mut j = i;
        while j < row.len() && row[idx[j]] == row[idx[i]] {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        for t in i..j {
            out[idx[t]] = avg;
        }
        i = j;
    }
    out
}

pub fn average_ranks(table: &MetricTable) -> RankSummary {
    assert!(table.datasets() >= 1 && table.classifiers() >= 2);
    let n = table.datasets();
    let k = table.classifiers();
    let per_dataset: Vec<Vec<f64>> = (0..n)
        .map(|d| {
            let row: Vec<f64> = (0..k).map(|c| table.loss(d, c)).collect();
            rank_row(&row)
        })
        .collect();
    let average = (0..k)
        .map(|c| per_dataset.iter().map(|r| r[c]).sum::<f64>() / n as f64)
        .collect();
    RankSummary {
        average,
        per_dataset,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FriedmanOutcome {
    pub chi2: f64,
    pub df: usize,
    pub p: f64,
}

/// Classic chi-square form of the Friedman statistic on mean ranks, with
/// the upper-tail p at k-1 degrees of freedom.
pub fn friedman_test(ranks: &RankSummary) -> FriedmanOutcome {
    let n = ranks.per_dataset.len() as f64;
    let k = ranks.average.len();
    let kf = k as f64;
    let sum_sq: f64 = ranks.average.iter().map(|r| r * r).sum();
    let chi2 = 12.0 * n / (kf * (kf + 1.0)) * (sum_sq - kf * (kf + 1.0) * (kf + 1.0) / 4.0);
    FriedmanOutcome {
        chi2,
        df: k - 1,
        p: chi2_sf(chi2, k - 1),
    }
}

/// Exact permutation p for the Friedman statistic on small tables: every
/// dataset's observed (tied) rank row is permuted over classifiers
/// independently, and the statistic's null distribution is accumulated by
/// dynamic programming over column sums. None when the table is too large
/// to enumerate.
pub fn friedman_exact_p(ranks: &RankSummary) -> Option<f64> {
    let n = ranks.per_dataset.len();
    let k = ranks.average.len();
    if !(2..=4).contains(&k) || n == 0 || n > 15 {
        return None;
    }
    let observed = friedman_test(ranks).chi2;
    // doubled ranks stay integral under tie averaging
    let rows: Vec<Vec<u64>> = ranks
        .per_dataset
        .iter()
        .map(|r| r.iter().map(|&x| (2.0 * x).round() as u64).collect())
        .collect();
    let mut dist: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
    dist.insert(vec![0; k], 1.0);
    for row in &rows {
        let perms = distinct_permutations(row);
        let weight = 1.0 / perms.len() as f64;
        let mut next: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
        for (state, p) in &dist {
            for perm in &perms {
                let mut ns = state.clone();
                for (s, r) in ns.iter_mut().zip(perm) {
                    *s += r;
                }
                *next.entry(ns).or_insert(0.0) += p * weight;
            }
        }
        dist = next;
    }
    let nf = n as f64;
    let kf = k as f64;
    let mut p_exact = 0.0;
    for (state, p) in &dist {
        let sum_sq: f64 = state
            .iter()
            .map(|&s| {
                let rbar = s as f64 / (2.0 * nf);
                rbar * rbar
            })
            .sum();
        let chi2 = 12.0 * nf / (kf * (kf + 1.0)) * (sum_sq - kf * (kf + 1.0) * (kf + 1.0) / 4.0);
        if chi2 >= observed - 1e-9 {
            p_exact += p;
        }
    }
    Some(p_exact)
}

fn distinct_permutations(row: &[u64]) -> Vec<Vec<u64>> {
    let mut items = row.to_vec();
    items.sort_unstable();
    let mut out = Vec::new();
    loop {
        out.push(items.clone());
        // next lexicographic permutation; sorted start visits each distinct
        // arrangement exactly once
        let Some(i) = (0..items.len().saturating_sub(1)).rfind(|&i| items[i] < items[i + 1]) else {
            break;
        };
        let j = (i + 1..items.len()).rfind(|&j| items[j] > items[i]).unwrap();
        items.swap(i, j);
        items[i + 1..].reverse();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonOutcome {
    /// Signed rank-sum difference W+ - W-.
    pub statistic: f64,
    pub p: f64,
    pub exact: bool,
}

struct RankedDiffs {
    abs: Vec<f64>,
    ranks: Vec<f64>,
    w_plus: f64,
    statistic: f64,
}

/// Nonzero paired differences, their average ranks by absolute value, the
/// positive rank sum, and the signed statistic W+ - W-.
fn ranked_diffs(a: &[f64], b: &[f64]) -> RankedDiffs {
    assert_eq!(a.len(), b.len());
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = rank_row(&abs);
    let w_plus: f64 = ranks
        .iter()
        .zip(&diffs)
        .filter(|(_, d)| **d > 0.0)
        .map(|(r, _)| r)
        .sum();
    let n = diffs.len() as f64;
    let statistic = w_plus - (n * (n + 1.0) / 2.0 - w_plus);
    RankedDiffs {
        abs,
        ranks,
        w_plus,
        statistic,
    }
}

/// Two-sided paired signed-rank test. Zero differences are dropped; tied
/// absolute differences share average ranks. Small samples are enumerated
/// exactly over all sign assignments, larger ones use the normal
/// approximation with tie-corrected variance and a continuity correction.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> WilcoxonOutcome {
    let rd = ranked_diffs(a, b);
    let n = rd.abs.len();
    if n == 0 {
        return WilcoxonOutcome {
            statistic: 0.0,
            p: 1.0,
            exact: true,
        };
    }
    if n <= WILCOXON_EXACT_LIMIT {
        let doubled: Vec<u64> = rd.ranks.iter().map(|r| (2.0 * r).round() as u64).collect();
        let threshold = (2.0 * rd.statistic.abs()).round() as i64;
        WilcoxonOutcome {
            statistic: rd.statistic,
            p: wilcoxon_exact_p(&doubled, threshold),
            exact: true,
        }
    } else {
        WilcoxonOutcome {
            statistic: rd.statistic,
            p: wilcoxon_approx_p(rd.w_plus, n, tie_correction(&rd.abs)),
            exact: false,
        }
    }
}

/// The same test forced through the normal approximation regardless of
/// sample size, exposed so the exact path can be checked against it.
pub fn wilcoxon_signed_rank_approx(a: &[f64], b: &[f64]) -> WilcoxonOutcome {
    let rd = ranked_diffs(a, b);
    WilcoxonOutcome {
        statistic: rd.statistic,
        p: wilcoxon_approx_p(rd.w_plus, rd.abs.len(), tie_correction(&rd.abs)),
        exact: false,
    }
}

/// P(|S| >= threshold) over all sign assignments of the doubled ranks,
/// times two, capped at one. S is the doubled signed statistic.
fn wilcoxon_exact_p(doubled_ranks: &[u64], threshold: i64) -> f64 {
    let n = doubled_ranks.len();
    let total: i64 = doubled_ranks.iter().map(|&r| r as i64).sum();
    let mut count = 0u64;
    for mask in 0u64..(1 << n) {
        let mut neg = 0i64;
        for (i, &r) in doubled_ranks.iter().enumerate() {
            if mask & (1 << i) != 0 {
                neg += r as i64;
            }
        }
        if total - 2 * neg >= threshold {
            count += 1;
        }
    }
    (2.0 * count as f64 / (1u64 << n) as f64).min(1.0)
}

/// Sum of (t^3 - t)/48 over groups of tied absolute differences.
fn tie_correction(abs: &[f64]) -> f64 {
    let mut sorted = abs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        term += (t * t * t - t) / 48.0;
        i = j;
    }
    term
}

fn wilcoxon_approx_p(w_plus: f64, n: usize, tie_term: f64) -> f64 {
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
    if var <= 0.0 {
        return 1.0;
    }
    let d = w_plus - mean;
    let cc = if d > 0.0 {
        -0.5
    } else if d < 0.0 {
        0.5
    } else {
        0.0
    };
    let z = (d + cc) / var.sqrt();
    erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}

/// Pair (i, j) hypotheses in lexicographic order for k classifiers.
pub fn pairwise_indices(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            out.push((i, j));
        }
    }
    out
}

/// All hypothesis sets that can hold simultaneously when equality among
/// classifiers is an equivalence relation: one set per partition of the
/// classifiers, containing the pairwise hypotheses inside blocks.
pub fn pairwise_exhaustive_sets(k: usize) -> Result<Vec<Vec<usize>>, StatsError> {
    if !(2..=5).contains(&k) {
        return Err(StatsError::FamilyTooLarge { size: k });
    }
    let pairs = pairwise_indices(k);
    let pair_index = |a: usize, b: usize| pairs.iter().position(|&p| p == (a, b)).unwrap();
    let mut sets = Vec::new();
    let mut assign = vec![0usize; k];
    // depth-first over restricted growth strings enumerates set partitions
    fn recurse(
        item: usize,
        max_block: usize,
        assign: &mut Vec<usize>,
        k: usize,
        pair_index: &dyn Fn(usize, usize) -> usize,
        sets: &mut Vec<Vec<usize>>,
    ) {
        if item == k {
            let mut set = Vec::new();
            for a in 0..k {
                for b in a + 1..k {
                    if assign[a] == assign[b] {
                        set.push(pair_index(a, b));
                    }
                }
            }
            sets.push(set);
            return;
        }
        for block in 0..=max_block + 1 {
            assign[item] = block;
            recurse(
                item + 1,
                max_block.max(block),
                assign,
                k,
                pair_index,
                sets,
            );
        }
    }
    recurse(1, 0, &mut assign, k, &pair_index, &mut sets);
    Ok(sets)
}

/// Every subset as an exhaustive set: appropriate when the hypotheses have
/// no structural coupling, as across independent Friedman tests.
pub fn all_subsets_exhaustive_sets(m: usize) -> Result<Vec<Vec<usize>>, StatsError> {
    if m > 10 {
        return Err(StatsError::FamilyTooLarge { size: m });
    }
    Ok((0u32..(1 << m))
        .map(|mask| (0..m).filter(|i| mask & (1 << i) != 0).collect())
        .collect())
}

/// Reject H_i unless some exhaustive set containing i is acceptable, where
/// a set I is acceptable when min p over I exceeds alpha / |I|.
pub fn bergmann_hommel(pvalues: &[f64], exhaustive: &[Vec<usize>], alpha: f64) -> Vec<bool> {
    let mut accepted = vec![false; pvalues.len()];
    for set in exhaustive {
        if set.is_empty() {
            continue;
        }
        let min_p = set.iter().map(|&i| pvalues[i]).fold(f64::INFINITY, f64::min);
        if min_p > alpha / set.len() as f64 {
            for &i in set {
                accepted[i] = true;
            }
        }
    }
    accepted.into_iter().map(|a| !a).collect()
}

/// Holm's step-down procedure; returns rejection flags.
pub fn holm(pvalues: &[f64], alpha: f64) -> Vec<bool> {
    let m = pvalues.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvalues[a].partial_cmp(&pvalues[b]).unwrap().then(a.cmp(&b)));
    let mut reject = vec![false; m];
    for (pos, &i) in order.iter().enumerate() {
        if pvalues[i] <= alpha / (m - pos) as f64 {
            reject[i] = true;
        } else {
            break;
        }
    }
    reject
}

/// Table-2 style p rendering: tiny values clamp to "0.000" and near-one
/// values to "1.000".
pub fn fmt_p(p: f64) -> String {
    if p < 1e-3 {
        "0.000".into()
    } else if p > 0.999 {
        "1.000".into()
    } else {
        format!("{:.3}", p)
    }
}

/// Everything reported for one loss criterion.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub criterion: String,
    pub ranks: RankSummary,
    pub friedman: FriedmanOutcome,
    /// Symmetric matrix of pairwise two-sided p values; diagonal ignored.
    pub wilcoxon_p: Vec<Vec<f64>>,
}

/// Plain-text report: per criterion the Friedman p, the average ranks, and
/// the pairwise Wilcoxon matrix.
pub fn render_rank_table(classifier_names: &[String], reports: &[CriterionReport]) -> String {
    let width = classifier_names
        .iter()
        .map(|n| n.len())
        .max()
        .unwrap_or(0)
        .max(6)
        + 2;
    let mut out = String::new();
    for report in reports {
        let _ = writeln!(out, "criterion {}", report.criterion);
        let _ = writeln!(
            out,
            "  friedman chi2 = {:.3e}, df = {}, p = {:.3e}",
            report.friedman.chi2, report.friedman.df, report.friedman.p
        );
        let _ = write!(out, "  avg ranks:");
        for (name, rank) in classifier_names.iter().zip(&report.ranks.average) {
            let _ = write!(out, " {}={:.2}", name, rank);
        }
        out.push('\n');
        let _ = writeln!(out, "  wilcoxon p (two-sided):");
        let _ = write!(out, "  {:width$}", "");
        for name in classifier_names {
            let _ = write!(out, "{:width$}", name);
        }
        out.push('\n');
        for (i, name) in classifier_names.iter().enumerate() {
            let _ = write!(out, "  {:width$}", name);
            for j in 0..classifier_names.len() {
                if i == j {
                    let _ = write!(out, "{:width$}", "-");
                } else {
                    let _ = write!(out, "{:width$}", fmt_p(report.wilcoxon_p[i][j]));
                }
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}
