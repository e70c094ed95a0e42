//! Turns campaign records into per-criterion loss tables and renders the
//! rank-based comparison: Friedman tests per criterion, pairwise
//! signed-rank tests, and family-wise error control over both levels.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rrc_core::{
    all_subsets_exhaustive_sets, average_ranks, bergmann_hommel, fmt_p, friedman_test,
    pairwise_exhaustive_sets, pairwise_indices, render_rank_table, wilcoxon_signed_rank,
    CriterionReport, MetricTable, LOSS_NAMES,
};

use crate::campaign::ResultRecord;
use crate::config::ALL_VARIANTS;

/// Mean-loss tables for one classifier kind: one table per criterion,
/// rows are datasets, columns are variants.
#[derive(Debug)]
pub struct KindTables {
    pub kind: String,
    pub variants: Vec<String>,
    pub tables: Vec<MetricTable>,
    /// Datasets dropped because some variant produced no records.
    pub incomplete: Vec<String>,
}

/// Aggregate records into per-kind mean-loss tables. Kinds and datasets
/// keep first-appearance order; variants follow the canonical order.
pub fn mean_loss_tables(records: &[ResultRecord]) -> Vec<KindTables> {
    let mut kinds: Vec<String> = Vec::new();
    for r in records {
        if !kinds.contains(&r.kind) {
            kinds.push(r.kind.clone());
        }
    }
    kinds
        .into_iter()
        .map(|kind| {
            let my: Vec<&ResultRecord> = records.iter().filter(|r| r.kind == kind).collect();
            let mut datasets: Vec<String> = Vec::new();
            for r in &my {
                if !datasets.contains(&r.dataset) {
                    datasets.push(r.dataset.clone());
                }
            }
            let variants: Vec<String> = ALL_VARIANTS
                .iter()
                .map(|v| v.name().to_string())
                .filter(|v| my.iter().any(|r| r.variant == *v))
                .collect();
            // sums[(dataset, variant)] over records, per criterion
            let mut sums: BTreeMap<(usize, usize), ([f64; 7], usize)> = BTreeMap::new();
            for r in &my {
                let d = datasets.iter().position(|n| *n == r.dataset).unwrap();
                let v = variants.iter().position(|n| *n == r.variant).unwrap();
                let entry = sums.entry((d, v)).or_insert(([0.0; 7], 0));
                for (acc, x) in entry.0.iter_mut().zip(r.losses.values()) {
                    *acc += x;
                }
                entry.1 += 1;
            }
            let complete: Vec<usize> = (0..datasets.len())
                .filter(|&d| (0..variants.len()).all(|v| sums.contains_key(&(d, v))))
                .collect();
            let incomplete: Vec<String> = (0..datasets.len())
                .filter(|d| !complete.contains(d))
                .map(|d| datasets[d].clone())
                .collect();
            let tables = (0..LOSS_NAMES.len())
                .map(|c| {
                    let rows: Vec<Vec<f64>> = complete
                        .iter()
                        .map(|&d| {
                            (0..variants.len())
                                .map(|v| {
                                    let (sum, n) = &sums[&(d, v)];
                                    sum[c] / *n as f64
                                })
                                .collect()
                        })
                        .collect();
                    let names = complete.iter().map(|&d| datasets[d].clone()).collect();
                    MetricTable::new(names, variants.clone(), rows)
                        .expect("aggregated table is rectangular")
                })
                .collect();
            KindTables {
                kind,
                variants,
                tables,
                incomplete,
            }
        })
        .collect()
}

/// Per-kind mean losses across datasets, one row per criterion.
pub fn render_summary(tables: &[KindTables]) -> String {
    let mut out = String::new();
    for kt in tables {
        let _ = writeln!(
            out,
            "kind {} ({} datasets)",
            kt.kind,
            kt.tables[0].datasets()
        );
        if !kt.incomplete.is_empty() {
            let _ = writeln!(out, "  skipped incomplete: {}", kt.incomplete.join(", "));
        }
        let _ = write!(out, "  {:<10}", "criterion");
        for v in &kt.variants {
            let _ = write!(out, "{:>15}", v);
        }
        out.push('\n');
        for (c, name) in LOSS_NAMES.iter().enumerate() {
            let _ = write!(out, "  {:<10}", name);
            let table = &kt.tables[c];
            for v in 0..kt.variants.len() {
                let mean = (0..table.datasets())
                    .map(|d| table.loss(d, v))
                    .sum::<f64>()
                    / table.datasets() as f64;
                let _ = write!(out, "{:>15.4}", mean);
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// Rank-based comparison for one kind.
#[derive(Debug)]
pub struct Comparison {
    pub kind: String,
    pub variants: Vec<String>,
    pub reports: Vec<CriterionReport>,
    /// Per criterion, the pairwise rejections after family-wise control.
    pub rejected_pairs: Vec<Vec<(usize, usize, f64)>>,
    /// Criteria whose Friedman test survives control across all seven.
    pub friedman_significant: Vec<bool>,
}

pub fn compare_kind(kt: &KindTables, alpha: f64) -> Result<Comparison, String> {
    let k = kt.variants.len();
    if k < 2 {
        return Err("comparison needs at least two variants".into());
    }
    if kt.tables[0].datasets() < 2 {
        return Err("comparison needs at least two datasets".into());
    }
    let pairs = pairwise_indices(k);
    let sets = pairwise_exhaustive_sets(k).map_err(|e| e.to_string())?;
    let mut reports = Vec::new();
    let mut rejected_pairs = Vec::new();
    for (c, name) in LOSS_NAMES.iter().enumerate() {
        let table = &kt.tables[c];
        let ranks = average_ranks(table);
        let friedman = friedman_test(&ranks);
        let mut matrix = vec![vec![1.0; k]; k];
        let mut pair_p = Vec::with_capacity(pairs.len());
        for &(i, j) in &pairs {
            let p = wilcoxon_signed_rank(&table.column(i), &table.column(j)).p;
            matrix[i][j] = p;
            matrix[j][i] = p;
            pair_p.push(p);
        }
        let reject = bergmann_hommel(&pair_p, &sets, alpha);
        rejected_pairs.push(
            pairs
                .iter()
                .zip(&reject)
                .zip(&pair_p)
                .filter(|((_, r), _)| **r)
                .map(|((&(i, j), _), &p)| (i, j, p))
                .collect(),
        );
        reports.push(CriterionReport {
            criterion: name.to_string(),
            ranks,
            friedman,
            wilcoxon_p: matrix,
        });
    }
    let friedman_ps: Vec<f64> = reports.iter().map(|r| r.friedman.p).collect();
    let subsets = all_subsets_exhaustive_sets(friedman_ps.len()).map_err(|e| e.to_string())?;
    let friedman_significant = bergmann_hommel(&friedman_ps, &subsets, alpha);
    Ok(Comparison {
        kind: kt.kind.clone(),
        variants: kt.variants.clone(),
        reports,
        rejected_pairs,
        friedman_significant,
    })
}

pub fn render_comparison(cmp: &Comparison, alpha: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "== kind {} ==", cmp.kind);
    out.push_str(&render_rank_table(&cmp.variants, &cmp.reports));
    for (c, report) in cmp.reports.iter().enumerate() {
        let _ = write!(out, "pairwise rejections at alpha={} [{}]: ", alpha, report.criterion);
        if cmp.rejected_pairs[c].is_empty() {
            out.push_str("none\n");
        } else {
            let items: Vec<String> = cmp.rejected_pairs[c]
                .iter()
                .map(|&(i, j, p)| {
                    format!("{} vs {} (p={})", cmp.variants[i], cmp.variants[j], fmt_p(p))
                })
                .collect();
            let _ = writeln!(out, "{}", items.join(", "));
        }
    }
    let surviving: Vec<&str> = cmp
        .reports
        .iter()
        .zip(&cmp.friedman_significant)
        .filter(|(_, s)| **s)
        .map(|(r, _)| r.criterion.as_str())
        .collect();
    let _ = writeln!(
        out,
        "friedman significant across criteria at alpha={}: {}",
        alpha,
        if surviving.is_empty() {
            "none".to_string()
        } else {
            surviving.join(", ")
        }
    );
    out.push('\n');
    out
}
