//! End-to-end checks of the toolkit's headline guarantees, one test per
//! numbered criterion so the run reads as a checklist. Criteria 6 and 7
//! share a pair of full campaign runs behind a OnceLock.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rrc_cli::campaign::{run_campaign, ResultRecord};
use rrc_cli::config::{
    default_betas, default_gammas, default_ks, BaseKind, CampaignConfig, Variant,
};
use rrc_cli::report::mean_loss_tables;
use rrc_core::scm::{corrected_posterior, SoftMatrix};
use rrc_core::{
    average_ranks, bergmann_hommel, compute_losses, friedman_test, holm, match_mean,
    pairwise_exhaustive_sets, score_sd, wilcoxon_signed_rank, wilcoxon_signed_rank_approx,
    ConfusionCounts, MetricTable, ScoreFamily, SeededRng, SupportVector, TruncNormal, UnitDist,
    DEFAULT_TOL,
};

#[test]
fn criterion_1_micro_losses_collapse_to_zero_one() {
    let t0 = Instant::now();
    let mut rng = SeededRng::new(0xC1);
    for _ in 0..1000 {
        let m = 2 + (rng.uniform() * 9.0) as usize;
        let mut counts = ConfusionCounts::new(m);
        for truth in 0..m {
            for predicted in 0..m {
                // the +1 on the diagonal keeps every class present
                let n = (rng.uniform() * 20.0) as usize + usize::from(truth == predicted);
                for _ in 0..n {
                    counts.record(truth, predicted);
                }
            }
        }
        let losses = compute_losses(&counts);
        assert_eq!(losses.micro_fdr.to_bits(), losses.zero_one.to_bits());
        assert_eq!(losses.micro_fnr.to_bits(), losses.zero_one.to_bits());
        assert_eq!(losses.micro_f1_loss.to_bits(), losses.zero_one.to_bits());
    }
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
}

#[test]
fn criterion_2_quadrature_matches_sampling_oracle() {
    const DRAWS: usize = 1_000_000;
    let t0 = Instant::now();
    let root = SeededRng::new(0xC2);
    for family_id in 0..2u64 {
        for case in 0..50u64 {
            let mut gen = root.derive(&[family_id, case, 0]);
            let family = if family_id == 0 {
                ScoreFamily::Normal {
                    gamma: 0.1 + 0.9 * gen.uniform(),
                }
            } else {
                ScoreFamily::Beta
            };
            let m = 2 + (gen.uniform() * 5.0) as usize;
            let masses: Vec<f64> = (0..m)
                .map(|_| {
                    let w = gen.uniform();
                    1e-3 + w * w
                })
                .collect();
            let nu = SupportVector::from_masses(masses).unwrap();
            let quad = family.probabilities(nu.values(), DEFAULT_TOL).unwrap();
            let mut mc_rng = root.derive(&[family_id, case, 1]);
            let mc = family.probabilities_mc(nu.values(), DRAWS, &mut mc_rng, false);
            for (i, (q, s)) in quad.values().iter().zip(mc.values()).enumerate() {
                let pooled = 0.5 * (q + s);
                let tol = 4.0 * ((pooled * (1.0 - pooled) + 1e-12) / DRAWS as f64).sqrt();
                assert!(
                    (q - s).abs() <= tol,
                    "family {family:?} case {case} component {i}: \
                     quadrature {q} vs sampled {s}, tolerance {tol:e}"
                );
            }
        }
    }
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
}

#[test]
fn criterion_3_mean_matching_and_half_power_scale() {
    let t0 = Instant::now();
    let mut rng = SeededRng::new(0xC3);
    for _ in 0..10_000 {
        let nu = 1e-4 + (1.0 - 2e-4) * rng.uniform();
        let sigma = 1e-4 + 0.6 * rng.uniform();
        let mu = match_mean(nu, sigma);
        let mean = TruncNormal::new(mu, sigma).mean();
        assert!(
            (mean - nu).abs() <= 1e-9,
            "nu {nu} sigma {sigma}: achieved mean {mean}"
        );
    }
    for _ in 0..10_000 {
        let nu = 0.001 + 0.998 * rng.uniform();
        let m = 2 + (rng.uniform() * 9.0) as usize;
        let beta_sd = (nu * (1.0 - nu) / (m as f64 + 1.0)).sqrt();
        let scale = score_sd(nu, m, 0.5);
        assert_eq!(
            scale.to_bits(),
            beta_sd.to_bits(),
            "nu {nu} M {m}: scale {scale} vs beta sd {beta_sd}"
        );
    }
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
}

#[test]
fn criterion_4_confusion_correction_identities() {
    let t0 = Instant::now();
    let mut rng = SeededRng::new(0xC4);
    for _ in 0..200 {
        let m = 2 + (rng.uniform() * 9.0) as usize;
        let masses: Vec<f64> = (0..m).map(|_| 1e-6 + rng.uniform()).collect();
        let query = SupportVector::from_masses(masses).unwrap();

        let mut diag = vec![0.0; m * m];
        for i in 0..m {
            diag[i * m + i] = 0.1 + 5.0 * rng.uniform();
        }
        let conf = SoftMatrix::from_entries(m, diag);
        let corrected = corrected_posterior(&conf, query.values());
        for (c, q) in corrected.values().iter().zip(query.values()) {
            assert!(
                (c - q).abs() <= 1e-12,
                "diagonal confusion moved {q} to {c}"
            );
        }

        let fill = 0.1 + 5.0 * rng.uniform();
        let conf = SoftMatrix::from_entries(m, vec![fill; m * m]);
        let corrected = corrected_posterior(&conf, query.values());
        let want = 1.0 / m as f64;
        for c in corrected.values() {
            assert!(
                (c - want).abs() <= 1e-12,
                "uniform confusion gave {c}, want {want}"
            );
        }
    }
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
}

#[test]
fn criterion_5_rank_statistics_pipeline() {
    let t0 = Instant::now();
    let mut rng = SeededRng::new(0xC5);

    // the exact enumeration and the normal approximation agree closely
    // right at the crossover sample sizes
    for case in 0..100 {
        let n = 10 + (rng.uniform() * 3.0) as usize;
        let a: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
        let exact = wilcoxon_signed_rank(&a, &b);
        let approx = wilcoxon_signed_rank_approx(&a, &b);
        assert!(exact.exact && !approx.exact);
        assert!(
            (exact.p - approx.p).abs() <= 0.02,
            "case {case} n {n}: exact p {} vs approx p {}",
            exact.p,
            approx.p
        );
    }

    // the exhaustive-set procedure is at least as powerful as Holm
    let sets = pairwise_exhaustive_sets(3).unwrap();
    for _ in 0..1000 {
        let ps: Vec<f64> = (0..3).map(|_| rng.uniform().powi(2)).collect();
        let bh = bergmann_hommel(&ps, &sets, 0.05);
        let ho = holm(&ps, 0.05);
        for i in 0..3 {
            assert!(bh[i] || !ho[i], "Holm rejected {i} but the set procedure kept it: {ps:?}");
        }
    }

    // a fully ordered 3-classifier table over 64 datasets is overwhelming
    let rows: Vec<Vec<f64>> = (0..64)
        .map(|d| {
            let base = d as f64 * 0.001;
            vec![base + 0.01, base + 0.02, base + 0.03]
        })
        .collect();
    let table = MetricTable::new(
        (0..64).map(|d| format!("d{d}")).collect(),
        vec!["a".into(), "b".into(), "c".into()],
        rows,
    )
    .unwrap();
    let outcome = friedman_test(&average_ranks(&table));
    assert!(outcome.p < 1e-9, "fully ordered table gave p {}", outcome.p);

    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
}

const CAMPAIGN_SEED: u64 = 20260816;

const ROSTER: [&str; 10] = [
    "banana2d.arff",
    "check2d.arff",
    "gauss3.arff",
    "gausssand.arff",
    "halfrings1.arff",
    "halfrings2.arff",
    "ring2d.arff",
    "spirals1.arff",
    "iris.arff",
    "wine.arff",
];

fn dataset_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../datasets")
}

fn campaign_config(output: PathBuf, workers: usize) -> CampaignConfig {
    CampaignConfig {
        datasets: ROSTER.iter().map(|n| dataset_dir().join(n)).collect(),
        kinds: vec![BaseKind::NearestCentroid],
        variants: vec![Variant::Raw, Variant::BetaScm, Variant::TruncnormScm],
        betas: default_betas(),
        gammas: default_gammas(),
        ks: default_ks(),
        reps: 10,
        folds: 5,
        seed: CAMPAIGN_SEED,
        output,
        feature_selection: false,
        workers,
        timings: false,
    }
}

struct CampaignRuns {
    records: Vec<ResultRecord>,
    failures: Vec<String>,
    first_csv: Vec<u8>,
    second_csv: Vec<u8>,
    single_thread_elapsed: Duration,
}

static CAMPAIGN: OnceLock<CampaignRuns> = OnceLock::new();

fn campaign_runs() -> &'static CampaignRuns {
    CAMPAIGN.get_or_init(|| {
        let base = std::env::temp_dir().join(format!("rrc-acceptance-{}", std::process::id()));
        let out1 = base.join("run1");
        let out2 = base.join("run2");
        let t0 = Instant::now();
        let first = run_campaign(&campaign_config(out1.clone(), 1)).expect("campaign run");
        let single_thread_elapsed = t0.elapsed();
        let second = run_campaign(&campaign_config(out2.clone(), 4)).expect("campaign rerun");
        let first_csv = fs::read(out1.join("results.csv")).expect("first results.csv");
        let second_csv = fs::read(out2.join("results.csv")).expect("second results.csv");
        let mut failures = first.failures;
        failures.extend(second.failures);
        let _ = fs::remove_dir_all(&base);
        CampaignRuns {
            records: first.records,
            failures,
            first_csv,
            second_csv,
            single_thread_elapsed,
        }
    })
}

#[test]
fn criterion_6_centroid_campaign_directional_findings() {
    let runs = campaign_runs();
    assert!(runs.failures.is_empty(), "failed tasks: {:?}", runs.failures);
    assert_eq!(runs.records.len(), ROSTER.len() * 10 * 5 * 3);
    assert!(
        runs.single_thread_elapsed < Duration::from_secs(1800),
        "single-threaded campaign took {:?}",
        runs.single_thread_elapsed
    );

    let tables = mean_loss_tables(&runs.records);
    let kt = tables
        .iter()
        .find(|t| t.kind == "centroid")
        .expect("centroid tables");
    assert!(kt.incomplete.is_empty(), "incomplete: {:?}", kt.incomplete);
    assert_eq!(kt.variants, ["raw", "beta-scm", "truncnorm-scm"]);

    let zero_one = &kt.tables[0];
    let ranks = average_ranks(zero_one);
    assert!(
        ranks.average[1] <= ranks.average[0],
        "beta-corrected rank {} vs raw {}",
        ranks.average[1],
        ranks.average[0]
    );
    assert!(
        ranks.average[2] <= ranks.average[0],
        "normal-corrected rank {} vs raw {}",
        ranks.average[2],
        ranks.average[0]
    );

    let raw = zero_one.column(0);
    let beta = zero_one.column(1);
    let truncnorm = zero_one.column(2);
    let p_beta = wilcoxon_signed_rank(&raw, &beta).p;
    let p_truncnorm = wilcoxon_signed_rank(&raw, &truncnorm).p;
    assert!(p_beta < 0.05, "raw vs beta-corrected p {p_beta}");
    assert!(p_truncnorm < 0.05, "raw vs normal-corrected p {p_truncnorm}");

    // the two corrected variants: either statistically level on zero-one
    // or the normal-score variant ahead on every macro criterion
    let p_between = wilcoxon_signed_rank(&beta, &truncnorm).p;
    let truncnorm_macro_better = (1..=3).all(|c| {
        let r = average_ranks(&kt.tables[c]);
        r.average[2] < r.average[1]
    });
    assert!(
        p_between >= 0.05 || truncnorm_macro_better,
        "corrected variants separated on zero-one (p {p_between}) \
         without a macro advantage"
    );
}

#[test]
fn criterion_7_same_seed_reruns_are_byte_identical() {
    let runs = campaign_runs();
    assert!(!runs.first_csv.is_empty());
    assert!(
        runs.first_csv == runs.second_csv,
        "same-seed reruns produced different results.csv bytes"
    );
}

#[test]
fn criterion_8_data_info_reports_iris_shape() {
    let out = Command::new(env!("CARGO_BIN_EXE_rrc"))
        .args(["data", "info"])
        .arg(dataset_dir().join("iris.arff"))
        .output()
        .expect("run data info");
    assert!(out.status.success(), "exit {:?}", out.status);
    let stdout = String::from_utf8(out.stdout).expect("utf8 stdout");
    assert_eq!(stdout, "iris: |S|=150, d=4, C=3, IR=1.00\n");
}
