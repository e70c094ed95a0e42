//! Benchmarks for the paths the tuning campaign spends its time in:
//! reference-classifier probabilities by quadrature, mean matching,
//! score sampling, and the locally weighted confusion estimate.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use rrc_core::dist::{match_mean, TruncNormal, UnitDist};
use rrc_core::rrc::score_sd;
use rrc_core::scm::{collect_bank_supports, gaussian_weights, local_confusion};
use rrc_core::{BaseSpec, Dataset, ScoreFamily, SeededRng, DEFAULT_TOL};

fn three_blobs(per_class: usize) -> Dataset {
    let mut rng = SeededRng::new(41);
    let centers = [(0.2, 0.2), (0.8, 0.3), (0.5, 0.8)];
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (c, &(cx, cy)) in centers.iter().enumerate() {
        for _ in 0..per_class {
            features.push(cx + 0.15 * (rng.uniform() - 0.5));
            features.push(cy + 0.15 * (rng.uniform() - 0.5));
            labels.push(c);
        }
    }
    Dataset::new("blobs", features, 2, labels, 3).unwrap()
}

fn bench_probabilities(c: &mut Criterion) {
    let nu = [0.55, 0.30, 0.15];
    c.bench_function("normal_probabilities_m3", |b| {
        let family = ScoreFamily::Normal { gamma: 0.5 };
        b.iter(|| family.probabilities(black_box(&nu), DEFAULT_TOL).unwrap())
    });
    c.bench_function("beta_probabilities_m3", |b| {
        b.iter(|| ScoreFamily::Beta.probabilities(black_box(&nu), DEFAULT_TOL).unwrap())
    });
}

fn bench_match_mean(c: &mut Criterion) {
    c.bench_function("match_mean", |b| {
        let sd = score_sd(0.7, 3, 0.5);
        b.iter(|| match_mean(black_box(0.7), black_box(sd)))
    });
}

fn bench_sampling(c: &mut Criterion) {
    c.bench_function("truncnorm_sample_1k", |b| {
        let dist = TruncNormal::new(0.62, 0.11);
        let mut rng = SeededRng::new(7);
        b.iter(|| {
            let mut acc = 0.0;
            for _ in 0..1000 {
                acc += dist.sample(&mut rng);
            }
            acc
        })
    });
}

fn bench_local_confusion(c: &mut Criterion) {
    let data = three_blobs(50);
    let mut rng = SeededRng::new(13);
    let (_, bank) = collect_bank_supports(&BaseSpec::NearestCentroid, &data, &mut rng).unwrap();
    let bank = bank.with_family(ScoreFamily::Beta, DEFAULT_TOL).unwrap();
    let weights = gaussian_weights(&bank.squared_distances(&[0.4, 0.5]), 6.0);
    c.bench_function("local_confusion_150", |b| {
        b.iter(|| local_confusion(black_box(&bank), black_box(&weights)))
    });
}

criterion_group!(
    hot_paths,
    bench_probabilities,
    bench_match_mean,
    bench_sampling,
    bench_local_confusion
);
criterion_main!(hot_paths);
