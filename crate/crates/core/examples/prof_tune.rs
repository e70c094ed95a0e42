use std::time::Instant;

use rrc_core::dist::{match_mean, TruncNormal, UnitDist};
use rrc_core::rng::SeededRng;
use rrc_core::rrc::{score_sd, ScoreFamily, DEFAULT_TOL};

fn main() {
    let mut rng = SeededRng::new(7);
    // typical M=2 centroid supports and the gamma grid
    let cases: Vec<(f64, f64)> = (0..2000)
        .map(|_| {
            let nu = 0.05 + 0.9 * rng.uniform();
            let g = 0.1 * (1.0 + (rng.uniform() * 10.0).floor().min(9.0));
            (nu, g)
        })
        .collect();

    let t = Instant::now();
    let mut acc = 0.0;
    for &(nu, g) in &cases {
        let sd = score_sd(nu, 2, g);
        acc += match_mean(nu, sd);
        let sd2 = score_sd(1.0 - nu, 2, g);
        acc += match_mean(1.0 - nu, sd2);
    }
    println!("match_mean x{}: {:?} (acc {acc:.3})", 2 * cases.len(), t.elapsed());

    let t = Instant::now();
    let mut acc = 0.0;
    for &(nu, g) in &cases {
        let fam = ScoreFamily::Normal { gamma: g };
        let p = fam.probabilities(&[nu, 1.0 - nu], DEFAULT_TOL).unwrap();
        acc += p.values()[0];
    }
    println!("normal probabilities x{}: {:?} (acc {acc:.3})", cases.len(), t.elapsed());

    let t = Instant::now();
    let mut acc = 0.0;
    for &(nu, _) in &cases {
        let fam = ScoreFamily::Beta;
        let p = fam.probabilities(&[nu, 1.0 - nu], DEFAULT_TOL).unwrap();
        acc += p.values()[0];
    }
    println!("beta probabilities x{}: {:?} (acc {acc:.3})", cases.len(), t.elapsed());

    // how expensive is one truncnorm mean evaluation (the bisection inner op)
    let t = Instant::now();
    let mut acc = 0.0;
    for &(nu, g) in &cases {
        let sd = score_sd(nu, 2, g);
        for k in 0..10 {
            acc += TruncNormal::new(nu - 0.2 + 0.04 * k as f64, sd).mean();
        }
    }
    println!("truncnorm mean x{}: {:?} (acc {acc:.3})", 10 * cases.len(), t.elapsed());
}
