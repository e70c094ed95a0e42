use std::time::{Duration, Instant};
use rrc_core::rng::SeededRng;
use rrc_core::rrc::{ScoreFamily, DEFAULT_TOL};
use rrc_core::support::SupportVector;

fn main() {
    const DRAWS: usize = 1_000_000;
    let root = SeededRng::new(0xC2);
    for family_id in 0..2u64 {
        let mut quad_total = Duration::ZERO;
        let mut mc_total = Duration::ZERO;
        let mut worst_mc = (Duration::ZERO, 0u64);
        for case in 0..50u64 {
            let mut gen = root.derive(&[family_id, case, 0]);
            let family = if family_id == 0 {
                ScoreFamily::Normal { gamma: 0.1 + 0.9 * gen.uniform() }
            } else {
                ScoreFamily::Beta
            };
            let m = 2 + (gen.uniform() * 5.0) as usize;
            let masses: Vec<f64> = (0..m).map(|_| { let w = gen.uniform(); 1e-3 + w * w }).collect();
            let nu = SupportVector::from_masses(masses).unwrap();
            let t0 = Instant::now();
            let _ = family.probabilities(nu.values(), DEFAULT_TOL).unwrap();
            quad_total += t0.elapsed();
            let mut mc_rng = root.derive(&[family_id, case, 1]);
            let t0 = Instant::now();
            let _ = family.probabilities_mc(nu.values(), DRAWS, &mut mc_rng, false);
            let dt = t0.elapsed();
            mc_total += dt;
            if dt > worst_mc.0 { worst_mc = (dt, case); }
        }
        println!("family {family_id}: quad {quad_total:?}, mc {mc_total:?}, worst mc case {} at {:?}",
                 worst_mc.1, worst_mc.0);
    }
}
