//! Randomized scoring of class supports: each class receives a random score
//! on [0, 1] whose distribution is shaped by its support value, and the
//! refined support is the probability that the class's score beats all
//! others. Computed either by adaptive quadrature of
//! pdf_m(t) prod_{j != m} cdf_j(t) or by Monte Carlo argmax counting.

use crate::dist::{match_mean, BetaDist, TruncNormal, UnitDist};
use crate::quad::{integrate, QuadError};
use crate::rng::SeededRng;
use crate::support::{decide_slice, SupportVector};

/// Default absolute quadrature tolerance per component.
pub const DEFAULT_TOL: f64 = 1e-8;

// Candidate widths for the peeled endpoint strips, tried in order until the
// certified strip error fits the budget.
const PEEL_LADDER: [f64; 3] = [1e-6, 1e-9, 1e-12];

// Above this many classes the competitor product is taken in log space.
const LOG_PRODUCT_THRESHOLD: usize = 20;

/// Score scale for one class: (nu (1 - nu) / (M + 1))^gamma, floored at 1e-4.
pub fn score_sd(nu: f64, class_count: usize, gamma: f64) -> f64 {
    let raw = (nu * (1.0 - nu) / (class_count as f64 + 1.0)).max(0.0);
    // sqrt is correctly rounded while libm pow is not; gamma = 0.5 is the
    // beta standard deviation and the identity should hold bit for bit
    let scaled = if gamma == 0.5 { raw.sqrt() } else { raw.powf(gamma) };
    scaled.max(1e-4)
}

/// How the normal score distribution is located.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocationRule {
    /// Solve for mu so the restricted mean equals the support value.
    MatchedMean,
    /// Place mu at the support value directly.
    DirectMu,
}

/// Normal score distributions for a support vector.
pub fn truncnorm_scores(nu: &[f64], gamma: f64, rule: LocationRule) -> Vec<TruncNormal> {
    let m = nu.len();
    nu.iter()
        .map(|&v| {
            let sd = score_sd(v, m, gamma);
            let mu = match rule {
                LocationRule::MatchedMean => match_mean(v, sd),
                LocationRule::DirectMu => v,
            };
            TruncNormal::new(mu, sd)
        })
        .collect()
}

/// Beta score distributions for a support vector.
pub fn beta_scores(nu: &[f64]) -> Vec<BetaDist> {
    let m = nu.len();
    nu.iter().map(|&v| BetaDist::for_support(v, m)).collect()
}

/// Score distribution family used to refine supports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScoreFamily {
    /// Normal restricted to [0,1], mean-matched, scale from `score_sd`.
    Normal { gamma: f64 },
    /// Beta with shapes (M nu, M (1 - nu)).
    Beta,
}

impl ScoreFamily {
    pub fn probabilities(&self, nu: &[f64], tol: f64) -> Result<SupportVector, QuadError> {
        match self {
            ScoreFamily::Normal { gamma } => exceedance_probabilities(
                &truncnorm_scores(nu, *gamma, LocationRule::MatchedMean),
                tol,
            ),
            ScoreFamily::Beta => exceedance_probabilities(&beta_scores(nu), tol),
        }
    }

    pub fn probabilities_mc(
        &self,
        nu: &[f64],
        draws: usize,
        rng: &mut SeededRng,
        normalize_draws: bool,
    ) -> SupportVector {
        match self {
            ScoreFamily::Normal { gamma } => exceedance_probabilities_mc(
                &truncnorm_scores(nu, *gamma, LocationRule::MatchedMean),
                draws,
                rng,
                normalize_draws,
            ),
            ScoreFamily::Beta => {
                exceedance_probabilities_mc(&beta_scores(nu), draws, rng, normalize_draws)
            }
        }
    }
}

fn competitor_product(cdfs: &[f64], skip: usize) -> f64 {
    if cdfs.len() > LOG_PRODUCT_THRESHOLD {
        let mut log_sum = 0.0;
        for (j, &c) in cdfs.iter().enumerate() {
            if j == skip {
                continue;
            }
            if c <= 0.0 {
                return 0.0;
            }
            log_sum += c.ln();
        }
        log_sum.exp()
    } else {
        let mut prod = 1.0;
        for (j, &c) in cdfs.iter().enumerate() {
            if j != skip {
                prod *= c;
            }
        }
        prod
    }
}

/// P(score_m is the maximum) for every m, by quadrature over [0,1] with the
/// endpoint strips bounded analytically instead of integrated.
pub fn exceedance_probabilities<D: UnitDist>(
    dists: &[D],
    tol: f64,
) -> Result<SupportVector, QuadError> {
    let m_count = dists.len();
    assert!(m_count >= 2, "need at least two classes");

    // pick the widest strip whose certified error fits a quarter of the budget
    let mut delta = *PEEL_LADDER.last().unwrap();
    let mut cdf_lo = vec![0.0; m_count];
    let mut cdf_hi = vec![0.0; m_count];
    'ladder: for &d in &PEEL_LADDER {
        for (j, dist) in dists.iter().enumerate() {
            cdf_lo[j] = dist.cdf(d);
            cdf_hi[j] = dist.cdf(1.0 - d);
        }
        let mut worst = 0.0f64;
        for m in 0..m_count {
            let left = 0.5 * cdf_lo[m] * competitor_product(&cdf_lo, m);
            let right = 0.5 * (1.0 - cdf_hi[m]) * (1.0 - competitor_product(&cdf_hi, m));
            worst = worst.max(left + right);
        }
        delta = d;
        if worst <= 0.25 * tol {
            break 'ladder;
        }
    }
    for (j, dist) in dists.iter().enumerate() {
        cdf_lo[j] = dist.cdf(delta);
        cdf_hi[j] = dist.cdf(1.0 - delta);
    }

    let mut breakpoints = Vec::new();
    for dist in dists {
        dist.breakpoints(&mut breakpoints);
    }

    let mut masses = Vec::with_capacity(m_count);
    for m in 0..m_count {
        let left_top = cdf_lo[m] * competitor_product(&cdf_lo, m);
        let right_mass = 1.0 - cdf_hi[m];
        let right_bottom = right_mass * competitor_product(&cdf_hi, m);
        let strip_value = 0.5 * left_top + 0.5 * (right_bottom + right_mass);
        let strip_error = 0.5 * left_top + 0.5 * (right_mass - right_bottom);

        let core_tol = (tol - strip_error).max(0.1 * tol);
        let dist_m = &dists[m];
        let core = integrate(
            |t| {
                let p = dist_m.pdf(t);
                if p == 0.0 {
                    return 0.0;
                }
                if m_count > LOG_PRODUCT_THRESHOLD {
                    let mut log_sum = 0.0;
                    for (j, d) in dists.iter().enumerate() {
                        if j == m {
                            continue;
                        }
                        let c = d.cdf(t);
                        if c <= 0.0 {
                            return 0.0;
                        }
                        log_sum += c.ln();
                    }
                    p * log_sum.exp()
                } else {
                    let mut prod = p;
                    for (j, d) in dists.iter().enumerate() {
                        if j != m {
                            prod *= d.cdf(t);
                        }
                    }
                    prod
                }
            },
            delta,
            1.0 - delta,
            &breakpoints,
            core_tol,
        )?;
        masses.push((core.value + strip_value).max(0.0));
    }

    let sum: f64 = masses.iter().sum();
    if (sum - 1.0).abs() > 1e-4 {
        return Err(QuadError::MassMismatch { sum });
    }
    Ok(SupportVector::from_masses(masses).expect("masses validated"))
}

/// Monte Carlo version: draw every class's score, count argmax wins.
///
/// `normalize_draws` rescales each draw vector to unit sum first; the winner
/// is unchanged because the scale factor is positive, so both settings give
/// bit-identical counts on the same stream.
pub fn exceedance_probabilities_mc<D: UnitDist>(
    dists: &[D],
    draws: usize,
    rng: &mut SeededRng,
    normalize_draws: bool,
) -> SupportVector {
    let m_count = dists.len();
    assert!(m_count >= 2, "need at least two classes");
    assert!(draws > 0, "need at least one draw");
    let mut counts = vec![0u64; m_count];
    let mut scores = vec![0.0f64; m_count];
    for _ in 0..draws {
        for (j, d) in dists.iter().enumerate() {
            scores[j] = d.sample(rng);
        }
        if normalize_draws {
            let s: f64 = scores.iter().sum();
            if s > 0.0 {
                for v in scores.iter_mut() {
                    *v /= s;
                }
            }
        }
        counts[decide_slice(&scores)] += 1;
    }
    let masses: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    SupportVector::from_masses(masses).expect("counts sum to draws")
}
