//! Distributions on the unit interval: a normal law restricted to [0,1] and
//! a beta law, each with tail-stable pdf/cdf/mean, mean matching by
//! bisection, and inverse-cdf sampling.

use rand_distr::Distribution;

use crate::rng::SeededRng;
use crate::special::{
    inc_beta_reg, ln_beta, norm_cdf, norm_cdf_diff, norm_pdf, norm_quantile_fast,
};

/// Continuous distribution supported on [0, 1].
pub trait UnitDist {
    fn pdf(&self, t: f64) -> f64;
    fn cdf(&self, t: f64) -> f64;
    fn mean(&self) -> f64;
    fn sample(&self, rng: &mut SeededRng) -> f64;
    /// Interior points an adaptive integrator should split at.
    fn breakpoints(&self, out: &mut Vec<f64>);
}

// Beyond this standardized distance the window mass is computed from Mills
// ratio asymptotics; below it, erfc differences still carry full precision.
const FAR_Z: f64 = 36.0;

// Mills ratio R(x) = (1 - Phi(x)) / phi(x) for x >= FAR_Z.
fn mills(x: f64) -> f64 {
    let w = 1.0 / (x * x);
    (1.0 + w * (-1.0 + w * (3.0 + w * (-15.0 + w * (105.0 - w * 945.0))))) / x
}

// x * R(x) - 1 without the cancellation of forming it literally.
fn mills_xr_minus_one(x: f64) -> f64 {
    let w = 1.0 / (x * x);
    w * (-1.0 + w * (3.0 + w * (-15.0 + w * (105.0 - w * 945.0))))
}

#[derive(Debug, Clone)]
enum Window {
    /// Both standardized bounds within reach of erfc differences.
    /// `lo_cdf` and `lo_sf` are Phi(alpha) and 1 - Phi(alpha), cached so
    /// sampling costs one quantile evaluation per draw.
    Central {
        alpha: f64,
        beta: f64,
        mass: f64,
        lo_cdf: f64,
        lo_sf: f64,
    },
    /// Window deep in one normal tail. Parameters describe 1 - X when
    /// `flipped`, so the mass always packs toward t = 1.
    Packed {
        flipped: bool,
        mu_eff: f64,
        b: f64,      // (mu_eff - 1) / sigma, >= FAR_Z
        s0: f64,     // b + 1/sigma, standardized distance at t = 0
        gq: f64,     // phi(s0) / phi(b)
        rb: f64,     // Mills ratio at b
        rs0: f64,    // Mills ratio at s0
        ratio0: f64, // tail mass ratio at t = 0: gq * rs0 / rb
    },
}

/// Normal(mu, sigma) conditioned on [0, 1].
#[derive(Debug, Clone)]
pub struct TruncNormal {
    mu: f64,
    sigma: f64,
    window: Window,
}

impl TruncNormal {
    pub fn new(mu: f64, sigma: f64) -> Self {
        assert!(sigma > 0.0 && sigma.is_finite(), "sigma must be positive");
        assert!(mu.is_finite(), "mu must be finite");
        let alpha = (0.0 - mu) / sigma;
        let beta = (1.0 - mu) / sigma;
        let window = if beta <= -FAR_Z {
            Self::packed(mu, sigma, false)
        } else if alpha >= FAR_Z {
            Self::packed(1.0 - mu, sigma, true)
        } else {
            Window::Central {
                alpha,
                beta,
                mass: norm_cdf_diff(alpha, beta),
                lo_cdf: norm_cdf(alpha),
                lo_sf: norm_cdf(-alpha),
            }
        };
        Self { mu, sigma, window }
    }

    fn packed(mu_eff: f64, sigma: f64, flipped: bool) -> Window {
        let b = (mu_eff - 1.0) / sigma;
        let s0 = b + 1.0 / sigma;
        // phi(s0)/phi(b) = exp((b - s0)(b + s0)/2); the exponent is <= 0
        let gq = (0.5 * (b - s0) * (b + s0)).exp();
        let rb = mills(b);
        let rs0 = mills(s0);
        Window::Packed {
            flipped,
            mu_eff,
            b,
            s0,
            gq,
            rb,
            rs0,
            ratio0: gq * rs0 / rb,
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    // Survival-mass ratio (1 - F_normal(s-domain)) relative to the tail at b.
    fn packed_tail_ratio(b: f64, rb: f64, s: f64) -> f64 {
        (0.5 * (b - s) * (b + s)).exp() * mills(s) / rb
    }

    fn pdf_raw(&self, t: f64) -> f64 {
        match &self.window {
            Window::Central { mass, .. } => {
                let z = (t - self.mu) / self.sigma;
                norm_pdf(z) / (self.sigma * mass)
            }
            Window::Packed {
                flipped,
                mu_eff,
                b,
                rb,
                ratio0,
                ..
            } => {
                let t_eff = if *flipped { 1.0 - t } else { t };
                let s = (mu_eff - t_eff) / self.sigma;
                let g = (0.5 * (b - s) * (b + s)).exp();
                g / (self.sigma * rb * (1.0 - ratio0))
            }
        }
    }

    fn cdf_raw(&self, t: f64) -> f64 {
        match &self.window {
            Window::Central { alpha, mass, .. } => {
                let z = (t - self.mu) / self.sigma;
                (norm_cdf_diff(*alpha, z) / mass).clamp(0.0, 1.0)
            }
            Window::Packed {
                flipped,
                mu_eff,
                b,
                rb,
                ratio0,
                ..
            } => {
                let t_eff = if *flipped { 1.0 - t } else { t };
                let s = (mu_eff - t_eff) / self.sigma;
                let r = Self::packed_tail_ratio(*b, *rb, s);
                let c = ((r - ratio0) / (1.0 - ratio0)).clamp(0.0, 1.0);
                if *flipped {
                    1.0 - c
                } else {
                    c
                }
            }
        }
    }
}

impl UnitDist for TruncNormal {
    fn pdf(&self, t: f64) -> f64 {
        if !(0.0..=1.0).contains(&t) {
            return 0.0;
        }
        self.pdf_raw(t)
    }

    fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        self.cdf_raw(t)
    }

    fn mean(&self) -> f64 {
        match &self.window {
            Window::Central {
                alpha, beta, mass, ..
            } => self.mu + self.sigma * (norm_pdf(*alpha) - norm_pdf(*beta)) / mass,
            Window::Packed {
                flipped,
                b,
                s0,
                gq,
                rb,
                rs0,
                ..
            } => {
                // E - 1 in units of sigma, assembled from cancellation-free parts
                let n = mills_xr_minus_one(*b)
                    + gq * (1.0 / (self.sigma * s0) - (b / s0) * mills_xr_minus_one(*s0));
                let d = rb - gq * rs0;
                let e = 1.0 + self.sigma * n / d;
                if *flipped {
                    1.0 - e
                } else {
                    e
                }
            }
        }
    }

    fn sample(&self, rng: &mut SeededRng) -> f64 {
        let u = rng.uniform();
        let x = match &self.window {
            Window::Central {
                alpha,
                mass,
                lo_cdf,
                lo_sf,
                ..
            } => {
                let z = if *alpha >= 0.0 {
                    // right-tail window: survival coordinates keep precision
                    let s = (lo_sf - u * mass).clamp(1e-300, 1.0 - 1e-16);
                    -norm_quantile_fast(s)
                } else {
                    let p = (lo_cdf + u * mass).clamp(1e-300, 1.0 - 1e-16);
                    norm_quantile_fast(p)
                };
                self.mu + self.sigma * z
            }
            Window::Packed {
                flipped,
                mu_eff,
                b,
                s0,
                rb,
                ratio0,
                ..
            } => {
                // invert the log tail ratio g(s) = (b-s)(b+s)/2 + ln(R(s)/R(b))
                // by Newton steps guarded with a shrinking bracket; g' is the
                // negative hazard -1/R(s), so each step is (g - want) * R(s)
                let target = ratio0 + u * (1.0 - ratio0);
                let want = target.ln();
                let (mut lo, mut hi) = (*b, *s0);
                let mut s = (b - want / b).clamp(lo, hi);
                for _ in 0..40 {
                    let r = mills(s);
                    let g = 0.5 * (b - s) * (b + s) + (r / rb).ln();
                    if (g - want).abs() <= 1e-12 {
                        break;
                    }
                    if g >= want {
                        lo = s;
                    } else {
                        hi = s;
                    }
                    let next = s + (g - want) * r;
                    s = if next > lo && next < hi {
                        next
                    } else {
                        0.5 * (lo + hi)
                    };
                }
                let t_eff = mu_eff - self.sigma * s;
                if *flipped {
                    1.0 - t_eff
                } else {
                    t_eff
                }
            }
        };
        x.clamp(0.0, 1.0)
    }

    fn breakpoints(&self, out: &mut Vec<f64>) {
        match &self.window {
            Window::Central { .. } => {
                let m = self.mean();
                for k in [0.0, -1.0, 1.0, -2.0, 2.0, -4.0, 4.0, -8.0, 8.0] {
                    let t = m + k * self.sigma;
                    if t > 0.0 && t < 1.0 {
                        out.push(t);
                    }
                }
            }
            Window::Packed { flipped, b, .. } => {
                // density falls off like exp(-k) at distance k * sigma/b from
                // the packed endpoint; a geometric ladder of cuts keeps every
                // rung visible to the error estimator
                let scale = self.sigma / b;
                for k in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
                    let t_eff = 1.0 - k * scale;
                    if t_eff > 0.0 && t_eff < 1.0 {
                        out.push(if *flipped { 1.0 - t_eff } else { t_eff });
                    }
                }
            }
        }
    }
}

/// Solves for mu so that TruncNormal(mu, sigma) has the requested mean.
///
/// Targets are clamped to [1e-4, 1 - 1e-4]; the bracket starts at
/// [-10 sigma, 1 + 10 sigma] and widens geometrically until it straddles
/// the target, then bisection runs until the mean sits within 1e-9.
pub fn match_mean(target: f64, sigma: f64) -> f64 {
    let target = target.clamp(1e-4, 1.0 - 1e-4);
    let mut lo = -10.0 * sigma;
    let mut hi = 1.0 + 10.0 * sigma;
    for _ in 0..200 {
        if TruncNormal::new(hi, sigma).mean() >= target {
            break;
        }
        hi = 1.0 + 2.0 * (hi - 1.0);
    }
    for _ in 0..200 {
        if TruncNormal::new(lo, sigma).mean() <= target {
            break;
        }
        lo *= 2.0;
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let e = TruncNormal::new(mid, sigma).mean();
        if (e - target).abs() <= 1e-9 {
            return mid;
        }
        if e < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mid
}

/// Beta(a, b) on [0, 1]. The rejection sampler is built once up front; its
/// setup costs more than a draw does.
#[derive(Debug, Clone, Copy)]
pub struct BetaDist {
    a: f64,
    b: f64,
    sampler: rand_distr::Beta<f64>,
}

impl BetaDist {
    pub fn new(a: f64, b: f64) -> Self {
        assert!(a > 0.0 && b > 0.0, "beta shapes must be positive");
        Self {
            a,
            b,
            sampler: rand_distr::Beta::new(a, b).expect("valid beta shapes"),
        }
    }

    /// Shapes for a class support value: a = M nu, b = M (1 - nu), each
    /// floored at 1e-3 so both stay positive.
    pub fn for_support(nu: f64, class_count: usize) -> Self {
        let m = class_count as f64;
        let nu = nu.clamp(0.0, 1.0);
        Self::new((m * nu).max(1e-3), (m * (1.0 - nu)).max(1e-3))
    }

    pub fn shapes(&self) -> (f64, f64) {
        (self.a, self.b)
    }
}

impl UnitDist for BetaDist {
    fn pdf(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= 1.0 {
            return 0.0;
        }
        ((self.a - 1.0) * t.ln() + (self.b - 1.0) * (1.0 - t).ln() - ln_beta(self.a, self.b)).exp()
    }

    fn cdf(&self, t: f64) -> f64 {
        inc_beta_reg(self.a, self.b, t)
    }

    fn mean(&self) -> f64 {
        self.a / (self.a + self.b)
    }

    fn sample(&self, rng: &mut SeededRng) -> f64 {
        self.sampler.sample(rng).clamp(0.0, 1.0)
    }

    fn breakpoints(&self, out: &mut Vec<f64>) {
        let m = self.mean();
        let sd = (self.a * self.b / ((self.a + self.b).powi(2) * (self.a + self.b + 1.0))).sqrt();
        for t in [m, m - 6.0 * sd, m + 6.0 * sd] {
            if t > 0.0 && t < 1.0 {
                out.push(t);
            }
        }
    }
}
