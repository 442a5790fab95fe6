//! Independent reference implementations used by the test suites and by
//! `selftest`. Nothing here is on the simulation path; the code favours
//! brute force over speed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;

use crate::allocator::{optimize_power, schedule, waterfilling, LinkContext, Multipliers, PowerSolution};
use crate::beliefs::{expect_over_belief, kalman_correct, DiscreteLaw, QuadratureSpec, SpBelief, SuBelief};
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::model::{pu_rate, pu_rate_dx, su_rate, su_rate_dp};

/// Outcome of one oracle suite.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub name: &'static str,
    pub cases: usize,
    /// Largest discrepancy seen, in the suite's own unit.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleReport {
    fn new(name: &'static str, cases: usize, worst: f64, tolerance: f64) -> Self {
        OracleReport {
            name,
            cases,
            worst,
            tolerance,
            passed: worst <= tolerance,
        }
    }
}

/// φ written out term by term for a perfect-CSI link.
#[allow(clippy::too_many_arguments)]
pub fn phi_term_sum(beta: f64, h2: f64, h1: f64, a: f64, gamma: f64, pi: f64, theta: f64, rho: f64, p: f64) -> f64 {
    let r2 = (1.0 + h2 * p).log2();
    let r1 = (1.0 + gamma / (1.0 + h1 * p)).log2();
    beta * r2 - pi * p - theta * a * h1 * p + rho * a * r1
}

/// A random perfect-CSI link with all four terms of φ present.
#[derive(Debug, Clone, Copy)]
pub struct PowerInstance {
    pub beta: f64,
    pub h2: f64,
    pub h1: f64,
    pub gamma: f64,
    pub pi: f64,
    pub theta: f64,
    pub rho: f64,
    pub cap: f64,
}

impl PowerInstance {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let e = |rng: &mut R| -> f64 { Exp1.sample(rng) };
        PowerInstance {
            beta: rng.random_range(0.5..2.0),
            h2: 0.05 + 3.0 * e(rng),
            h1: 0.02 + 2.0 * e(rng),
            gamma: 10f64.powf(rng.random_range(0.0..2.0)),
            pi: rng.random_range(0.02..1.5),
            theta: rng.random_range(0.0..2.0),
            rho: rng.random_range(0.05..6.0),
            cap: rng.random_range(0.2..10.0),
        }
    }

    pub fn laws(&self) -> (DiscreteLaw, DiscreteLaw) {
        (DiscreteLaw::point(self.h2), DiscreteLaw::point(self.h1))
    }

    pub fn context<'a>(&self, su: &'a DiscreteLaw, sp: &'a DiscreteLaw) -> LinkContext<'a> {
        LinkContext {
            beta: self.beta,
            pi: self.pi,
            theta: self.theta,
            rho: self.rho,
            q: 1.0,
            gamma: self.gamma,
            su,
            sp,
            sp_mean: self.h1,
        }
    }

    pub fn phi(&self, p: f64) -> f64 {
        phi_term_sum(
            self.beta, self.h2, self.h1, 1.0, self.gamma, self.pi, self.theta, self.rho, p,
        )
    }

    /// Best value on a uniform grid of `points` over `[0, cap]`.
    pub fn grid_max(&self, points: usize) -> (f64, f64) {
        let step = self.cap / (points - 1) as f64;
        (0..points).fold((0.0, f64::NEG_INFINITY), |best, i| {
            let p = if i + 1 == points { self.cap } else { i as f64 * step };
            let v = self.phi(p);
            if v > best.1 {
                (p, v)
            } else {
                best
            }
        })
    }
}

/// Signature of a scalar power optimizer, so that faulty variants can be
/// substituted in mutation checks.
pub type PowerOptimizer<'f> = &'f (dyn Fn(&LinkContext, f64) -> Result<PowerSolution> + Sync);

/// Compares `opt` against a dense grid on random four-term instances. The
/// reported discrepancy is `grid max − φ(p*)`, so it must stay below the
/// tolerance; an out-of-range power counts as infinite discrepancy.
pub fn power_vs_grid(opt: PowerOptimizer, instances: usize, grid_points: usize, seed: u64) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<PowerInstance> = (0..instances).map(|_| PowerInstance::random(&mut rng)).collect();
    let worst = cases
        .par_iter()
        .map(|inst| {
            let (su, sp) = inst.laws();
            let ctx = inst.context(&su, &sp);
            match opt(&ctx, inst.cap) {
                Ok(sol) if (0.0..=inst.cap).contains(&sol.power) => inst.grid_max(grid_points).1 - inst.phi(sol.power),
                _ => f64::INFINITY,
            }
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    OracleReport::new("power optimizer vs dense grid", instances, worst.max(0.0), 1e-8)
}

/// Default optimizer, usable where a [`PowerOptimizer`] is expected.
pub fn reference_optimizer(ctx: &LinkContext, cap: f64) -> Result<PowerSolution> {
    optimize_power(ctx, cap)
}

/// With ρ = 0 the optimizer must return the clipped closed-form
/// waterfilling point `[β log2(e)/(π + θ h1) − 1/h2]` in `[0, cap]`.
pub fn waterfilling_closed_form(instances: usize, seed: u64) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let mut inst = PowerInstance::random(&mut rng);
        inst.rho = 0.0;
        let (su, sp) = inst.laws();
        let ctx = inst.context(&su, &sp);
        let level = inst.beta * std::f64::consts::LOG2_E / (inst.pi + inst.theta * inst.h1);
        let want = (level - 1.0 / inst.h2).clamp(0.0, inst.cap);
        let got = optimize_power(&ctx, inst.cap).map(|s| s.power).unwrap_or(f64::NAN);
        let wf = waterfilling(&ctx).min(inst.cap);
        worst = worst.max((got - want).abs()).max((wf - want).abs());
        if !got.is_finite() {
            worst = f64::INFINITY;
        }
    }
    OracleReport::new("closed-form waterfilling (rho = 0)", instances, worst, 1e-12)
}

/// Solves `max Σ w_m φ_m` over the simplex by enumerating its vertices. A
/// vertex of a zero-power SU is the same decision as the virtual user, so
/// it is folded into index 0; among equal-valued vertices the lowest index
/// is kept.
pub fn lp_schedule(phi: &[f64], powers: &[f64]) -> usize {
    let value = |m: usize| if m == 0 || powers[m - 1] > 0.0 { phi[m] } else { phi[0] };
    let best = (0..phi.len()).map(value).fold(f64::NEG_INFINITY, f64::max);
    (0..phi.len())
        .find(|&m| value(m) == best && (m == 0 || powers[m - 1] > 0.0))
        .unwrap_or(0)
}

/// Random 3-user scheduling instances on a coarse value lattice so that
/// ties are frequent. Zero-power users carry the virtual user's φ.
pub fn schedule_vs_lp(instances: usize, seed: u64) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0usize;
    for _ in 0..instances {
        let phi0 = rng.random_range(0..4) as f64 * 0.25;
        let mut phi = vec![phi0];
        let mut powers = Vec::new();
        for _ in 0..3 {
            if rng.random_bool(0.3) {
                powers.push(0.0);
                phi.push(phi0);
            } else {
                powers.push(rng.random_range(0.1..2.0));
                phi.push(phi0 + rng.random_range(0..5) as f64 * 0.25);
            }
        }
        let got = schedule(&phi, &powers);
        let want = lp_schedule(&phi, &powers);
        // The LP value must also dominate every interior point of the simplex.
        let mut w: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        let interior: f64 = w.iter().zip(&phi).map(|(a, b)| a * b).sum();
        if got != want || interior > phi[want] + 1e-12 {
            mismatches += 1;
        }
    }
    OracleReport::new("schedule vs LP vertex enumeration", instances, mismatches as f64, 0.0)
}

/// KL divergence between a dense-grid Bayesian posterior (Gaussian prior
/// times Gaussian likelihood, per component) and the Kalman posterior.
pub fn kalman_grid_kl(pred_mean: [f64; 2], pred_var: f64, meas: [f64; 2], noise_var: f64) -> Result<f64> {
    let (mean, var) = kalman_correct(pred_mean, pred_var, meas, noise_var)?;
    let mut kl = 0.0;
    for c in 0..2 {
        // Window centred on the prior/measurement pair, wide enough for both.
        let lo = pred_mean[c].min(meas[c]) - 14.0 * pred_var.max(noise_var).sqrt();
        let hi = pred_mean[c].max(meas[c]) + 14.0 * pred_var.max(noise_var).sqrt();
        let n = 200_001;
        let dx = (hi - lo) / (n - 1) as f64;
        let log_post: Vec<f64> = (0..n)
            .map(|i| {
                let x = lo + i as f64 * dx;
                -(x - pred_mean[c]).powi(2) / (2.0 * pred_var) - (meas[c] - x).powi(2) / (2.0 * noise_var)
            })
            .collect();
        let peak = log_post.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let dens: Vec<f64> = log_post.iter().map(|l| (l - peak).exp()).collect();
        let z = simpson(&dens, dx);
        let log_z = z.ln() + peak;
        let integrand: Vec<f64> = (0..n)
            .map(|i| {
                let x = lo + i as f64 * dx;
                let lp = log_post[i] - log_z;
                let lq = -(x - mean[c]).powi(2) / (2.0 * var) - 0.5 * (2.0 * std::f64::consts::PI * var).ln();
                let p = lp.exp();
                if p == 0.0 {
                    0.0
                } else {
                    p * (lp - lq)
                }
            })
            .collect();
        kl += simpson(&integrand, dx);
    }
    Ok(kl.abs())
}

fn simpson(y: &[f64], dx: f64) -> f64 {
    let n = y.len();
    debug_assert!(n % 2 == 1);
    let mut s = y[0] + y[n - 1];
    for (i, v) in y.iter().enumerate().take(n - 1).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * dx / 3.0
}

pub fn kalman_vs_grid(cases: usize, seed: u64) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<_> = (0..cases)
        .map(|_| {
            let m = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let v = rng.random_range(0.01..1.0);
            let g = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let nu = rng.random_range(0.01..1.0);
            (m, v, g, nu)
        })
        .collect();
    let worst = inputs
        .par_iter()
        .map(|&(m, v, g, nu)| kalman_grid_kl(m, v, g, nu).unwrap_or(f64::INFINITY))
        .reduce(|| 0.0, f64::max);
    OracleReport::new("Kalman correction vs grid Bayes (KL)", cases, worst, 1e-6)
}

/// Monte-Carlo draw of a gain from an SU belief.
pub fn sample_su<R: Rng + ?Sized>(b: &SuBelief, rng: &mut R) -> f64 {
    match *b {
        SuBelief::PointMass { gain } => gain,
        SuBelief::TruncatedExp { lower, upper, mean } => {
            // Inverse CDF of the exponential restricted to [lower, upper).
            let u: f64 = rng.random();
            let span = if upper.is_infinite() {
                1.0
            } else {
                -(-(upper - lower) / mean).exp_m1()
            };
            lower - mean * (-u * span).ln_1p()
        }
    }
}

/// Monte-Carlo draw of a gain from an SP belief.
pub fn sample_sp<R: Rng + ?Sized>(b: &SpBelief, rng: &mut R) -> f64 {
    match *b {
        SpBelief::PointMass { gain } => gain,
        SpBelief::Gaussian { mean, var } => {
            let s = var.sqrt();
            let z: [f64; 2] = [StandardNormal.sample(rng), StandardNormal.sample(rng)];
            let x = mean[0] + s * z[0];
            let y = mean[1] + s * z[1];
            x * x + y * y
        }
    }
}

fn mc_mean(samples: usize, seed: u64, draw: impl Fn(&mut ChaCha8Rng) -> f64 + Sync) -> f64 {
    let chunks = 16usize;
    let per = samples.div_ceil(chunks);
    let total: f64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64 + 1);
            (0..per).map(|_| draw(&mut rng)).sum::<f64>()
        })
        .sum();
    total / (per * chunks) as f64
}

/// Quadrature against plain Monte Carlo on the functions the allocator
/// integrates: identity, `r2(·, p)` and `r1(γ, · p)`, over region, tail and
/// Gaussian beliefs. Discrepancy is relative.
pub fn quadrature_vs_mc(samples: usize, seed: u64) -> OracleReport {
    let spec = QuadratureSpec::default();
    let su_cases = [
        SuBelief::TruncatedExp {
            lower: 0.0,
            upper: 0.2877,
            mean: 1.0,
        },
        SuBelief::TruncatedExp {
            lower: std::f64::consts::LN_2,
            upper: 2.0 * std::f64::consts::LN_2,
            mean: 1.0,
        },
        SuBelief::TruncatedExp {
            lower: 1.3863,
            upper: f64::INFINITY,
            mean: 1.0,
        },
        SuBelief::TruncatedExp {
            lower: 0.0,
            upper: f64::INFINITY,
            mean: 2.0,
        },
    ];
    let sp_cases = [
        SpBelief::Gaussian {
            mean: [1.0, 0.0],
            var: 0.25,
        },
        SpBelief::Gaussian {
            mean: [0.6, 0.8],
            var: 0.25,
        },
        SpBelief::Gaussian {
            mean: [0.0, 0.0],
            var: 0.5,
        },
        SpBelief::Gaussian {
            mean: [0.3, -0.2],
            var: 0.05,
        },
    ];
    let p = 2.0;
    let gamma = 10.0;
    type Kernel = fn(f64, f64, f64) -> f64;
    let fs: [(&str, Kernel); 3] = [
        ("identity", |h, _, _| h),
        ("r2", |h, p, _| su_rate(h, p)),
        ("r1", |h, p, g| pu_rate(g, h * p)),
    ];
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for (i, b) in su_cases.iter().enumerate() {
        for (j, (_, f)) in fs.iter().enumerate() {
            let q = expect_over_belief(|h| f(h, p, gamma), b, spec).unwrap_or(f64::NAN);
            let mc = mc_mean(samples, seed + (10 * i + j) as u64, |rng| {
                f(sample_su(b, rng), p, gamma)
            });
            worst = worst.max(((q - mc) / mc).abs());
            cases += 1;
        }
    }
    for (i, b) in sp_cases.iter().enumerate() {
        for (j, (_, f)) in fs.iter().enumerate() {
            let q = expect_over_belief(|h| f(h, p, gamma), b, spec).unwrap_or(f64::NAN);
            let mc = mc_mean(samples, seed + (100 + 10 * i + j) as u64, |rng| {
                f(sample_sp(b, rng), p, gamma)
            });
            worst = worst.max(((q - mc) / mc).abs());
            cases += 1;
        }
    }
    if worst.is_nan() {
        worst = f64::INFINITY;
    }
    OracleReport::new("belief quadrature vs Monte Carlo (relative)", cases, worst, 5e-3)
}

/// Analytic rate derivatives against central differences (relative).
pub fn rate_derivatives_vs_fd() -> OracleReport {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for &h in &[0.05, 0.5, 1.0, 3.0, 20.0] {
        for &x in &[0.01, 0.3, 1.0, 5.0, 40.0] {
            let d = 1e-5 * x;
            let fd = (su_rate(h, x + d) - su_rate(h, x - d)) / (2.0 * d);
            worst = worst.max(((su_rate_dp(h, x) - fd) / fd).abs());
            let gamma = h * 10.0;
            let fd = (pu_rate(gamma, x + d) - pu_rate(gamma, x - d)) / (2.0 * d);
            worst = worst.max(((pu_rate_dx(gamma, x) - fd) / fd).abs());
            cases += 2;
        }
    }
    OracleReport::new("rate derivatives vs finite differences", cases, worst, 1e-6)
}

/// Exhaustive joint search for one channel under perfect CSI: every
/// (winner, power) pair on a uniform grid of `points` per SU, with caps
/// recomputed from their closed forms. Returns `(winner, power, value)`.
pub fn joint_brute_force(
    cfg: &ScenarioConfig,
    k: usize,
    active: bool,
    su_gain: &[f64],
    sp_gain: &[f64],
    lambda: &Multipliers,
    points: usize,
) -> (usize, f64, f64) {
    let a = if active { 1.0 } else { 0.0 };
    let gamma = cfg.pu_snr[k];
    let theta = if cfg.scheme.long_term_interference() {
        lambda.theta[k]
    } else {
        0.0
    };
    let rho = if cfg.scheme.long_term_capacity() {
        lambda.rho[k]
    } else {
        0.0
    };
    let mut best = (0usize, 0.0, rho * a * (1.0 + gamma).log2());
    for m in 0..cfg.num_sus {
        let l = cfg.idx(k, m);
        let mut cap = cfg.amplifier_cap[l];
        if active && cfg.scheme.short_term_interference() {
            cap = cap.min(cfg.max_interference[k] / sp_gain[m]);
        }
        if active && cfg.scheme.short_term_capacity() {
            let target = cfg.short_term_rate_target(k);
            cap = cap.min(((gamma / (2f64.powf(target) - 1.0) - 1.0) / sp_gain[m]).max(0.0));
        }
        for i in 1..points {
            let p = cap * i as f64 / (points - 1) as f64;
            let v = phi_term_sum(
                cfg.priority[m],
                su_gain[m],
                sp_gain[m],
                a,
                gamma,
                lambda.pi[m],
                theta,
                rho,
                p,
            );
            if v > best.2 {
                best = (m + 1, p, v);
            }
        }
    }
    best
}
