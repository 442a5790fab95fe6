//! Acceptance suite. Each test prints one PASS/FAIL line (written straight
//! to stdout so it shows up without `--nocapture`) and then asserts.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use underlay_core::config::{ActivitySensing, StepSchedule, SuGainSensing};
use underlay_core::engine::{run, Metrics};
use underlay_core::oracles::{self, reference_optimizer};
use underlay_core::{selftest, CsiVariant, ScenarioConfig, Scheme};

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

fn report(criterion: u32, title: &str, passed: bool, detail: &str) {
    let verdict = if passed { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "{verdict} criterion {criterion} ({title}): {detail}").unwrap();
    assert!(passed, "criterion {criterion} failed: {detail}");
}

/// Reported (post-burn-in) metrics, memoized on the full configuration so
/// that criteria share runs.
fn metrics(cfg: &ScenarioConfig) -> Arc<Metrics> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<Metrics>>>> = OnceLock::new();
    let key = format!("{cfg:?}");
    let cache = CACHE.get_or_init(Default::default);
    if let Some(m) = cache.lock().unwrap().get(&key) {
        return m.clone();
    }
    let m = Arc::new(run(cfg).unwrap().reported);
    cache.lock().unwrap().insert(key, m.clone());
    m
}

fn scenario(scheme: Scheme, seed: u64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::reference();
    cfg.scheme = scheme;
    cfg.seed = seed;
    cfg
}

/// Within the tolerances of criterion 1 for the configured limits.
fn feasible(m: &Metrics, cfg: &ScenarioConfig) -> Result<(), String> {
    let eps = m.eps1_avg().unwrap();
    let p1 = m.p1_mean().unwrap();
    let eps_lim = cfg.max_capacity_loss[0];
    let p1_lim = cfg.max_interference[0];
    if eps > eps_lim + 0.005 {
        return Err(format!("eps1 {:.3}% > {:.3}%", 100.0 * eps, 100.0 * (eps_lim + 0.005)));
    }
    if p1 > p1_lim * 1.05 {
        return Err(format!("p1 {p1:.4} > {:.4}", p1_lim * 1.05));
    }
    for s in 0..cfg.num_sus {
        let p2 = m.p2_avg(s).unwrap();
        if (p2 / cfg.avg_power_budget[s] - 1.0).abs() > 0.02 {
            return Err(format!("p2 of SU {} is {p2:.4}", s + 1));
        }
    }
    Ok(())
}

#[test]
fn criterion_1_feasibility() {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut failures = Vec::new();
    for seed in SEEDS {
        let cfg = scenario(Scheme::APC, seed);
        let m = metrics(&cfg);
        worst.0 = worst.0.max(m.eps1_avg().unwrap());
        worst.1 = worst.1.max(m.p1_mean().unwrap());
        for s in 0..cfg.num_sus {
            worst.2 = worst.2.max((m.p2_avg(s).unwrap() - 1.0).abs());
        }
        if let Err(e) = feasible(&m, &cfg) {
            failures.push(format!("seed {seed}: {e}"));
        }
    }
    let detail = format!(
        "APC over 5 seeds: max eps1 {:.3}%, max p1 {:.4}, max |p2 - 1| {:.4}{}",
        100.0 * worst.0,
        worst.1,
        worst.2,
        if failures.is_empty() {
            String::new()
        } else {
            format!("; {}", failures.join("; "))
        }
    );
    report(1, "feasibility", failures.is_empty(), &detail);
}

#[test]
fn criterion_2_constraint_binding() {
    let ac = metrics(&scenario(Scheme::AC, 1)).eps1_avg().unwrap();
    let ap = metrics(&scenario(Scheme::AP, 1)).p1_mean().unwrap();
    let ok = (0.045..=0.0505).contains(&ac) && (0.1425..=0.1575).contains(&ap);
    report(
        2,
        "constraint binding",
        ok,
        &format!("AC eps1 {:.3}%, AP p1 {ap:.4}", 100.0 * ac),
    );
}

fn c2_stats(scheme: Scheme) -> (f64, f64) {
    let v: Vec<f64> = SEEDS
        .iter()
        .map(|&s| metrics(&scenario(scheme, s)).c2_avg().unwrap())
        .collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn criterion_3_ordering() {
    let mut pairs = vec![
        (Scheme::APC, Scheme::IPC),
        (Scheme::AP, Scheme::IP),
        (Scheme::AC, Scheme::IC),
    ];
    for s in [Scheme::AP, Scheme::AC, Scheme::APC, Scheme::IP, Scheme::IC, Scheme::IPC] {
        pairs.push((Scheme::None, s));
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for (hi, lo) in pairs {
        let (a, sa) = c2_stats(hi);
        let (b, sb) = c2_stats(lo);
        let se = (sa * sa + sb * sb).sqrt();
        let good = a - b > -se;
        ok &= good;
        if hi != Scheme::None || !good {
            parts.push(format!(
                "{} {a:.3} vs {} {b:.3} (margin {:+.3}, se {se:.3})",
                hi.name(),
                lo.name(),
                a - b
            ));
        }
    }
    parts.push(format!("None {:.3} dominates", c2_stats(Scheme::None).0));
    report(3, "ordering", ok, &parts.join("; "));
}

fn relaxed_limit(scheme: Scheme, levels: Option<usize>) -> ScenarioConfig {
    let mut cfg = scenario(scheme, 1);
    cfg.max_interference = vec![0.20; cfg.num_channels];
    if let Some(levels) = levels {
        cfg.sensing.su_gain = SuGainSensing::Quantized {
            levels,
            thresholds: None,
        };
    }
    cfg
}

#[test]
fn criterion_4_point_reproduction() {
    let apc = metrics(&relaxed_limit(Scheme::APC, None)).c2_avg().unwrap();
    let ipc = metrics(&relaxed_limit(Scheme::IPC, None)).c2_avg().unwrap();
    let within = |x: f64, target: f64| (x / target - 1.0).abs() <= 0.10;
    let sweep: Vec<f64> = [1, 2, 4, 8]
        .iter()
        .map(|&l| metrics(&relaxed_limit(Scheme::APC, Some(l))).c2_avg().unwrap())
        .chain(std::iter::once(apc))
        .collect();
    let increasing = sweep.windows(2).all(|w| w[1] > w[0]);
    let gap = (sweep[4] - sweep[2]) / sweep[4];
    let ok = within(apc, 15.16) && within(ipc, 14.45) && increasing && gap <= 0.12;
    let detail = format!(
        "APC {apc:.3} (target 15.16), IPC {ipc:.3} (target 14.45); APC over L=1,2,4,8,inf: {}; L=4 gap {:.1}%",
        sweep.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(", "),
        100.0 * gap
    );
    report(4, "point reproduction", ok, &detail);
}

fn detector(variant: CsiVariant, seed: u64) -> ScenarioConfig {
    let mut cfg = scenario(Scheme::APC, seed);
    cfg.max_interference = vec![0.20; cfg.num_channels];
    cfg.csi_variant = variant;
    cfg.sensing.activity = ActivitySensing::Detector {
        p_fa: 0.1,
        p_md: 0.1,
        period: 10,
    };
    cfg
}

#[test]
fn criterion_5_detector_imperfections() {
    let naive = metrics(&detector(CsiVariant::Naive, 1)).eps1_avg().unwrap();
    let mut ok = naive >= 0.05 + 0.003;
    let mut parts = vec![format!("APC-ii eps1 {:.3}%", 100.0 * naive)];
    let mut worst_eps: f64 = 0.0;
    for seed in SEEDS {
        let cfg = detector(CsiVariant::Optimal, seed);
        let m = metrics(&cfg);
        worst_eps = worst_eps.max(m.eps1_avg().unwrap());
        if let Err(e) = feasible(&m, &cfg) {
            ok = false;
            parts.push(format!("belief-aware APC seed {seed}: {e}"));
        }
    }
    parts.push(format!(
        "belief-aware APC max eps1 over 5 seeds {:.3}%",
        100.0 * worst_eps
    ));
    report(5, "detector imperfections", ok, &parts.join("; "));
}

#[test]
fn criterion_6_oracle_equivalence() {
    let power = oracles::power_vs_grid(&reference_optimizer, 1000, 100_000, 601);
    let sched = oracles::schedule_vs_lp(1000, 602);
    let wf = oracles::waterfilling_closed_form(1000, 603);
    let ok = power.passed && sched.passed && wf.passed;
    let detail = format!(
        "power gap {:.2e} (<= 1e-8), schedule mismatches {}, waterfilling error {:.2e} (<= 1e-12)",
        power.worst, sched.worst, wf.worst
    );
    report(6, "oracle equivalence", ok, &detail);
}

#[test]
fn criterion_7_numerical_kernels() {
    let kalman = oracles::kalman_vs_grid(100, 701);
    let quad = oracles::quadrature_vs_mc(1_000_000, 702);
    let deriv = oracles::rate_derivatives_vs_fd();
    let ok = kalman.passed && quad.passed && deriv.passed;
    let detail = format!(
        "Kalman KL {:.2e} (<= 1e-6), quadrature vs MC {:.3}% (<= 0.5%), derivatives {:.2e} (<= 1e-6)",
        kalman.worst,
        100.0 * quad.worst,
        deriv.worst
    );
    report(7, "numerical kernels", ok, &detail);
}

/// Relative excess over each limit: per-SU power, per-channel interference
/// and per-channel PU rate.
fn violations(m: &Metrics, cfg: &ScenarioConfig) -> Vec<f64> {
    let mut v: Vec<f64> = (0..cfg.num_sus)
        .map(|s| m.p2_avg(s).unwrap() / cfg.avg_power_budget[s] - 1.0)
        .collect();
    for k in 0..cfg.num_channels {
        v.push(m.p1_avg(k).unwrap() / cfg.max_interference[k] - 1.0);
        v.push(1.0 - m.r1_avg(k).unwrap() / cfg.rate_target(k));
    }
    v.into_iter().map(|x| x.max(0.0)).collect()
}

#[test]
fn criterion_8_stochastic_approximation() {
    let etas = [0.02, 0.01, 0.005];
    let magnitude: Vec<f64> = etas
        .iter()
        .map(|&eta| {
            SEEDS
                .iter()
                .map(|&seed| {
                    let mut cfg = scenario(Scheme::APC, seed);
                    cfg.stepsizes.pi = eta;
                    cfg.stepsizes.theta = eta;
                    cfg.stepsizes.rho = eta;
                    violations(&metrics(&cfg), &cfg).iter().sum::<f64>()
                })
                .sum::<f64>()
                / SEEDS.len() as f64
        })
        .collect();
    let monotone = magnitude.windows(2).all(|w| w[0] <= w[1]);

    let mut cfg = scenario(Scheme::APC, 1);
    cfg.horizon = 100_000;
    cfg.stepsizes.pi = 0.2;
    cfg.stepsizes.theta = 0.2;
    cfg.stepsizes.rho = 0.2;
    cfg.stepsizes.schedule = StepSchedule::Diminishing { decay_slots: 1e5 };
    let worst = violations(&metrics(&cfg), &cfg).into_iter().fold(0.0, f64::max);

    let ok = monotone && worst < 1e-3;
    let detail = format!(
        "mean violation for eta 0.02, 0.01, 0.005: {}; diminishing schedule max violation {:.3}% of limit at N=1e5",
        magnitude
            .iter()
            .map(|x| format!("{x:.2e}"))
            .collect::<Vec<_>>()
            .join(", "),
        100.0 * worst
    );
    report(8, "stochastic approximation", ok, &detail);
}

#[test]
fn criterion_9_runtime() {
    let cfg = scenario(Scheme::APC, 9);
    let t = Instant::now();
    run(&cfg).unwrap();
    let sim = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let reports = selftest::run(true);
    let st = t.elapsed().as_secs_f64();
    let ok = sim <= 60.0 && st <= 30.0 && selftest::all_passed(&reports);
    report(
        9,
        "runtime",
        ok,
        &format!("APC run {sim:.1} s (<= 60 s), quick selftest {st:.1} s (<= 30 s)"),
    );
}
