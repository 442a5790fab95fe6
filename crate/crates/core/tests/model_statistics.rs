use rand::SeedableRng;
use underlay_core::model::{step_channel, ModelState, SimRng};
use underlay_core::ScenarioConfig;

fn trajectory(cfg: &ScenarioConfig, slots: usize, seed: u64) -> Vec<underlay_core::CsiTrue> {
    let mut rng = SimRng::seed_from_u64(seed);
    let mut state = ModelState::stationary(cfg, &mut rng);
    (0..slots).map(|_| step_channel(&mut state, cfg, &mut rng)).collect()
}

fn small(rho: f64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::uniform(2, 2);
    cfg.avg_gain_su = vec![2.0, 0.5, 1.0, 3.0];
    cfg.avg_gain_sp = vec![1.0, 0.3, 2.0, 0.7];
    cfg.sp_correlation = vec![rho; 4];
    cfg
}

#[test]
fn gain_means_match_configuration() {
    let cfg = small(0.5);
    let n = 200_000;
    let traj = trajectory(&cfg, n, 5);
    for l in 0..cfg.num_links() {
        let su = traj.iter().map(|t| t.su_gain[l]).sum::<f64>() / n as f64;
        let sp = traj.iter().map(|t| t.sp_gain[l]).sum::<f64>() / n as f64;
        assert!((su / cfg.avg_gain_su[l] - 1.0).abs() < 0.02, "link {l}: su mean {su}");
        assert!((sp / cfg.avg_gain_sp[l] - 1.0).abs() < 0.02, "link {l}: sp mean {sp}");
    }
}

#[test]
fn activity_fraction_matches_stationary_law() {
    let cfg = ScenarioConfig::reference();
    let n = 200_000;
    let traj = trajectory(&cfg, n, 9);
    let active: usize = traj.iter().map(|t| t.active.iter().filter(|&&a| a).count()).sum();
    let frac = active as f64 / (n * cfg.num_channels) as f64;
    let p1 = cfg.activity.stationary_active();
    assert!((p1 - 0.8).abs() < 1e-12);
    assert!((frac / p1 - 1.0).abs() < 0.01, "activity fraction {frac}");
}

fn lag_one(x: &[f64], centred: bool) -> f64 {
    let mean = if centred {
        x.iter().sum::<f64>() / x.len() as f64
    } else {
        0.0
    };
    let num: f64 = x.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
    let den: f64 = x[..x.len() - 1].iter().map(|v| (v - mean) * (v - mean)).sum();
    num / den
}

// Each component carries sqrt(rho) per step; the power gain |g|^2 then has
// lag-one autocorrelation rho.
#[test]
fn lag_one_autocorrelation_matches_correlation_parameter() {
    for rho in [0.0, 0.5, 0.9, 1.0] {
        let cfg = small(rho);
        let n = 100_000;
        let traj = trajectory(&cfg, n, 21);
        for l in 0..cfg.num_links() {
            for c in 0..2 {
                let x: Vec<f64> = traj.iter().map(|t| t.sp_lowpass[l][c]).collect();
                let r = lag_one(&x, false);
                assert!((r - rho.sqrt()).abs() < 0.02, "rho {rho}, link {l}, component {c}: {r}");
            }
            let h: Vec<f64> = traj.iter().map(|t| t.sp_gain[l]).collect();
            if rho == 1.0 {
                assert!(h.iter().all(|&v| v == h[0]));
            } else {
                let r = lag_one(&h, true);
                assert!((r - rho).abs() < 0.02, "rho {rho}, link {l}, gain: {r}");
            }
        }
    }
}

#[test]
fn same_seed_gives_identical_trajectories() {
    let cfg = small(0.7);
    assert_eq!(trajectory(&cfg, 500, 3), trajectory(&cfg, 500, 3));
    assert_ne!(trajectory(&cfg, 50, 3), trajectory(&cfg, 50, 4));
}
