use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use underlay_core::allocator::{allocate_slot, lqi, waterfilling, LinkContext, Multipliers, PowerSolution};
use underlay_core::config::Scheme;
use underlay_core::oracles::{self, joint_brute_force, reference_optimizer};
use underlay_core::selftest::{self, SelftestSize};
use underlay_core::{BeliefState, CsiTrue, ScenarioConfig};

#[test]
fn optimizer_matches_dense_grid() {
    let r = oracles::power_vs_grid(&reference_optimizer, 1000, 100_000, 101);
    assert!(r.passed, "{r:?}");
}

#[test]
fn scheduler_matches_lp_enumeration() {
    let r = oracles::schedule_vs_lp(1000, 102);
    assert!(r.passed, "{r:?}");
    assert_eq!(r.worst, 0.0);
}

#[test]
fn unconstrained_pu_term_gives_closed_form_waterfilling() {
    let r = oracles::waterfilling_closed_form(1000, 103);
    assert!(r.passed, "{r:?}");
}

fn one_channel(scheme: Scheme) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::uniform(2, 1);
    cfg.scheme = scheme;
    cfg.amplifier_cap = vec![4.0, 6.0];
    cfg
}

#[test]
fn two_users_one_channel_match_joint_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut compared = 0;
    for scheme in [Scheme::APC, Scheme::IPC, Scheme::AP, Scheme::IC] {
        let cfg = one_channel(scheme);
        for _ in 0..150 {
            let su: Vec<f64> = (0..2).map(|_| rng.random_range(0.05..6.0)).collect();
            let sp: Vec<f64> = (0..2).map(|_| rng.random_range(0.02..3.0)).collect();
            let active = rng.random_bool(0.8);
            let lambda = Multipliers {
                pi: (0..2).map(|_| rng.random_range(0.05..2.0)).collect(),
                theta: vec![rng.random_range(0.0..3.0)],
                rho: vec![rng.random_range(0.0..4.0)],
            };
            let truth = CsiTrue {
                slot: 0,
                active: vec![active],
                sp_lowpass: sp.iter().map(|h| [h.sqrt(), 0.0]).collect(),
                sp_gain: sp.clone(),
                su_gain: su.clone(),
            };
            let alloc = allocate_slot(&BeliefState::point_masses(&truth), &lambda, &cfg).unwrap();
            let (bf_winner, _, bf_value) = joint_brute_force(&cfg, 0, active, &su, &sp, &lambda, 100_000);
            let got = alloc.phi[alloc.winner[0]];
            assert!(
                got >= bf_value - 1e-8,
                "{scheme:?}: allocator {got} < brute force {bf_value}"
            );
            // Winner identity is only meaningful when the runner-up is clearly worse.
            let mut values = alloc.phi.clone();
            values.sort_by(f64::total_cmp);
            if values[2] - values[1] > 1e-6 {
                assert_eq!(alloc.winner[0], bf_winner, "{scheme:?}: su {su:?} sp {sp:?} {lambda:?}");
                compared += 1;
            }
        }
    }
    assert!(compared > 400);
}

fn skip_interior(ctx: &LinkContext, cap: f64) -> underlay_core::Result<PowerSolution> {
    let upper = waterfilling(ctx).min(cap);
    let (v0, v1) = (lqi(0.0, ctx), lqi(upper, ctx));
    let power = if v1 > v0 { upper } else { 0.0 };
    Ok(PowerSolution {
        power,
        value: v0.max(v1),
        stationary_points: 0,
    })
}

#[test]
fn selftest_passes_and_catches_a_broken_optimizer() {
    let reports = selftest::run(true);
    assert!(selftest::all_passed(&reports), "{reports:#?}");
    let mutated = selftest::run_with(SelftestSize::quick(), &skip_interior);
    assert!(!selftest::all_passed(&mutated));
    assert!(!mutated[0].passed);
}
