use proptest::prelude::*;
use underlay_core::allocator::{optimize_power, peak_power, schedule, waterfilling, LinkContext, PeakInputs};
use underlay_core::beliefs::{DiscreteLaw, Node};
use underlay_core::model::pu_rate;

fn law(values: &[f64]) -> DiscreteLaw {
    let w = 1.0 / values.len() as f64;
    DiscreteLaw::from_nodes(values.iter().map(|&value| Node { value, weight: w }).collect())
}

#[allow(clippy::too_many_arguments)]
fn ctx<'a>(
    su: &'a DiscreteLaw,
    sp: &'a DiscreteLaw,
    beta: f64,
    pi: f64,
    theta: f64,
    rho: f64,
    q: f64,
    gamma: f64,
) -> LinkContext<'a> {
    LinkContext {
        beta,
        pi,
        theta,
        rho,
        q,
        gamma,
        su,
        sp,
        sp_mean: sp.mean(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn raising_the_power_price_never_raises_power(
        h2 in prop::collection::vec(0.05f64..5.0, 1..4),
        h1 in prop::collection::vec(0.02f64..3.0, 1..4),
        beta in 0.5f64..2.0,
        pi in 0.05f64..1.5,
        dpi in 0.001f64..1.0,
        theta in 0.0f64..2.0,
        rho in 0.0f64..5.0,
        q in 0.0f64..1.0,
        gamma in 1.0f64..50.0,
        cap in 0.1f64..10.0,
    ) {
        let (su, sp) = (law(&h2), law(&h1));
        let lo = optimize_power(&ctx(&su, &sp, beta, pi, theta, rho, q, gamma), cap).unwrap();
        let hi = optimize_power(&ctx(&su, &sp, beta, pi + dpi, theta, rho, q, gamma), cap).unwrap();
        prop_assert!(hi.power <= lo.power + 1e-9, "{} -> {}", lo.power, hi.power);
    }

    #[test]
    fn power_stays_within_cap(
        h2 in 0.05f64..5.0, h1 in 0.02f64..3.0, pi in 0.0f64..1.5, theta in 0.0f64..2.0,
        rho in 0.0f64..5.0, cap in 0.0f64..10.0,
    ) {
        let (su, sp) = (DiscreteLaw::point(h2), DiscreteLaw::point(h1));
        let c = ctx(&su, &sp, 1.0, pi, theta, rho, 1.0, 10.0);
        let sol = optimize_power(&c, cap).unwrap();
        prop_assert!(sol.power >= 0.0 && sol.power <= cap);
    }

    #[test]
    fn no_pu_term_gives_waterfilling(
        h2 in 0.05f64..5.0, h1 in 0.02f64..3.0, beta in 0.5f64..2.0, pi in 0.01f64..1.5,
        theta in 0.0f64..2.0, q in 0.0f64..1.0, cap in 0.1f64..10.0,
    ) {
        let (su, sp) = (DiscreteLaw::point(h2), DiscreteLaw::point(h1));
        let c = ctx(&su, &sp, beta, pi, theta, 0.0, q, 10.0);
        let level = beta * std::f64::consts::LOG2_E / (pi + theta * q * h1);
        let want = (level - 1.0 / h2).clamp(0.0, cap);
        let got = optimize_power(&c, cap).unwrap().power;
        prop_assert!((got - want).abs() <= 1e-12, "{got} vs {want}");
        prop_assert!((waterfilling(&c).min(cap) - want).abs() <= 1e-12);
    }

    #[test]
    fn winner_is_invariant_under_positive_scaling(
        phi in prop::collection::vec(0.0f64..5.0, 4),
        powers in prop::collection::vec(prop_oneof![Just(0.0), 0.1f64..2.0], 3),
        scale in 0.01f64..100.0,
    ) {
        let scaled: Vec<f64> = phi.iter().map(|v| v * scale).collect();
        prop_assert_eq!(schedule(&phi, &powers), schedule(&scaled, &powers));
    }

    #[test]
    fn rate_cap_meets_the_target_exactly(h1 in 0.05f64..3.0, gamma in 2.0f64..50.0, frac in 0.05f64..0.95) {
        let sp = DiscreteLaw::point(h1);
        let target = frac * pu_rate(gamma, 0.0);
        let cap = peak_power(&PeakInputs {
            q: 1.0, sp_law: &sp, sp_mean: h1, gamma, max_interference: 1.0, rate_target: target,
            amplifier_cap: f64::INFINITY, use_interference_cap: false, use_rate_cap: true,
        }).cap;
        prop_assert!((pu_rate(gamma, h1 * cap) - target).abs() < 1e-9);
    }

    #[test]
    fn belief_rate_cap_meets_the_target(
        h1 in prop::collection::vec(0.05f64..3.0, 2..6), gamma in 2.0f64..50.0, frac in 0.3f64..0.95,
    ) {
        let sp = law(&h1);
        let target = frac * pu_rate(gamma, 0.0);
        let cap = peak_power(&PeakInputs {
            q: 0.7, sp_law: &sp, sp_mean: sp.mean(), gamma, max_interference: 1.0, rate_target: target,
            amplifier_cap: 1e3, use_interference_cap: false, use_rate_cap: true,
        }).cap;
        let served = sp.expect(|h| pu_rate(gamma, h * cap));
        prop_assert!(cap == 1e3 || (served - target).abs() < 1e-7, "served {served} target {target}");
    }
}
