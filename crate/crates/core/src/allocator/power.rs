use std::f64::consts::LOG2_E;

use log::error;

use super::lqi::{lqi, LinkContext};
use crate::error::{Error, Result};

/// Log-spaced points of the bracketing grid for dφ/dp.
pub const GRID_POINTS: usize = 256;
/// Grid size when either gain law has several nodes.
pub const BELIEF_GRID_POINTS: usize = 64;
const MAX_SPLIT_DEPTH: usize = 40;

const SLOPE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSolution {
    pub power: f64,
    /// φ at `power`.
    pub value: f64,
    /// Interior stationary points located (both maxima and minima).
    pub stationary_points: usize,
}

/// Unclipped modified-waterfilling level: the maximizer of φ without the
/// PU-rate term, which bounds the maximizer of φ from above because that
/// term is decreasing. Infinite when the linear price is zero.
pub fn waterfilling(ctx: &LinkContext) -> f64 {
    let price = ctx.linear_price();
    if price <= 0.0 {
        return f64::INFINITY;
    }
    let level = ctx.beta * LOG2_E / price;
    if let Some(h) = ctx.su.as_point() {
        if h <= 0.0 || level * h <= 1.0 {
            return 0.0;
        }
        return (level - 1.0 / h).max(0.0);
    }
    if ctx.su_slope(0.0) <= price {
        return 0.0;
    }
    // S(p) = β E[log2(e) h / (1 + h p)] is convex and decreasing, so Newton
    // from p = 0 climbs to the root without overshooting it.
    let mut p = 0.0;
    for _ in 0..100 {
        let (s, ds) = ctx.su.nodes().iter().fold((0.0, 0.0), |(s, ds), n| {
            let g = n.value / (1.0 + n.value * p);
            (s + n.weight * g, ds - n.weight * g * g)
        });
        let scale = ctx.beta * LOG2_E;
        let step = (scale * s - price) / (scale * ds);
        let next = (p - step).min(level);
        // Also stops on NaN.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(next > p) || next - p <= 1e-15 * next {
            return next.max(p);
        }
        p = next;
    }
    p
}

/// Global maximizer of φ over `[0, cap]`.
pub fn optimize_power(ctx: &LinkContext, cap: f64) -> Result<PowerSolution> {
    let at = |p: f64, stationary_points| PowerSolution {
        power: p,
        value: lqi(p, ctx),
        stationary_points,
    };
    if cap <= 0.0 {
        return Ok(at(0.0, 0));
    }
    let wf = waterfilling(ctx);
    if wf.is_infinite() && cap.is_infinite() {
        return Err(Error::Unbounded);
    }
    let upper = wf.min(cap);
    if ctx.pu_weight() == 0.0 || upper <= 0.0 {
        return Ok(at(upper.max(0.0), 0));
    }
    let sol = grid_search(ctx, upper);
    if sol.stationary_points > 3 && ctx.su.as_point().is_some() && ctx.sp.as_point().is_some() {
        error!(
            "{} stationary points found for a perfect-CSI indicator",
            sol.stationary_points
        );
    }
    Ok(sol)
}

fn grid_search(ctx: &LinkContext, upper: f64) -> PowerSolution {
    let price = ctx.linear_price();
    let w = ctx.pu_weight();
    // dφ/dp = S(p) − price + w·R(p) with S decreasing and R increasing.
    let parts = |p: f64| (ctx.su_slope(p), ctx.pu_slope(p));
    let d = |p: f64| {
        let (s, r) = parts(p);
        s - price + w * r
    };
    let n = if ctx.su.as_point().is_some() && ctx.sp.as_point().is_some() {
        GRID_POINTS
    } else {
        BELIEF_GRID_POINTS
    };
    let xs = bracketing_grid(upper, n);
    let pts: Vec<(f64, f64, f64)> = xs
        .iter()
        .map(|&p| {
            let (s, r) = parts(p);
            (p, s, r)
        })
        .collect();

    let mut brackets: Vec<(f64, f64, f64)> = Vec::new();
    for cell in pts.windows(2) {
        scan_cell(cell[0], cell[1], price, w, &parts, &mut brackets, 0);
    }

    let mut candidates = vec![0.0, upper];
    for &(a, b, da) in &brackets {
        let root = polish(&d, a, b, da);
        if da > 0.0 {
            candidates.push(root);
        }
    }
    candidates.sort_by(f64::total_cmp);
    let mut best = PowerSolution {
        power: 0.0,
        value: f64::NEG_INFINITY,
        stationary_points: brackets.len(),
    };
    for p in candidates {
        let v = lqi(p, ctx);
        if v > best.value {
            best.power = p;
            best.value = v;
        }
    }
    best
}

/// Finds the sign changes of dφ/dp in the cell `[a, b]`. Monotonicity of
/// the two parts bounds dφ/dp over the cell; cells whose bounds straddle
/// zero without a sign change at the ends are split.
fn scan_cell(
    a: (f64, f64, f64),
    b: (f64, f64, f64),
    price: f64,
    w: f64,
    parts: &impl Fn(f64) -> (f64, f64),
    out: &mut Vec<(f64, f64, f64)>,
    depth: usize,
) {
    let da = a.1 - price + w * a.2;
    let db = b.1 - price + w * b.2;
    if (da > 0.0 && db <= 0.0) || (da < 0.0 && db >= 0.0) {
        out.push((a.0, b.0, da));
        return;
    }
    let lowest = b.1 - price + w * a.2;
    let highest = a.1 - price + w * b.2;
    let clear = if da > 0.0 { lowest > 0.0 } else { highest < 0.0 };
    if clear || depth >= MAX_SPLIT_DEPTH {
        return;
    }
    let mid = 0.5 * (a.0 + b.0);
    if mid <= a.0 || mid >= b.0 {
        return;
    }
    let (s, r) = parts(mid);
    let m = (mid, s, r);
    scan_cell(a, m, price, w, parts, out, depth + 1);
    scan_cell(m, b, price, w, parts, out, depth + 1);
}

fn bracketing_grid(upper: f64, n: usize) -> Vec<f64> {
    let lo = upper * 1e-8;
    let step = (upper / lo).ln() / (n - 1) as f64;
    let mut xs = Vec::with_capacity(n + 1);
    xs.push(0.0);
    xs.extend((0..n - 1).map(|i| lo * (step * i as f64).exp()));
    xs.push(upper);
    xs
}

/// Bisection on a sign change of `d` in `[a, b]`; `da` is `d(a)`.
fn polish(d: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, da: f64) -> f64 {
    let rising = da < 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            return m;
        }
        let dm = d(m);
        if dm.abs() <= SLOPE_TOL {
            return m;
        }
        if (dm > 0.0) != rising {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
