//! Gaussian quadrature rules and the special functions needed by the belief
//! expectations.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of a quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of `f` with the rule's implicit weight.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Legendre rule mapped from `[-1, 1]` to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

/// Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, p_prev) = legendre(n, z);
            dp = nf * (z * p - p_prev) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= 1e-15 {
                break;
            }
        }
        let (p, p_prev) = legendre(n, z);
        dp = if p.is_finite() {
            nf * (z * p - p_prev) / (z * z - 1.0)
        } else {
            dp
        };
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p1, mut p2) = (1.0, 0.0);
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
    }
    (p1, p2)
}

/// Gauss–Laguerre rule for `∫_0^∞ e^{-t} f(t) dt`.
pub fn gauss_laguerre(n: usize) -> Rule {
    assert!(n >= 1);
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut z = 0.0;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2])
            }
        };
        let mut p_prev = 0.0;
        let mut dp = 1.0;
        for _ in 0..200 {
            let (p, pp) = laguerre(n, z);
            p_prev = pp;
            dp = (nf * p - nf * pp) / z;
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= 1e-14 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        weights[i] = -1.0 / (dp * nf * p_prev);
    }
    Rule { nodes, weights }
}

fn laguerre(n: usize, z: f64) -> (f64, f64) {
    let (mut p1, mut p2) = (1.0, 0.0);
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
    }
    (p1, p2)
}

/// Both rule families at a given order, computed once per process.
#[derive(Debug, Clone)]
pub struct Rules {
    pub legendre: Arc<Rule>,
    pub laguerre: Arc<Rule>,
}

impl Rules {
    pub fn order(&self) -> usize {
        self.legendre.len()
    }
}

pub fn rules(order: usize) -> Rules {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rules>>> = OnceLock::new();
    let mut cache = CACHE
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    cache
        .entry(order)
        .or_insert_with(|| Rules {
            legendre: Arc::new(gauss_legendre(order)),
            laguerre: Arc::new(gauss_laguerre(order)),
        })
        .clone()
}

/// Exponentially scaled modified Bessel function `e^{-x} I0(x)` for `x >= 0`.
pub fn bessel_i0e(x: f64) -> f64 {
    let x = x.abs();
    if x <= 50.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum * (-x).exp()
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            let kf = k as f64;
            let next = term * (2.0 * kf - 1.0) * (2.0 * kf - 1.0) / (kf * 8.0 * x);
            if next.abs() > term.abs() || next.abs() < 1e-17 {
                break;
            }
            term = next;
            sum += term;
        }
        sum / (2.0 * PI * x).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        for n in [2, 5, 16, 64, 128] {
            let r = gauss_legendre(n);
            assert_relative_eq!(r.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            // highest even degree integrated exactly: 2n - 2
            let deg = 2 * n as i32 - 2;
            assert_relative_eq!(r.integrate(|x| x.powi(deg)), 2.0 / (deg as f64 + 1.0), epsilon = 1e-12);
        }
        let r = gauss_legendre(64);
        assert_relative_eq!(r.integrate(f64::exp), 1f64.exp() - (-1f64).exp(), epsilon = 1e-13);
    }

    #[test]
    fn laguerre_moments() {
        for n in [4, 16, 64, 128] {
            let r = gauss_laguerre(n);
            assert_relative_eq!(r.integrate(|_| 1.0), 1.0, epsilon = 1e-11);
            assert_relative_eq!(r.integrate(|t| t), 1.0, epsilon = 1e-12);
            assert_relative_eq!(r.integrate(|t| t * t), 2.0, epsilon = 1e-11);
            assert_relative_eq!(r.integrate(|t| t.powi(3)), 6.0, epsilon = 1e-10);
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn bessel_matches_reference_values() {
        // e^{-x} I0(x) reference values
        let table = [
            (0.0, 1.0),
            (1.0, 0.46575960759364043),
            (5.0, 0.18354081260932834),
            (19.9, 0.09000858886438959),
            (20.5, 0.08866442901574523),
            (49.9, 0.05661856278192253),
            (50.0, 0.056561626647454184),
            (100.0, 0.03994437929909668),
            (200.0, 0.028227159949111912),
        ];
        for (x, want) in table {
            assert_relative_eq!(bessel_i0e(x), want, max_relative = 1e-12);
        }
        // continuity across the branch switch
        assert_relative_eq!(bessel_i0e(50.0 - 1e-12), bessel_i0e(50.0 + 1e-12), max_relative = 1e-12);
    }
}
