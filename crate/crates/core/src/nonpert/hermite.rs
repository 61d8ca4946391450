//! Gauss–Hermite rules with tail weights accurate to full relative precision.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::hermite::GaussHermite;

/// Nodes `t_i` and log-weights `log w_i` with `Σ w_i f(t_i) ≈ ∫ e^{−t²} f(t) dt`.
#[derive(Debug, Clone)]
pub(crate) struct HermiteRule {
    pub nodes: Vec<f64>,
    pub log_weights: Vec<f64>,
}

/// Orthonormal Hermite functions `ψ_{n−1}(t), ψ_n(t)` (polynomial times `e^{−t²/2}`).
fn hermite_functions(n: usize, t: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * t * t).exp();
    for k in 0..n {
        let next =
            (2.0 / (k as f64 + 1.0)).sqrt() * t * cur - (k as f64 / (k as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (prev, cur)
}

impl HermiteRule {
    /// The rule with `n` nodes, built once per process.
    pub fn cached(n: usize) -> Arc<HermiteRule> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<HermiteRule>>>> = OnceLock::new();
        let mut cache = CACHE
            .get_or_init(Default::default)
            .lock()
            .expect("rule cache");
        cache
            .entry(n)
            .or_insert_with(|| Arc::new(HermiteRule::new(n)))
            .clone()
    }

    pub fn new(n: usize) -> HermiteRule {
        let seed = GaussHermite::new(NonZeroUsize::new(n).expect("positive node count"));
        let mut nodes = Vec::with_capacity(n);
        let mut log_weights = Vec::with_capacity(n);
        for &(t0, _) in seed.as_node_weight_pairs() {
            let mut t = t0;
            for _ in 0..3 {
                let (lower, upper) = hermite_functions(n, t);
                if lower == 0.0 {
                    break;
                }
                t -= upper / ((2.0 * n as f64).sqrt() * lower);
            }
            let (lower, _) = hermite_functions(n, t);
            // Christoffel weight 1/(n p_{n−1}(t)²) with p the orthonormal polynomial.
            nodes.push(t);
            log_weights.push(-t * t - (n as f64 * lower * lower).ln());
        }
        HermiteRule { nodes, log_weights }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_of_the_weight() {
        let r = HermiteRule::new(20);
        let m = |k: i32| -> f64 {
            r.nodes
                .iter()
                .zip(&r.log_weights)
                .map(|(t, w)| w.exp() * t.powi(k))
                .sum()
        };
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((m(0) - sqrt_pi).abs() < 1e-14);
        assert!((m(2) - sqrt_pi / 2.0).abs() < 1e-14);
        assert!((m(4) - 0.75 * sqrt_pi).abs() < 1e-13);
        assert!(m(3).abs() < 1e-14);
    }

    #[test]
    fn tail_weights_keep_relative_accuracy() {
        // ∫ e^{−t²} e^{a t²} dt = √(π/(1−a)) stresses the outermost weights.
        let r = HermiteRule::new(128);
        let a = 0.6;
        let q: f64 = r
            .nodes
            .iter()
            .zip(&r.log_weights)
            .map(|(t, w)| (w + a * t * t).exp())
            .sum();
        let exact = (std::f64::consts::PI / (1.0 - a)).sqrt();
        assert!((q - exact).abs() < 1e-12 * exact, "{q} {exact}");
    }
}
