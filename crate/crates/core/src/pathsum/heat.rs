//! Heat kernel `e^{−tΔ}` as a sum over paths weighted by simplex integrals.
//!
//! The weight of a path visiting vertices with valences `a₀,…,a_k` is
//! `W = ∫_{t₀+…+t_k=t} e^{−Σ tᵢaᵢ}`, which equals `(−1)^k` times the divided difference of
//! `x ↦ e^{−tx}` at the nodes `aᵢ`. Shifting the nodes by their maximum `c` gives the
//! positive series `W = e^{−tc} t^k Σ_q t^q h_q(c − a)/(k+q)!` in the complete homogeneous
//! symmetric polynomials `h_q`, which handles repeated valences without special cases.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::Graph;

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// The simplex weight for rates given as `(rate, multiplicity)` pairs with total multiplicity
/// `k + 1`.
fn weight_of_multiset(rates: &[(f64, usize)], t: f64) -> f64 {
    let count: usize = rates.iter().map(|&(_, n)| n).sum();
    assert!(count > 0, "a path has at least one vertex");
    let k = count - 1;
    if t == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let c = rates
        .iter()
        .filter(|&&(_, n)| n > 0)
        .map(|&(a, _)| a)
        .fold(f64::NEG_INFINITY, f64::max);
    let spread = rates
        .iter()
        .filter(|&&(_, n)| n > 0)
        .map(|&(a, _)| (c - a) * t)
        .fold(0.0, f64::max);
    // Terms are bounded by spread^q/q!, so stop once that is negligible.
    let mut cutoff = 0;
    let mut bound = 1.0;
    while bound > 1e-18 || (cutoff as f64) < spread {
        cutoff += 1;
        bound *= spread / cutoff as f64;
    }
    let mut h = vec![0.0; cutoff + 1];
    h[0] = 1.0;
    for &(a, n) in rates {
        let d = (c - a) * t;
        if d == 0.0 {
            continue;
        }
        for _ in 0..n {
            for q in 1..=cutoff {
                h[q] += d * h[q - 1];
            }
        }
    }
    let mut sum = 0.0;
    let mut denom = 1.0;
    for (q, hq) in h.iter().enumerate() {
        if q > 0 {
            denom *= (k + q) as f64;
        }
        sum += hq / denom;
    }
    let log_prefactor = if k == 0 {
        -t * c
    } else {
        k as f64 * t.ln() - ln_factorial(k) - t * c
    };
    log_prefactor.exp() * sum
}

/// Simplex weight of a path whose vertices have the given rates.
pub fn simplex_weight(rates: &[f64], t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(weight_of_multiset(
        &rates.iter().map(|&a| (a, 1)).collect::<Vec<_>>(),
        t,
    ))
}

/// `⟨u| e^{−tΔ} |v⟩` summed over paths of length at most `max_len`.
///
/// Paths are aggregated by the multiset of valences they visit, so the cost grows with the
/// number of distinct valences rather than with the number of paths.
pub fn heat_kernel_path_sum(g: &Graph, u: usize, v: usize, t: f64, max_len: usize) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let mut levels: Vec<usize> = (0..g.n()).map(|w| g.degree(w)).collect();
    levels.sort_unstable();
    levels.dedup();
    let slot: Vec<usize> = (0..g.n())
        .map(|w| {
            levels
                .binary_search(&g.degree(w))
                .expect("valence is listed")
        })
        .collect();
    let mut memo: HashMap<Vec<u16>, f64> = HashMap::new();
    let mut weight = |profile: &Vec<u16>| -> f64 {
        *memo.entry(profile.clone()).or_insert_with(|| {
            let rates: Vec<(f64, usize)> = levels
                .iter()
                .zip(profile)
                .map(|(&a, &n)| (a as f64, n as usize))
                .collect();
            weight_of_multiset(&rates, t)
        })
    };
    let mut start = vec![0u16; levels.len()];
    start[slot[u]] += 1;
    let mut states: HashMap<(usize, Vec<u16>), f64> = HashMap::from([((u, start), 1.0)]);
    let mut total = 0.0;
    for len in 0..=max_len {
        let mut here: Vec<(&Vec<u16>, f64)> = states
            .iter()
            .filter(|((w, _), _)| *w == v)
            .map(|((_, p), &c)| (p, c))
            .collect();
        here.sort_by(|a, b| a.0.cmp(b.0));
        for (profile, count) in here {
            total += count * weight(profile);
        }
        if len == max_len {
            break;
        }
        let mut next: HashMap<(usize, Vec<u16>), f64> = HashMap::new();
        for ((w, profile), count) in &states {
            for &(_, x) in g.incident(*w) {
                let mut p = profile.clone();
                p[slot[x]] += 1;
                *next.entry((x, p)).or_insert(0.0) += count;
            }
        }
        states = next;
    }
    Ok(total)
}
