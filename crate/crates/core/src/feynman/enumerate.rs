//! Enumeration of Feynman graphs up to isomorphism, graded by the power of `ħ`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::graph::{FeynmanGraph, Shape};
use super::potential::Potential;

/// Default largest order accepted by the enumeration.
pub const DEFAULT_ORDER_CAP: u32 = 3;

/// Which graphs to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphMode {
    /// Bulk vertices only, graded by `−χ`.
    Closed,
    /// Bulk vertices with univalent boundary legs, graded by `|E| − |V_bulk| − |V_∂|/2`.
    Relative,
    /// As `Relative`, also allowing boundary–boundary edges, with at most `max_boundary`
    /// boundary vertices in total.
    RelativeWithBoundaryEdges { max_boundary: usize },
}

/// All graphs with `ħ`-order at most `max_order` whose bulk valences lie in the support of
/// `pot`, sorted by order and canonical string.
pub fn enumerate_feynman_graphs(
    pot: &Potential,
    max_order: u32,
    mode: GraphMode,
) -> Result<Vec<FeynmanGraph>> {
    enumerate_feynman_graphs_capped(pot, max_order, mode, DEFAULT_ORDER_CAP)
}

/// As [`enumerate_feynman_graphs`] with an explicit order cap.
pub fn enumerate_feynman_graphs_capped(
    pot: &Potential,
    max_order: u32,
    mode: GraphMode,
    cap: u32,
) -> Result<Vec<FeynmanGraph>> {
    if max_order > cap {
        return Err(Error::OrderTooLarge {
            requested: max_order,
            cap,
        });
    }
    let budget = 2 * max_order as usize;
    let support = pot.support();
    let mut shapes: BTreeMap<Shape, u64> = BTreeMap::new();
    let mut valences = Vec::new();
    vertex_multisets(&support, 0, budget, &mut valences, &mut |vals| {
        let leg_choices: Vec<Vec<usize>> = match mode {
            GraphMode::Closed => vals.iter().map(|_| vec![0]).collect(),
            _ => vals.iter().map(|&k| (0..=k).collect()).collect(),
        };
        let max_boundary = match mode {
            GraphMode::RelativeWithBoundaryEdges { max_boundary } => max_boundary,
            _ => usize::MAX,
        };
        let mut legs = vec![0; vals.len()];
        leg_assignments(vals, &leg_choices, 0, &mut legs, &mut |legs| {
            let total_legs: usize = legs.iter().sum();
            if total_legs > max_boundary {
                return;
            }
            let degrees: Vec<usize> = vals.iter().zip(legs).map(|(k, l)| k - l).collect();
            if degrees.iter().sum::<usize>() % 2 == 1 {
                return;
            }
            let labels: Vec<(usize, usize)> =
                vals.iter().zip(legs).map(|(&k, &l)| (k, l)).collect();
            let pairs_max = match mode {
                GraphMode::RelativeWithBoundaryEdges { .. } => (max_boundary - total_legs) / 2,
                _ => 0,
            };
            multiplicity_matrices(&degrees, &mut |mult| {
                for boundary_pairs in 0..=pairs_max {
                    let shape = Shape {
                        labels: labels.clone(),
                        mult: mult.clone(),
                        boundary_pairs,
                    };
                    let (canon, stab) = shape.canonical();
                    shapes.entry(canon).or_insert(stab);
                }
            });
        });
    });
    let mut graphs: Vec<FeynmanGraph> = shapes
        .into_iter()
        .map(|(shape, stab)| {
            let aut = shape.automorphisms(stab);
            let name = shape.describe();
            shape.to_graph(aut, name)
        })
        .collect();
    graphs.sort_by(|a, b| (a.twice_order(), a.canonical()).cmp(&(b.twice_order(), b.canonical())));
    Ok(graphs)
}

/// Nondecreasing valence sequences with `Σ (k − 2) ≤ budget`, including the empty one.
fn vertex_multisets(
    support: &[usize],
    from: usize,
    budget: usize,
    current: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    visit(current);
    for (i, &k) in support.iter().enumerate().skip(from) {
        if k - 2 <= budget {
            current.push(k);
            vertex_multisets(support, i, budget - (k - 2), current, visit);
            current.pop();
        }
    }
}

/// Leg counts per vertex, nondecreasing within runs of equal valence.
fn leg_assignments(
    vals: &[usize],
    choices: &[Vec<usize>],
    i: usize,
    legs: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if i == vals.len() {
        visit(legs);
        return;
    }
    for &l in &choices[i] {
        if i > 0 && vals[i - 1] == vals[i] && legs[i - 1] > l {
            continue;
        }
        legs[i] = l;
        leg_assignments(vals, choices, i + 1, legs, visit);
    }
}

/// Symmetric multiplicity matrices with loops on the diagonal (each counting twice) realizing
/// the given degrees.
fn multiplicity_matrices(degrees: &[usize], visit: &mut dyn FnMut(&Vec<Vec<usize>>)) {
    let n = degrees.len();
    let mut mult = vec![vec![0; n]; n];
    let mut rem = degrees.to_vec();
    fn rec(
        i: usize,
        j: usize,
        n: usize,
        mult: &mut Vec<Vec<usize>>,
        rem: &mut Vec<usize>,
        visit: &mut dyn FnMut(&Vec<Vec<usize>>),
    ) {
        if i == n {
            visit(mult);
            return;
        }
        if j == n {
            if rem[i] % 2 == 1 {
                return;
            }
            mult[i][i] = rem[i] / 2;
            let saved = rem[i];
            rem[i] = 0;
            rec(i + 1, i + 2, n, mult, rem, visit);
            rem[i] = saved;
            mult[i][i] = 0;
            return;
        }
        let top = rem[i].min(rem[j]);
        for a in 0..=top {
            mult[i][j] = a;
            mult[j][i] = a;
            rem[i] -= a;
            rem[j] -= a;
            rec(i, j + 1, n, mult, rem, visit);
            rem[i] += a;
            rem[j] += a;
        }
        mult[i][j] = 0;
        mult[j][i] = 0;
    }
    rec(0, 1, n, &mut mult, &mut rem, visit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::{BigInt, BigRational, One, Zero};

    fn pot(pairs: &[(usize, f64)]) -> Potential {
        Potential::new(pairs.iter().copied()).unwrap()
    }

    fn names(gs: &[FeynmanGraph]) -> Vec<(String, u64)> {
        gs.iter()
            .map(|g| (g.canonical().to_string(), g.aut()))
            .collect()
    }

    #[test]
    fn quartic_first_order_is_the_figure_eight() {
        let gs = enumerate_feynman_graphs(&pot(&[(4, 1.0)]), 1, GraphMode::Closed).unwrap();
        assert_eq!(
            names(&gs),
            vec![("empty".to_string(), 1), ("4|0-0,0-0".to_string(), 8)]
        );
    }

    #[test]
    fn cubic_first_order_is_theta_and_dumbbell() {
        let gs = enumerate_feynman_graphs(&pot(&[(3, 1.0)]), 1, GraphMode::Closed).unwrap();
        let first: Vec<_> = names(&gs)
            .into_iter()
            .filter(|(n, _)| n != "empty")
            .collect();
        assert_eq!(
            first,
            vec![
                ("3,3|0-0,0-1,1-1".to_string(), 8),
                ("3,3|0-1,0-1,0-1".to_string(), 12)
            ]
        );
    }

    #[test]
    fn empty_potential_gives_only_the_empty_graph() {
        for mode in [GraphMode::Closed, GraphMode::Relative] {
            let gs = enumerate_feynman_graphs(&Potential::zero(), 3, mode).unwrap();
            assert_eq!(names(&gs), vec![("empty".to_string(), 1)]);
        }
    }

    #[test]
    fn order_cap_is_enforced() {
        let p = pot(&[(4, 1.0)]);
        assert_eq!(
            enumerate_feynman_graphs(&p, 4, GraphMode::Closed),
            Err(Error::OrderTooLarge {
                requested: 4,
                cap: 3
            })
        );
        assert!(enumerate_feynman_graphs_capped(&p, 4, GraphMode::Closed, 4).is_ok());
    }

    #[test]
    fn formula_matches_dart_search_on_all_closed_graphs() {
        let p = pot(&[(3, 1.0), (4, 1.0), (5, 1.0), (6, 1.0)]);
        let gs = enumerate_feynman_graphs(&p, 3, GraphMode::Closed).unwrap();
        assert!(gs.len() > 100);
        for g in &gs {
            assert_eq!(
                g.aut(),
                g.count_automorphisms_by_darts(),
                "{}",
                g.canonical()
            );
            assert!(g.obeys_valence_rules());
        }
    }

    #[test]
    fn formula_matches_dart_search_on_relative_graphs() {
        let p = pot(&[(3, 1.0), (4, 1.0)]);
        let gs = enumerate_feynman_graphs(&p, 2, GraphMode::Relative).unwrap();
        for g in &gs {
            assert_eq!(
                g.aut(),
                g.count_automorphisms_by_darts(),
                "{}",
                g.canonical()
            );
            assert!(!g.has_boundary_pairs());
        }
        let with_pairs = enumerate_feynman_graphs(
            &p,
            1,
            GraphMode::RelativeWithBoundaryEdges { max_boundary: 6 },
        )
        .unwrap();
        assert!(with_pairs.iter().any(|g| g.has_boundary_pairs()));
        for g in &with_pairs {
            assert!(g.boundary_count() <= 6);
            assert_eq!(
                g.aut(),
                g.count_automorphisms_by_darts(),
                "{}",
                g.canonical()
            );
        }
    }

    #[test]
    fn canonical_strings_are_unique() {
        let p = pot(&[(3, 1.0), (4, 1.0)]);
        for mode in [GraphMode::Closed, GraphMode::Relative] {
            let gs = enumerate_feynman_graphs(&p, 2, mode).unwrap();
            let mut seen = std::collections::BTreeSet::new();
            for g in &gs {
                assert!(seen.insert(g.canonical().to_string()));
            }
        }
    }

    #[test]
    fn relative_orders_include_half_integers() {
        let gs = enumerate_feynman_graphs(&pot(&[(3, 1.0)]), 1, GraphMode::Relative).unwrap();
        let mut found: Vec<(i64, String, u64)> = gs
            .iter()
            .filter(|g| g.twice_order() == 1)
            .map(|g| (g.twice_order(), g.canonical().to_string(), g.aut()))
            .collect();
        found.sort();
        assert_eq!(
            found,
            vec![(1, "3+1|0-0".to_string(), 2), (1, "3+3|".to_string(), 6)]
        );
    }

    fn double_factorial(n: i64) -> BigInt {
        let mut out = BigInt::one();
        let mut k = n;
        while k > 1 {
            out *= k;
            k -= 2;
        }
        out
    }

    fn big_factorial(n: usize) -> BigInt {
        (1..=n).map(BigInt::from).product()
    }

    /// Coefficients of `ħ^ℓ` in `(2πħ)^{−1/2} ∫ e^{−(φ²/2 + p(φ))/ħ} dφ` from Wick moments.
    fn single_vertex_series(p: &[(usize, i64)], max_order: usize) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); max_order + 1];
        // Sum over multiplicities n_k of p_k vertices.
        fn rec(
            p: &[(usize, i64)],
            i: usize,
            budget: usize,
            used: usize,
            term: BigRational,
            legs: usize,
            out: &mut Vec<BigRational>,
        ) {
            if i == p.len() {
                if legs.is_multiple_of(2) {
                    let order = used / 2;
                    if used.is_multiple_of(2) && order < out.len() {
                        out[order] += term * double_factorial(legs as i64 - 1);
                    }
                }
                return;
            }
            let (k, pk) = p[i];
            let mut n = 0;
            loop {
                if n * (k - 2) > budget {
                    break;
                }
                let factor = BigRational::new(
                    (-BigInt::from(pk)).pow(n as u32),
                    big_factorial(k).pow(n as u32) * big_factorial(n),
                );
                rec(
                    p,
                    i + 1,
                    budget - n * (k - 2),
                    used + n * (k - 2),
                    term.clone() * factor,
                    legs + n * k,
                    out,
                );
                n += 1;
            }
        }
        rec(p, 0, 2 * max_order, 0, BigRational::one(), 0, &mut out);
        out
    }

    /// With `G = 1` on a single vertex every weight is `∏(−p_val)`.
    fn graph_series(gs: &[FeynmanGraph], p: &[(usize, i64)], max_order: usize) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); max_order + 1];
        for g in gs {
            let mut w = BigRational::new(BigInt::one(), BigInt::from(g.aut()));
            for v in g.bulk_vertices() {
                let pk = p.iter().find(|(k, _)| *k == g.valence(v)).unwrap().1;
                w *= BigRational::from_integer(BigInt::from(-pk));
            }
            out[(g.twice_order() / 2) as usize] += w;
        }
        out
    }

    #[test]
    fn symmetry_factors_reproduce_wick_combinatorics() {
        let coeffs = [(3usize, 2i64), (4, 3), (5, 5), (6, 7)];
        let pot = Potential::new(coeffs.iter().map(|&(k, c)| (k, c as f64))).unwrap();
        let gs = enumerate_feynman_graphs(&pot, 3, GraphMode::Closed).unwrap();
        assert_eq!(
            graph_series(&gs, &coeffs, 3),
            single_vertex_series(&coeffs, 3)
        );
    }

    #[test]
    fn all_graphs_are_the_exponential_of_connected_ones() {
        let coeffs = [(3usize, 2i64), (4, 3)];
        let pot = Potential::new(coeffs.iter().map(|&(k, c)| (k, c as f64))).unwrap();
        let gs = enumerate_feynman_graphs(&pot, 3, GraphMode::Closed).unwrap();
        let all = graph_series(&gs, &coeffs, 3);
        let connected: Vec<FeynmanGraph> =
            gs.iter().filter(|g| g.is_connected()).cloned().collect();
        let c = graph_series(&connected, &coeffs, 3);
        // exp of a series with zero constant term, truncated at order 3.
        let mul = |a: &[BigRational], b: &[BigRational]| -> Vec<BigRational> {
            let mut out = vec![BigRational::zero(); 4];
            for i in 0..4 {
                for j in 0..4 - i {
                    out[i + j] += &a[i] * &b[j];
                }
            }
            out
        };
        let mut exp = vec![BigRational::zero(); 4];
        exp[0] = BigRational::one();
        let mut power = exp.clone();
        for n in 1..4 {
            power = mul(&power, &c);
            for i in 0..4 {
                exp[i] += &power[i] / BigRational::from_integer(big_factorial(n));
            }
        }
        assert_eq!(all, exp);
    }
}
