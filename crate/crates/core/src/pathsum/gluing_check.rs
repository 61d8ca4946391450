//! Gluing identities at the level of individual hesitant paths, checked in exact arithmetic.
//!
//! Every hesitant path either avoids `Y` or splits at its first and last visit to `Y` into a
//! path that first hits `Y`, an arbitrary path between boundary vertices, and a path leaving
//! `Y` for good. Closed hesitant paths meeting `Y` exactly `j` times are cut at those visits
//! into `j` boundary-to-boundary pieces, each cycle arising `j/t` times.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Zero};

use crate::graph::{block_indices, laplacian, BoundaryMarking, Graph};

use super::exact::{count_walks_matrix, poly_matmul, IntMatrix, Poly};
use super::{closed_cycles, enumerate_from, PathKind, PathMode};

/// Direct and reconstructed counts of hesitant paths of one length between two vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionCell {
    pub length: usize,
    pub from: usize,
    pub to: usize,
    /// From powers of the hesitant transfer matrix.
    pub direct: BigInt,
    /// From the avoid / first-hit / any / last-leave pieces, each enumerated.
    pub reconstructed: BigInt,
}

/// Both sides of `tr(D′)^j = j Σ s(γ)/t(γ)` as polynomials in `m^{−2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceCell {
    pub crossings: usize,
    pub trace: Poly,
    pub cycles: Poly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathGluingReport {
    pub max_order: usize,
    pub decomposition: Vec<DecompositionCell>,
    pub trace: Vec<TraceCell>,
    /// `log det(1 + m^{−2}Δ_X)` coefficients from the whole graph.
    pub log_det_whole: Poly,
    /// The same from `log det(1 + m^{−2}Δ_{X,Y}) + tr log(I − D′)`.
    pub log_det_glued: Poly,
}

impl PathGluingReport {
    pub fn holds(&self) -> bool {
        self.decomposition
            .iter()
            .all(|c| c.direct == c.reconstructed)
            && self.trace.iter().all(|c| c.trace == c.cycles)
            && self.log_det_whole == self.log_det_glued
    }
}

type Counts = BTreeMap<(usize, usize), u64>;

fn counts(g: &Graph, y: &BoundaryMarking, u: usize, max: usize, mode: PathMode) -> Counts {
    let mut c = Counts::new();
    for p in enumerate_from(g, y, u, max, mode, PathKind::Hesitant) {
        *c.entry((p.end(), p.len())).or_insert(0) += 1;
    }
    c
}

fn get(c: &Counts, v: usize, k: usize) -> BigInt {
    BigInt::from(c.get(&(v, k)).copied().unwrap_or(0))
}

/// `D′` truncated at degree `max_order`: signed sums over hesitant paths from `Y` to `Y` whose
/// interior avoids `Y`.
fn d_prime(g: &Graph, y: &BoundaryMarking, boundary: &[usize], max_order: usize) -> Vec<Vec<Poly>> {
    let mut out = vec![vec![Poly::zero(max_order); boundary.len()]; boundary.len()];
    let pos: BTreeMap<usize, usize> = boundary.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    for (i, &u) in boundary.iter().enumerate() {
        for p in enumerate_from(
            g,
            y,
            u,
            max_order,
            PathMode::YToYInterior,
            PathKind::Hesitant,
        ) {
            let sign = if p.hesitations() % 2 == 0 {
                BigRational::one()
            } else {
                -BigRational::one()
            };
            out[i][pos[&p.end()]].add_term(p.len(), &sign);
        }
    }
    out
}

/// `log det(1 + xΔ)` truncated at degree `max_order`, from traces of powers.
fn log_det_poly(lap: &IntMatrix, max_order: usize) -> Poly {
    let powers = lap.neg().powers(max_order);
    let mut p = Poly::zero(max_order);
    for (k, power) in powers.iter().enumerate().skip(1) {
        p.add_term(k, &-BigRational::new(power.trace(), BigInt::from(k)));
    }
    p
}

/// Checks the hesitant-path decompositions behind the gluing formulas up to length
/// `max_order`, exactly.
pub fn path_gluing_check(g: &Graph, y: &BoundaryMarking, max_order: usize) -> PathGluingReport {
    let n = g.n();
    let (bulk, boundary) = block_indices(g, y);
    let walks: Vec<IntMatrix> = (0..=max_order).map(|k| count_walks_matrix(g, k)).collect();
    let avoid: Vec<Counts> = (0..n)
        .map(|u| counts(g, y, u, max_order, PathMode::AvoidY))
        .collect();
    let first: Vec<Counts> = (0..n)
        .map(|u| counts(g, y, u, max_order, PathMode::FirstHitY))
        .collect();
    let any: Vec<Counts> = (0..n)
        .map(|u| counts(g, y, u, max_order, PathMode::All))
        .collect();
    // Paths leaving `Y` for good are reversed first-hit paths.
    let mut last = vec![Counts::new(); n];
    for (v, c) in first.iter().enumerate() {
        for (&(w, k), &m) in c {
            *last[w].entry((v, k)).or_insert(0) += m;
        }
    }

    let mut decomposition = Vec::new();
    for k in 0..=max_order {
        for u in 0..n {
            for v in 0..n {
                let mut total = get(&avoid[u], v, k);
                for &w1 in &boundary {
                    for &w2 in &boundary {
                        for k1 in 0..=k {
                            let a = get(&first[u], w1, k1);
                            if a.is_zero() {
                                continue;
                            }
                            for k2 in 0..=k - k1 {
                                total +=
                                    &a * get(&any[w1], w2, k2) * get(&last[w2], v, k - k1 - k2);
                            }
                        }
                    }
                }
                decomposition.push(DecompositionCell {
                    length: k,
                    from: u,
                    to: v,
                    direct: walks[k].get(u, v).clone(),
                    reconstructed: total,
                });
            }
        }
    }

    let dp = d_prime(g, y, &boundary, max_order);
    let cycles = closed_cycles(g, max_order, PathKind::Hesitant);
    let mut trace = Vec::new();
    let mut power = dp.clone();
    let mut tr_log = Poly::zero(max_order);
    for j in 1..=max_order {
        if j > 1 {
            power = poly_matmul(&power, &dp, max_order);
        }
        let tr = (0..boundary.len()).fold(Poly::zero(max_order), |acc, i| acc.add(&power[i][i]));
        let mut by_cycles = Poly::zero(max_order);
        for c in cycles
            .iter()
            .filter(|c| c.representative.boundary_visits(y) == j)
        {
            let sign = if c.representative.hesitations() % 2 == 0 {
                1
            } else {
                -1
            };
            by_cycles.add_term(
                c.len(),
                &BigRational::new(BigInt::from(sign * j as i64), BigInt::from(c.traversals)),
            );
        }
        tr_log = tr_log.add(&tr.scale(&BigRational::new(-BigInt::one(), BigInt::from(j))));
        trace.push(TraceCell {
            crossings: j,
            trace: tr,
            cycles: by_cycles,
        });
    }

    let lap = laplacian(g);
    let whole = IntMatrix::from_fn(n, |i, j| lap[(i, j)]);
    let relative = IntMatrix::from_fn(bulk.len(), |i, j| lap[(bulk[i], bulk[j])]);
    let log_det_glued = log_det_poly(&relative, max_order).add(&tr_log);
    PathGluingReport {
        max_order,
        decomposition,
        trace,
        log_det_whole: log_det_poly(&whole, max_order),
        log_det_glued,
    }
}
