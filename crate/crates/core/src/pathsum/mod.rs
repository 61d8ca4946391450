//! First-quantized expansions: enumeration of paths, hesitant paths and cycles, weighted
//! series for Gaussian data, heat-kernel path sums and path-level gluing identities.
//!
//! A path alternates vertices and edges, jumping along an edge at every step. A hesitant
//! path may also stay at the current vertex "along" one of its incident edges; such a step
//! is a hesitation. Short loops never enter a path.

mod exact;
mod gluing_check;
mod heat;
mod series;

pub use exact::{
    count_paths_matrix, count_walks_matrix, hesitant_green_coefficients,
    hesitant_logdet_coefficients, IntMatrix, Poly,
};
pub use gluing_check::{path_gluing_check, DecompositionCell, PathGluingReport, TraceCell};
pub use heat::{heat_kernel_path_sum, simplex_weight};
pub use series::{
    h_series_green, h_series_log_det, quasi_regular_degree, series_green, series_green_partials,
    series_log_det, series_relative, ConvergenceReport, LogDetSeries, RelativeSeries, SeriesResult,
    Weights,
};

use std::collections::BTreeMap;

use crate::graph::{BoundaryMarking, Graph};

/// A path or hesitant path: vertices `v₀,…,v_k` and the edges `e₀,…,e_{k−1}` used between them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Path {
    pub fn constant(v: usize) -> Path {
        Path {
            vertices: vec![v],
            edges: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self
            .vertices
            .last()
            .expect("a path has at least one vertex")
    }

    /// Number of steps that stay at the same vertex.
    pub fn hesitations(&self) -> usize {
        self.vertices.windows(2).filter(|w| w[0] == w[1]).count()
    }

    /// Number of steps that move to a neighbor.
    pub fn jumps(&self) -> usize {
        self.len() - self.hesitations()
    }

    pub fn is_closed(&self) -> bool {
        self.start() == self.end()
    }

    /// The ordinary path obtained by deleting hesitations.
    pub fn projection(&self) -> Path {
        let mut p = Path::constant(self.start());
        for (i, &e) in self.edges.iter().enumerate() {
            if self.vertices[i + 1] != self.vertices[i] {
                p.vertices.push(self.vertices[i + 1]);
                p.edges.push(e);
            }
        }
        p
    }

    /// Number of hesitations made at each vertex of the projection, in order.
    pub fn hesitation_profile(&self) -> Vec<usize> {
        let mut profile = vec![0];
        for w in self.vertices.windows(2) {
            if w[0] == w[1] {
                *profile.last_mut().expect("profile is nonempty") += 1;
            } else {
                profile.push(0);
            }
        }
        profile
    }

    pub fn reversed(&self) -> Path {
        let mut vertices = self.vertices.clone();
        let mut edges = self.edges.clone();
        vertices.reverse();
        edges.reverse();
        Path { vertices, edges }
    }

    /// Concatenation at a shared vertex.
    pub fn concat(&self, other: &Path) -> Path {
        assert_eq!(self.end(), other.start(), "paths must meet");
        let mut p = self.clone();
        p.vertices.extend_from_slice(&other.vertices[1..]);
        p.edges.extend_from_slice(&other.edges);
        p
    }

    /// Cyclic shift of a closed path by `r` steps.
    pub fn rotated(&self, r: usize) -> Path {
        assert!(self.is_closed());
        let k = self.len();
        if k == 0 {
            return self.clone();
        }
        let vertices = (0..=k).map(|i| self.vertices[(i + r) % k]).collect();
        let edges = (0..k).map(|i| self.edges[(i + r) % k]).collect();
        Path { vertices, edges }
    }

    /// The traversal count of a closed path: how many times its primitive cycle repeats.
    pub fn traversals(&self) -> usize {
        let k = self.len();
        if k == 0 {
            return 1;
        }
        let period = (1..=k)
            .find(|&r| k.is_multiple_of(r) && self.rotated(r) == *self)
            .expect("full rotation");
        k / period
    }

    /// Number of positions `0 ≤ i < k` of a closed path whose vertex lies in `y`.
    pub fn boundary_visits(&self, y: &BoundaryMarking) -> usize {
        self.vertices[..self.len().max(1)]
            .iter()
            .filter(|&&v| y.contains(v))
            .count()
    }
}

/// Whether steps may hesitate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Plain,
    Hesitant,
}

/// Restriction of paths relative to a boundary subgraph `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathMode {
    /// All paths.
    All,
    /// Every vertex outside `Y`.
    AvoidY,
    /// Only the final vertex lies in `Y`.
    FirstHitY,
    /// Start and end in `Y`, every interior vertex outside it, length at least one.
    YToYInterior,
}

fn steps(g: &Graph, v: usize, kind: PathKind) -> Vec<(usize, usize)> {
    let mut s: Vec<(usize, usize)> = g.incident(v).iter().map(|&(e, w)| (w, e)).collect();
    if kind == PathKind::Hesitant {
        s.extend(g.incident(v).iter().map(|&(e, _)| (v, e)));
    }
    s.sort();
    s
}

/// All paths starting at `u` with length at most `max_len` satisfying `mode`, grouped by length
/// and lexicographic in their `(next vertex, edge)` steps within a length.
pub fn enumerate_from(
    g: &Graph,
    y: &BoundaryMarking,
    u: usize,
    max_len: usize,
    mode: PathMode,
    kind: PathKind,
) -> Vec<Path> {
    let step_table: Vec<Vec<(usize, usize)>> = (0..g.n()).map(|v| steps(g, v, kind)).collect();
    let inside = |v: usize| y.contains(v);
    let start_ok = match mode {
        PathMode::All => true,
        PathMode::AvoidY => !inside(u),
        PathMode::FirstHitY => true,
        PathMode::YToYInterior => inside(u),
    };
    let mut out = Vec::new();
    if !start_ok {
        return out;
    }
    let accept = |p: &Path| match mode {
        PathMode::All | PathMode::AvoidY => true,
        PathMode::FirstHitY => inside(p.end()),
        PathMode::YToYInterior => !p.is_empty() && inside(p.end()),
    };
    let extendable = |p: &Path| match mode {
        PathMode::All | PathMode::AvoidY => true,
        PathMode::FirstHitY => !inside(p.end()),
        PathMode::YToYInterior => p.is_empty() || !inside(p.end()),
    };
    let step_ok = |to: usize| match mode {
        PathMode::AvoidY => !inside(to),
        _ => true,
    };
    let mut frontier = vec![Path::constant(u)];
    for len in 0..=max_len {
        out.extend(frontier.iter().filter(|p| accept(p)).cloned());
        if len == max_len {
            break;
        }
        let mut next = Vec::new();
        for p in frontier.iter().filter(|p| extendable(p)) {
            for &(to, e) in &step_table[p.end()] {
                if step_ok(to) {
                    let mut q = p.clone();
                    q.vertices.push(to);
                    q.edges.push(e);
                    next.push(q);
                }
            }
        }
        frontier = next;
    }
    out
}

/// The paths from `u` to `v` of length at most `max_len` satisfying `mode`.
pub fn enumerate_paths(
    g: &Graph,
    y: &BoundaryMarking,
    u: usize,
    v: usize,
    max_len: usize,
    mode: PathMode,
    kind: PathKind,
) -> Vec<Path> {
    enumerate_from(g, y, u, max_len, mode, kind)
        .into_iter()
        .filter(|p| p.end() == v)
        .collect()
}

/// Counts of paths from `u` by `(end, length)`.
pub fn count_from(
    g: &Graph,
    y: &BoundaryMarking,
    u: usize,
    max_len: usize,
    mode: PathMode,
    kind: PathKind,
) -> BTreeMap<(usize, usize), u64> {
    let mut counts = BTreeMap::new();
    for p in enumerate_from(g, y, u, max_len, mode, kind) {
        *counts.entry((p.end(), p.len())).or_insert(0) += 1;
    }
    counts
}

/// A cycle: the orbit of a closed path under cyclic shifts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleClass {
    /// The lexicographically smallest rotation.
    pub representative: Path,
    /// Number of times the primitive cycle is traversed.
    pub traversals: usize,
}

impl CycleClass {
    pub fn len(&self) -> usize {
        self.representative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representative.is_empty()
    }

    /// Number of distinct based closed paths in the orbit.
    pub fn orbit_size(&self) -> usize {
        self.len() / self.traversals
    }
}

/// The class of a closed path of positive length.
pub fn cycle_class(p: &Path) -> CycleClass {
    let representative = (0..p.len())
        .map(|r| p.rotated(r))
        .min()
        .expect("positive length");
    CycleClass {
        traversals: p.traversals(),
        representative,
    }
}

/// All cycles of length `1..=max_len`, ordered by length and then representative.
pub fn closed_cycles(g: &Graph, max_len: usize, kind: PathKind) -> Vec<CycleClass> {
    let none = BoundaryMarking::empty(g);
    let mut reps = std::collections::BTreeSet::new();
    for u in 0..g.n() {
        for p in enumerate_paths(g, &none, u, u, max_len, PathMode::All, kind) {
            if !p.is_empty() {
                reps.insert((p.len(), cycle_class(&p).representative));
            }
        }
    }
    reps.into_iter()
        .map(|(_, representative)| CycleClass {
            traversals: representative.traversals(),
            representative,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{graph_corpus, rng};
    use proptest::prelude::*;
    use rand::RngExt;
    use std::collections::HashMap;

    fn counts_by_len(ps: &[Path], max: usize) -> Vec<usize> {
        (0..=max)
            .map(|k| ps.iter().filter(|p| p.len() == k).count())
            .collect()
    }

    #[test]
    fn circle3_path_counts() {
        let g = Graph::circle(3);
        let none = BoundaryMarking::empty(&g);
        let ps = enumerate_paths(&g, &none, 0, 1, 5, PathMode::All, PathKind::Plain);
        assert_eq!(counts_by_len(&ps, 5), vec![0, 1, 1, 3, 5, 11]);
    }

    #[test]
    fn circle3_hesitant_length_two() {
        let g = Graph::circle(3);
        let none = BoundaryMarking::empty(&g);
        let ps = enumerate_paths(&g, &none, 0, 1, 2, PathMode::All, PathKind::Hesitant);
        let two: Vec<&Path> = ps.iter().filter(|p| p.len() == 2).collect();
        assert_eq!(two.len(), 5);
        assert_eq!(two.iter().filter(|p| p.hesitations() == 1).count(), 4);
    }

    #[test]
    fn constant_path_at_length_zero() {
        let g = Graph::line(3);
        let none = BoundaryMarking::empty(&g);
        let ps = enumerate_paths(&g, &none, 1, 1, 0, PathMode::All, PathKind::Hesitant);
        assert_eq!(ps, vec![Path::constant(1)]);
    }

    #[test]
    fn line3_endpoint_paths_double() {
        let g = Graph::line(3);
        let none = BoundaryMarking::empty(&g);
        let ps = enumerate_paths(&g, &none, 0, 2, 8, PathMode::All, PathKind::Plain);
        for l in 1..=4 {
            assert_eq!(ps.iter().filter(|p| p.len() == 2 * l).count(), 1 << (l - 1));
        }
    }

    #[test]
    fn two_vertex_boundary_to_boundary_is_single_path() {
        let g = Graph::line(2);
        let y = BoundaryMarking::vertices_only(&g, [g.id(1)]).unwrap();
        let ps = enumerate_paths(&g, &y, 1, 1, 10, PathMode::YToYInterior, PathKind::Plain);
        assert_eq!(
            ps,
            vec![Path {
                vertices: vec![1, 0, 1],
                edges: vec![0, 0]
            }]
        );
        let first = enumerate_paths(&g, &y, 0, 1, 10, PathMode::FirstHitY, PathKind::Plain);
        assert_eq!(first.len(), 1);
        let avoid = enumerate_paths(&g, &y, 0, 0, 10, PathMode::AvoidY, PathKind::Plain);
        assert_eq!(avoid, vec![Path::constant(0)]);
    }

    #[test]
    fn parallel_edges_give_distinct_paths() {
        let g = Graph::new(["a", "b"], [("a", "b"), ("a", "b")]).unwrap();
        let none = BoundaryMarking::empty(&g);
        let ps = enumerate_paths(&g, &none, 0, 1, 1, PathMode::All, PathKind::Plain);
        assert_eq!(ps.len(), 2);
    }

    #[test]
    fn short_loops_are_never_traversed() {
        let g = Graph::new(["a", "b"], [("a", "b"), ("a", "a")]).unwrap();
        let none = BoundaryMarking::empty(&g);
        let ps = enumerate_paths(&g, &none, 0, 0, 2, PathMode::All, PathKind::Hesitant);
        assert_eq!(counts_by_len(&ps, 2), vec![1, 1, 2]);
    }

    #[test]
    fn enumeration_matches_adjacency_powers() {
        for g in graph_corpus(3, 20, 6) {
            let none = BoundaryMarking::empty(&g);
            for k in 0..=5 {
                let a = count_paths_matrix(&g, k);
                let h = count_walks_matrix(&g, k);
                for u in 0..g.n() {
                    let plain = count_from(&g, &none, u, k, PathMode::All, PathKind::Plain);
                    let hes = count_from(&g, &none, u, k, PathMode::All, PathKind::Hesitant);
                    for v in 0..g.n() {
                        let p = plain.get(&(v, k)).copied().unwrap_or(0);
                        let q = hes.get(&(v, k)).copied().unwrap_or(0);
                        assert_eq!(a.get(u, v), &p.into());
                        assert_eq!(h.get(u, v), &q.into());
                    }
                }
            }
        }
    }

    #[test]
    fn circle3_cycle_counts() {
        let cycles = closed_cycles(&Graph::circle(3), 4, PathKind::Plain);
        let by_len = |k: usize| cycles.iter().filter(|c| c.len() == k).collect::<Vec<_>>();
        assert_eq!(by_len(1).len(), 0);
        assert_eq!(by_len(2).len(), 3);
        assert_eq!(by_len(3).len(), 2);
        let four = by_len(4);
        assert_eq!(four.iter().filter(|c| c.traversals == 1).count(), 3);
        assert_eq!(four.iter().filter(|c| c.traversals == 2).count(), 3);
    }

    #[test]
    fn hesitant_cycles_of_circle3_at_length_two() {
        let cycles = closed_cycles(&Graph::circle(3), 2, PathKind::Hesitant);
        let total: f64 = cycles
            .iter()
            .filter(|c| c.len() == 2)
            .map(|c| 1.0 / c.traversals as f64)
            .sum();
        assert_eq!(cycles.iter().filter(|c| c.len() == 1).count(), 6);
        assert_eq!(total, 9.0);
    }

    #[test]
    fn orbit_sizes_partition_closed_paths() {
        let mut r = rng(8);
        for g in graph_corpus(12, 10, 5) {
            let none = BoundaryMarking::empty(&g);
            let k = r.random_range(1..=5);
            let mut orbit_count: HashMap<Path, usize> = HashMap::new();
            let mut total = 0;
            for u in 0..g.n() {
                for p in enumerate_paths(&g, &none, u, u, k, PathMode::All, PathKind::Hesitant) {
                    if p.len() == k {
                        total += 1;
                        let c = cycle_class(&p);
                        assert_eq!(k % c.traversals, 0);
                        *orbit_count.entry(c.representative).or_insert(0) += 1;
                    }
                }
            }
            let classes: Vec<CycleClass> = closed_cycles(&g, k, PathKind::Hesitant)
                .into_iter()
                .filter(|c| c.len() == k)
                .collect();
            assert_eq!(classes.len(), orbit_count.len());
            for c in &classes {
                assert_eq!(orbit_count[&c.representative], c.orbit_size());
            }
            let inverse_t: f64 = classes.iter().map(|c| c.orbit_size() as f64).sum();
            assert_eq!(inverse_t as usize, total);
        }
    }

    #[test]
    fn hesitation_fibers_have_product_size() {
        for g in graph_corpus(21, 8, 5) {
            let none = BoundaryMarking::empty(&g);
            for u in 0..g.n() {
                let mut fibers: HashMap<(Path, Vec<usize>), usize> = HashMap::new();
                for p in enumerate_from(&g, &none, u, 4, PathMode::All, PathKind::Hesitant) {
                    *fibers
                        .entry((p.projection(), p.hesitation_profile()))
                        .or_insert(0) += 1;
                }
                for ((proj, profile), size) in fibers {
                    let expect: usize = proj
                        .vertices
                        .iter()
                        .zip(&profile)
                        .map(|(&v, &j)| g.degree(v).pow(j as u32))
                        .product();
                    assert_eq!(size, expect);
                    assert_eq!(proj.hesitations(), 0);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn concatenation_adds_lengths_and_hesitations(seed in 0u64..500, a in 0usize..4, b in 0usize..4) {
            let mut r = rng(seed);
            let g = crate::corpus::random_graph(&mut r, 5, 3);
            let none = BoundaryMarking::empty(&g);
            let u = r.random_range(0..g.n());
            let first = enumerate_from(&g, &none, u, a, PathMode::All, PathKind::Hesitant);
            let p = &first[r.random_range(0..first.len())];
            let second = enumerate_from(&g, &none, p.end(), b, PathMode::All, PathKind::Hesitant);
            let q = &second[r.random_range(0..second.len())];
            let pq = p.concat(q);
            prop_assert_eq!(pq.len(), p.len() + q.len());
            prop_assert_eq!(pq.hesitations(), p.hesitations() + q.hesitations());
            prop_assert_eq!(pq.reversed().reversed(), pq);
        }
    }
}
