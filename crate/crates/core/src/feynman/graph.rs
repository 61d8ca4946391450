//! Feynman multigraphs as half-edge structures, with canonical forms and automorphism counts.
//!
//! Edge `e` consists of the darts `2e` and `2e + 1`; the involution pairing darts is `d ↦ d ^ 1`.
//! Boundary vertices are univalent. A boundary vertex attached to a bulk vertex is a leg of that
//! vertex; two boundary vertices joined to each other form a boundary pair.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum VertexKind {
    Bulk,
    Boundary,
}

/// A Feynman graph with its canonical string and automorphism count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeynmanGraph {
    kinds: Vec<VertexKind>,
    ends: Vec<(usize, usize)>,
    aut: u64,
    canonical: String,
}

/// One automorphism: the vertex permutation and the dart permutation it comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    pub vertices: Vec<usize>,
    pub darts: Vec<usize>,
}

impl Automorphism {
    /// The induced permutation of edges.
    pub fn edges(&self) -> Vec<usize> {
        (0..self.darts.len() / 2)
            .map(|e| self.darts[2 * e] / 2)
            .collect()
    }
}

fn factorial(k: usize) -> u64 {
    (2..=k as u64).product()
}

/// Isomorphism-invariant data of a graph: bulk vertices labelled by `(valence, legs)`, the
/// multiplicity matrix among them (loops on the diagonal) and the number of boundary pairs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Shape {
    pub labels: Vec<(usize, usize)>,
    pub mult: Vec<Vec<usize>>,
    pub boundary_pairs: usize,
}

/// Calls `visit` with every permutation that maps canonical slots to vertices of equal label.
fn block_permutations(labels: &[(usize, usize)], mut visit: impl FnMut(&[usize])) {
    let n = labels.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| labels[i]);
    let mut slot = vec![0; n];
    let mut used = vec![false; n];
    fn rec(
        k: usize,
        order: &[usize],
        labels: &[(usize, usize)],
        slot: &mut Vec<usize>,
        used: &mut Vec<bool>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if k == order.len() {
            visit(slot);
            return;
        }
        let want = labels[order[k]];
        for v in 0..order.len() {
            if !used[v] && labels[v] == want {
                used[v] = true;
                slot[k] = v;
                rec(k + 1, order, labels, slot, used, visit);
                used[v] = false;
            }
        }
    }
    rec(0, &order, labels, &mut slot, &mut used, &mut visit);
}

impl Shape {
    fn key(&self, perm: &[usize]) -> Vec<usize> {
        let n = perm.len();
        let mut key = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                key.push(self.mult[perm[i]][perm[j]]);
            }
        }
        key
    }

    /// The canonical relabelling and the number of label-preserving vertex permutations that
    /// fix the multiplicity matrix.
    pub fn canonical(&self) -> (Shape, u64) {
        let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
        let mut count = 0u64;
        block_permutations(&self.labels, |perm| {
            let key = self.key(perm);
            match &best {
                Some((b, _)) if key > *b => {}
                Some((b, _)) if key == *b => count += 1,
                _ => {
                    best = Some((key, perm.to_vec()));
                    count = 1;
                }
            }
        });
        let perm = best.map(|(_, p)| p).unwrap_or_default();
        let n = perm.len();
        let shape = Shape {
            labels: perm.iter().map(|&v| self.labels[v]).collect(),
            mult: (0..n)
                .map(|i| (0..n).map(|j| self.mult[perm[i]][perm[j]]).collect())
                .collect(),
            boundary_pairs: self.boundary_pairs,
        };
        (shape, count)
    }

    /// `|Aut|` of a canonical shape given its vertex stabilizer size.
    pub fn automorphisms(&self, vertex_stabilizer: u64) -> u64 {
        let n = self.labels.len();
        let mut aut = vertex_stabilizer;
        for i in 0..n {
            let loops = self.mult[i][i];
            aut *= factorial(loops) << loops;
            aut *= factorial(self.labels[i].1);
            for j in i + 1..n {
                aut *= factorial(self.mult[i][j]);
            }
        }
        aut * (factorial(self.boundary_pairs) << self.boundary_pairs)
    }

    pub fn describe(&self) -> String {
        let n = self.labels.len();
        if n == 0 && self.boundary_pairs == 0 {
            return "empty".to_string();
        }
        let vertices: Vec<String> = self
            .labels
            .iter()
            .map(|&(val, legs)| {
                if legs == 0 {
                    val.to_string()
                } else {
                    format!("{val}+{legs}")
                }
            })
            .collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i..n {
                for _ in 0..self.mult[i][j] {
                    edges.push(format!("{i}-{j}"));
                }
            }
        }
        let mut s = format!("{}|{}", vertices.join(","), edges.join(","));
        if self.boundary_pairs > 0 {
            s.push_str(&format!("|dn{}", self.boundary_pairs));
        }
        s
    }

    /// The graph realizing this shape: bulk vertices in label order, then legs, then pairs.
    pub fn to_graph(&self, aut: u64, canonical: String) -> FeynmanGraph {
        let n = self.labels.len();
        let mut kinds = vec![VertexKind::Bulk; n];
        let mut ends = Vec::new();
        for i in 0..n {
            for j in i..n {
                for _ in 0..self.mult[i][j] {
                    ends.push((i, j));
                }
            }
        }
        for (i, &(_, legs)) in self.labels.iter().enumerate() {
            for _ in 0..legs {
                ends.push((i, kinds.len()));
                kinds.push(VertexKind::Boundary);
            }
        }
        for _ in 0..self.boundary_pairs {
            let a = kinds.len();
            kinds.extend([VertexKind::Boundary; 2]);
            ends.push((a, a + 1));
        }
        FeynmanGraph {
            kinds,
            ends,
            aut,
            canonical,
        }
    }
}

impl FeynmanGraph {
    /// Builds a graph from vertex kinds and edge endpoints. Boundary vertices must be univalent;
    /// bulk valences are not restricted, so test graphs outside the Feynman rules are allowed.
    pub fn from_edges(kinds: Vec<VertexKind>, ends: Vec<(usize, usize)>) -> Result<FeynmanGraph> {
        let n = kinds.len();
        let mut val = vec![0; n];
        for &(a, b) in &ends {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) refers to a missing vertex"
                )));
            }
            val[a] += 1;
            val[b] += 1;
        }
        for v in 0..n {
            if kinds[v] == VertexKind::Boundary && val[v] != 1 {
                return Err(Error::InvalidGraph(format!(
                    "boundary vertex {v} has valence {}",
                    val[v]
                )));
            }
        }
        let mut g = FeynmanGraph {
            kinds,
            ends,
            aut: 0,
            canonical: String::new(),
        };
        let (shape, stab) = g.shape().canonical();
        g.aut = shape.automorphisms(stab);
        g.canonical = shape.describe();
        Ok(g)
    }

    /// A closed graph with only bulk vertices.
    pub fn closed(n: usize, ends: Vec<(usize, usize)>) -> Result<FeynmanGraph> {
        FeynmanGraph::from_edges(vec![VertexKind::Bulk; n], ends)
    }

    /// The figure-eight: one quartic vertex with two loops.
    pub fn figure_eight() -> FeynmanGraph {
        FeynmanGraph::closed(1, vec![(0, 0), (0, 0)]).expect("valid graph")
    }

    /// The theta graph: two cubic vertices joined by three edges.
    pub fn theta() -> FeynmanGraph {
        FeynmanGraph::closed(2, vec![(0, 1); 3]).expect("valid graph")
    }

    /// The dumbbell: two cubic vertices with a loop each, joined by an edge.
    pub fn dumbbell() -> FeynmanGraph {
        FeynmanGraph::closed(2, vec![(0, 0), (0, 1), (1, 1)]).expect("valid graph")
    }

    pub(crate) fn shape(&self) -> Shape {
        let bulk: Vec<usize> = (0..self.kinds.len())
            .filter(|&v| self.kinds[v] == VertexKind::Bulk)
            .collect();
        let mut pos = vec![usize::MAX; self.kinds.len()];
        for (i, &v) in bulk.iter().enumerate() {
            pos[v] = i;
        }
        let nb = bulk.len();
        let mut mult = vec![vec![0; nb]; nb];
        let mut legs = vec![0; nb];
        let mut boundary_pairs = 0;
        for &(a, b) in &self.ends {
            match (pos[a], pos[b]) {
                (usize::MAX, usize::MAX) => boundary_pairs += 1,
                (i, usize::MAX) | (usize::MAX, i) => legs[i] += 1,
                (i, j) => {
                    mult[i][j] += 1;
                    if i != j {
                        mult[j][i] += 1;
                    }
                }
            }
        }
        let labels = bulk
            .iter()
            .zip(&legs)
            .map(|(&v, &l)| (self.valence(v), l))
            .collect();
        Shape {
            labels,
            mult,
            boundary_pairs,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.kinds.len()
    }

    pub fn num_edges(&self) -> usize {
        self.ends.len()
    }

    pub fn num_darts(&self) -> usize {
        2 * self.ends.len()
    }

    pub fn kind(&self, v: usize) -> VertexKind {
        self.kinds[v]
    }

    pub fn kinds(&self) -> &[VertexKind] {
        &self.kinds
    }

    /// Endpoints of every edge; a loop has equal endpoints.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.ends
    }

    /// The vertex a dart is attached to.
    pub fn dart_vertex(&self, d: usize) -> usize {
        let (a, b) = self.ends[d / 2];
        if d.is_multiple_of(2) {
            a
        } else {
            b
        }
    }

    /// Number of darts at `v`; a loop counts twice.
    pub fn valence(&self, v: usize) -> usize {
        self.ends
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    pub fn bulk_vertices(&self) -> Vec<usize> {
        (0..self.kinds.len())
            .filter(|&v| self.kinds[v] == VertexKind::Bulk)
            .collect()
    }

    pub fn boundary_count(&self) -> usize {
        self.kinds
            .iter()
            .filter(|&&k| k == VertexKind::Boundary)
            .count()
    }

    pub fn bulk_count(&self) -> usize {
        self.kinds.len() - self.boundary_count()
    }

    /// `|V| − |E|`.
    pub fn euler_characteristic(&self) -> i64 {
        self.kinds.len() as i64 - self.ends.len() as i64
    }

    /// Twice the power of `ħ` accompanying the graph, `2|E| − 2|V_bulk| − |V_∂|`, which for
    /// closed graphs is `−2χ`.
    pub fn twice_order(&self) -> i64 {
        2 * self.ends.len() as i64 - 2 * self.bulk_count() as i64 - self.boundary_count() as i64
    }

    /// Order of the automorphism group of the dart structure.
    pub fn aut(&self) -> u64 {
        self.aut
    }

    /// Canonical description, equal for isomorphic graphs: bulk vertices as `valence+legs`,
    /// then edges among them as `i-j`, then `dnK` for `K` boundary pairs.
    pub fn canonical(&self) -> &str {
        &self.canonical
    }

    pub fn has_boundary_pairs(&self) -> bool {
        self.ends.iter().any(|&(a, b)| {
            self.kinds[a] == VertexKind::Boundary && self.kinds[b] == VertexKind::Boundary
        })
    }

    /// Whether every bulk vertex has valence at least 3 and boundary vertices are univalent.
    pub fn obeys_valence_rules(&self) -> bool {
        (0..self.kinds.len()).all(|v| match self.kinds[v] {
            VertexKind::Bulk => self.valence(v) >= 3,
            VertexKind::Boundary => self.valence(v) == 1,
        })
    }

    /// Nonempty and connected.
    pub fn is_connected(&self) -> bool {
        let n = self.kinds.len();
        if n == 0 {
            return false;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in &self.ends {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let root = find(&mut parent, 0);
        (0..n).all(|v| find(&mut parent, v) == root)
    }

    /// Visits every dart permutation commuting with the involution and carried by a vertex
    /// permutation preserving kinds. Stops early when `visit` returns false.
    fn search_automorphisms(&self, visit: &mut dyn FnMut(&[usize], &[usize]) -> bool) {
        let nd = self.num_darts();
        let nv = self.kinds.len();
        let val: Vec<usize> = (0..nv).map(|v| self.valence(v)).collect();
        let mut state = Search {
            sigma: vec![usize::MAX; nd],
            taken: vec![false; nd],
            vmap: vec![usize::MAX; nv],
            vtaken: vec![false; nv],
        };
        fn compatible(g: &FeynmanGraph, val: &[usize], s: &Search, a: usize, b: usize) -> bool {
            if s.vmap[a] != usize::MAX {
                return s.vmap[a] == b;
            }
            !s.vtaken[b] && g.kinds[a] == g.kinds[b] && val[a] == val[b]
        }
        fn rec(
            g: &FeynmanGraph,
            val: &[usize],
            s: &mut Search,
            d: usize,
            visit: &mut dyn FnMut(&[usize], &[usize]) -> bool,
        ) -> bool {
            let nd = s.sigma.len();
            let mut d = d;
            while d < nd && s.sigma[d] != usize::MAX {
                d += 1;
            }
            if d == nd {
                let isolated_fixed: Vec<usize> = (0..s.vmap.len())
                    .map(|v| {
                        if s.vmap[v] == usize::MAX {
                            v
                        } else {
                            s.vmap[v]
                        }
                    })
                    .collect();
                return visit(&isolated_fixed, &s.sigma);
            }
            let pd = d ^ 1;
            let (vd, vpd) = (g.dart_vertex(d), g.dart_vertex(pd));
            for t in 0..nd {
                let pt = t ^ 1;
                if s.taken[t] || s.taken[pt] {
                    continue;
                }
                let (vt, vpt) = (g.dart_vertex(t), g.dart_vertex(pt));
                if !compatible(g, val, s, vd, vt) {
                    continue;
                }
                let new_d = s.vmap[vd] == usize::MAX;
                if new_d {
                    s.vmap[vd] = vt;
                    s.vtaken[vt] = true;
                }
                let ok = compatible(g, val, s, vpd, vpt);
                let new_pd = ok && s.vmap[vpd] == usize::MAX;
                if ok {
                    if new_pd {
                        s.vmap[vpd] = vpt;
                        s.vtaken[vpt] = true;
                    }
                    s.sigma[d] = t;
                    s.sigma[pd] = pt;
                    s.taken[t] = true;
                    s.taken[pt] = true;
                    let go_on = rec(g, val, s, d + 1, visit);
                    s.sigma[d] = usize::MAX;
                    s.sigma[pd] = usize::MAX;
                    s.taken[t] = false;
                    s.taken[pt] = false;
                    if new_pd {
                        s.vmap[vpd] = usize::MAX;
                        s.vtaken[vpt] = false;
                    }
                    if !go_on {
                        if new_d {
                            s.vmap[vd] = usize::MAX;
                            s.vtaken[vt] = false;
                        }
                        return false;
                    }
                }
                if new_d {
                    s.vmap[vd] = usize::MAX;
                    s.vtaken[vt] = false;
                }
            }
            true
        }
        rec(self, &val, &mut state, 0, visit);
    }

    /// `|Aut|` by exhaustive search over dart permutations. Isolated vertices are held fixed.
    pub fn count_automorphisms_by_darts(&self) -> u64 {
        let mut count = 0;
        self.search_automorphisms(&mut |_, _| {
            count += 1;
            true
        });
        count
    }

    /// All automorphisms, or `None` if there are more than `limit`.
    pub fn automorphism_group(&self, limit: usize) -> Option<Vec<Automorphism>> {
        let mut out = Vec::new();
        let mut overflow = false;
        self.search_automorphisms(&mut |v, d| {
            if out.len() == limit {
                overflow = true;
                return false;
            }
            out.push(Automorphism {
                vertices: v.to_vec(),
                darts: d.to_vec(),
            });
            true
        });
        if overflow {
            None
        } else {
            Some(out)
        }
    }
}

struct Search {
    sigma: Vec<usize>,
    taken: Vec<bool>,
    vmap: Vec<usize>,
    vtaken: Vec<bool>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_symmetry_factors_by_darts() {
        assert_eq!(
            FeynmanGraph::figure_eight().count_automorphisms_by_darts(),
            8
        );
        assert_eq!(FeynmanGraph::theta().count_automorphisms_by_darts(), 12);
        assert_eq!(FeynmanGraph::dumbbell().count_automorphisms_by_darts(), 8);
    }

    #[test]
    fn classic_symmetry_factors_by_formula() {
        assert_eq!(FeynmanGraph::figure_eight().aut(), 8);
        assert_eq!(FeynmanGraph::theta().aut(), 12);
        assert_eq!(FeynmanGraph::dumbbell().aut(), 8);
    }

    #[test]
    fn canonical_strings() {
        assert_eq!(FeynmanGraph::figure_eight().canonical(), "4|0-0,0-0");
        assert_eq!(FeynmanGraph::theta().canonical(), "3,3|0-1,0-1,0-1");
        let relabelled = FeynmanGraph::closed(2, vec![(1, 1), (1, 0), (0, 0)]).unwrap();
        assert_eq!(relabelled.canonical(), FeynmanGraph::dumbbell().canonical());
        let empty = FeynmanGraph::closed(0, vec![]).unwrap();
        assert_eq!(empty.canonical(), "empty");
        assert_eq!(empty.aut(), 1);
        assert_eq!(empty.count_automorphisms_by_darts(), 1);
    }

    #[test]
    fn disjoint_union_symmetry() {
        let two = FeynmanGraph::closed(2, vec![(0, 0), (0, 0), (1, 1), (1, 1)]).unwrap();
        assert_eq!(two.aut(), 2 * 8 * 8);
        assert_eq!(two.count_automorphisms_by_darts(), 128);
        assert!(!two.is_connected());
    }

    #[test]
    fn legs_and_boundary_pairs() {
        use VertexKind::*;
        // A cubic vertex with a loop and one leg, plus a separate boundary pair.
        let g = FeynmanGraph::from_edges(
            vec![Bulk, Boundary, Boundary, Boundary],
            vec![(0, 0), (0, 1), (2, 3)],
        )
        .unwrap();
        assert_eq!(g.canonical(), "3+1|0-0|dn1");
        assert_eq!(g.aut(), 2 * 2);
        assert_eq!(g.count_automorphisms_by_darts(), 4);
        assert!(g.has_boundary_pairs());
        assert_eq!(g.twice_order(), 2 * 3 - 2 - 3);
        // Two legs on a quartic vertex with a loop.
        let h =
            FeynmanGraph::from_edges(vec![Bulk, Boundary, Boundary], vec![(0, 1), (0, 0), (0, 2)])
                .unwrap();
        assert_eq!(h.aut(), 4);
        assert_eq!(h.count_automorphisms_by_darts(), 4);
    }

    #[test]
    fn boundary_vertices_must_be_univalent() {
        use VertexKind::*;
        assert!(FeynmanGraph::from_edges(vec![Bulk, Boundary], vec![(0, 1), (0, 1)]).is_err());
        assert!(FeynmanGraph::from_edges(vec![Bulk], vec![(0, 3)]).is_err());
    }

    #[test]
    fn orders_and_euler_characteristic() {
        assert_eq!(FeynmanGraph::theta().euler_characteristic(), -1);
        assert_eq!(FeynmanGraph::theta().twice_order(), 2);
        assert_eq!(FeynmanGraph::figure_eight().twice_order(), 2);
    }

    #[test]
    fn group_elements_are_automorphisms() {
        let g = FeynmanGraph::dumbbell();
        let group = g.automorphism_group(100).unwrap();
        assert_eq!(group.len(), 8);
        for a in &group {
            for e in 0..g.num_edges() {
                let (x, y) = g.edges()[e];
                let (u, v) = g.edges()[a.edges()[e]];
                let img = (a.vertices[x], a.vertices[y]);
                assert!(img == (u, v) || img == (v, u));
            }
        }
        assert!(g.automorphism_group(3).is_none());
    }
}
