//! Finite multigraphs with string vertex ids, boundary markings, cobordisms and gluing.
//!
//! Vertices are stored in lexicographic id order, which fixes the row and column
//! order of every matrix built from a graph. Edges are unordered pairs; repeated
//! pairs are parallel edges and a pair `(v, v)` is a short loop. Short loops are
//! kept for bookkeeping but never enter the Laplacian or any path sum.

use std::collections::{HashMap, HashSet};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A finite multigraph with canonically ordered vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    incident: Vec<Vec<(usize, usize)>>,
    loops: Vec<usize>,
}

impl Graph {
    /// Builds a graph from vertex ids and edges given by endpoint ids.
    pub fn new<V, E, A, B>(vertices: V, edges: E) -> Result<Graph>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let mut ids: Vec<String> = vertices.into_iter().map(Into::into).collect();
        ids.sort();
        for w in ids.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidGraph(format!("duplicate vertex `{}`", w[0])));
            }
        }
        let index: HashMap<String, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let mut pairs = Vec::new();
        for (a, b) in edges {
            let ia = *index.get(a.as_ref()).ok_or_else(|| {
                Error::InvalidGraph(format!("edge endpoint `{}` is not a vertex", a.as_ref()))
            })?;
            let ib = *index.get(b.as_ref()).ok_or_else(|| {
                Error::InvalidGraph(format!("edge endpoint `{}` is not a vertex", b.as_ref()))
            })?;
            pairs.push((ia.min(ib), ia.max(ib)));
        }
        Ok(Self::assemble(ids, index, pairs))
    }

    fn assemble(
        vertices: Vec<String>,
        index: HashMap<String, usize>,
        mut edges: Vec<(usize, usize)>,
    ) -> Graph {
        edges.sort_unstable();
        let n = vertices.len();
        let mut incident = vec![Vec::new(); n];
        let mut loops = vec![0; n];
        for (e, &(a, b)) in edges.iter().enumerate() {
            if a == b {
                loops[a] += 1;
            } else {
                incident[a].push((e, b));
                incident[b].push((e, a));
            }
        }
        for list in &mut incident {
            list.sort_unstable_by_key(|&(e, w)| (w, e));
        }
        Graph {
            vertices,
            index,
            edges,
            incident,
            loops,
        }
    }

    /// Builds a graph from ids in arbitrary order and edges given by positions in that list.
    pub fn from_indexed(ids: Vec<String>, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut order: Vec<usize> = (0..ids.len()).collect();
        order.sort_by(|&a, &b| ids[a].cmp(&ids[b]));
        let mut new_pos = vec![0; ids.len()];
        for (p, &o) in order.iter().enumerate() {
            new_pos[o] = p;
        }
        let sorted: Vec<String> = order.iter().map(|&o| ids[o].clone()).collect();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidGraph(format!("duplicate vertex `{}`", w[0])));
            }
        }
        let mut pairs = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= ids.len() || b >= ids.len() {
                return Err(Error::InvalidGraph("edge endpoint out of range".into()));
            }
            let (x, y) = (new_pos[a], new_pos[b]);
            pairs.push((x.min(y), x.max(y)));
        }
        let index = sorted
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Self::assemble(sorted, index, pairs))
    }

    /// Line graph with `n` vertices `position_id(1, n)`, ..., `position_id(n, n)`.
    pub fn line(n: usize) -> Graph {
        let ids: Vec<String> = (1..=n).map(|i| position_id(i, n)).collect();
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_indexed(ids, &edges).expect("line graph is valid")
    }

    /// Circle graph with `n` vertices; `n = 2` gives a double edge and `n = 1` a short loop.
    pub fn circle(n: usize) -> Graph {
        let ids: Vec<String> = (1..=n).map(|i| position_id(i, n)).collect();
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_indexed(ids, &edges).expect("circle graph is valid")
    }

    /// Rectangular grid with `rows * cols` vertices named `r{row}c{col}`.
    pub fn grid(rows: usize, cols: usize) -> Graph {
        let w = digits(rows.max(cols));
        let id = |r: usize, c: usize| format!("r{r:0w$}c{c:0w$}");
        let mut ids = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                ids.push(id(r, c));
            }
        }
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((r * cols + c, r * cols + c + 1));
                }
                if r + 1 < rows {
                    edges.push((r * cols + c, (r + 1) * cols + c));
                }
            }
        }
        Self::from_indexed(ids, &edges).expect("grid graph is valid")
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertices
    }

    pub fn id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    /// Edges as sorted index pairs `(a, b)` with `a <= b`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Non-loop edges at `v` as `(edge index, other endpoint)`, sorted by endpoint.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.incident[v]
    }

    /// Valence excluding short loops; this is the Laplacian diagonal and the path-weight valence.
    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    /// Raw valence, where a short loop counts twice.
    pub fn valence(&self, v: usize) -> usize {
        self.incident[v].len() + 2 * self.loops[v]
    }

    pub fn loops(&self, v: usize) -> usize {
        self.loops[v]
    }

    /// Number of edges between `u` and `v` (short loops when `u == v`).
    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        if u == v {
            self.loops[u]
        } else {
            self.incident[u].iter().filter(|&&(_, w)| w == v).count()
        }
    }

    pub fn is_regular(&self) -> bool {
        self.n() == 0 || (0..self.n()).all(|v| self.degree(v) == self.degree(0))
    }
}

/// Zero-padded id of the `i`-th vertex (1-based) among `n`, so lexicographic order is numeric.
pub fn position_id(i: usize, n: usize) -> String {
    format!("{:0w$}", i, w = digits(n))
}

fn digits(n: usize) -> usize {
    n.max(1).to_string().len()
}

/// Adjacency matrix: edge counts off the diagonal, zeros on it.
pub fn adjacency(g: &Graph) -> DMatrix<i64> {
    let mut a = DMatrix::zeros(g.n(), g.n());
    for &(u, v) in g.edges() {
        if u != v {
            a[(u, v)] += 1;
            a[(v, u)] += 1;
        }
    }
    a
}

/// Graph Laplacian: loop-free valence on the diagonal, minus edge counts off it.
pub fn laplacian(g: &Graph) -> DMatrix<i64> {
    let mut l = -adjacency(g);
    for v in 0..g.n() {
        l[(v, v)] = g.degree(v) as i64;
    }
    l
}

/// Kinetic operator `Δ + m²`.
pub fn kinetic(g: &Graph, m2: f64) -> Result<DMatrix<f64>> {
    check_mass(m2)?;
    let mut k = laplacian(g).map(|x| x as f64);
    for v in 0..g.n() {
        k[(v, v)] += m2;
    }
    Ok(k)
}

pub(crate) fn check_mass(m2: f64) -> Result<()> {
    if m2 > 0.0 && m2.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveMass(m2))
    }
}

/// A subgraph `Y` of a graph `X`, stored by vertex and edge indices of `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMarking {
    vertices: Vec<usize>,
    edges: Vec<usize>,
    mask: Vec<bool>,
}

impl BoundaryMarking {
    /// Marks the given vertices and edges; edges are matched to distinct edges of `g` by endpoints.
    pub fn new<V, E, A, B>(g: &Graph, vertex_ids: V, edge_pairs: E) -> Result<BoundaryMarking>
    where
        V: IntoIterator,
        V::Item: AsRef<str>,
        E: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let mut mask = vec![false; g.n()];
        for id in vertex_ids {
            let v = g.index_of(id.as_ref())?;
            if mask[v] {
                return Err(Error::InvalidMarking(format!(
                    "vertex `{}` listed twice",
                    id.as_ref()
                )));
            }
            mask[v] = true;
        }
        let mut used = vec![false; g.num_edges()];
        let mut edges = Vec::new();
        for (a, b) in edge_pairs {
            let (ia, ib) = (g.index_of(a.as_ref())?, g.index_of(b.as_ref())?);
            if !mask[ia] || !mask[ib] {
                return Err(Error::InvalidMarking(format!(
                    "edge ({}, {}) has an endpoint outside the marked vertices",
                    a.as_ref(),
                    b.as_ref()
                )));
            }
            let key = (ia.min(ib), ia.max(ib));
            let e = (0..g.num_edges())
                .find(|&e| !used[e] && g.edges()[e] == key)
                .ok_or_else(|| {
                    Error::InvalidMarking(format!(
                        "edge ({}, {}) is not an edge of the graph",
                        a.as_ref(),
                        b.as_ref()
                    ))
                })?;
            used[e] = true;
            edges.push(e);
        }
        edges.sort_unstable();
        Ok(Self::from_parts(mask, edges))
    }

    /// The subgraph induced by the given vertices (all edges with both endpoints marked).
    pub fn induced<V>(g: &Graph, vertex_ids: V) -> Result<BoundaryMarking>
    where
        V: IntoIterator,
        V::Item: AsRef<str>,
    {
        let mut mask = vec![false; g.n()];
        for id in vertex_ids {
            mask[g.index_of(id.as_ref())?] = true;
        }
        Ok(Self::induced_by_mask(g, mask))
    }

    pub(crate) fn induced_by_mask(g: &Graph, mask: Vec<bool>) -> BoundaryMarking {
        let edges = (0..g.num_edges())
            .filter(|&e| mask[g.edges()[e].0] && mask[g.edges()[e].1])
            .collect();
        Self::from_parts(mask, edges)
    }

    /// Marks only vertices; no edges belong to the marking.
    pub fn vertices_only<V>(g: &Graph, vertex_ids: V) -> Result<BoundaryMarking>
    where
        V: IntoIterator,
        V::Item: AsRef<str>,
    {
        Self::new(g, vertex_ids, Vec::<(&str, &str)>::new())
    }

    pub fn empty(g: &Graph) -> BoundaryMarking {
        Self::from_parts(vec![false; g.n()], Vec::new())
    }

    pub(crate) fn from_parts(mask: Vec<bool>, edges: Vec<usize>) -> BoundaryMarking {
        let vertices = (0..mask.len()).filter(|&v| mask[v]).collect();
        BoundaryMarking {
            vertices,
            edges,
            mask,
        }
    }

    /// Marked vertex indices in canonical order.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Marked edge indices.
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn contains(&self, v: usize) -> bool {
        self.mask[v]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    /// The marked subgraph `Y` as a standalone graph.
    pub fn subgraph(&self, g: &Graph) -> Graph {
        let ids: Vec<String> = self.vertices.iter().map(|&v| g.id(v).to_string()).collect();
        let edges: Vec<(&str, &str)> = self
            .edges
            .iter()
            .map(|&e| (g.id(g.edges()[e].0), g.id(g.edges()[e].1)))
            .collect();
        Graph::new(ids, edges).expect("marking is a subgraph")
    }

    /// Vertex ids of the marking.
    pub fn ids<'a>(&self, g: &'a Graph) -> Vec<&'a str> {
        self.vertices.iter().map(|&v| g.id(v)).collect()
    }

    /// Edge endpoint ids of the marking.
    pub fn edge_ids<'a>(&self, g: &'a Graph) -> Vec<(&'a str, &'a str)> {
        self.edges
            .iter()
            .map(|&e| (g.id(g.edges()[e].0), g.id(g.edges()[e].1)))
            .collect()
    }
}

/// Splits vertex indices into (bulk, boundary), each in canonical order.
pub fn block_indices(g: &Graph, b: &BoundaryMarking) -> (Vec<usize>, Vec<usize>) {
    let bulk = (0..g.n()).filter(|&v| !b.contains(v)).collect();
    (bulk, b.vertices().to_vec())
}

/// A graph with disjoint incoming and outgoing boundary subgraphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cobordism {
    pub graph: Graph,
    pub input: BoundaryMarking,
    pub output: BoundaryMarking,
}

impl Cobordism {
    pub fn new(graph: Graph, input: BoundaryMarking, output: BoundaryMarking) -> Result<Cobordism> {
        if input.vertices().iter().any(|&v| output.contains(v)) {
            return Err(Error::OverlappingMarkings);
        }
        Ok(Cobordism {
            graph,
            input,
            output,
        })
    }

    /// Union of the incoming and outgoing markings.
    pub fn boundary(&self) -> BoundaryMarking {
        let mask: Vec<bool> = (0..self.graph.n())
            .map(|v| self.input.contains(v) || self.output.contains(v))
            .collect();
        let mut edges: Vec<usize> = self
            .input
            .edges()
            .iter()
            .chain(self.output.edges())
            .copied()
            .collect();
        edges.sort_unstable();
        BoundaryMarking::from_parts(mask, edges)
    }
}

/// Two marked graphs and a vertex identification between their boundary subgraphs.
#[derive(Debug, Clone)]
pub struct GluingSpec {
    pub left: Graph,
    pub left_boundary: BoundaryMarking,
    pub right: Graph,
    pub right_boundary: BoundaryMarking,
    /// Pairs `(left id, right id)` identifying boundary vertices.
    pub identification: Vec<(String, String)>,
}

impl GluingSpec {
    /// For each left boundary vertex (canonical order), the matching right vertex index.
    pub fn right_partners(&self) -> Result<Vec<usize>> {
        resolve_isomorphism(
            &self.left,
            &self.left_boundary,
            &self.right,
            &self.right_boundary,
            &self.identification,
        )
    }
}

/// Result of gluing: the pushout graph and maps from the pieces into it.
#[derive(Debug, Clone)]
pub struct Glued {
    pub graph: Graph,
    /// Left vertex index to glued vertex index.
    pub left_map: Vec<usize>,
    /// Right vertex index to glued vertex index.
    pub right_map: Vec<usize>,
    /// The common boundary inside the glued graph; its order matches the left boundary order.
    pub boundary: BoundaryMarking,
    /// For each left boundary position, the right vertex index glued to it.
    pub right_partners: Vec<usize>,
}

/// Checks that `ident` is an isomorphism of marked subgraphs and returns, for each vertex of
/// `ya` in canonical order, its image in `gb`.
fn resolve_isomorphism(
    ga: &Graph,
    ya: &BoundaryMarking,
    gb: &Graph,
    yb: &BoundaryMarking,
    ident: &[(String, String)],
) -> Result<Vec<usize>> {
    if ident.len() != ya.len() || ident.len() != yb.len() {
        return Err(Error::IdentificationMismatch(format!(
            "identification has {} pairs for boundaries of sizes {} and {}",
            ident.len(),
            ya.len(),
            yb.len()
        )));
    }
    let mut image = vec![usize::MAX; ga.n()];
    let mut hit = vec![false; gb.n()];
    for (a, b) in ident {
        let ia = ga.index_of(a)?;
        let ib = gb.index_of(b)?;
        if !ya.contains(ia) || !yb.contains(ib) {
            return Err(Error::IdentificationMismatch(format!(
                "pair ({a}, {b}) is not between boundary vertices"
            )));
        }
        if image[ia] != usize::MAX || hit[ib] {
            return Err(Error::IdentificationMismatch(format!(
                "pair ({a}, {b}) repeats a vertex"
            )));
        }
        image[ia] = ib;
        hit[ib] = true;
    }
    let count = |g: &Graph, y: &BoundaryMarking| {
        let mut m: HashMap<(usize, usize), usize> = HashMap::new();
        for &e in y.edges() {
            *m.entry(g.edges()[e]).or_default() += 1;
        }
        m
    };
    let ca = count(ga, ya);
    let cb = count(gb, yb);
    let mapped: HashMap<(usize, usize), usize> = ca
        .iter()
        .map(|(&(u, v), &c)| {
            let (x, y) = (image[u], image[v]);
            ((x.min(y), x.max(y)), c)
        })
        .collect();
    if mapped != cb {
        return Err(Error::IdentificationMismatch(
            "boundary edge multiplicities differ under the identification".into(),
        ));
    }
    Ok(ya.vertices().iter().map(|&v| image[v]).collect())
}

/// Returns `base` or `base` with primes appended so that it is not in `taken`.
pub(crate) fn fresh_name(base: &str, taken: &HashSet<String>) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Pushout `X' ∪_Y X''`. Left ids are kept; right bulk ids that collide get primes appended.
pub fn glue(spec: &GluingSpec) -> Result<Glued> {
    let partners = spec.right_partners()?;
    let (left, right) = (&spec.left, &spec.right);
    let mut ids: Vec<String> = left.vertex_ids().to_vec();
    let mut taken: HashSet<String> = ids.iter().cloned().collect();
    let mut right_pos = vec![usize::MAX; right.n()];
    for (k, &rv) in partners.iter().enumerate() {
        right_pos[rv] = spec.left_boundary.vertices()[k];
    }
    for v in 0..right.n() {
        if right_pos[v] == usize::MAX {
            let name = fresh_name(right.id(v), &taken);
            taken.insert(name.clone());
            right_pos[v] = ids.len();
            ids.push(name);
        }
    }
    let mut edges: Vec<(usize, usize)> = left.edges().to_vec();
    let right_y_edges: HashSet<usize> = spec.right_boundary.edges().iter().copied().collect();
    for (e, &(a, b)) in right.edges().iter().enumerate() {
        if !right_y_edges.contains(&e) {
            edges.push((right_pos[a], right_pos[b]));
        }
    }
    let graph = Graph::from_indexed(ids.clone(), &edges)?;
    let to_glued = |pos: usize| graph.index_of(&ids[pos]).expect("id present");
    let left_map: Vec<usize> = (0..left.n()).map(to_glued).collect();
    let right_map: Vec<usize> = right_pos.iter().map(|&p| to_glued(p)).collect();
    let y_ids: Vec<&str> = spec.left_boundary.ids(left);
    let y_edges = spec.left_boundary.edge_ids(left);
    let boundary = BoundaryMarking::new(&graph, y_ids, y_edges)?;
    Ok(Glued {
        graph,
        left_map,
        right_map,
        boundary,
        right_partners: partners,
    })
}

/// Result of identifying two disjoint boundary subgraphs of one graph.
#[derive(Debug, Clone)]
pub struct SelfGlued {
    pub graph: Graph,
    /// The identified boundary `Ỹ`, carrying the edges of the first marking.
    pub boundary: BoundaryMarking,
    /// Vertex index of `X` to vertex index of `X̃`.
    pub map: Vec<usize>,
    /// For each vertex of the first marking (canonical order), its partner in the second.
    pub partners: Vec<usize>,
}

/// Glues `y1` to `y2` inside `g` along the isomorphism `f` given as `(y1 id, y2 id)` pairs.
pub fn self_glue(
    g: &Graph,
    y1: &BoundaryMarking,
    y2: &BoundaryMarking,
    f: &[(String, String)],
) -> Result<SelfGlued> {
    if y1.vertices().iter().any(|&v| y2.contains(v)) {
        return Err(Error::OverlappingMarkings);
    }
    let partners = resolve_isomorphism(g, y1, g, y2, f)?;
    let mut keep = vec![usize::MAX; g.n()];
    let mut ids = Vec::new();
    for v in 0..g.n() {
        if !y2.contains(v) {
            keep[v] = ids.len();
            ids.push(g.id(v).to_string());
        }
    }
    for (k, &w) in partners.iter().enumerate() {
        keep[w] = keep[y1.vertices()[k]];
    }
    let y2_edges: HashSet<usize> = y2.edges().iter().copied().collect();
    let edges: Vec<(usize, usize)> = (0..g.num_edges())
        .filter(|e| !y2_edges.contains(e))
        .map(|e| (keep[g.edges()[e].0], keep[g.edges()[e].1]))
        .collect();
    let graph = Graph::from_indexed(ids.clone(), &edges)?;
    let map: Vec<usize> = (0..g.n())
        .map(|v| graph.index_of(&ids[keep[v]]).expect("id present"))
        .collect();
    let boundary = BoundaryMarking::new(&graph, y1.ids(g), y1.edge_ids(g))?;
    Ok(SelfGlued {
        graph,
        boundary,
        map,
        partners,
    })
}

/// Composes cobordisms by gluing the outgoing boundary of `left` to the incoming one of `right`.
pub fn compose_cobordisms(
    left: &Cobordism,
    right: &Cobordism,
    identification: &[(String, String)],
) -> Result<(Cobordism, Glued)> {
    let spec = GluingSpec {
        left: left.graph.clone(),
        left_boundary: left.output.clone(),
        right: right.graph.clone(),
        right_boundary: right.input.clone(),
        identification: identification.to_vec(),
    };
    let glued = glue(&spec)?;
    let g = &glued.graph;
    let map_ids = |m: &BoundaryMarking, vmap: &[usize]| -> Vec<String> {
        m.vertices()
            .iter()
            .map(|&v| g.id(vmap[v]).to_string())
            .collect()
    };
    let map_edges = |m: &BoundaryMarking, src: &Graph, vmap: &[usize]| -> Vec<(String, String)> {
        m.edges()
            .iter()
            .map(|&e| {
                let (a, b) = src.edges()[e];
                (g.id(vmap[a]).to_string(), g.id(vmap[b]).to_string())
            })
            .collect()
    };
    let input = BoundaryMarking::new(
        g,
        map_ids(&left.input, &glued.left_map),
        map_edges(&left.input, &left.graph, &glued.left_map),
    )?;
    let output = BoundaryMarking::new(
        g,
        map_ids(&right.output, &glued.right_map),
        map_edges(&right.output, &right.graph, &glued.right_map),
    )?;
    let cob = Cobordism::new(g.clone(), input, output)?;
    Ok((cob, glued))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle3_adjacency() {
        let a = adjacency(&Graph::circle(3));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a[(i, j)], if i == j { 0 } else { 1 });
            }
        }
    }

    #[test]
    fn single_vertex_adjacency_is_zero() {
        let g = Graph::new(["a"], Vec::<(&str, &str)>::new()).unwrap();
        assert_eq!(adjacency(&g), DMatrix::zeros(1, 1));
    }

    #[test]
    fn parallel_edges_counted() {
        let g = Graph::new(["a", "b"], [("a", "b"), ("b", "a")]).unwrap();
        assert_eq!(adjacency(&g)[(0, 1)], 2);
        assert_eq!(laplacian(&g)[(0, 0)], 2);
    }

    #[test]
    fn line3_laplacian() {
        let l = laplacian(&Graph::line(3));
        let expect = DMatrix::from_row_slice(3, 3, &[1, -1, 0, -1, 2, -1, 0, -1, 1]);
        assert_eq!(l, expect);
    }

    #[test]
    fn short_loop_is_inert() {
        let g = Graph::new(["a"], [("a", "a")]).unwrap();
        assert_eq!(laplacian(&g), DMatrix::zeros(1, 1));
        assert_eq!(g.valence(0), 2);
        assert_eq!(g.degree(0), 0);
    }

    #[test]
    fn kinetic_rejects_nonpositive_mass() {
        assert_eq!(
            kinetic(&Graph::line(2), 0.0),
            Err(Error::NonPositiveMass(0.0))
        );
        assert!(kinetic(&Graph::line(2), -1.0).is_err());
    }

    #[test]
    fn edgeless_kinetic_is_scalar() {
        let g = Graph::new(["a", "b", "c"], Vec::<(&str, &str)>::new()).unwrap();
        assert_eq!(kinetic(&g, 0.7).unwrap(), DMatrix::identity(3, 3) * 0.7);
    }

    #[test]
    fn block_indices_cases() {
        let g = Graph::line(3);
        let y = BoundaryMarking::vertices_only(&g, ["3"]).unwrap();
        assert_eq!(block_indices(&g, &y), (vec![0, 1], vec![2]));
        assert_eq!(
            block_indices(&g, &BoundaryMarking::empty(&g)),
            (vec![0, 1, 2], vec![])
        );
        let all = BoundaryMarking::induced(&g, ["1", "2", "3"]).unwrap();
        assert_eq!(block_indices(&g, &all), (vec![], vec![0, 1, 2]));
    }

    #[test]
    fn vertex_ids_sorted_and_unique() {
        let g = Graph::new(["b", "a"], [("b", "a")]).unwrap();
        assert_eq!(g.vertex_ids(), &["a".to_string(), "b".to_string()]);
        assert!(Graph::new(["a", "a"], Vec::<(&str, &str)>::new()).is_err());
        assert!(Graph::new(["a"], [("a", "z")]).is_err());
    }

    #[test]
    fn marking_rejects_dangling_edge() {
        let g = Graph::line(3);
        assert!(BoundaryMarking::new(&g, ["1"], [("1", "2")]).is_err());
    }

    fn two_lines_over_point() -> GluingSpec {
        let left = Graph::new(["a", "m"], [("a", "m")]).unwrap();
        let right = Graph::new(["m", "z"], [("m", "z")]).unwrap();
        GluingSpec {
            left_boundary: BoundaryMarking::vertices_only(&left, ["m"]).unwrap(),
            right_boundary: BoundaryMarking::vertices_only(&right, ["m"]).unwrap(),
            left,
            right,
            identification: vec![("m".into(), "m".into())],
        }
    }

    #[test]
    fn glue_two_lines_gives_line3() {
        let glued = glue(&two_lines_over_point()).unwrap();
        assert_eq!(glued.graph.n(), 3);
        assert_eq!(laplacian(&glued.graph), laplacian(&Graph::line(3)));
    }

    #[test]
    fn glue_circle_from_intervals() {
        let (n1, n2) = (4usize, 5usize);
        let left = Graph::line(n1);
        let ids: Vec<String> = (1..=n2).map(|i| format!("r{i}")).collect();
        let edges: Vec<(usize, usize)> = (1..n2).map(|i| (i - 1, i)).collect();
        let right = Graph::from_indexed(ids, &edges).unwrap();
        let spec = GluingSpec {
            left_boundary: BoundaryMarking::vertices_only(&left, ["1", "4"]).unwrap(),
            right_boundary: BoundaryMarking::vertices_only(&right, ["r1", "r5"]).unwrap(),
            left,
            right,
            identification: vec![("1".into(), "r1".into()), ("4".into(), "r5".into())],
        };
        let glued = glue(&spec).unwrap();
        assert_eq!(glued.graph.n(), n1 + n2 - 2);
        assert_eq!(glued.graph.num_edges(), n1 + n2 - 2);
        assert!((0..glued.graph.n()).all(|v| glued.graph.degree(v) == 2));
    }

    #[test]
    fn glue_onto_boundary_itself() {
        let y = Graph::new(["p", "q"], [("p", "q")]).unwrap();
        let yb = BoundaryMarking::induced(&y, ["p", "q"]).unwrap();
        let spec = GluingSpec {
            left: y.clone(),
            left_boundary: yb.clone(),
            right: y.clone(),
            right_boundary: yb,
            identification: vec![("p".into(), "p".into()), ("q".into(), "q".into())],
        };
        let glued = glue(&spec).unwrap();
        assert_eq!(glued.graph, y);
    }

    #[test]
    fn glue_rejects_bad_identification() {
        let mut spec = two_lines_over_point();
        spec.identification = vec![("a".into(), "m".into())];
        assert!(matches!(glue(&spec), Err(Error::IdentificationMismatch(_))));
    }

    #[test]
    fn self_glue_line3_is_double_edge() {
        let g = Graph::line(3);
        let y1 = BoundaryMarking::vertices_only(&g, ["1"]).unwrap();
        let y2 = BoundaryMarking::vertices_only(&g, ["3"]).unwrap();
        let sg = self_glue(&g, &y1, &y2, &[("1".into(), "3".into())]).unwrap();
        assert_eq!(sg.graph.n(), 2);
        assert_eq!(sg.graph.multiplicity(0, 1), 2);
    }

    #[test]
    fn self_glue_line_is_circle() {
        for n in 3..9 {
            let g = Graph::line(n);
            let last = position_id(n, n);
            let y1 = BoundaryMarking::vertices_only(&g, [position_id(1, n)]).unwrap();
            let y2 = BoundaryMarking::vertices_only(&g, [last.clone()]).unwrap();
            let sg = self_glue(&g, &y1, &y2, &[(position_id(1, n), last)]).unwrap();
            assert_eq!(sg.graph.n(), n - 1);
            assert!((0..n - 1).all(|v| sg.graph.degree(v) == 2));
        }
    }

    #[test]
    fn self_glue_rejects_overlap() {
        let g = Graph::line(3);
        let y = BoundaryMarking::vertices_only(&g, ["1"]).unwrap();
        assert_eq!(
            self_glue(&g, &y, &y, &[("1".into(), "1".into())]).unwrap_err(),
            Error::OverlappingMarkings
        );
    }
}
