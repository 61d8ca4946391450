//! Seeded random graphs, gluing splits and cobordisms for verification runs.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{BoundaryMarking, Cobordism, GluingSpec, Graph};

pub type CorpusRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A connected multigraph on the given ids: a random spanning tree plus `extra` random edges,
/// which may repeat existing edges but are never short loops.
pub fn connected_graph(rng: &mut CorpusRng, ids: Vec<String>, extra: usize) -> Graph {
    let n = ids.len();
    let mut edges = tree_edges(rng, n);
    if n > 1 {
        for _ in 0..extra {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            edges.push((a, b));
        }
    }
    Graph::from_indexed(ids, &edges).expect("generated graph is valid")
}

fn tree_edges(rng: &mut CorpusRng, n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|v| (rng.random_range(0..v), v)).collect()
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i:02}")).collect()
}

/// A random connected graph with `n` vertices named `v00, v01, …`.
pub fn random_graph(rng: &mut CorpusRng, n: usize, max_extra: usize) -> Graph {
    let extra = rng.random_range(0..=max_extra);
    connected_graph(rng, names("v", n), extra)
}

/// A random tree with `n` vertices.
pub fn random_tree(rng: &mut CorpusRng, n: usize) -> Graph {
    connected_graph(rng, names("v", n), 0)
}

/// A side of a split: `Y` plus `bulk` fresh vertices, connected, with the given edges inside `Y`.
fn side(
    rng: &mut CorpusRng,
    y_ids: &[String],
    y_edges: &[(usize, usize)],
    prefix: &str,
    bulk: usize,
) -> (Graph, BoundaryMarking) {
    let mut ids: Vec<String> = y_ids.to_vec();
    ids.extend(names(prefix, bulk));
    let n = ids.len();
    let mut edges: Vec<(usize, usize)> = y_edges.to_vec();
    // Attach every bulk vertex to an earlier vertex so that the side is connected.
    for v in y_ids.len()..n {
        edges.push((rng.random_range(0..v), v));
    }
    for _ in 0..rng.random_range(0..=bulk.max(1)) {
        if bulk == 0 {
            break;
        }
        let a = rng.random_range(y_ids.len()..n);
        let b = rng.random_range(0..n);
        if a != b {
            edges.push((a, b));
        }
    }
    let g = Graph::from_indexed(ids, &edges).expect("generated side is valid");
    let pairs: Vec<(&str, &str)> = y_edges
        .iter()
        .map(|&(a, b)| (y_ids[a].as_str(), y_ids[b].as_str()))
        .collect();
    let y = BoundaryMarking::new(&g, y_ids, pairs).expect("generated marking is valid");
    (g, y)
}

/// A random split `X = X' ∪_Y X''` with at most `max_vertices` vertices in `X` and
/// `1 ≤ |Y| ≤ max_boundary`.
pub fn random_split(rng: &mut CorpusRng, max_vertices: usize, max_boundary: usize) -> GluingSpec {
    let ny = rng.random_range(1..=max_boundary.min(max_vertices));
    let room = max_vertices - ny;
    let n1 = rng.random_range(0..=room);
    let n2 = rng.random_range(0..=room - n1);
    let y_ids = names("y", ny);
    let mut y_edges = Vec::new();
    for a in 0..ny {
        for b in a + 1..ny {
            if rng.random_bool(0.4) {
                y_edges.push((a, b));
            }
        }
    }
    let (left, left_boundary) = side(rng, &y_ids, &y_edges, "a", n1);
    // Right bulk names sometimes collide with left bulk names to exercise renaming.
    let prefix = if rng.random_bool(0.5) { "a" } else { "b" };
    let (right, right_boundary) = side(rng, &y_ids, &y_edges, prefix, n2);
    let identification = y_ids.iter().map(|s| (s.clone(), s.clone())).collect();
    GluingSpec {
        left,
        left_boundary,
        right,
        right_boundary,
        identification,
    }
}

/// `count` random splits.
pub fn split_corpus(
    seed: u64,
    count: usize,
    max_vertices: usize,
    max_boundary: usize,
) -> Vec<GluingSpec> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| random_split(&mut r, max_vertices, max_boundary))
        .collect()
}

/// `count` random connected graphs with `1 ≤ |V| ≤ max_vertices`.
pub fn graph_corpus(seed: u64, count: usize, max_vertices: usize) -> Vec<Graph> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let n = r.random_range(1..=max_vertices);
            random_graph(&mut r, n, n)
        })
        .collect()
}

/// A random connected cobordism with vertices `{prefix}in…`, `{prefix}out…` and bulk
/// `{prefix}b…`, where the boundary ids are given.
pub fn random_cobordism(
    rng: &mut CorpusRng,
    input: &[String],
    output: &[String],
    bulk_prefix: &str,
    bulk: usize,
) -> Cobordism {
    let mut ids: Vec<String> = input.to_vec();
    ids.extend(output.iter().cloned());
    let nb = ids.len();
    ids.extend(names(bulk_prefix, bulk));
    let n = ids.len();
    let mut edges = Vec::new();
    // Bulk forms a tree; every boundary vertex hangs off the bulk.
    for v in nb + 1..n {
        edges.push((rng.random_range(nb..v), v));
    }
    for v in 0..nb {
        edges.push((v, rng.random_range(nb..n)));
    }
    for _ in 0..rng.random_range(0..=bulk) {
        let a = rng.random_range(nb..n);
        let b = rng.random_range(0..n);
        if a != b {
            edges.push((a, b));
        }
    }
    let g = Graph::from_indexed(ids, &edges).expect("generated cobordism is valid");
    let i = BoundaryMarking::vertices_only(&g, input).expect("input ids present");
    let o = BoundaryMarking::vertices_only(&g, output).expect("output ids present");
    Cobordism::new(g, i, o).expect("boundaries are disjoint")
}
