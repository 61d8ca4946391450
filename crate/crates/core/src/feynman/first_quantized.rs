//! Feynman weights as sums over edge-to-path maps: each graph edge is sent to a path in the
//! spacetime graph between the images of its ends, weighted by `Π 1/(m² + val)` along it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::relative_data;
use crate::graph::{BoundaryMarking, Graph};
use crate::linalg::{Mat, Vector};
use crate::pathsum::{
    enumerate_paths, series_green, series_relative, Path, PathKind, PathMode, Weights,
};

use super::graph::FeynmanGraph;
use super::potential::Potential;
use super::weights::{closed_amplitude, relative_amplitude_with, vertex_product};

/// A first-quantized weight with a rigorous bound on its distance from the exact weight.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FirstQuantizedWeight {
    pub value: f64,
    /// Entrywise bound on the truncation error of every edge factor.
    pub edge_tolerance: f64,
    /// Bound on `|value − Φ|` implied by the edge bounds.
    pub bound: f64,
}

/// `|Π(a_e + δ_e) − Π a_e| ≤ Π(|a| + δ) − Π|a|` summed over all maps.
fn product_bound(vp: f64, maps: f64, entry: f64, delta: f64, edges: usize) -> f64 {
    vp.abs() * maps * ((entry + delta).powi(edges as i32) - entry.powi(edges as i32))
}

/// Weight of a closed graph from resummed path sums for every edge factor.
pub fn weight_first_quantized(
    gamma: &FeynmanGraph,
    g: &Graph,
    m2: f64,
    pot: &Potential,
    tolerance: f64,
) -> Result<FirstQuantizedWeight> {
    let series = series_green(g, m2, tolerance)?;
    if !series.report.converges {
        return Err(Error::InvalidArgument(
            "path series does not converge at this mass".into(),
        ));
    }
    let vp = vertex_product(gamma, pot);
    let value = vp * closed_amplitude(gamma, &series.value)?;
    let delta = series.report.tail_bound;
    let maps = (g.n() as f64).powi(gamma.num_vertices() as i32);
    Ok(FirstQuantizedWeight {
        value,
        edge_tolerance: delta,
        bound: product_bound(vp, maps, series.value.amax(), delta, gamma.num_edges()),
    })
}

/// Weight of a graph with boundary vertices from relative path sums: bulk–bulk edges go to
/// paths avoiding `Y`, bulk–boundary edges to paths ending at their first visit to `Y`.
#[allow(clippy::too_many_arguments)]
pub fn weight_first_quantized_relative(
    gamma: &FeynmanGraph,
    g: &Graph,
    y: &BoundaryMarking,
    m2: f64,
    pot: &Potential,
    phi: &Vector,
    tolerance: f64,
) -> Result<FirstQuantizedWeight> {
    let series = series_relative(g, y, m2, tolerance)?;
    let mut rd = relative_data(g, y, m2)?;
    rd.dn = series.dn.clone();
    let vp = vertex_product(gamma, pot);
    let value = vp * relative_amplitude_with(gamma, &rd, &series.propagator, &series.ext, phi)?;
    let delta = series.tail_bound;
    let entry = series
        .propagator
        .amax()
        .max(series.ext.amax())
        .max(series.dn.amax());
    let phi_max = phi.amax().max(1.0);
    let maps = (g.n() as f64).powi(gamma.num_vertices() as i32)
        * phi_max.powi(gamma.boundary_count() as i32);
    Ok(FirstQuantizedWeight {
        value,
        edge_tolerance: delta,
        bound: product_bound(vp, maps, entry, delta, gamma.num_edges()),
    })
}

/// Contribution of one edge-to-path map: `Π(−p_val) Π_e w(F(e))`. Checks that every path
/// runs between the images of its edge's ends.
pub fn edge_to_path_contribution(
    gamma: &FeynmanGraph,
    g: &Graph,
    m2: f64,
    pot: &Potential,
    vertex_map: &[usize],
    paths: &[Path],
) -> Result<f64> {
    if vertex_map.len() != gamma.num_vertices() || paths.len() != gamma.num_edges() {
        return Err(Error::InvalidArgument(
            "edge-to-path map has the wrong shape".into(),
        ));
    }
    for (e, (&(a, b), p)) in gamma.edges().iter().zip(paths).enumerate() {
        let (fa, fb) = (vertex_map[a], vertex_map[b]);
        let lifts = (p.start() == fa && p.end() == fb) || (p.start() == fb && p.end() == fa);
        if !lifts {
            return Err(Error::InvalidArgument(format!(
                "path of edge {e} does not join the images of its ends"
            )));
        }
        for (k, &edge) in p.edges.iter().enumerate() {
            let (u, v) = g.edges()[edge];
            let (s, t) = (p.vertices[k], p.vertices[k + 1]);
            if !((u, v) == (s, t) || (u, v) == (t, s)) {
                return Err(Error::InvalidArgument(format!(
                    "path of edge {e} is not a path in the graph"
                )));
            }
        }
    }
    let w = Weights::new(g, m2);
    Ok(vertex_product(gamma, pot) * paths.iter().map(|p| w.path(p)).product::<f64>())
}

/// Sum over edge-to-path maps with every path of length at most `max_len`, with per-edge path
/// sums obtained by explicit path enumeration.
pub fn weight_by_edge_to_path_maps(
    gamma: &FeynmanGraph,
    g: &Graph,
    m2: f64,
    pot: &Potential,
    max_len: usize,
) -> Result<f64> {
    let n = g.n();
    let y = BoundaryMarking::empty(g);
    let w = Weights::new(g, m2);
    let mut edge_sums = Mat::zeros(n, n);
    for u in 0..n {
        for v in 0..n {
            edge_sums[(u, v)] =
                enumerate_paths(g, &y, u, v, max_len, PathMode::All, PathKind::Plain)
                    .iter()
                    .map(|p| w.path(p))
                    .sum();
        }
    }
    Ok(vertex_product(gamma, pot) * closed_amplitude(gamma, &edge_sums)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feynman::graph::VertexKind;
    use crate::feynman::{enumerate_feynman_graphs, weight_closed, weight_relative, GraphMode};
    use crate::gaussian::gaussian_data;
    use crate::pathsum::series_green_partials;

    #[test]
    fn theta_on_circle3_matches_matrix_weight() {
        let g = Graph::circle(3);
        let pot = Potential::new([(3, 1.0)]).unwrap();
        let gd = gaussian_data(&g, 2.0).unwrap();
        let exact = weight_closed(&FeynmanGraph::theta(), &gd, &pot).unwrap();
        let fq = weight_first_quantized(&FeynmanGraph::theta(), &g, 2.0, &pot, 1e-13).unwrap();
        assert!((fq.value - exact).abs() < 1e-8);
        assert!((fq.value - exact).abs() <= fq.bound + 1e-15);
    }

    #[test]
    fn single_edge_reduces_to_the_propagator_series() {
        let g = Graph::line(3);
        let edge = FeynmanGraph::closed(2, vec![(0, 1)]).unwrap();
        // Univalent vertices have no coupling, so compare amplitudes.
        assert_eq!(vertex_product(&edge, &Potential::zero()), 0.0);
        let series = series_green(&g, 1.0, 1e-13).unwrap();
        let amp = closed_amplitude(&edge, &series.value).unwrap();
        assert!((amp - series.value.sum()).abs() < 1e-15);
        let gd = gaussian_data(&g, 1.0).unwrap();
        assert!((amp - gd.propagator.sum()).abs() < 1e-11);
    }

    #[test]
    fn explicit_edge_to_path_map_on_a_grid() {
        // Theta graph sent to an 8 × 7 grid: u ↦ (1,4), v ↦ (5,2) with three drawn paths.
        let g = Graph::grid(7, 8);
        let at = |x: usize, y: usize| y * 8 + x;
        let path = |pts: &[(usize, usize)]| -> Path {
            let vertices: Vec<usize> = pts.iter().map(|&(x, y)| at(x, y)).collect();
            let edges = vertices
                .windows(2)
                .map(|w| {
                    g.incident(w[0])
                        .iter()
                        .find(|&&(_, o)| o == w[1])
                        .expect("adjacent")
                        .0
                })
                .collect();
            Path { vertices, edges }
        };
        let paths = vec![
            path(&[
                (1, 4),
                (1, 5),
                (2, 5),
                (3, 5),
                (3, 6),
                (4, 6),
                (5, 6),
                (6, 6),
                (6, 5),
                (6, 4),
                (6, 3),
                (6, 2),
                (5, 2),
            ]),
            path(&[(1, 4), (2, 4), (3, 4), (4, 4), (4, 3), (4, 2), (5, 2)]),
            path(&[
                (1, 4),
                (1, 3),
                (1, 2),
                (1, 1),
                (2, 1),
                (2, 2),
                (3, 2),
                (3, 1),
                (4, 1),
                (4, 0),
                (5, 0),
                (5, 1),
                (5, 2),
            ]),
        ];
        let m2 = 0.5;
        let pot = Potential::new([(3, 2.0)]).unwrap();
        let got = edge_to_path_contribution(
            &FeynmanGraph::theta(),
            &g,
            m2,
            &pot,
            &[at(1, 4), at(5, 2)],
            &paths,
        )
        .unwrap();
        let weight = |p: &Path| -> f64 {
            p.vertices
                .iter()
                .map(|&v| 1.0 / (m2 + g.degree(v) as f64))
                .product()
        };
        let expect = 4.0 * paths.iter().map(weight).product::<f64>();
        assert!((got - expect).abs() < 1e-15 * expect);
        assert!(edge_to_path_contribution(
            &FeynmanGraph::theta(),
            &g,
            m2,
            &pot,
            &[at(1, 4), at(5, 3)],
            &paths
        )
        .is_err());
    }

    #[test]
    fn enumerated_maps_match_truncated_matrix_sums() {
        let g = Graph::circle(3);
        let pot = Potential::new([(3, 1.0), (4, 1.0)]).unwrap();
        let m2 = 2.0;
        let partials = series_green_partials(&g, m2, 5).unwrap();
        for gamma in [
            FeynmanGraph::theta(),
            FeynmanGraph::dumbbell(),
            FeynmanGraph::figure_eight(),
        ] {
            let by_paths = weight_by_edge_to_path_maps(&gamma, &g, m2, &pot, 5).unwrap();
            let by_matrix =
                vertex_product(&gamma, &pot) * closed_amplitude(&gamma, &partials[5]).unwrap();
            assert!((by_paths - by_matrix).abs() < 1e-14 * by_matrix.abs());
        }
    }

    #[test]
    fn explicit_tuples_of_paths_sum_to_the_product() {
        // The theta graph on the 2-vertex line with paths of length at most 3: summing every
        // triple of paths explicitly reproduces the factorized edge sums.
        let g = Graph::line(2);
        let y = BoundaryMarking::empty(&g);
        let pot = Potential::new([(3, 1.0)]).unwrap();
        let m2 = 1.5;
        let mut total = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                let ps = enumerate_paths(&g, &y, a, b, 3, PathMode::All, PathKind::Plain);
                for p in &ps {
                    for q in &ps {
                        for r in &ps {
                            total += edge_to_path_contribution(
                                &FeynmanGraph::theta(),
                                &g,
                                m2,
                                &pot,
                                &[a, b],
                                &[p.clone(), q.clone(), r.clone()],
                            )
                            .unwrap();
                        }
                    }
                }
            }
        }
        let factorized =
            weight_by_edge_to_path_maps(&FeynmanGraph::theta(), &g, m2, &pot, 3).unwrap();
        assert!((total - factorized).abs() < 1e-14);
    }

    #[test]
    fn corpus_first_quantized_matches_matrix_weights() {
        let pot = Potential::new([(3, 0.8), (4, 0.5)]).unwrap();
        let graphs = enumerate_feynman_graphs(&pot, 2, GraphMode::Closed).unwrap();
        for g in crate::corpus::graph_corpus(23, 6, 5) {
            for m2 in [0.3, 1.0, 3.0] {
                let gd = gaussian_data(&g, m2).unwrap();
                for gamma in graphs.iter().filter(|x| x.num_vertices() <= 3) {
                    let exact = weight_closed(gamma, &gd, &pot).unwrap();
                    let fq = weight_first_quantized(gamma, &g, m2, &pot, 1e-12).unwrap();
                    assert!((fq.value - exact).abs() < 1e-8 * exact.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn relative_first_quantized_matches_matrix_weights() {
        let pot = Potential::new([(3, 0.8), (4, 0.5)]).unwrap();
        let graphs = enumerate_feynman_graphs(&pot, 1, GraphMode::Relative).unwrap();
        let g = Graph::line(4);
        let y = BoundaryMarking::vertices_only(&g, [g.id(0), g.id(3)]).unwrap();
        let rd = relative_data(&g, &y, 1.0).unwrap();
        let phi = Vector::from_vec(vec![0.6, -0.4]);
        for gamma in &graphs {
            let exact = weight_relative(gamma, &rd, &pot, &phi).unwrap();
            let fq =
                weight_first_quantized_relative(gamma, &g, &y, 1.0, &pot, &phi, 1e-13).unwrap();
            assert!((fq.value - exact).abs() < 1e-10, "{}", gamma.canonical());
            assert!((fq.value - exact).abs() <= fq.bound + 1e-15);
        }
        let pair = FeynmanGraph::from_edges(vec![VertexKind::Boundary; 2], vec![(0, 1)]).unwrap();
        let exact = weight_relative(&pair, &rd, &pot, &phi).unwrap();
        let fq = weight_first_quantized_relative(&pair, &g, &y, 1.0, &pot, &phi, 1e-13).unwrap();
        assert!((fq.value - exact).abs() < 1e-10);
    }
}
