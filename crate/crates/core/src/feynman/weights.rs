//! Feynman weights as sums over maps from graph vertices to spacetime vertices.

use crate::error::{Error, Result};
use crate::gaussian::{GaussianData, RelativeGaussianData};
use crate::linalg::Vector;

#[cfg(test)]
use super::contract::contract_brute_force;
use super::contract::{contract, Factor};
use super::graph::{FeynmanGraph, VertexKind};
use super::potential::Potential;

/// Allowed images of every graph vertex together with edge and vertex factors, indexed by
/// spacetime vertex.
pub(crate) struct MapSum<'a> {
    pub domains: Vec<Vec<usize>>,
    pub edge: &'a dyn Fn(usize, usize, usize) -> f64,
    pub vertex: &'a dyn Fn(usize, usize) -> f64,
}

impl MapSum<'_> {
    fn factors(&self, gamma: &FeynmanGraph) -> (Vec<usize>, Vec<Factor>) {
        let dims: Vec<usize> = self.domains.iter().map(Vec::len).collect();
        let mut factors = Vec::new();
        for (e, &(a, b)) in gamma.edges().iter().enumerate() {
            let (da, db) = (&self.domains[a], &self.domains[b]);
            if a == b {
                factors.push(Factor::unary(
                    a,
                    da.iter().map(|&x| (self.edge)(e, x, x)).collect(),
                ));
            } else {
                let mut t = Vec::with_capacity(da.len() * db.len());
                for &x in da {
                    for &y in db {
                        t.push((self.edge)(e, x, y));
                    }
                }
                factors.push(Factor::binary(a, b, t));
            }
        }
        for (v, d) in self.domains.iter().enumerate() {
            let t: Vec<f64> = d.iter().map(|&x| (self.vertex)(v, x)).collect();
            if t.iter().any(|&w| w != 1.0) {
                factors.push(Factor::unary(v, t));
            }
        }
        (dims, factors)
    }

    pub fn evaluate(&self, gamma: &FeynmanGraph) -> f64 {
        let (dims, factors) = self.factors(gamma);
        contract(&dims, factors)
    }

    #[cfg(test)]
    pub fn evaluate_brute_force(&self, gamma: &FeynmanGraph) -> f64 {
        let (dims, factors) = self.factors(gamma);
        contract_brute_force(&dims, &factors)
    }
}

/// `Π_{bulk v} (−p_{val(v)})`.
pub fn vertex_product(gamma: &FeynmanGraph, pot: &Potential) -> f64 {
    gamma
        .bulk_vertices()
        .iter()
        .map(|&v| pot.vertex_factor(gamma.valence(v)))
        .product()
}

fn require_closed(gamma: &FeynmanGraph) -> Result<()> {
    if gamma.boundary_count() > 0 {
        return Err(Error::InvalidArgument(format!(
            "graph {} has boundary vertices",
            gamma.canonical()
        )));
    }
    Ok(())
}

/// `Σ_f Π_e G(f(u), f(v))` over all maps of graph vertices to spacetime vertices, without the
/// vertex factors.
pub fn closed_amplitude(gamma: &FeynmanGraph, propagator: &crate::linalg::Mat) -> Result<f64> {
    require_closed(gamma)?;
    let n = propagator.nrows();
    let sum = MapSum {
        domains: vec![(0..n).collect(); gamma.num_vertices()],
        edge: &|_, x, y| propagator[(x, y)],
        vertex: &|_, _| 1.0,
    };
    Ok(sum.evaluate(gamma))
}

/// Weight of a closed Feynman graph: `Σ_f Π(−p_val) Π_e G_X(f(u), f(v))`.
pub fn weight_closed(gamma: &FeynmanGraph, gd: &GaussianData, pot: &Potential) -> Result<f64> {
    Ok(vertex_product(gamma, pot) * closed_amplitude(gamma, &gd.propagator)?)
}

pub(crate) struct RelativeLookup {
    pub bulk_pos: Vec<usize>,
    pub boundary_pos: Vec<usize>,
}

impl RelativeLookup {
    pub fn new(rd: &RelativeGaussianData) -> RelativeLookup {
        let n = rd.bulk.len() + rd.boundary.len();
        let mut bulk_pos = vec![usize::MAX; n];
        let mut boundary_pos = vec![usize::MAX; n];
        for (i, &v) in rd.bulk.iter().enumerate() {
            bulk_pos[v] = i;
        }
        for (i, &v) in rd.boundary.iter().enumerate() {
            boundary_pos[v] = i;
        }
        RelativeLookup {
            bulk_pos,
            boundary_pos,
        }
    }
}

/// Relative amplitude with explicit bulk propagator, extension operator (bulk by boundary) and
/// boundary-pair factor, without the bulk vertex factors.
pub(crate) fn relative_amplitude_with(
    gamma: &FeynmanGraph,
    rd: &RelativeGaussianData,
    propagator: &crate::linalg::Mat,
    ext: &crate::linalg::Mat,
    phi: &Vector,
) -> Result<f64> {
    if phi.len() != rd.boundary.len() {
        return Err(Error::DimensionMismatch {
            expected: rd.boundary.len(),
            got: phi.len(),
        });
    }
    let look = RelativeLookup::new(rd);
    let domains = gamma
        .kinds()
        .iter()
        .map(|k| match k {
            VertexKind::Bulk => rd.bulk.clone(),
            VertexKind::Boundary => rd.boundary.clone(),
        })
        .collect();
    let kinds = gamma.kinds();
    let edges = gamma.edges();
    let edge = |e: usize, x: usize, y: usize| -> f64 {
        let (a, b) = edges[e];
        match (kinds[a], kinds[b]) {
            (VertexKind::Bulk, VertexKind::Bulk) => {
                propagator[(look.bulk_pos[x], look.bulk_pos[y])]
            }
            (VertexKind::Bulk, VertexKind::Boundary) => {
                ext[(look.bulk_pos[x], look.boundary_pos[y])]
            }
            (VertexKind::Boundary, VertexKind::Bulk) => {
                ext[(look.bulk_pos[y], look.boundary_pos[x])]
            }
            (VertexKind::Boundary, VertexKind::Boundary) => {
                -rd.dn[(look.boundary_pos[x], look.boundary_pos[y])]
            }
        }
    };
    let vertex = |v: usize, x: usize| -> f64 {
        match kinds[v] {
            VertexKind::Bulk => 1.0,
            VertexKind::Boundary => phi[look.boundary_pos[x]],
        }
    };
    let sum = MapSum {
        domains,
        edge: &edge,
        vertex: &vertex,
    };
    Ok(sum.evaluate(gamma))
}

/// Weight of a graph with boundary vertices at boundary field `phi`: bulk vertices range over
/// `X∖Y` with factors `−p_val`, boundary vertices over `Y` with factors `φ`, bulk–bulk edges
/// carry the Dirichlet propagator and bulk–boundary edges the extension operator.
/// Boundary–boundary edges, when present, carry `−DN`.
pub fn weight_relative(
    gamma: &FeynmanGraph,
    rd: &RelativeGaussianData,
    pot: &Potential,
    phi: &Vector,
) -> Result<f64> {
    let amp = relative_amplitude_with(gamma, rd, &rd.propagator, &rd.ext, phi)?;
    Ok(vertex_product(gamma, pot) * amp)
}
