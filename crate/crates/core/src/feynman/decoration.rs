//! Cutting a Feynman weight on a glued graph into contributions of decorated graphs.
//!
//! Every vertex is assigned to the bulk of the left piece, to the gluing interface `Y` or to
//! the bulk of the right piece; every edge is either uncut, carrying the relative propagator of
//! the piece containing both ends, or cut, carrying `Ē DN_tot⁻¹ Ēᵀ`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{GaussianData, RelativeGaussianData};
use crate::gluing::glue_data;
use crate::graph::GluingSpec;

use super::graph::FeynmanGraph;
use super::potential::Potential;
use super::weights::{vertex_product, weight_closed, MapSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Left,
    Interface,
    Right,
}

/// Vertex sides and edge cut flags of one decoration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Decoration {
    pub vertices: Vec<Side>,
    pub cut: Vec<bool>,
}

/// An orbit of decorations under the automorphisms of the graph.
#[derive(Debug, Clone, Serialize)]
pub struct DecorationOrbit {
    pub representative: Decoration,
    pub size: usize,
    /// Automorphisms fixing the representative, i.e. `|Aut(Γ^dec)|`.
    pub stabilizer: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecorationReport {
    /// `Φ_{Γ,X}` from the propagator of the glued graph.
    pub whole: f64,
    /// `Σ_dec Φ_{Γ^dec}`.
    pub split: f64,
    pub residual: f64,
    pub decorations: Vec<(Decoration, f64)>,
    /// Orbits under `Aut(Γ)`, present when the group was small enough to list.
    pub orbits: Option<Vec<DecorationOrbit>>,
    /// `|orbit| · |stabilizer| = |Aut(Γ)|` for every orbit and weights constant on orbits.
    pub orbit_stabilizer_holds: Option<bool>,
}

const GROUP_LIMIT: usize = 100_000;

fn decorations(gamma: &FeynmanGraph) -> Vec<Decoration> {
    let nv = gamma.num_vertices();
    let mut out = Vec::new();
    let sides = [Side::Left, Side::Interface, Side::Right];
    for code in 0..3usize.pow(nv as u32) {
        let vertices: Vec<Side> = (0..nv)
            .map(|v| sides[code / 3usize.pow(v as u32) % 3])
            .collect();
        let optional: Vec<usize> = gamma
            .edges()
            .iter()
            .enumerate()
            .filter(|&(_, &(a, b))| vertices[a] == vertices[b] && vertices[a] != Side::Interface)
            .map(|(e, _)| e)
            .collect();
        for mask in 0..1usize << optional.len() {
            let mut cut = vec![true; gamma.num_edges()];
            for (k, &e) in optional.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    cut[e] = false;
                }
            }
            out.push(Decoration {
                vertices: vertices.clone(),
                cut,
            });
        }
    }
    out
}

/// Splits `Φ_{Γ,X}` for `X = X′ ∪_Y X″` into decorated contributions and checks that they add
/// up to the weight computed from `whole`, the Gaussian data of the glued graph.
pub fn decoration_split(
    gamma: &FeynmanGraph,
    spec: &GluingSpec,
    whole: &GaussianData,
    left: &RelativeGaussianData,
    right: &RelativeGaussianData,
    pot: &Potential,
) -> Result<DecorationReport> {
    let glued = glue_data(spec, left, right)?;
    let n = glued.glued.graph.n();
    if whole.propagator.nrows() != n {
        return Err(Error::BoundaryMismatch(format!(
            "glued graph has {n} vertices, whole data have {}",
            whole.propagator.nrows()
        )));
    }
    let whole_weight = weight_closed(gamma, whole, pot)?;
    let domain = |s: Side| -> Vec<usize> {
        match s {
            Side::Left => left.bulk.iter().map(|&v| glued.glued.left_map[v]).collect(),
            Side::Interface => glued.glued.boundary.vertices().to_vec(),
            Side::Right => right
                .bulk
                .iter()
                .map(|&v| glued.glued.right_map[v])
                .collect(),
        }
    };
    let vp = vertex_product(gamma, pot);
    let mut split = 0.0;
    let mut terms = Vec::new();
    for dec in decorations(gamma) {
        let cut = &dec.cut;
        let edge = |e: usize, x: usize, y: usize| -> f64 {
            if cut[e] {
                glued.cut[(x, y)]
            } else {
                glued.uncut[(x, y)]
            }
        };
        let sum = MapSum {
            domains: dec.vertices.iter().map(|&s| domain(s)).collect(),
            edge: &edge,
            vertex: &|_, _| 1.0,
        };
        let w = vp * sum.evaluate(gamma);
        split += w;
        terms.push((dec, w));
    }
    let (orbits, holds) = match gamma.automorphism_group(GROUP_LIMIT) {
        Some(group) => {
            let (o, h) = orbits(gamma, &group, &terms);
            (Some(o), Some(h))
        }
        None => (None, None),
    };
    let scale = whole_weight.abs().max(split.abs()).max(f64::MIN_POSITIVE);
    Ok(DecorationReport {
        whole: whole_weight,
        split,
        residual: (whole_weight - split).abs() / scale,
        decorations: terms,
        orbits,
        orbit_stabilizer_holds: holds,
    })
}

fn orbits(
    gamma: &FeynmanGraph,
    group: &[super::graph::Automorphism],
    terms: &[(Decoration, f64)],
) -> (Vec<DecorationOrbit>, bool) {
    let index: HashMap<&Decoration, usize> =
        terms.iter().enumerate().map(|(i, (d, _))| (d, i)).collect();
    let edge_perms: Vec<Vec<usize>> = group.iter().map(|a| a.edges()).collect();
    let mut seen = vec![false; terms.len()];
    let mut out = Vec::new();
    let mut holds = true;
    for (i, (dec, w)) in terms.iter().enumerate() {
        if seen[i] {
            continue;
        }
        let mut members = Vec::new();
        let mut stabilizer = 0;
        for (a, ep) in group.iter().zip(&edge_perms) {
            let mut vertices = vec![Side::Left; gamma.num_vertices()];
            for (v, &s) in dec.vertices.iter().enumerate() {
                vertices[a.vertices[v]] = s;
            }
            let mut cut = vec![false; gamma.num_edges()];
            for (e, &c) in dec.cut.iter().enumerate() {
                cut[ep[e]] = c;
            }
            let image = Decoration { vertices, cut };
            let j = index[&image];
            if j == i {
                stabilizer += 1;
            }
            if !seen[j] {
                seen[j] = true;
                members.push(j);
            }
        }
        let scale = w.abs().max(1e-300);
        holds &= members.len() * stabilizer == group.len();
        holds &= members
            .iter()
            .all(|&j| (terms[j].1 - w).abs() <= 1e-12 * scale.max(1e-12));
        out.push(DecorationOrbit {
            representative: dec.clone(),
            size: members.len(),
            stabilizer,
            weight: *w,
        });
    }
    (out, holds)
}
