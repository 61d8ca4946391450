//! Perturbative partition functions as truncated sums over Feynman graphs.

use serde::Serialize;

use crate::error::Result;
use crate::gaussian::{gaussian_data, relative_data};
use crate::graph::{BoundaryMarking, Graph};
use crate::linalg::Vector;

use super::enumerate::{enumerate_feynman_graphs, GraphMode};
use super::graph::FeynmanGraph;
use super::potential::Potential;
use super::weights::{weight_closed, weight_relative};

/// One graph's contribution: it enters as `ħ^{twice_order/2} · weight / aut`.
#[derive(Debug, Clone, Serialize)]
pub struct GraphTerm {
    pub canonical: String,
    pub aut: u64,
    pub twice_order: i64,
    pub connected: bool,
    pub weight: f64,
}

impl GraphTerm {
    fn new(g: &FeynmanGraph, weight: f64) -> GraphTerm {
        GraphTerm {
            canonical: g.canonical().to_string(),
            aut: g.aut(),
            twice_order: g.twice_order(),
            connected: g.is_connected(),
            weight,
        }
    }
}

/// Perturbative partition function of a closed graph.
#[derive(Debug, Clone, Serialize)]
pub struct ClosedExpansion {
    /// `det(K)^{−1/2}`.
    pub prefactor: f64,
    /// Coefficient of `ħ^ℓ` in the graph sum, `ℓ = 0..=L`.
    pub coefficients: Vec<f64>,
    /// The same for connected graphs only.
    pub connected: Vec<f64>,
    /// `prefactor · Σ_ℓ coefficients[ℓ] ħ^ℓ`.
    pub z: f64,
    /// `log prefactor + Σ_ℓ connected[ℓ] ħ^ℓ`.
    pub log_z: f64,
    pub terms: Vec<GraphTerm>,
}

/// `det(K)^{−1/2} Σ_Γ ħ^{−χ(Γ)} Φ_Γ / |Aut Γ|` truncated at order `max_order`, with the
/// connected-graph expansion of the logarithm.
pub fn z_pert_closed(
    g: &Graph,
    m2: f64,
    pot: &Potential,
    hbar: f64,
    max_order: u32,
) -> Result<ClosedExpansion> {
    let gd = gaussian_data(g, m2)?;
    let graphs = enumerate_feynman_graphs(pot, max_order, GraphMode::Closed)?;
    let len = max_order as usize + 1;
    let mut coefficients = vec![0.0; len];
    let mut connected = vec![0.0; len];
    let mut terms = Vec::with_capacity(graphs.len());
    for gamma in &graphs {
        let w = weight_closed(gamma, &gd, pot)?;
        let order = (gamma.twice_order() / 2) as usize;
        coefficients[order] += w / gamma.aut() as f64;
        if gamma.is_connected() {
            connected[order] += w / gamma.aut() as f64;
        }
        terms.push(GraphTerm::new(gamma, w));
    }
    let series = |c: &[f64]| -> f64 {
        c.iter()
            .enumerate()
            .map(|(l, x)| x * hbar.powi(l as i32))
            .sum()
    };
    let prefactor = gd.partition_function();
    Ok(ClosedExpansion {
        prefactor,
        z: prefactor * series(&coefficients),
        log_z: -0.5 * gd.log_det + series(&connected),
        coefficients,
        connected,
        terms,
    })
}

/// How the boundary quadratic form enters the relative expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryConvention {
    /// `DN − K_Y/2` in the exponential prefactor; no boundary–boundary edges.
    DnPrefactor,
    /// Only `−K_Y/2` in the prefactor; `DN` enters through boundary–boundary edges weighted
    /// `−DN`, with at most `max_boundary` boundary vertices per graph.
    BoundaryEdges { max_boundary: usize },
}

/// Perturbative relative partition function in the rescaled boundary field `η = φ/√ħ`.
#[derive(Debug, Clone, Serialize)]
pub struct RelativeExpansion {
    /// `det(K_{X,Y})^{−1/2}` times the exponential of the boundary terms.
    pub prefactor: f64,
    /// Coefficient of `ħ^{k/2}` in the graph sum, `k = 0..=2L`.
    pub coefficients: Vec<f64>,
    pub z: f64,
    pub terms: Vec<GraphTerm>,
}

/// `det(K_{X,Y})^{−1/2} e^{−(η,(DN − K_Y/2)η)/2 − S_Y^int(√ħη)/(2ħ)}
/// Σ_Γ ħ^{|E| − |V_bulk| − |V_∂|/2} Φ_Γ(η) / |Aut Γ|`, truncated at order `max_order`.
#[allow(clippy::too_many_arguments)]
pub fn z_pert_relative(
    g: &Graph,
    y: &BoundaryMarking,
    m2: f64,
    pot: &Potential,
    hbar: f64,
    eta: &Vector,
    max_order: u32,
    convention: BoundaryConvention,
) -> Result<RelativeExpansion> {
    let rd = relative_data(g, y, m2)?;
    let mode = match convention {
        BoundaryConvention::DnPrefactor => GraphMode::Relative,
        BoundaryConvention::BoundaryEdges { max_boundary } => {
            GraphMode::RelativeWithBoundaryEdges { max_boundary }
        }
    };
    let graphs = enumerate_feynman_graphs(pot, max_order, mode)?;
    let mut coefficients = vec![0.0; 2 * max_order as usize + 1];
    let mut terms = Vec::with_capacity(graphs.len());
    for gamma in &graphs {
        let w = weight_relative(gamma, &rd, pot, eta)?;
        coefficients[gamma.twice_order() as usize] += w / gamma.aut() as f64;
        terms.push(GraphTerm::new(gamma, w));
    }
    let quadratic = match convention {
        BoundaryConvention::DnPrefactor => eta.dot(&(rd.exponent_matrix() * eta)),
        BoundaryConvention::BoundaryEdges { .. } => -0.5 * eta.dot(&(&rd.boundary_kinetic * eta)),
    };
    let root = hbar.sqrt();
    let boundary_potential: f64 = eta.iter().map(|&e| pot.value(root * e)).sum();
    let prefactor =
        rd.partition_prefactor() * (-0.5 * quadratic - boundary_potential / (2.0 * hbar)).exp();
    let sum: f64 = coefficients
        .iter()
        .enumerate()
        .map(|(k, c)| c * root.powi(k as i32))
        .sum();
    Ok(RelativeExpansion {
        prefactor,
        z: prefactor * sum,
        coefficients,
        terms,
    })
}
