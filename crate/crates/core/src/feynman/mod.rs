//! Feynman diagrams: enumeration with symmetry factors, weights from propagators or from
//! edge-to-path maps, perturbative partition functions and the cutting of weights along a
//! gluing interface.

pub(crate) mod contract;
pub mod decoration;
pub mod enumerate;
pub mod first_quantized;
pub mod graph;
pub mod pert;
pub mod potential;
pub mod weights;

pub use decoration::{decoration_split, Decoration, DecorationOrbit, DecorationReport, Side};
pub use enumerate::{
    enumerate_feynman_graphs, enumerate_feynman_graphs_capped, GraphMode, DEFAULT_ORDER_CAP,
};
pub use first_quantized::{
    edge_to_path_contribution, weight_by_edge_to_path_maps, weight_first_quantized,
    weight_first_quantized_relative, FirstQuantizedWeight,
};
pub use graph::{Automorphism, FeynmanGraph, VertexKind};
pub use pert::{
    z_pert_closed, z_pert_relative, BoundaryConvention, ClosedExpansion, GraphTerm,
    RelativeExpansion,
};
pub use potential::Potential;
pub use weights::{closed_amplitude, vertex_product, weight_closed, weight_relative};
