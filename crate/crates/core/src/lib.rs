//! Gaussian and perturbative field theory on graphs: propagators, boundary data,
//! gluing, path-sum expansions, Feynman diagrams and nonperturbative integrals.

pub mod corpus;
pub mod error;
pub mod feynman;
pub mod gaussian;
pub mod gluing;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod nonpert;
pub mod pathsum;
pub mod verify;

pub use error::{Error, Result};
