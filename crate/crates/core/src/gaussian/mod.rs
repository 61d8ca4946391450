//! Free (Gaussian) theory on a graph: propagators, determinants, Dirichlet-to-Neumann and
//! extension operators, Gaussian partition functions, correlators and heat kernels.

pub mod closed_form;
pub mod continuum;

use gauss_quad::GaussLegendre;
use std::num::NonZeroUsize;

use crate::error::{Error, Result};
use crate::graph::{block_indices, kinetic, BoundaryMarking, Graph};
use crate::linalg::{factorize, relative_deviation, select, symmetrize, Mat, SymSpectrum, Vector};

pub use closed_form::ClosedForm;

/// Propagator and determinant of the kinetic operator of a closed graph.
#[derive(Debug, Clone)]
pub struct GaussianData {
    pub m2: f64,
    pub propagator: Mat,
    pub det: f64,
    pub log_det: f64,
}

impl GaussianData {
    /// `det(K)^{-1/2}`.
    pub fn partition_function(&self) -> f64 {
        (-0.5 * self.log_det).exp()
    }
}

/// Propagator and determinant of `K` on a closed graph.
pub fn gaussian_data(g: &Graph, m2: f64) -> Result<GaussianData> {
    let f = factorize(&kinetic(g, m2)?)?;
    Ok(GaussianData {
        m2,
        propagator: f.inverse(),
        det: f.det(),
        log_det: f.logdet()?,
    })
}

/// Gaussian data of a graph relative to a boundary subgraph `Y`.
#[derive(Debug, Clone)]
pub struct RelativeGaussianData {
    pub m2: f64,
    /// Bulk vertex indices, canonical order; rows of `propagator` and `ext`.
    pub bulk: Vec<usize>,
    /// Boundary vertex indices, canonical order; rows and columns of `dn`.
    pub boundary: Vec<usize>,
    /// Dirichlet propagator on the bulk.
    pub propagator: Mat,
    /// Determinant of the bulk block of `K`.
    pub det: f64,
    pub log_det: f64,
    /// Dirichlet-to-Neumann operator on `Y`.
    pub dn: Mat,
    /// Extension operator, bulk by boundary.
    pub ext: Mat,
    /// Kinetic operator of `Y` as a graph in its own right.
    pub boundary_kinetic: Mat,
    /// Set when `Y` is empty and the data are the absolute ones.
    pub empty_boundary: bool,
}

impl RelativeGaussianData {
    /// Position of a graph vertex in the bulk ordering.
    pub fn bulk_position(&self, v: usize) -> Option<usize> {
        self.bulk.binary_search(&v).ok()
    }

    /// `det(K_{X,Y})^{-1/2}`.
    pub fn partition_prefactor(&self) -> f64 {
        (-0.5 * self.log_det).exp()
    }

    /// The quadratic form `DN - K_Y / 2` in the exponent of the relative partition function.
    pub fn exponent_matrix(&self) -> Mat {
        &self.dn - &self.boundary_kinetic * 0.5
    }

    fn check_boundary_field(&self, phi: &Vector) -> Result<()> {
        if phi.len() != self.boundary.len() {
            return Err(Error::DimensionMismatch {
                expected: self.boundary.len(),
                got: phi.len(),
            });
        }
        Ok(())
    }

    /// Gaussian partition function relative to `Y` at boundary field `phi`.
    pub fn partition_function(&self, phi: &Vector, hbar: f64) -> Result<f64> {
        self.check_boundary_field(phi)?;
        let q = phi.dot(&(self.exponent_matrix() * phi));
        Ok(self.partition_prefactor() * (-q / (2.0 * hbar)).exp())
    }

    /// Bulk values of the solution of the Dirichlet problem, `E φ`.
    pub fn mean(&self, phi: &Vector) -> Result<Vector> {
        self.check_boundary_field(phi)?;
        Ok(&self.ext * phi)
    }

    /// The Dirichlet solution as a field on all of `X`.
    pub fn dirichlet_solution(&self, phi: &Vector) -> Result<Vector> {
        let mean = self.mean(phi)?;
        let mut field = Vector::zeros(self.bulk.len() + self.boundary.len());
        for (k, &v) in self.bulk.iter().enumerate() {
            field[v] = mean[k];
        }
        for (k, &v) in self.boundary.iter().enumerate() {
            field[v] = phi[k];
        }
        Ok(field)
    }
}

fn boundary_kinetic(g: &Graph, y: &BoundaryMarking, m2: f64) -> Result<Mat> {
    kinetic(&y.subgraph(g), m2)
}

fn absolute_as_relative(g: &Graph, m2: f64) -> Result<RelativeGaussianData> {
    let gd = gaussian_data(g, m2)?;
    Ok(RelativeGaussianData {
        m2,
        bulk: (0..g.n()).collect(),
        boundary: Vec::new(),
        propagator: gd.propagator,
        det: gd.det,
        log_det: gd.log_det,
        dn: Mat::zeros(0, 0),
        ext: Mat::zeros(g.n(), 0),
        boundary_kinetic: Mat::zeros(0, 0),
        empty_boundary: true,
    })
}

/// Relative data by Schur complement on the blocks of `K`.
pub fn relative_data(g: &Graph, y: &BoundaryMarking, m2: f64) -> Result<RelativeGaussianData> {
    let k = kinetic(g, m2)?;
    if y.is_empty() {
        return absolute_as_relative(g, m2);
    }
    let (bulk, boundary) = block_indices(g, y);
    let a = select(&k, &bulk, &bulk);
    let b = select(&k, &bulk, &boundary);
    let d = select(&k, &boundary, &boundary);
    let f = factorize(&a)?;
    let ext = -f.solve(&b);
    let dn = symmetrize(&(d + b.transpose() * &ext));
    Ok(RelativeGaussianData {
        m2,
        propagator: f.inverse(),
        det: f.det(),
        log_det: f.logdet()?,
        dn,
        ext,
        boundary_kinetic: boundary_kinetic(g, y, m2)?,
        bulk,
        boundary,
        empty_boundary: false,
    })
}

/// Relative data from the blocks of the full inverse `K⁻¹`; an independent route.
pub fn relative_data_by_inverse(
    g: &Graph,
    y: &BoundaryMarking,
    m2: f64,
) -> Result<RelativeGaussianData> {
    if y.is_empty() {
        return absolute_as_relative(g, m2);
    }
    let full = factorize(&kinetic(g, m2)?)?;
    let inv = full.inverse();
    let (bulk, boundary) = block_indices(g, y);
    let a = select(&inv, &bulk, &bulk);
    let b = select(&inv, &bulk, &boundary);
    let d = select(&inv, &boundary, &boundary);
    let fd = factorize(&d)?;
    let dn = fd.inverse();
    let ext = &b * &dn;
    let propagator = symmetrize(&(a - &ext * b.transpose()));
    let log_det = full.logdet()? + fd.logdet()?;
    Ok(RelativeGaussianData {
        m2,
        propagator,
        det: log_det.exp(),
        log_det,
        dn,
        ext,
        boundary_kinetic: boundary_kinetic(g, y, m2)?,
        bulk,
        boundary,
        empty_boundary: false,
    })
}

/// Largest relative disagreement between two sets of relative data for the same input.
pub fn route_residual(a: &RelativeGaussianData, b: &RelativeGaussianData) -> f64 {
    let det = (a.det - b.det).abs() / b.det.abs();
    relative_deviation(&a.propagator, &b.propagator)
        .max(relative_deviation(&a.dn, &b.dn))
        .max(relative_deviation(&a.ext, &b.ext))
        .max(det)
}

/// Sum over perfect matchings of the product of covariance entries.
pub fn hafnian(cov: &Mat, idx: &[usize]) -> f64 {
    if idx.len() % 2 == 1 {
        return 0.0;
    }
    if idx.is_empty() {
        return 1.0;
    }
    let first = idx[0];
    let rest = &idx[1..];
    let mut total = 0.0;
    let mut remaining = Vec::with_capacity(rest.len() - 1);
    for k in 0..rest.len() {
        remaining.clear();
        remaining.extend(
            rest.iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &v)| v),
        );
        total += cov[(first, rest[k])] * hafnian(cov, &remaining);
    }
    total
}

/// Gaussian moment `⟨φ(v₁)…φ(v_n)⟩` by Wick's lemma; zero for odd `n`.
pub fn wick_correlator(gd: &GaussianData, vertices: &[usize], hbar: f64) -> f64 {
    if vertices.len() % 2 == 1 {
        return 0.0;
    }
    hbar.powi((vertices.len() / 2) as i32) * hafnian(&gd.propagator, vertices)
}

/// Non-centered correlator of bulk insertions with boundary field `phi` clamped.
pub fn relative_correlator(
    g: &Graph,
    r: &RelativeGaussianData,
    phi: &Vector,
    insertions: &[usize],
    hbar: f64,
) -> Result<f64> {
    let mean = r.mean(phi)?;
    let pos: Vec<usize> = insertions
        .iter()
        .map(|&v| {
            r.bulk_position(v)
                .ok_or_else(|| Error::InsertionOnBoundary(g.id(v).to_string()))
        })
        .collect::<Result<_>>()?;
    let n = pos.len();
    if n > 24 {
        return Err(Error::InvalidArgument(format!(
            "{n} insertions exceed the limit of 24"
        )));
    }
    let mut total = 0.0;
    let mut paired = Vec::with_capacity(n);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() % 2 == 1 {
            continue;
        }
        paired.clear();
        let mut product = 1.0;
        for (k, &p) in pos.iter().enumerate() {
            if mask & (1 << k) != 0 {
                paired.push(p);
            } else {
                product *= mean[p];
            }
        }
        if product != 0.0 {
            let m = (paired.len() / 2) as i32;
            total += product * hbar.powi(m) * hafnian(&r.propagator, &paired);
        }
    }
    Ok(total)
}

/// The heat kernel `exp(-t K)` with the spectral decomposition cached.
#[derive(Debug, Clone)]
pub struct HeatKernel {
    spectrum: SymSpectrum,
}

impl HeatKernel {
    pub fn new(g: &Graph, m2: f64) -> Result<HeatKernel> {
        Ok(HeatKernel {
            spectrum: SymSpectrum::new(&kinetic(g, m2)?)?,
        })
    }

    pub fn at(&self, t: f64) -> Result<Mat> {
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        Ok(self.spectrum.exp_neg(t))
    }

    /// `∫₀^∞ exp(-t K) dt` by adaptive Gauss–Legendre panels, truncated where
    /// `exp(-t λ_min) < 1e-14`.
    pub fn time_integral(&self, tol: f64) -> Mat {
        let rule = GaussLegendre::new(NonZeroUsize::new(15).expect("nonzero"));
        let n = self.spectrum.values.len();
        let lambda_min = self.spectrum.min();
        let horizon = 14.0 * std::f64::consts::LN_10 / lambda_min;
        let panel = |a: f64, b: f64| -> Mat {
            let mut sum = Mat::zeros(n, n);
            let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
            for &(x, w) in rule.as_node_weight_pairs() {
                sum += self.spectrum.exp_neg(mid + half * x) * (w * half);
            }
            sum
        };
        let mut total = Mat::zeros(n, n);
        let mut stack = vec![(0.0, horizon, panel(0.0, horizon), 0u32)];
        while let Some((a, b, whole, depth)) = stack.pop() {
            let mid = (a + b) / 2.0;
            let (left, right) = (panel(a, mid), panel(mid, b));
            let refined = &left + &right;
            let budget = tol * (b - a) / horizon;
            if (&refined - &whole).amax() <= budget || depth >= 40 {
                total += refined;
            } else {
                stack.push((a, mid, left, depth + 1));
                stack.push((mid, b, right, depth + 1));
            }
        }
        symmetrize(&total)
    }
}

/// `exp(-t K)`.
pub fn heat_kernel(g: &Graph, m2: f64, t: f64) -> Result<Mat> {
    HeatKernel::new(g, m2)?.at(t)
}
