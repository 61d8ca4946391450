//! Nonperturbative oracle: the functional integrals of a graph evaluated by tensor-product
//! Gauss–Hermite quadrature, with a Monte Carlo fallback, plus Fubini gluing checks and fits of
//! the asymptotic order of perturbative truncations.

pub mod fit;
pub mod fubini;
mod hermite;

use nalgebra::Cholesky;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feynman::contract::{contract, largest_table, Factor};
use crate::feynman::Potential;
use crate::graph::{block_indices, kinetic, BoundaryMarking, Graph};
use crate::linalg::{select, Mat, Vector};

pub(crate) use hermite::HermiteRule;

pub use fit::{asymptotic_order_fit, hbar_grid, OrderFit};
pub use fubini::{fubini_gluing_check, fubini_self_gluing_check, FubiniReport};

/// Largest number of integration variables handled by tensor quadrature on closed graphs.
pub const TENSOR_DIM_LIMIT: usize = 5;
/// Largest bulk dimension handled by tensor quadrature on relative integrals.
pub const RELATIVE_DIM_LIMIT: usize = 4;
pub const MIN_NODES: usize = 16;
pub const MAX_NODES: usize = 256;
pub const DEFAULT_NODES: usize = 64;
/// Largest intermediate table, in cells, allowed in a tensor contraction.
const CELL_LIMIT: f64 = (1u64 << 24) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub samples: usize,
    pub seed: u64,
}

/// Gauss–Hermite nodes per dimension (the estimate uses this count and its double) and the
/// Monte Carlo fallback used beyond the tensor limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureScheme {
    pub nodes: usize,
    pub monte_carlo: Option<MonteCarlo>,
}

impl Default for QuadratureScheme {
    fn default() -> QuadratureScheme {
        QuadratureScheme {
            nodes: DEFAULT_NODES,
            monte_carlo: Some(MonteCarlo {
                samples: 1 << 16,
                seed: 0,
            }),
        }
    }
}

impl QuadratureScheme {
    pub fn with_nodes(nodes: usize) -> QuadratureScheme {
        QuadratureScheme {
            nodes,
            ..QuadratureScheme::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> QuadratureScheme {
        if let Some(mc) = &mut self.monte_carlo {
            mc.seed = seed;
        }
        self
    }

    fn validate(&self) -> Result<()> {
        if !(MIN_NODES..=MAX_NODES).contains(&self.nodes) {
            return Err(Error::InvalidArgument(format!(
                "node count {} outside {MIN_NODES}..={MAX_NODES}",
                self.nodes
            )));
        }
        if let Some(mc) = self.monte_carlo {
            if mc.samples < 2 {
                return Err(Error::InvalidArgument(
                    "Monte Carlo needs at least 2 samples".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Method {
    Tensor {
        nodes: usize,
    },
    /// Statistical estimate; `error` is one standard error.
    MonteCarlo {
        samples: usize,
        seed: u64,
    },
    /// No integration variables.
    Exact,
}

/// A quadrature value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub method: Method,
}

pub(crate) fn check_hbar(hbar: f64) -> Result<()> {
    if hbar > 0.0 && hbar.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "ħ must be positive, got {hbar}"
        )))
    }
}

/// Checks that `m²φ²/2 + p(φ)` grows at infinity and vanishes only at `φ = 0`, by the sign of the
/// leading coefficient and a scan inside the Cauchy bound of its nonzero roots.
pub fn check_growth(m2: f64, pot: &Potential) -> Result<()> {
    if pot.is_zero() {
        return Ok(());
    }
    let top = pot.degree();
    let lead = pot.coeff(top);
    if top % 2 == 1 || lead < 0.0 {
        return Err(Error::PotentialUnbounded(format!(
            "leading term p{top} = {lead} is not even with positive coefficient"
        )));
    }
    // V(φ)/φ² = m²/2 + Σ_k p_k φ^{k−2}/k!, a polynomial whose roots lie within 1 + max |a_i/a_top|.
    let scaled_lead = lead / factorial(top);
    let mut ratio = 0.5 * m2 / scaled_lead;
    for k in 3..top {
        ratio = ratio.max((pot.coeff(k) / factorial(k) / scaled_lead).abs());
    }
    let radius = 1.0 + ratio;
    let steps = 20_000;
    for i in 0..=steps {
        let phi = -radius + 2.0 * radius * i as f64 / steps as f64;
        if phi == 0.0 {
            continue;
        }
        let v = 0.5 * m2 * phi * phi + pot.value(phi);
        if v <= 0.0 {
            return Err(Error::PotentialUnbounded(format!(
                "m²φ²/2 + p(φ) = {v} at φ = {phi}"
            )));
        }
    }
    Ok(())
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `∫ Π dδ/√(2πħ) exp(−(½ δᵀAδ + Σ_v p(c_v + δ_v))/ħ)` for positive definite `A`.
struct GaussianIntegrand<'a> {
    a: Mat,
    center: Vector,
    pot: &'a Potential,
    hbar: f64,
}

impl GaussianIntegrand<'_> {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn couplings(&self) -> Vec<(usize, usize, f64)> {
        let n = self.dim();
        let mut out = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if self.a[(u, v)] != 0.0 {
                    let c = -self.a[(u, v)] / (self.a[(u, u)] * self.a[(v, v)]).sqrt();
                    out.push((u, v, c));
                }
            }
        }
        out
    }

    fn tensor_fits(&self, nodes: usize) -> bool {
        let scopes: Vec<Vec<usize>> = self
            .couplings()
            .iter()
            .map(|&(u, v, _)| vec![u, v])
            .chain((0..self.dim()).map(|v| vec![v]))
            .collect();
        largest_table(&vec![nodes; self.dim()], &scopes) <= CELL_LIMIT
    }

    /// Tensor Gauss–Hermite rule with widths `√(2ħ/A_vv)`. With `t` the rescaled variable, each
    /// coupling `e^{2c t_u t_v}` is split as `e^{|c|(t_u² + t_v²)} e^{−|c|(t_u ∓ t_v)²}` so that
    /// every table entry stays bounded.
    fn tensor(&self, rule: &HermiteRule) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 1.0;
        }
        let couplings = self.couplings();
        let mut spread = vec![0.0; n];
        for &(u, v, c) in &couplings {
            spread[u] += c.abs();
            spread[v] += c.abs();
        }
        let mut factors = Vec::new();
        for v in 0..n {
            let d = self.a[(v, v)];
            let width = (2.0 * self.hbar / d).sqrt();
            let log_norm = -0.5 * (std::f64::consts::PI * d).ln();
            let table = rule
                .nodes
                .iter()
                .zip(&rule.log_weights)
                .map(|(&t, &lw)| {
                    let phi = self.center[v] + width * t;
                    (lw + log_norm + spread[v] * t * t - self.pot.value(phi) / self.hbar).exp()
                })
                .collect();
            factors.push(Factor::unary(v, table));
        }
        for &(u, v, c) in &couplings {
            let sign = c.signum();
            let mut table = Vec::with_capacity(rule.nodes.len().pow(2));
            for &tu in &rule.nodes {
                for &tv in &rule.nodes {
                    table.push((-c.abs() * (tu - sign * tv).powi(2)).exp());
                }
            }
            factors.push(Factor::binary(u, v, table));
        }
        contract(&vec![rule.nodes.len(); n], factors)
    }

    fn tensor_estimate(&self, nodes: usize) -> Integral {
        let coarse = self.tensor(&HermiteRule::cached(nodes));
        let fine = self.tensor(&HermiteRule::cached(2 * nodes));
        Integral {
            value: fine,
            error: (fine - coarse).abs(),
            method: Method::Tensor { nodes: 2 * nodes },
        }
    }

    /// Samples `δ ~ N(0, ħA⁻¹)` in antithetic pairs.
    fn monte_carlo(&self, mc: MonteCarlo) -> Result<Integral> {
        let n = self.dim();
        let chol = Cholesky::new(self.a.clone()).ok_or(Error::NotPositiveDefinite)?;
        let lt = chol.l().transpose();
        let prefactor: f64 = (0..n).map(|i| 1.0 / lt[(i, i)]).product();
        let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
        let sample = |z: &Vector| -> f64 {
            let delta = lt
                .solve_upper_triangular(z)
                .expect("triangular factor is invertible");
            let s: f64 = (0..n)
                .map(|v| self.pot.value(self.center[v] + self.hbar.sqrt() * delta[v]))
                .sum();
            (-s / self.hbar).exp()
        };
        let pairs = mc.samples / 2;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..pairs {
            let z = Vector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
            let y = 0.5 * (sample(&z) + sample(&-&z));
            sum += y;
            sum_sq += y * y;
        }
        let k = pairs as f64;
        let mean = sum / k;
        let var = ((sum_sq / k - mean * mean) * k / (k - 1.0).max(1.0)).max(0.0);
        Ok(Integral {
            value: prefactor * mean,
            error: prefactor * (var / k).sqrt(),
            method: Method::MonteCarlo {
                samples: 2 * pairs,
                seed: mc.seed,
            },
        })
    }

    fn integrate(&self, scheme: &QuadratureScheme, limit: usize) -> Result<Integral> {
        if self.dim() == 0 {
            return Ok(Integral {
                value: 1.0,
                error: 0.0,
                method: Method::Exact,
            });
        }
        if self.dim() <= limit && self.tensor_fits(2 * scheme.nodes) {
            return Ok(self.tensor_estimate(scheme.nodes));
        }
        match scheme.monte_carlo {
            Some(mc) => self.monte_carlo(mc),
            None => Err(Error::DimensionTooLarge {
                dim: self.dim(),
                limit,
            }),
        }
    }
}

/// `Z = ∫ Π_v dφ(v)/√(2πħ) e^{−S(φ)/ħ}` with `S = ½(φ,Kφ) + Σ_v p(φ(v))`.
pub fn z_nonpert(
    g: &Graph,
    m2: f64,
    pot: &Potential,
    hbar: f64,
    scheme: &QuadratureScheme,
) -> Result<Integral> {
    closed_integral(g, m2, pot, hbar, scheme, TENSOR_DIM_LIMIT)
}

pub(crate) fn closed_integral(
    g: &Graph,
    m2: f64,
    pot: &Potential,
    hbar: f64,
    scheme: &QuadratureScheme,
    limit: usize,
) -> Result<Integral> {
    check_hbar(hbar)?;
    scheme.validate()?;
    let k = kinetic(g, m2)?;
    check_growth(m2, pot)?;
    GaussianIntegrand {
        a: k,
        center: Vector::zeros(g.n()),
        pot,
        hbar,
    }
    .integrate(scheme, limit)
}

/// `S_Y(φ_Y) = ½(φ_Y, K_Y φ_Y) + Σ_{v∈Y} p(φ_Y(v))` with `K_Y` the kinetic operator of `Y` as a
/// graph; `phi` is indexed like `y.vertices()`.
pub fn boundary_action(
    g: &Graph,
    y: &BoundaryMarking,
    m2: f64,
    pot: &Potential,
    phi: &Vector,
) -> Result<f64> {
    let ky = kinetic(&y.subgraph(g), m2)?;
    Ok(0.5 * phi.dot(&(&ky * phi)) + phi.iter().map(|&x| pot.value(x)).sum::<f64>())
}

/// `Z_{X,Y}(φ_Y) = ∫ Π_{v∉Y} dφ(v)/√(2πħ) e^{−(S_X(φ) − ½ S_Y(φ_Y))/ħ}` with the field clamped to
/// `phi` on `Y` (indexed like `y.vertices()`). Quadrature is centred at the Dirichlet solution.
#[allow(clippy::too_many_arguments)]
pub fn z_rel_nonpert(
    g: &Graph,
    y: &BoundaryMarking,
    m2: f64,
    pot: &Potential,
    hbar: f64,
    phi: &Vector,
    scheme: &QuadratureScheme,
) -> Result<Integral> {
    check_hbar(hbar)?;
    scheme.validate()?;
    check_growth(m2, pot)?;
    let rel = RelativeIntegrand::new(g, y, m2, pot, hbar)?;
    let (scale, inner) = rel.at(phi)?;
    let inner = inner.integrate(scheme, RELATIVE_DIM_LIMIT)?;
    Ok(Integral {
        value: scale * inner.value,
        error: scale * inner.error,
        method: inner.method,
    })
}

/// Blocks of `K` and the kinetic operator of `Y`, prepared for repeated boundary fields.
pub(crate) struct RelativeIntegrand<'a> {
    pot: &'a Potential,
    hbar: f64,
    /// Position in `y.vertices()` of each boundary vertex in block order.
    slots: Vec<usize>,
    kbb: Mat,
    kby: Mat,
    kyy: Mat,
    ky: Mat,
    chol: Option<Cholesky<f64, nalgebra::Dyn>>,
}

impl<'a> RelativeIntegrand<'a> {
    pub fn new(
        g: &Graph,
        y: &BoundaryMarking,
        m2: f64,
        pot: &'a Potential,
        hbar: f64,
    ) -> Result<RelativeIntegrand<'a>> {
        let k = kinetic(g, m2)?;
        let (bulk, bdry) = block_indices(g, y);
        let slots = bdry
            .iter()
            .map(|&v| {
                y.vertices()
                    .iter()
                    .position(|&w| w == v)
                    .expect("boundary vertex")
            })
            .collect();
        let kbb = select(&k, &bulk, &bulk);
        let chol = if bulk.is_empty() {
            None
        } else {
            Some(Cholesky::new(kbb.clone()).ok_or(Error::NotPositiveDefinite)?)
        };
        Ok(RelativeIntegrand {
            pot,
            hbar,
            slots,
            kby: select(&k, &bulk, &bdry),
            kyy: select(&k, &bdry, &bdry),
            kbb,
            ky: kinetic(&y.subgraph(g), m2)?,
            chol,
        })
    }

    /// The factor outside the bulk integral and the bulk integrand at boundary field `phi`.
    fn at(&self, phi: &Vector) -> Result<(f64, GaussianIntegrand<'a>)> {
        if phi.len() != self.slots.len() {
            return Err(Error::DimensionMismatch {
                expected: self.slots.len(),
                got: phi.len(),
            });
        }
        let phi_b = Vector::from_iterator(self.slots.len(), self.slots.iter().map(|&k| phi[k]));
        let quad = 0.5 * phi_b.dot(&(&self.kyy * &phi_b));
        let (center, minimum) = match &self.chol {
            None => (Vector::zeros(0), quad),
            Some(chol) => {
                let mu = chol.solve(&(-(&self.kby * &phi_b)));
                let min = quad - 0.5 * mu.dot(&(&self.kbb * &mu));
                (mu, min)
            }
        };
        let boundary_pot: f64 = phi.iter().map(|&x| self.pot.value(x)).sum();
        let half_sy = 0.25 * phi.dot(&(&self.ky * phi)) + 0.5 * boundary_pot;
        let exponent = minimum + boundary_pot - half_sy;
        let inner = GaussianIntegrand {
            a: self.kbb.clone(),
            center,
            pot: self.pot,
            hbar: self.hbar,
        };
        Ok(((-exponent / self.hbar).exp(), inner))
    }

    /// Value at `phi` with a single tensor rule.
    pub fn value_with(&self, phi: &Vector, rule: &HermiteRule) -> Result<f64> {
        let (scale, inner) = self.at(phi)?;
        Ok(scale * inner.tensor(rule))
    }
}
