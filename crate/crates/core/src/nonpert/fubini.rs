//! Fubini checks of the gluing law: the partition function of a glued graph against the integral
//! over the interface field of the product of relative partition functions.

use nalgebra::Cholesky;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::feynman::Potential;
use crate::graph::{block_indices, glue, kinetic, self_glue, BoundaryMarking, GluingSpec, Graph};
use crate::linalg::{select, Mat, Vector};

use super::{
    check_growth, check_hbar, closed_integral, HermiteRule, QuadratureScheme, RelativeIntegrand,
};

/// Largest interface handled by the nested quadrature.
pub const INTERFACE_LIMIT: usize = 2;
/// Largest bulk on either side of the interface.
pub const SIDE_BULK_LIMIT: usize = 3;

#[derive(Debug, Clone, Serialize)]
pub struct FubiniReport {
    /// `Z_X` of the glued graph.
    pub whole: f64,
    pub whole_error: f64,
    /// `∫ dφ_Y Z_{X′,Y}(φ_Y) Z_{X″,Y}(φ_Y)`.
    pub glued: f64,
    pub glued_error: f64,
    pub residual: f64,
}

/// Schur complement of `K` onto the vertices `ys`, the quadratic form of the interface integral
/// in the free theory.
fn interface_form(g: &Graph, y: &BoundaryMarking, m2: f64) -> Result<(Mat, Vec<usize>)> {
    let k = kinetic(g, m2)?;
    let (bulk, bdry) = block_indices(g, y);
    let kyy = select(&k, &bdry, &bdry);
    if bulk.is_empty() {
        return Ok((kyy, bdry));
    }
    let kbb = select(&k, &bulk, &bulk);
    let kby = select(&k, &bulk, &bdry);
    let chol = Cholesky::new(kbb).ok_or(Error::NotPositiveDefinite)?;
    Ok((&kyy - kby.transpose() * chol.solve(&kby), bdry))
}

/// `∫ Π_i dη_i/√(2πħ) f(η)` by tensor Gauss–Hermite with widths `√(2ħ/M_ii)`; `f` is evaluated
/// at fields indexed like the rows of `form`.
fn interface_integral(
    form: &Mat,
    hbar: f64,
    rule: &HermiteRule,
    f: &mut dyn FnMut(&Vector) -> Result<f64>,
) -> Result<f64> {
    let n = form.nrows();
    let widths: Vec<f64> = (0..n).map(|i| (2.0 * hbar / form[(i, i)]).sqrt()).collect();
    let m = rule.nodes.len();
    let mut total = 0.0;
    let mut eta = Vector::zeros(n);
    for cell in 0..m.pow(n as u32) {
        let mut rest = cell;
        let mut log_w = 0.0;
        for i in 0..n {
            let j = rest % m;
            rest /= m;
            let t = rule.nodes[j];
            eta[i] = widths[i] * t;
            log_w += rule.log_weights[j] + t * t;
        }
        let value = f(&eta)?;
        if value != 0.0 {
            total += value * log_w.exp();
        }
    }
    let norm: f64 = widths
        .iter()
        .map(|w| w / (2.0 * std::f64::consts::PI * hbar).sqrt())
        .product();
    Ok(total * norm)
}

fn limits(bulk: &[usize], y: usize) -> Result<()> {
    if y > INTERFACE_LIMIT {
        return Err(Error::DimensionTooLarge {
            dim: y,
            limit: INTERFACE_LIMIT,
        });
    }
    if let Some(&b) = bulk.iter().find(|&&b| b > SIDE_BULK_LIMIT) {
        return Err(Error::DimensionTooLarge {
            dim: b,
            limit: SIDE_BULK_LIMIT,
        });
    }
    Ok(())
}

fn tensor_only(nodes: usize) -> QuadratureScheme {
    QuadratureScheme {
        nodes,
        monte_carlo: None,
    }
}

fn report(whole: (f64, f64), coarse: f64, fine: f64) -> FubiniReport {
    FubiniReport {
        whole: whole.0,
        whole_error: whole.1,
        glued: fine,
        glued_error: (fine - coarse).abs(),
        residual: (whole.0 - fine).abs() / whole.0.abs().max(f64::MIN_POSITIVE),
    }
}

/// Checks `Z_X = ∫ dφ_Y Z_{X′,Y}(φ_Y) Z_{X″,Y}(φ_Y)` for `X = X′ ∪_Y X″` by nested quadrature.
pub fn fubini_gluing_check(
    spec: &GluingSpec,
    m2: f64,
    pot: &Potential,
    hbar: f64,
    scheme: &QuadratureScheme,
) -> Result<FubiniReport> {
    check_hbar(hbar)?;
    check_growth(m2, pot)?;
    let glued = glue(spec)?;
    let ny = spec.left_boundary.len();
    limits(
        &[
            spec.left.n() - ny,
            spec.right.n() - spec.right_boundary.len(),
        ],
        ny,
    )?;
    let whole = closed_integral(
        &glued.graph,
        m2,
        pot,
        hbar,
        &tensor_only(scheme.nodes),
        usize::MAX,
    )?;
    let (form, order) = interface_form(&glued.graph, &glued.boundary, m2)?;
    // Position in the left boundary and in the right boundary of each interface row.
    let left_pos: Vec<usize> = order
        .iter()
        .map(|&v| {
            glued
                .left_map
                .iter()
                .position(|&w| w == v)
                .expect("interface vertex")
        })
        .map(|lv| {
            spec.left_boundary
                .vertices()
                .iter()
                .position(|&w| w == lv)
                .expect("left boundary")
        })
        .collect();
    let right_pos: Vec<usize> = left_pos
        .iter()
        .map(|&k| {
            let rv = glued.right_partners[k];
            spec.right_boundary
                .vertices()
                .iter()
                .position(|&w| w == rv)
                .expect("right boundary")
        })
        .collect();
    let left = RelativeIntegrand::new(&spec.left, &spec.left_boundary, m2, pot, hbar)?;
    let right = RelativeIntegrand::new(&spec.right, &spec.right_boundary, m2, pot, hbar)?;
    let at = |nodes: usize| -> Result<f64> {
        let rule = HermiteRule::cached(nodes);
        interface_integral(&form, hbar, &rule, &mut |eta| {
            let mut phi_l = Vector::zeros(ny);
            let mut phi_r = Vector::zeros(ny);
            for i in 0..ny {
                phi_l[left_pos[i]] = eta[i];
                phi_r[right_pos[i]] = eta[i];
            }
            Ok(left.value_with(&phi_l, &rule)? * right.value_with(&phi_r, &rule)?)
        })
    };
    let coarse = at(scheme.nodes)?;
    let fine = at(2 * scheme.nodes)?;
    Ok(report((whole.value, whole.error), coarse, fine))
}

/// Checks `Z_{X̃} = ∫ dφ Z_{X,Y₁⊔Y₂}(φ, φ∘f)` for the graph `X̃` obtained by identifying `y1`
/// with `y2` inside `g` along `f`.
#[allow(clippy::too_many_arguments)]
pub fn fubini_self_gluing_check(
    g: &Graph,
    y1: &BoundaryMarking,
    y2: &BoundaryMarking,
    f: &[(String, String)],
    m2: f64,
    pot: &Potential,
    hbar: f64,
    scheme: &QuadratureScheme,
) -> Result<FubiniReport> {
    check_hbar(hbar)?;
    check_growth(m2, pot)?;
    let sg = self_glue(g, y1, y2, f)?;
    let ny = y1.len();
    limits(&[g.n() - 2 * ny], ny)?;
    let whole = closed_integral(
        &sg.graph,
        m2,
        pot,
        hbar,
        &tensor_only(scheme.nodes),
        usize::MAX,
    )?;
    let (form, order) = interface_form(&sg.graph, &sg.boundary, m2)?;
    let mut ids: Vec<&str> = y1.ids(g);
    ids.extend(y2.ids(g));
    let mut edges = y1.edge_ids(g);
    edges.extend(y2.edge_ids(g));
    let both = BoundaryMarking::new(g, ids, edges)?;
    // For each interface row, the positions in `both` of its two preimages.
    let slots: Vec<(usize, usize)> = order
        .iter()
        .map(|&v| {
            let k = y1
                .vertices()
                .iter()
                .position(|&a| sg.map[a] == v)
                .expect("interface vertex");
            let a = y1.vertices()[k];
            let b = sg.partners[k];
            let pos = |x: usize| {
                both.vertices()
                    .iter()
                    .position(|&w| w == x)
                    .expect("boundary")
            };
            (pos(a), pos(b))
        })
        .collect();
    let rel = RelativeIntegrand::new(g, &both, m2, pot, hbar)?;
    let at = |nodes: usize| -> Result<f64> {
        let rule = HermiteRule::cached(nodes);
        interface_integral(&form, hbar, &rule, &mut |eta| {
            let mut phi = Vector::zeros(2 * ny);
            for (i, &(a, b)) in slots.iter().enumerate() {
                phi[a] = eta[i];
                phi[b] = eta[i];
            }
            rel.value_with(&phi, &rule)
        })
    };
    let coarse = at(scheme.nodes)?;
    let fine = at(2 * scheme.nodes)?;
    Ok(report((whole.value, whole.error), coarse, fine))
}
