//! Gluing of Gaussian data: propagators and determinants of a glued graph from the data of
//! its pieces, composition of cobordisms, self-gluing and the trace formula.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{relative_data, RelativeGaussianData};
use crate::graph::{
    compose_cobordisms, glue, kinetic, self_glue, BoundaryMarking, Cobordism, Glued, GluingSpec,
    Graph, SelfGlued,
};
use crate::linalg::{factorize, relative_deviation, select, symmetrize, Mat};

/// Two computations of the same quantity and their relative disagreement.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl IdentityReport {
    pub fn new(lhs: f64, rhs: f64) -> IdentityReport {
        let scale = rhs.abs().max(f64::MIN_POSITIVE);
        IdentityReport {
            lhs,
            rhs,
            residual: (lhs - rhs).abs() / scale,
        }
    }

    /// Compares two matrices by their largest relative entrywise deviation.
    pub fn matrices(lhs: &Mat, rhs: &Mat) -> IdentityReport {
        IdentityReport {
            lhs: lhs.amax(),
            rhs: rhs.amax(),
            residual: relative_deviation(lhs, rhs),
        }
    }
}

/// Gaussian data of `X = X' ∪_Y X''` assembled from the relative data of the pieces.
#[derive(Debug, Clone)]
pub struct GluedData {
    pub glued: Glued,
    /// `DN_{Y,X'} + DN_{Y,X''} - K_Y`, in the order of `glued.boundary`.
    pub total_dn: Mat,
    /// Propagator of the glued graph, canonical order.
    pub propagator: Mat,
    /// Relative propagators of the two sides placed in the glued graph; zero on `Y` rows.
    pub uncut: Mat,
    /// `Ē DN_tot⁻¹ Ēᵀ`, where `Ē` is the extension operator of either side and the identity
    /// on `Y`.
    pub cut: Mat,
    pub det: f64,
    pub log_det: f64,
}

fn position(list: &[usize], v: usize) -> usize {
    list.iter().position(|&x| x == v).expect("vertex present")
}

fn check_side(rd: &RelativeGaussianData, g: &Graph, y: &BoundaryMarking, m2: f64) -> Result<()> {
    if rd.boundary != y.vertices() || rd.bulk.len() + rd.boundary.len() != g.n() {
        return Err(Error::BoundaryMismatch(
            "relative data do not match the marking".into(),
        ));
    }
    if rd.m2 != m2 {
        return Err(Error::BoundaryMismatch(format!(
            "masses differ: {} and {}",
            rd.m2, m2
        )));
    }
    Ok(())
}

/// Glues relative data of the two sides of `spec` into data of the glued graph.
pub fn glue_data(
    spec: &GluingSpec,
    left: &RelativeGaussianData,
    right: &RelativeGaussianData,
) -> Result<GluedData> {
    let m2 = left.m2;
    check_side(left, &spec.left, &spec.left_boundary, m2)?;
    check_side(right, &spec.right, &spec.right_boundary, m2)?;
    let glued = glue(spec)?;
    let ny = left.boundary.len();
    let perm: Vec<usize> = glued
        .right_partners
        .iter()
        .map(|&w| position(&right.boundary, w))
        .collect();
    let right_dn = Mat::from_fn(ny, ny, |a, b| right.dn[(perm[a], perm[b])]);
    let total_dn = symmetrize(&(&left.dn + right_dn - &left.boundary_kinetic));
    let n = glued.graph.n();
    let mut gbar = Mat::zeros(n, n);
    let mut ebar = Mat::zeros(n, ny);
    for (k, &yv) in spec.left_boundary.vertices().iter().enumerate() {
        ebar[(glued.left_map[yv], k)] = 1.0;
    }
    let sides = [
        (left, &glued.left_map, None),
        (right, &glued.right_map, Some(&perm)),
    ];
    for (rd, map, cols) in sides {
        for (a, &va) in rd.bulk.iter().enumerate() {
            let ga = map[va];
            for (b, &vb) in rd.bulk.iter().enumerate() {
                gbar[(ga, map[vb])] = rd.propagator[(a, b)];
            }
            for k in 0..ny {
                let c = cols.map_or(k, |p| p[k]);
                ebar[(ga, k)] = rd.ext[(a, c)];
            }
        }
    }
    let f = factorize(&total_dn)?;
    let correction = &ebar * f.solve(&ebar.transpose());
    let cut = symmetrize(&correction);
    let propagator = symmetrize(&(&gbar + &correction));
    let log_det = left.log_det + right.log_det + f.logdet()?;
    Ok(GluedData {
        glued,
        total_dn,
        propagator,
        uncut: gbar,
        cut,
        det: left.det * right.det * f.det(),
        log_det,
    })
}

/// Computes the relative data of both sides and glues them.
pub fn glue_gaussian(spec: &GluingSpec, m2: f64) -> Result<GluedData> {
    let left = relative_data(&spec.left, &spec.left_boundary, m2)?;
    let right = relative_data(&spec.right, &spec.right_boundary, m2)?;
    glue_data(spec, &left, &right)
}

/// Gluing residuals against direct factorization of the glued kinetic operator.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GluingReport {
    pub propagator: IdentityReport,
    pub determinant: IdentityReport,
}

pub fn gluing_check(spec: &GluingSpec, m2: f64) -> Result<GluingReport> {
    let gd = glue_gaussian(spec, m2)?;
    let direct = factorize(&kinetic(&gd.glued.graph, m2)?)?;
    Ok(GluingReport {
        propagator: IdentityReport::matrices(&gd.propagator, &direct.inverse()),
        determinant: IdentityReport::new(gd.log_det.exp(), direct.det()),
    })
}

/// A cobordism with its Gaussian data relative to `Y_in ∪ Y_out`.
#[derive(Debug, Clone)]
pub struct CobordismData {
    pub cobordism: Cobordism,
    pub data: RelativeGaussianData,
}

impl CobordismData {
    pub fn new(cobordism: Cobordism, m2: f64) -> Result<CobordismData> {
        let data = relative_data(&cobordism.graph, &cobordism.boundary(), m2)?;
        Ok(CobordismData { cobordism, data })
    }

    /// Positions in `data.boundary` of the incoming boundary vertices.
    pub fn input_positions(&self) -> Vec<usize> {
        self.cobordism
            .input
            .vertices()
            .iter()
            .map(|&v| position(&self.data.boundary, v))
            .collect()
    }

    /// Positions in `data.boundary` of the outgoing boundary vertices.
    pub fn output_positions(&self) -> Vec<usize> {
        self.cobordism
            .output
            .vertices()
            .iter()
            .map(|&v| position(&self.data.boundary, v))
            .collect()
    }
}

/// An affine expression of a composite field value in terms of outer boundary values
/// (columns of the composite boundary) and interface values.
struct Pieces {
    direct: Mat,
    interface: Mat,
}

/// Composes `left: Y₁ → Y₂` with `right: Y₂ → Y₃` along `identification` (left out id,
/// right in id), producing the data of the composite relative to `Y₁ ∪ Y₃`.
pub fn compose(
    left: &CobordismData,
    right: &CobordismData,
    identification: &[(String, String)],
) -> Result<CobordismData> {
    if left.data.m2 != right.data.m2 {
        return Err(Error::BoundaryMismatch("masses differ".into()));
    }
    let m2 = left.data.m2;
    let (cob, glued) = compose_cobordisms(&left.cobordism, &right.cobordism, identification)?;
    let g = &cob.graph;
    let outer = cob.boundary();
    let (bulk, boundary): (Vec<usize>, Vec<usize>) = (
        (0..g.n()).filter(|&v| !outer.contains(v)).collect(),
        outer.vertices().to_vec(),
    );
    let (nb, no) = (bulk.len(), boundary.len());
    let y2_left = left.cobordism.output.vertices();
    let ni = y2_left.len();
    let l2 = left.output_positions();
    let r2: Vec<usize> = glued
        .right_partners
        .iter()
        .map(|&w| position(&right.data.boundary, w))
        .collect();
    let k_y2 = kinetic(&left.cobordism.output.subgraph(&left.cobordism.graph), m2)?;
    let (ld, rd) = (&left.data, &right.data);
    let dn_int = symmetrize(&(select(&ld.dn, &l2, &l2) + select(&rd.dn, &r2, &r2) - k_y2));
    let f = factorize(&dn_int)?;

    // Outer boundary columns from each side: (side boundary position, composite column).
    let outer_cols = |d: &CobordismData, map: &[usize], skip: &[usize]| -> Vec<(usize, usize)> {
        d.data
            .boundary
            .iter()
            .enumerate()
            .filter(|(p, _)| !skip.contains(p))
            .map(|(p, &v)| (p, position(&boundary, map[v])))
            .collect()
    };
    let l_outer = outer_cols(left, &glued.left_map, &l2);
    let r_outer = outer_cols(right, &glued.right_map, &r2);

    // Boundary coupling C (outer × interface) and the outer-outer DN block.
    let mut coupling = Mat::zeros(no, ni);
    let mut dn = Mat::zeros(no, no);
    for (d, cols, inter) in [(ld, &l_outer, &l2), (rd, &r_outer, &r2)] {
        for &(p, c) in cols.iter() {
            for &(q, e) in cols.iter() {
                dn[(c, e)] += d.dn[(p, q)];
            }
            for (k, &q) in inter.iter().enumerate() {
                coupling[(c, k)] += d.dn[(p, q)];
            }
        }
    }
    let dn_int_inv_ct = f.solve(&coupling.transpose());
    let dn = symmetrize(&(dn - &coupling * &dn_int_inv_ct));
    let interface_ext = -dn_int_inv_ct;

    // Composite bulk values as affine expressions.
    let mut pieces = Pieces {
        direct: Mat::zeros(nb, no),
        interface: Mat::zeros(nb, ni),
    };
    let mut gbar = Mat::zeros(nb, nb);
    for (k, &yv) in y2_left.iter().enumerate() {
        pieces.interface[(position(&bulk, glued.left_map[yv]), k)] = 1.0;
    }
    for (d, map, cols, inter) in [
        (ld, &glued.left_map, &l_outer, &l2),
        (rd, &glued.right_map, &r_outer, &r2),
    ] {
        for (a, &va) in d.bulk.iter().enumerate() {
            let row = position(&bulk, map[va]);
            for (b, &vb) in d.bulk.iter().enumerate() {
                gbar[(row, position(&bulk, map[vb]))] = d.propagator[(a, b)];
            }
            for &(p, c) in cols.iter() {
                pieces.direct[(row, c)] = d.ext[(a, p)];
            }
            for (k, &q) in inter.iter().enumerate() {
                pieces.interface[(row, k)] = d.ext[(a, q)];
            }
        }
    }
    let ext = &pieces.direct + &pieces.interface * &interface_ext;
    let propagator =
        symmetrize(&(gbar + &pieces.interface * f.solve(&pieces.interface.transpose())));
    let log_det = ld.log_det + rd.log_det + f.logdet()?;
    let data = RelativeGaussianData {
        m2,
        bulk,
        boundary,
        propagator,
        det: ld.det * rd.det * f.det(),
        log_det,
        dn,
        ext,
        boundary_kinetic: kinetic(&outer.subgraph(g), m2)?,
        empty_boundary: no == 0,
    };
    Ok(CobordismData {
        cobordism: cob,
        data,
    })
}

/// Self-gluing data: the DN operator of the glued pair computed directly and by folding.
#[derive(Debug, Clone)]
pub struct SelfGluingReport {
    pub glued: SelfGlued,
    /// `DN_{Ỹ,X̃}` computed on the glued graph.
    pub direct_dn: Mat,
    /// `Pᵀ (DN_{Y₁∪Y₂,X} - ½K_{Y₁} ⊕ ½K_{Y₂}) P` with `P φ = (φ, φ)`.
    pub folded_dn: Mat,
    pub residual: f64,
}

fn union_marking(g: &Graph, y1: &BoundaryMarking, y2: &BoundaryMarking) -> BoundaryMarking {
    let mask: Vec<bool> = (0..g.n())
        .map(|v| y1.contains(v) || y2.contains(v))
        .collect();
    let mut edges: Vec<usize> = y1.edges().iter().chain(y2.edges()).copied().collect();
    edges.sort_unstable();
    BoundaryMarking::from_parts(mask, edges)
}

/// Identifies `y1` with `y2` along `f` and compares the two DN computations on diagonal fields.
pub fn self_glue_dn(
    g: &Graph,
    y1: &BoundaryMarking,
    y2: &BoundaryMarking,
    f: &[(String, String)],
    m2: f64,
) -> Result<SelfGluingReport> {
    let glued = self_glue(g, y1, y2, f)?;
    let direct = relative_data(&glued.graph, &glued.boundary, m2)?;
    let folded_dn = folded_form(g, y1, y2, &glued, m2)?.1;
    let residual = relative_deviation(&folded_dn, &direct.dn);
    Ok(SelfGluingReport {
        glued,
        direct_dn: direct.dn,
        folded_dn,
        residual,
    })
}

fn folded_form(
    g: &Graph,
    y1: &BoundaryMarking,
    y2: &BoundaryMarking,
    glued: &SelfGlued,
    m2: f64,
) -> Result<(RelativeGaussianData, Mat)> {
    let union = union_marking(g, y1, y2);
    let rd = relative_data(g, &union, m2)?;
    let q = rd.exponent_matrix();
    let n = y1.len();
    let mut p = Mat::zeros(rd.boundary.len(), n);
    for (k, &v) in y1.vertices().iter().enumerate() {
        p[(position(&rd.boundary, v), k)] = 1.0;
        p[(position(&rd.boundary, glued.partners[k]), k)] = 1.0;
    }
    let folded = symmetrize(&(p.transpose() * q * &p));
    Ok((rd, folded))
}

/// Trace formula: `det(K_X̃)^{-1/2}` against the Gaussian integral over the identified
/// boundary field of the relative partition function on diagonal fields.
pub fn trace_formula_check(
    g: &Graph,
    y1: &BoundaryMarking,
    y2: &BoundaryMarking,
    f: &[(String, String)],
    m2: f64,
    hbar: f64,
) -> Result<IdentityReport> {
    let glued = self_glue(g, y1, y2, f)?;
    let lhs = (-0.5 * factorize(&kinetic(&glued.graph, m2)?)?.logdet()?).exp();
    let (rd, folded) = folded_form(g, y1, y2, &glued, m2)?;
    let n = folded.nrows() as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    let log_integral = -0.5 * n * (two_pi * hbar).ln() + 0.5 * n * two_pi.ln()
        - 0.5 * factorize(&(folded / hbar))?.logdet()?;
    let rhs = (-0.5 * rd.log_det + log_integral).exp();
    Ok(IdentityReport::new(lhs, rhs))
}
