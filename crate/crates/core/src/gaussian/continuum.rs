//! Lattice-to-continuum sweeps for line and circle graphs.
//!
//! A segment or circle of length `L` is approximated by `N = L/ε` vertices at positions
//! `x = iε`, `i = 1..N`. The mass is rescaled `m → εm` and the kinetic operator `K → K/ε`, so
//! propagators scale as `εG` and DN operators as `DN/ε`. Determinants are normalized as
//! `ε^{|E|} det(K/ε)`, which for line graphs tends to half the zeta-regularized determinant and
//! for circle graphs to the zeta-regularized determinant itself.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{gaussian_data, relative_data};
use crate::graph::{BoundaryMarking, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Line,
    Circle,
}

/// Boundary condition at the two ends of a line; `Closed` for circles.
/// `NeumannDirichlet` clamps the right end `x = L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryCondition {
    #[serde(rename = "DD")]
    DirichletDirichlet,
    #[serde(rename = "NN")]
    NeumannNeumann,
    #[serde(rename = "DN")]
    NeumannDirichlet,
    #[serde(rename = "closed")]
    Closed,
}

impl FromStr for Shape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Shape> {
        match s {
            "line" => Ok(Shape::Line),
            "circle" => Ok(Shape::Circle),
            _ => Err(Error::UnsupportedShape(s.to_string())),
        }
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<BoundaryCondition> {
        match s {
            "DD" => Ok(BoundaryCondition::DirichletDirichlet),
            "NN" => Ok(BoundaryCondition::NeumannNeumann),
            "DN" => Ok(BoundaryCondition::NeumannDirichlet),
            "closed" => Ok(BoundaryCondition::Closed),
            _ => Err(Error::UnsupportedShape(format!("boundary condition `{s}`"))),
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryCondition::DirichletDirichlet => "DD",
            BoundaryCondition::NeumannNeumann => "NN",
            BoundaryCondition::NeumannDirichlet => "DN",
            BoundaryCondition::Closed => "closed",
        })
    }
}

/// Geometry and probe points of a sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepConfig {
    pub shape: Shape,
    pub bc: BoundaryCondition,
    pub length: f64,
    pub mass: f64,
    /// Probe points for the propagator, snapped to the nearest vertex.
    pub x: f64,
    pub y: f64,
}

impl SweepConfig {
    pub fn new(shape: Shape, bc: BoundaryCondition, length: f64, mass: f64) -> SweepConfig {
        SweepConfig {
            shape,
            bc,
            length,
            mass,
            x: 0.5 * length,
            y: 0.8 * length,
        }
    }

    fn validate(&self) -> Result<()> {
        match (self.shape, self.bc) {
            (Shape::Line, BoundaryCondition::Closed) => Err(Error::UnsupportedShape(
                "line graphs need DD, NN or DN".into(),
            )),
            (Shape::Circle, bc) if bc != BoundaryCondition::Closed => Err(Error::UnsupportedShape(
                format!("circle graphs take no boundary condition {bc}"),
            )),
            _ if !(self.length > 0.0 && self.mass > 0.0) => Err(Error::InvalidArgument(
                "length and mass must be positive".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Continuum propagator at `(x, y)`.
    pub fn target_propagator(&self, x: f64, y: f64) -> f64 {
        let (m, l) = (self.mass, self.length);
        let d = (x - y).abs();
        match self.bc {
            BoundaryCondition::DirichletDirichlet => {
                ((m * (l - d)).cosh() - (m * (l - x - y)).cosh()) / (2.0 * m * (m * l).sinh())
            }
            BoundaryCondition::NeumannNeumann => {
                ((m * (l - d)).cosh() + (m * (l - x - y)).cosh()) / (2.0 * m * (m * l).sinh())
            }
            BoundaryCondition::NeumannDirichlet => {
                ((m * (l - d)).sinh() + (m * (l - x - y)).sinh()) / (2.0 * m * (m * l).cosh())
            }
            BoundaryCondition::Closed => {
                (m * (l / 2.0 - d)).cosh() / (2.0 * m * (m * l / 2.0).sinh())
            }
        }
    }

    /// Continuum limit of the normalized lattice determinant.
    pub fn target_det(&self) -> f64 {
        let (m, l) = (self.mass, self.length);
        match self.bc {
            BoundaryCondition::DirichletDirichlet => (m * l).sinh() / m,
            BoundaryCondition::NeumannNeumann => m * (m * l).sinh(),
            BoundaryCondition::NeumannDirichlet => (m * l).cosh(),
            BoundaryCondition::Closed => 4.0 * (m * l / 2.0).sinh().powi(2),
        }
    }

    /// Zeta-regularized determinant of the continuum operator.
    pub fn zeta_det(&self) -> f64 {
        match self.bc {
            BoundaryCondition::Closed => self.target_det(),
            _ => 2.0 * self.target_det(),
        }
    }
}

/// One scaled lattice quantity against its continuum value.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub vertices: usize,
    pub quantity: String,
    pub value: f64,
    pub target: f64,
    pub relative_error: f64,
    /// Set for single-vertex lattices and for quantities the lattice cannot represent.
    pub degenerate: bool,
}

fn row(eps: f64, n: usize, quantity: &str, value: f64, target: f64) -> SweepRow {
    SweepRow {
        epsilon: eps,
        vertices: n,
        quantity: quantity.to_string(),
        value,
        target,
        relative_error: (value - target).abs() / target.abs(),
        degenerate: n == 1 || !value.is_finite(),
    }
}

fn vertex_count(length: f64, eps: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "spacing must be positive, got {eps}"
        )));
    }
    let n = (length / eps).round();
    if n < 1.0 || (n * eps - length).abs() > 1e-9 * length {
        return Err(Error::InvalidArgument(format!(
            "spacing {eps} does not divide length {length}"
        )));
    }
    Ok(n as usize)
}

/// Scaled lattice quantities for one spacing.
pub fn sweep_point(cfg: &SweepConfig, eps: f64) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let n = vertex_count(cfg.length, eps)?;
    let m2 = (eps * cfg.mass).powi(2);
    let snap = |p: f64| ((p / eps).round() as usize).clamp(1, n);
    let (i, j) = (snap(cfg.x), snap(cfg.y));
    let (xi, yj) = (i as f64 * eps, j as f64 * eps);
    let g_target = cfg.target_propagator(xi, yj);
    let det_target = cfg.target_det();
    let nan = f64::NAN;
    let mut rows = Vec::new();
    match cfg.bc {
        BoundaryCondition::NeumannNeumann | BoundaryCondition::Closed => {
            let (g, edges) = match cfg.shape {
                Shape::Line => (Graph::line(n), n - 1),
                Shape::Circle => (Graph::circle(n), n),
            };
            let gd = gaussian_data(&g, m2)?;
            rows.push(row(
                eps,
                n,
                "G",
                eps * gd.propagator[(i - 1, j - 1)],
                g_target,
            ));
            let det = (gd.log_det + (edges as f64 - n as f64) * eps.ln()).exp();
            rows.push(row(eps, n, "det", det, det_target));
        }
        BoundaryCondition::DirichletDirichlet => {
            if n < 3 {
                rows.push(row(eps, n, "degenerate", nan, nan));
                return Ok(rows);
            }
            let g = Graph::line(n);
            let y = BoundaryMarking::vertices_only(&g, [g.id(0), g.id(n - 1)])?;
            let r = relative_data(&g, &y, m2)?;
            let interior = |k: usize| (2..n).contains(&k);
            let gv = if interior(i) && interior(j) {
                eps * r.propagator[(i - 2, j - 2)]
            } else {
                nan
            };
            rows.push(row(eps, n, "G", gv, g_target));
            let (m, l) = (cfg.mass, cfg.length);
            let scale = m / (m * l).sinh();
            rows.push(row(
                eps,
                n,
                "DN11",
                r.dn[(0, 0)] / eps,
                scale * (m * l).cosh(),
            ));
            rows.push(row(eps, n, "DN12", r.dn[(0, 1)] / eps, -scale));
            let det = (r.log_det + eps.ln()).exp();
            rows.push(row(eps, n, "det", det, det_target));
        }
        BoundaryCondition::NeumannDirichlet => {
            if n < 2 {
                rows.push(row(eps, n, "degenerate", nan, nan));
                return Ok(rows);
            }
            let g = Graph::line(n);
            let y = BoundaryMarking::vertices_only(&g, [g.id(n - 1)])?;
            let r = relative_data(&g, &y, m2)?;
            let gv = if i < n && j < n {
                eps * r.propagator[(i - 1, j - 1)]
            } else {
                nan
            };
            rows.push(row(eps, n, "G", gv, g_target));
            let (m, l) = (cfg.mass, cfg.length);
            rows.push(row(eps, n, "DN", r.dn[(0, 0)] / eps, m * (m * l).tanh()));
            rows.push(row(eps, n, "det", r.log_det.exp(), det_target));
        }
    }
    Ok(rows)
}

/// Scaled lattice quantities for every spacing, in the given order.
pub fn sweep(cfg: &SweepConfig, epsilons: &[f64]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &eps in epsilons {
        rows.extend(sweep_point(cfg, eps)?);
    }
    Ok(rows)
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Convergence slope of the relative error in `ε` for each quantity, in first-seen order.
/// Degenerate rows are skipped.
pub fn convergence_slopes(rows: &[SweepRow]) -> Vec<(String, f64)> {
    let mut names: Vec<String> = Vec::new();
    for r in rows {
        if !r.degenerate && !names.contains(&r.quantity) {
            names.push(r.quantity.clone());
        }
    }
    names
        .into_iter()
        .map(|q| {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.quantity == q && !r.degenerate)
                .map(|r| (r.epsilon, r.relative_error))
                .collect();
            let slope = fit_slope(&pts);
            (q, slope)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

    #[test]
    fn dirichlet_dn_error_below_two_epsilon() {
        let cfg = SweepConfig::new(Shape::Line, BoundaryCondition::DirichletDirichlet, 1.0, 1.0);
        for r in sweep_point(&cfg, 0.01).unwrap() {
            if r.quantity.starts_with("DN") {
                assert!(r.relative_error < 0.02, "{r:?}");
            }
        }
    }

    #[test]
    fn errors_shrink_with_spacing() {
        for (shape, bc) in [
            (Shape::Line, BoundaryCondition::DirichletDirichlet),
            (Shape::Line, BoundaryCondition::NeumannNeumann),
            (Shape::Line, BoundaryCondition::NeumannDirichlet),
            (Shape::Circle, BoundaryCondition::Closed),
        ] {
            let cfg = SweepConfig::new(shape, bc, 1.0, 1.0);
            for (q, slope) in convergence_slopes(&sweep(&cfg, &EPS).unwrap()) {
                assert!(slope > 0.8, "{bc} {q}: slope {slope}");
            }
        }
    }

    #[test]
    fn single_vertex_is_flagged() {
        let cfg = SweepConfig::new(Shape::Circle, BoundaryCondition::Closed, 1.0, 1.0);
        assert!(sweep_point(&cfg, 1.0).unwrap().iter().all(|r| r.degenerate));
        let cfg = SweepConfig::new(Shape::Line, BoundaryCondition::DirichletDirichlet, 1.0, 1.0);
        let rows = sweep_point(&cfg, 1.0).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].degenerate);
    }

    #[test]
    fn unsupported_combinations() {
        let cfg = SweepConfig::new(Shape::Line, BoundaryCondition::Closed, 1.0, 1.0);
        assert!(matches!(
            sweep_point(&cfg, 0.1),
            Err(Error::UnsupportedShape(_))
        ));
        let cfg = SweepConfig::new(Shape::Circle, BoundaryCondition::NeumannNeumann, 1.0, 1.0);
        assert!(matches!(
            sweep_point(&cfg, 0.1),
            Err(Error::UnsupportedShape(_))
        ));
        assert!("torus".parse::<Shape>().is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = EPS.iter().map(|&e| (e, 3.0 * e * e)).collect();
        assert!((fit_slope(&pts) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zeta_factor_of_two() {
        let line = SweepConfig::new(Shape::Line, BoundaryCondition::DirichletDirichlet, 1.0, 1.0);
        assert!((line.zeta_det() - 2.0 * 1f64.sinh()).abs() < 1e-15);
        let circle = SweepConfig::new(Shape::Circle, BoundaryCondition::Closed, 1.0, 1.0);
        assert_eq!(circle.zeta_det(), circle.target_det());
    }
}
