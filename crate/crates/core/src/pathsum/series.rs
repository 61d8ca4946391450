//! Weighted path series for the propagator, log-determinant and relative boundary data.
//!
//! Resummed series run over ordinary paths with weight `∏ 1/(m² + val)` and are computed by
//! powers of `Λ⁻¹A`. Their tails are certified through the symmetric similarity
//! `Λ^{1/2}(Λ⁻¹A)Λ^{−1/2}`, whose norm equals the spectral radius.

use crate::error::Result;
use crate::graph::{adjacency, block_indices, check_mass, laplacian, BoundaryMarking, Graph};
use crate::linalg::{select, spectral_radius_upper, Mat};

use super::Path;

/// Path weights at a fixed mass, optionally relative to a boundary subgraph.
#[derive(Debug, Clone)]
pub struct Weights {
    pub m2: f64,
    /// `m² + val(v)` for every vertex, with valence counted in the whole graph.
    pub lambda: Vec<f64>,
    boundary: Vec<bool>,
}

impl Weights {
    pub fn new(g: &Graph, m2: f64) -> Weights {
        Weights::relative(g, &BoundaryMarking::empty(g), m2)
    }

    pub fn relative(g: &Graph, y: &BoundaryMarking, m2: f64) -> Weights {
        let lambda = (0..g.n()).map(|v| m2 + g.degree(v) as f64).collect();
        Weights {
            m2,
            lambda,
            boundary: y.mask().to_vec(),
        }
    }

    /// `(m^{−2})^l (−1)^h` for a hesitant path.
    pub fn hesitant(&self, p: &Path) -> f64 {
        let s = self.m2.powi(-(p.len() as i32));
        if p.hesitations().is_multiple_of(2) {
            s
        } else {
            -s
        }
    }

    /// Product of `1/(m² + val)` over all vertices of the path.
    pub fn path(&self, p: &Path) -> f64 {
        p.vertices.iter().map(|&v| 1.0 / self.lambda[v]).product()
    }

    /// Weight of a closed path with the repeated endpoint counted once.
    pub fn closed(&self, p: &Path) -> f64 {
        self.path(p) * self.lambda[p.start()]
    }

    /// Product over the vertices of the path that lie outside the boundary.
    pub fn relative_path(&self, p: &Path) -> f64 {
        p.vertices
            .iter()
            .filter(|&&v| !self.boundary[v])
            .map(|&v| 1.0 / self.lambda[v])
            .product()
    }

    /// Relative weight of a closed path with the repeated endpoint counted once.
    pub fn relative_closed(&self, p: &Path) -> f64 {
        let end = if self.boundary[p.start()] {
            1.0
        } else {
            self.lambda[p.start()]
        };
        self.relative_path(p) * end
    }
}

/// Whether a truncated series is known to converge, and how far it was taken.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub order: usize,
    /// Certified bound on the spectral radius of the series ratio.
    pub ratio_bound: f64,
    pub converges: bool,
    /// Certified bound on the omitted tail, infinite when convergence is not certified.
    pub tail_bound: f64,
}

/// A truncated matrix series together with its stopping data.
#[derive(Debug, Clone)]
pub struct SeriesResult {
    pub value: Mat,
    pub report: ConvergenceReport,
}

/// Hesitant-path series `m^{−2} Σ_{k≤max_len} (−m^{−2}Δ)^k`.
pub fn h_series_green(g: &Graph, m2: f64, max_len: usize) -> Result<SeriesResult> {
    check_mass(m2)?;
    let n = g.n();
    let step = laplacian(g).map(|x| -(x as f64) / m2);
    let ratio_bound = spectral_radius_upper(&laplacian(g).map(|x| x.abs() as f64))? / m2;
    let mut term = Mat::identity(n, n) / m2;
    let mut sum = term.clone();
    for _ in 0..max_len {
        term = &step * term;
        sum += &term;
    }
    let converges = ratio_bound < 1.0;
    let tail_bound = if converges {
        ratio_bound.powi(max_len as i32 + 1) / (1.0 - ratio_bound) / m2
    } else {
        f64::INFINITY
    };
    Ok(SeriesResult {
        value: sum,
        report: ConvergenceReport {
            order: max_len,
            ratio_bound,
            converges,
            tail_bound,
        },
    })
}

/// Hesitant-path series `−Σ_{k=1}^{max_len} (−m^{−2})^k tr(Δ^k)/k` for `log det(K/m²)`.
pub fn h_series_log_det(g: &Graph, m2: f64, max_len: usize) -> Result<f64> {
    check_mass(m2)?;
    let n = g.n();
    let step = laplacian(g).map(|x| -(x as f64) / m2);
    let mut power = Mat::identity(n, n);
    let mut sum = 0.0;
    for k in 1..=max_len {
        power = &step * power;
        sum -= power.trace() / k as f64;
    }
    Ok(sum)
}

const MAX_ORDER: usize = 1_000_000;

/// `Λ⁻¹` and `Λ⁻¹A` on a vertex subset, with `Λ` taken from valences in the whole graph.
fn normalized(g: &Graph, rows: &[usize], m2: f64) -> (Vec<f64>, Mat) {
    let a = adjacency(g).map(|x| x as f64);
    let inv: Vec<f64> = rows
        .iter()
        .map(|&v| 1.0 / (m2 + g.degree(v) as f64))
        .collect();
    let mut m = select(&a, rows, rows);
    for (i, s) in inv.iter().enumerate() {
        m.row_mut(i).scale_mut(*s);
    }
    (inv, m)
}

/// Resummed series `Σ_k (Λ⁻¹A)^k Λ⁻¹` on the given vertices, stopped when the entrywise tail
/// bound `ρ^{K+1}/(1−ρ)·max Λ⁻¹` falls below `tolerance`.
fn resummed(inv: &[f64], m: &Mat, tolerance: f64) -> Result<SeriesResult> {
    let n = inv.len();
    let rho = spectral_radius_upper(m)?;
    let scale = inv.iter().copied().fold(0.0, f64::max);
    let lambda_inv = Mat::from_diagonal(&crate::linalg::Vector::from_vec(inv.to_vec()));
    let mut term = lambda_inv.clone();
    let mut sum = term.clone();
    let tail = |k: usize| {
        if rho == 0.0 {
            0.0
        } else {
            rho.powi(k as i32 + 1) / (1.0 - rho) * scale
        }
    };
    let converges = rho < 1.0;
    let mut order = 0;
    while converges && tail(order) >= tolerance && order < MAX_ORDER && n > 0 {
        term = m * term;
        sum += &term;
        order += 1;
    }
    let tail_bound = if converges {
        tail(order)
    } else {
        f64::INFINITY
    };
    Ok(SeriesResult {
        value: sum,
        report: ConvergenceReport {
            order,
            ratio_bound: rho,
            converges,
            tail_bound,
        },
    })
}

/// Resummed path series for the propagator.
pub fn series_green(g: &Graph, m2: f64, tolerance: f64) -> Result<SeriesResult> {
    check_mass(m2)?;
    let all: Vec<usize> = (0..g.n()).collect();
    let (inv, m) = normalized(g, &all, m2);
    resummed(&inv, &m, tolerance)
}

/// Partial sums of the resummed propagator series at every order up to `max_len`.
pub fn series_green_partials(g: &Graph, m2: f64, max_len: usize) -> Result<Vec<Mat>> {
    check_mass(m2)?;
    let all: Vec<usize> = (0..g.n()).collect();
    let (inv, m) = normalized(g, &all, m2);
    let mut term = Mat::from_diagonal(&crate::linalg::Vector::from_vec(inv));
    let mut sum = term.clone();
    let mut out = vec![sum.clone()];
    for _ in 0..max_len {
        term = &m * term;
        sum += &term;
        out.push(sum.clone());
    }
    Ok(out)
}

/// Resummed log-determinant: `log det K` together with the per-order contributions
/// `tr((Λ⁻¹A)^k)/k` to `−log det K̃`.
#[derive(Debug, Clone)]
pub struct LogDetSeries {
    /// `log det K̃ = −Σ_k tr((Λ⁻¹A)^k)/k`, truncated.
    pub normalized: f64,
    /// `log det K`, adding `Σ_v log(m² + val(v))`.
    pub log_det: f64,
    /// `tr((Λ⁻¹A)^k)/k` for `k = 1..=order`.
    pub per_order: Vec<f64>,
    pub report: ConvergenceReport,
}

fn trace_log_series(inv: &[f64], m: &Mat, tolerance: f64) -> Result<LogDetSeries> {
    let n = inv.len();
    let rho = spectral_radius_upper(m)?;
    let tail = |k: usize| {
        if rho == 0.0 {
            0.0
        } else {
            n as f64 * rho.powi(k as i32 + 1) / ((k + 1) as f64 * (1.0 - rho))
        }
    };
    let converges = rho < 1.0;
    let mut per_order = Vec::new();
    let mut power = Mat::identity(n, n);
    while converges && tail(per_order.len()) >= tolerance && per_order.len() < MAX_ORDER {
        power = m * power;
        per_order.push(power.trace() / (per_order.len() + 1) as f64);
    }
    let order = per_order.len();
    let normalized = -per_order.iter().sum::<f64>();
    let log_lambda: f64 = inv.iter().map(|x| -x.ln()).sum();
    Ok(LogDetSeries {
        normalized,
        log_det: normalized + log_lambda,
        per_order,
        report: ConvergenceReport {
            order,
            ratio_bound: rho,
            converges,
            tail_bound: if converges {
                tail(order)
            } else {
                f64::INFINITY
            },
        },
    })
}

/// Resummed cycle series for the log-determinant of the kinetic operator.
pub fn series_log_det(g: &Graph, m2: f64, tolerance: f64) -> Result<LogDetSeries> {
    check_mass(m2)?;
    let all: Vec<usize> = (0..g.n()).collect();
    let (inv, m) = normalized(g, &all, m2);
    trace_log_series(&inv, &m, tolerance)
}

/// Relative boundary data from path sums over the bulk.
#[derive(Debug, Clone)]
pub struct RelativeSeries {
    /// Bulk vertex indices, in order.
    pub bulk: Vec<usize>,
    /// Boundary vertex indices, in order.
    pub boundary: Vec<usize>,
    pub propagator: Mat,
    /// Rows indexed by bulk vertices, columns by boundary vertices.
    pub ext: Mat,
    pub dn: Mat,
    /// `Σ_{P″} w_{X,Y}` on the boundary, the part of DN coming from boundary-to-boundary paths.
    pub crossing: Mat,
    pub log_det: LogDetSeries,
    /// Largest certified entrywise tail over propagator, extension and DN.
    pub tail_bound: f64,
}

/// Propagator, extension operator, DN operator and log-determinant relative to `y`, from path
/// sums over paths whose interior avoids `y`, weighted with valences in the whole graph.
pub fn series_relative(
    g: &Graph,
    y: &BoundaryMarking,
    m2: f64,
    tolerance: f64,
) -> Result<RelativeSeries> {
    check_mass(m2)?;
    let (bulk, boundary) = block_indices(g, y);
    let a = adjacency(g).map(|x| x as f64);
    let a_bulk_y = select(&a, &bulk, &boundary);
    let a_yy = select(&a, &boundary, &boundary);
    let (inv, m) = normalized(g, &bulk, m2);
    let col_max = (0..boundary.len())
        .map(|j| a_bulk_y.column(j).sum())
        .fold(0.0, f64::max);
    let amplify = col_max.max(1.0).powi(2);
    let green = resummed(&inv, &m, tolerance / amplify)?;
    let ext = &green.value * &a_bulk_y;
    let crossing = &a_yy + a_bulk_y.transpose() * &ext;
    let mut dn = -&crossing;
    for (i, &v) in boundary.iter().enumerate() {
        dn[(i, i)] += m2 + g.degree(v) as f64;
    }
    let log_det = trace_log_series(&inv, &m, tolerance)?;
    let tail_bound = green.report.tail_bound * amplify;
    Ok(RelativeSeries {
        bulk,
        boundary,
        propagator: green.value,
        ext,
        dn,
        crossing,
        log_det,
        tail_bound,
    })
}

/// The common valence of all bulk vertices, when the pair `(X, Y)` is quasi-regular.
pub fn quasi_regular_degree(g: &Graph, y: &BoundaryMarking) -> Option<usize> {
    let mut degrees = (0..g.n()).filter(|&v| !y.contains(v)).map(|v| g.degree(v));
    let first = degrees.next()?;
    degrees.all(|d| d == first).then_some(first)
}
