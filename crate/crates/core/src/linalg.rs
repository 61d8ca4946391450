//! Dense symmetric-matrix kernel: factorization, solve, inverse, determinants,
//! matrix exponential and a certified spectral-radius bound.
//!
//! Factorizations are delegated to `nalgebra`: Cholesky for positive-definite
//! input, full-pivoting LU otherwise.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, FullPivLU, SymmetricEigen};

use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Relative pivot threshold below which a matrix is reported singular.
pub const PIVOT_TOL: f64 = 1e-12;
const SYM_TOL: f64 = 1e-12;
const LOG_SPACE_DIM: usize = 20;

fn max_abs(a: &Mat) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Checks squareness and symmetry within a relative tolerance.
pub fn check_symmetric(a: &Mat) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let tol = SYM_TOL * max_abs(a).max(1.0);
    for i in 0..a.nrows() {
        for j in 0..i {
            if (a[(i, j)] - a[(j, i)]).abs() > tol {
                return Err(Error::NotSymmetric);
            }
        }
    }
    Ok(())
}

/// The block of `a` with the given rows and columns, in the given order.
pub fn select(a: &Mat, rows: &[usize], cols: &[usize]) -> Mat {
    Mat::from_fn(rows.len(), cols.len(), |i, j| a[(rows[i], cols[j])])
}

/// Largest entrywise deviation of `a` from `b`, relative to the largest entry of `b`.
pub fn relative_deviation(a: &Mat, b: &Mat) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    if b.is_empty() {
        return 0.0;
    }
    (a - b).amax() / b.amax().max(f64::MIN_POSITIVE)
}

/// Returns `(a + aᵀ) / 2`.
pub fn symmetrize(a: &Mat) -> Mat {
    (a + a.transpose()) * 0.5
}

enum Kind {
    Empty,
    Cholesky(Cholesky<f64, Dyn>),
    Lu(FullPivLU<f64, Dyn, Dyn>),
}

/// A factorized symmetric matrix.
pub struct Factorization {
    kind: Kind,
    n: usize,
    log_abs_det: f64,
    sign: f64,
}

/// Factorizes a symmetric matrix, preferring Cholesky.
pub fn factorize(a: &Mat) -> Result<Factorization> {
    check_symmetric(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(Factorization {
            kind: Kind::Empty,
            n,
            log_abs_det: 0.0,
            sign: 1.0,
        });
    }
    let scale = max_abs(a).max(f64::MIN_POSITIVE);
    if let Some(ch) = Cholesky::new(a.clone()) {
        let l = ch.l_dirty();
        let mut log_abs_det = 0.0;
        let mut min_pivot = f64::INFINITY;
        for i in 0..n {
            let p = l[(i, i)] * l[(i, i)];
            min_pivot = min_pivot.min(p);
            log_abs_det += p.ln();
        }
        if min_pivot < PIVOT_TOL * scale {
            return Err(Error::SingularMatrix { pivot: min_pivot });
        }
        return Ok(Factorization {
            kind: Kind::Cholesky(ch),
            n,
            log_abs_det,
            sign: 1.0,
        });
    }
    let lu = FullPivLU::new(a.clone());
    let u = lu.u();
    let mut log_abs_det = 0.0;
    let mut min_pivot = f64::INFINITY;
    for i in 0..n {
        let p = u[(i, i)].abs();
        min_pivot = min_pivot.min(p);
        log_abs_det += p.ln();
    }
    if min_pivot < PIVOT_TOL * scale {
        return Err(Error::SingularMatrix { pivot: min_pivot });
    }
    let sign = lu.determinant().signum();
    Ok(Factorization {
        kind: Kind::Lu(lu),
        n,
        log_abs_det,
        sign,
    })
}

impl Factorization {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_positive_definite(&self) -> bool {
        matches!(self.kind, Kind::Empty | Kind::Cholesky(_))
    }

    /// Solves `a x = b` for a matrix right-hand side.
    pub fn solve(&self, b: &Mat) -> Mat {
        assert_eq!(b.nrows(), self.n, "right-hand side has wrong row count");
        match &self.kind {
            Kind::Empty => Mat::zeros(0, b.ncols()),
            Kind::Cholesky(ch) => ch.solve(b),
            Kind::Lu(lu) => lu.solve(b).expect("pivots checked at factorization"),
        }
    }

    pub fn solve_vec(&self, b: &Vector) -> Vector {
        let m = Mat::from_column_slice(b.len(), 1, b.as_slice());
        let x = self.solve(&m);
        Vector::from_column_slice(x.as_slice())
    }

    /// The inverse, symmetrized.
    pub fn inverse(&self) -> Mat {
        symmetrize(&self.solve(&Mat::identity(self.n, self.n)))
    }

    /// Determinant; accumulated in log space for dimensions above 20.
    pub fn det(&self) -> f64 {
        if self.n > LOG_SPACE_DIM {
            return self.sign * self.log_abs_det.exp();
        }
        match &self.kind {
            Kind::Empty => 1.0,
            Kind::Cholesky(ch) => {
                let l = ch.l_dirty();
                (0..self.n).map(|i| l[(i, i)] * l[(i, i)]).product()
            }
            Kind::Lu(lu) => lu.determinant(),
        }
    }

    /// Log of |det|, with the sign reported separately.
    pub fn log_abs_det(&self) -> (f64, f64) {
        (self.log_abs_det, self.sign)
    }

    /// Log-determinant; defined only for positive-definite input.
    pub fn logdet(&self) -> Result<f64> {
        if self.is_positive_definite() {
            Ok(self.log_abs_det)
        } else {
            Err(Error::NotPositiveDefinite)
        }
    }
}

pub fn inverse(a: &Mat) -> Result<Mat> {
    Ok(factorize(a)?.inverse())
}

pub fn det(a: &Mat) -> Result<f64> {
    Ok(factorize(a)?.det())
}

pub fn logdet(a: &Mat) -> Result<f64> {
    factorize(a)?.logdet()
}

pub fn solve(a: &Mat, b: &Vector) -> Result<Vector> {
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: b.len(),
        });
    }
    Ok(factorize(a)?.solve_vec(b))
}

/// Eigendecomposition of a symmetric matrix, reusable for many exponentials.
#[derive(Debug, Clone)]
pub struct SymSpectrum {
    pub values: Vector,
    pub vectors: Mat,
}

impl SymSpectrum {
    pub fn new(a: &Mat) -> Result<SymSpectrum> {
        check_symmetric(a)?;
        let eig = SymmetricEigen::new(symmetrize(a));
        Ok(SymSpectrum {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    /// `exp(-t a)`.
    pub fn exp_neg(&self, t: f64) -> Mat {
        self.apply(|l| (-t * l).exp())
    }

    /// `f(a)` for a scalar function applied to the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Mat {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let s = f(self.values[j]);
            scaled.column_mut(j).scale_mut(s);
        }
        symmetrize(&(scaled * self.vectors.transpose()))
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Matrix exponential `exp(-t a)` of a symmetric matrix.
pub fn expm(a: &Mat, t: f64) -> Result<Mat> {
    Ok(SymSpectrum::new(a)?.exp_neg(t))
}

/// Certified upper bound on the spectral radius of a nonnegative matrix: the smaller of the
/// maximum row sum and a Collatz–Wielandt bound from a power-iterated positive vector.
pub fn spectral_radius_upper(a: &Mat) -> Result<f64> {
    if a.iter().any(|&x| x < 0.0) {
        return Err(Error::NegativeEntry);
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(0.0);
    }
    let row_max = (0..n).map(|i| a.row(i).sum()).fold(0.0_f64, f64::max);
    let mut x = Vector::from_element(n, 1.0);
    let mut best = row_max;
    for _ in 0..200 {
        let ax = a * &x;
        let cw = (0..n).map(|i| ax[i] / x[i]).fold(0.0_f64, f64::max);
        best = best.min(cw);
        let next = &ax + &x;
        let scale = next.max();
        x = next / scale;
    }
    Ok(best * (1.0 + 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{kinetic, laplacian, Graph};
    use proptest::prelude::*;

    fn spd(n: usize, entries: &[f64]) -> Mat {
        let b = Mat::from_row_slice(n, n, &entries[..n * n]);
        &b * b.transpose() + Mat::identity(n, n) * n as f64
    }

    #[test]
    fn identity_det_is_one() {
        assert_eq!(det(&Mat::identity(4, 4)).unwrap(), 1.0);
    }

    #[test]
    fn line3_det() {
        let k = kinetic(&Graph::line(3), 1.0).unwrap();
        assert!((det(&k).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn circle3_inverse() {
        let k = kinetic(&Graph::circle(3), 1.0).unwrap();
        let g = inverse(&k).unwrap();
        let expect = Mat::from_row_slice(3, 3, &[2., 1., 1., 1., 2., 1., 1., 1., 2.]) / 4.0;
        assert!((g - expect).amax() < 1e-14);
    }

    #[test]
    fn singular_detected() {
        let l = laplacian(&Graph::circle(4)).map(|x| x as f64);
        assert!(matches!(factorize(&l), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn indefinite_uses_lu_and_refuses_logdet() {
        let a = Mat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let f = factorize(&a).unwrap();
        assert!(!f.is_positive_definite());
        assert!((f.det() + 1.0).abs() < 1e-15);
        assert_eq!(f.logdet(), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn large_det_in_log_space() {
        let k = kinetic(&Graph::line(40), 2.0).unwrap();
        let direct: f64 = FullPivLU::new(k.clone()).determinant();
        assert!((det(&k).unwrap() / direct - 1.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_rejected() {
        let a = Mat::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert_eq!(factorize(&a).err(), Some(Error::NotSymmetric));
    }

    #[test]
    fn expm_at_zero_is_identity() {
        let k = kinetic(&Graph::circle(5), 0.3).unwrap();
        assert!((expm(&k, 0.0).unwrap() - Mat::identity(5, 5)).amax() < 1e-14);
    }

    #[test]
    fn expm_diagonal() {
        let a = Mat::from_diagonal(&Vector::from_vec(vec![1.0, 2.0]));
        let e = expm(&a, 1.0).unwrap();
        assert!((e[(0, 0)] - (-1.0f64).exp()).abs() < 1e-15);
        assert!((e[(1, 1)] - (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(e[(0, 1)], 0.0);
    }

    #[test]
    fn expm_matches_taylor() {
        let l = laplacian(&Graph::circle(3)).map(|x| x as f64);
        let t = 0.5;
        let mut term = Mat::identity(3, 3);
        let mut sum = term.clone();
        for k in 1..=20 {
            term = &term * &l * (-t / k as f64);
            sum += &term;
        }
        assert!((expm(&l, t).unwrap() - sum).amax() < 1e-12);
    }

    #[test]
    fn spectral_bound_circle3() {
        let a = crate::graph::adjacency(&Graph::circle(3)).map(|x| x as f64 / 3.0);
        let b = spectral_radius_upper(&a).unwrap();
        assert!((b - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn spectral_bound_zero_and_negative() {
        assert_eq!(spectral_radius_upper(&Mat::zeros(3, 3)).unwrap(), 0.0);
        let a = Mat::from_row_slice(1, 1, &[-1.0]);
        assert_eq!(spectral_radius_upper(&a), Err(Error::NegativeEntry));
    }

    proptest! {
        #[test]
        fn inverse_residual(entries in prop::collection::vec(-1.0f64..1.0, 64)) {
            let a = spd(8, &entries);
            let r = &a * inverse(&a).unwrap() - Mat::identity(8, 8);
            prop_assert!(r.amax() < 1e-10);
        }

        #[test]
        fn logdet_matches_log_det(entries in prop::collection::vec(-1.0f64..1.0, 36)) {
            let a = spd(6, &entries);
            prop_assert!((logdet(&a).unwrap() - det(&a).unwrap().ln()).abs() < 1e-10);
        }

        #[test]
        fn det_is_multiplicative(
            x in prop::collection::vec(-1.0f64..1.0, 25),
            y in prop::collection::vec(-1.0f64..1.0, 25),
        ) {
            let (a, b) = (spd(5, &x), spd(5, &y));
            let lhs = det(&(&a * &b)).ok();
            let ab = &a * &b;
            let lhs = lhs.unwrap_or_else(|| FullPivLU::new(ab).determinant());
            let rhs = det(&a).unwrap() * det(&b).unwrap();
            prop_assert!((lhs / rhs - 1.0).abs() < 1e-9);
        }

        #[test]
        fn expm_semigroup(entries in prop::collection::vec(-1.0f64..1.0, 25), s in 0.0f64..1.0, t in 0.0f64..1.0) {
            let a = spd(5, &entries) * 0.2;
            let lhs = expm(&a, s + t).unwrap();
            let rhs = expm(&a, s).unwrap() * expm(&a, t).unwrap();
            prop_assert!((lhs - rhs).amax() < 1e-10);
        }

        #[test]
        fn spectral_bound_dominates(entries in prop::collection::vec(0.0f64..1.0, 36)) {
            let a = Mat::from_row_slice(6, 6, &entries);
            let bound = spectral_radius_upper(&a).unwrap();
            let rho = a.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(bound >= rho * (1.0 - 1e-9));
        }
    }
}
