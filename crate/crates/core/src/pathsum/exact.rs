//! Exact integer matrices and truncated rational polynomials for coefficient-level identities.

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::graph::{adjacency, laplacian, Graph};

/// A square matrix of big integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> IntMatrix {
        IntMatrix {
            n,
            data: vec![BigInt::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> i64) -> IntMatrix {
        IntMatrix {
            n,
            data: (0..n * n).map(|k| BigInt::from(f(k / n, k % n))).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.n + j]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let n = self.n;
        let mut out = IntMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix {
            n: self.n,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn trace(&self) -> BigInt {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    /// Successive powers `I, M, M², …, M^k`.
    pub fn powers(&self, k: usize) -> Vec<IntMatrix> {
        let mut out = vec![IntMatrix::identity(self.n)];
        for _ in 0..k {
            let next = out.last().expect("nonempty").mul(self);
            out.push(next);
        }
        out
    }

    pub fn pow(&self, k: usize) -> IntMatrix {
        self.powers(k).pop().expect("nonempty")
    }
}

fn from_i64(m: &nalgebra::DMatrix<i64>) -> IntMatrix {
    IntMatrix::from_fn(m.nrows(), |i, j| m[(i, j)])
}

/// Number of paths of length `k` between each pair of vertices: `A^k`.
pub fn count_paths_matrix(g: &Graph, k: usize) -> IntMatrix {
    from_i64(&adjacency(g)).pow(k)
}

/// Number of hesitant paths of length `k` between each pair: `(A + D)^k` with `D` the valences.
pub fn count_walks_matrix(g: &Graph, k: usize) -> IntMatrix {
    let mut a = adjacency(g);
    for v in 0..g.n() {
        a[(v, v)] = g.degree(v) as i64;
    }
    from_i64(&a).pow(k)
}

/// Signed hesitant-path counts `(−Δ)^k` for `k = 0..=max_len`: the coefficient of
/// `m^{−2(k+1)}` in the propagator.
pub fn hesitant_green_coefficients(g: &Graph, max_len: usize) -> Vec<IntMatrix> {
    from_i64(&laplacian(g)).neg().powers(max_len)
}

/// Coefficients `c_k` of `log det(K/m²) = Σ_{k≥1} c_k m^{−2k}` for `k = 1..=max_len`.
pub fn hesitant_logdet_coefficients(g: &Graph, max_len: usize) -> Vec<BigRational> {
    let powers = from_i64(&laplacian(g)).neg().powers(max_len);
    (1..=max_len)
        .map(|k| -BigRational::new(powers[k].trace(), BigInt::from(k)))
        .collect()
}

/// A polynomial with rational coefficients, truncated at a fixed degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    /// The zero polynomial keeping degrees `0..=degree`.
    pub fn zero(degree: usize) -> Poly {
        Poly {
            coeffs: vec![BigRational::zero(); degree + 1],
        }
    }

    pub fn one(degree: usize) -> Poly {
        let mut p = Poly::zero(degree);
        p.coeffs[0] = BigRational::one();
        p
    }

    /// `c·x^k`, dropped if beyond the truncation degree.
    pub fn monomial(degree: usize, k: usize, c: BigRational) -> Poly {
        let mut p = Poly::zero(degree);
        if k <= degree {
            p.coeffs[k] = c;
        }
        p
    }

    pub fn degree_cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &BigRational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn add_term(&mut self, k: usize, c: &BigRational) {
        if k < self.coeffs.len() {
            self.coeffs[k] += c;
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Poly { coeffs }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let d = self.degree_cap();
        let mut out = Poly::zero(d);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(d + 1 - i) {
                out.coeffs[i + j] += a * b;
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Largest absolute coefficient, for reporting.
    pub fn max_abs(&self) -> f64 {
        use num::ToPrimitive;
        self.coeffs
            .iter()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

/// Matrix product of square matrices of truncated polynomials.
pub(crate) fn poly_matmul(a: &[Vec<Poly>], b: &[Vec<Poly>], degree: usize) -> Vec<Vec<Poly>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(Poly::zero(degree), |acc, k| acc.add(&a[i][k].mul(&b[k][j]))))
                .collect()
        })
        .collect()
}
