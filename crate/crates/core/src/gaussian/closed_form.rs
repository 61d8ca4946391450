//! Closed-form Gaussian data for line and circle graphs, parametrized by `β` with
//! `sinh(β/2) = m/2`. Vertex positions are 1-based.

use crate::linalg::Mat;

/// Evaluators for line and circle graphs at a fixed mass.
#[derive(Debug, Clone, Copy)]
pub struct ClosedForm {
    pub m2: f64,
    pub m: f64,
    pub beta: f64,
}

impl ClosedForm {
    pub fn new(m2: f64) -> ClosedForm {
        let m = m2.sqrt();
        ClosedForm {
            m2,
            m,
            beta: 2.0 * (m / 2.0).asinh(),
        }
    }

    fn ch(&self, x: f64) -> f64 {
        (self.beta * x).cosh()
    }

    fn sh(&self, x: f64) -> f64 {
        (self.beta * x).sinh()
    }

    /// Propagator of the line graph with `n` vertices.
    pub fn line_propagator(&self, n: usize, i: usize, j: usize) -> f64 {
        let (n, i, j) = (n as f64, i as f64, j as f64);
        (self.ch(n - (i - j).abs()) + self.ch(n + 1.0 - i - j)) / (2.0 * self.sh(1.0) * self.sh(n))
    }

    pub fn line_det(&self, n: usize) -> f64 {
        2.0 * (self.beta / 2.0).tanh() * self.sh(n as f64)
    }

    /// Propagator of the circle graph with `n` vertices.
    pub fn circle_propagator(&self, n: usize, i: usize, j: usize) -> f64 {
        let (n, d) = (n as f64, (i as f64 - j as f64).abs());
        self.ch(n / 2.0 - d) / (2.0 * self.sh(1.0) * self.sh(n / 2.0))
    }

    pub fn circle_det(&self, n: usize) -> f64 {
        4.0 * self.sh(n as f64 / 2.0).powi(2)
    }

    /// Line graph relative to its right endpoint: propagator for `1 ≤ i, j ≤ n - 1`.
    pub fn line_one_end_propagator(&self, n: usize, i: usize, j: usize) -> f64 {
        let (n, i, j) = (n as f64, i as f64, j as f64);
        (self.sh(n - 0.5 - (i - j).abs()) + self.sh(n + 0.5 - i - j))
            / (2.0 * self.sh(1.0) * self.ch(n - 0.5))
    }

    pub fn line_one_end_dn(&self, n: usize) -> f64 {
        let n = n as f64;
        2.0 * self.sh(0.5) * self.sh(n) / self.ch(n - 0.5)
    }

    pub fn line_one_end_ext(&self, n: usize, i: usize) -> f64 {
        self.ch(i as f64 - 0.5) / self.ch(n as f64 - 0.5)
    }

    pub fn line_one_end_det(&self, n: usize) -> f64 {
        self.ch(n as f64 - 0.5) / self.ch(0.5)
    }

    /// Line graph relative to both endpoints: propagator for `2 ≤ i, j ≤ n - 1`.
    pub fn line_both_ends_propagator(&self, n: usize, i: usize, j: usize) -> f64 {
        let (n, i, j) = (n as f64, i as f64, j as f64);
        (self.ch(n - 1.0 - (i - j).abs()) - self.ch(n + 1.0 - i - j))
            / (2.0 * self.sh(1.0) * self.sh(n - 1.0))
    }

    /// DN operator on the two endpoints, as `(diagonal, off-diagonal)`.
    pub fn line_both_ends_dn(&self, n: usize) -> (f64, f64) {
        let n = n as f64;
        let c = 2.0 * self.sh(0.5) / self.sh(n - 1.0);
        (c * self.ch(n - 0.5), -c * self.ch(0.5))
    }

    /// Extension operator at bulk vertex `i`, as `(from vertex 1, from vertex n)`.
    pub fn line_both_ends_ext(&self, n: usize, i: usize) -> (f64, f64) {
        let (n, i) = (n as f64, i as f64);
        (
            self.sh(n - i) / self.sh(n - 1.0),
            self.sh(i - 1.0) / self.sh(n - 1.0),
        )
    }

    pub fn line_both_ends_det(&self, n: usize) -> f64 {
        self.sh(n as f64 - 1.0) / self.sh(1.0)
    }

    /// DN operator of the circle with `n - 1` vertices relative to one vertex, obtained by
    /// identifying the endpoints of the line with `n` vertices.
    pub fn self_glued_line_dn(&self, n: usize) -> f64 {
        2.0 * self.sh(1.0) * (self.beta * (n as f64 - 1.0) / 2.0).tanh()
    }

    /// The same quantity as the folded quadratic form of the line relative to both ends.
    pub fn self_glued_line_folded(&self, n: usize) -> f64 {
        let n = n as f64;
        4.0 * self.sh(0.5) * (self.ch(n - 0.5) - self.ch(0.5)) / self.sh(n - 1.0) - self.m2
    }

    pub fn line_propagator_matrix(&self, n: usize) -> Mat {
        Mat::from_fn(n, n, |i, j| self.line_propagator(n, i + 1, j + 1))
    }

    pub fn circle_propagator_matrix(&self, n: usize) -> Mat {
        Mat::from_fn(n, n, |i, j| self.circle_propagator(n, i + 1, j + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{gaussian_data, relative_data};
    use crate::graph::{BoundaryMarking, Graph};
    use crate::linalg::relative_deviation;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn beta_relation() {
        for m in [0.1, 0.5, 1.0, 2.0] {
            let c = ClosedForm::new(m * m);
            assert!(((c.beta / 2.0).sinh() - m / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn line3_polynomial_forms() {
        let m2: f64 = 0.6;
        let c = ClosedForm::new(m2);
        let det = m2 * (1.0 + m2) * (3.0 + m2);
        assert!(rel(c.line_det(3), det) < 1e-13);
        assert!(rel(c.line_propagator(3, 1, 1), (m2 * m2 + 3.0 * m2 + 1.0) / det) < 1e-13);
        assert!(rel(c.line_propagator(3, 1, 3), 1.0 / det) < 1e-13);
    }

    #[test]
    fn circle3_polynomial_forms() {
        let m2: f64 = 1.3;
        let c = ClosedForm::new(m2);
        let den = m2 * (m2 + 3.0);
        assert!(rel(c.circle_propagator(3, 1, 1), (m2 + 1.0) / den) < 1e-13);
        assert!(rel(c.circle_propagator(3, 1, 2), 1.0 / den) < 1e-13);
        assert!(rel(c.circle_det(3), m2 * (m2 + 3.0).powi(2)) < 1e-13);
    }

    #[test]
    fn catalog_matches_generic_computation() {
        for m in [0.1, 0.5, 1.0, 2.0] {
            let c = ClosedForm::new(m * m);
            for n in [2, 3, 7, 20, 50] {
                let line = gaussian_data(&Graph::line(n), m * m).unwrap();
                assert!(relative_deviation(&c.line_propagator_matrix(n), &line.propagator) < 1e-10);
                assert!(rel(c.line_det(n), line.det) < 1e-10);
                let circle = gaussian_data(&Graph::circle(n), m * m).unwrap();
                assert!(
                    relative_deviation(&c.circle_propagator_matrix(n), &circle.propagator) < 1e-10
                );
                assert!(rel(c.circle_det(n), circle.det) < 1e-10);
            }
        }
    }

    #[test]
    fn relative_catalog_matches_generic_computation() {
        for m in [0.1, 0.5, 1.0, 2.0] {
            let c = ClosedForm::new(m * m);
            for n in [3, 10, 50] {
                let g = Graph::line(n);
                let last = g.id(n - 1).to_string();
                let one = relative_data(
                    &g,
                    &BoundaryMarking::vertices_only(&g, [&last]).unwrap(),
                    m * m,
                )
                .unwrap();
                assert!(rel(c.line_one_end_det(n), one.det) < 1e-10);
                assert!(rel(c.line_one_end_dn(n), one.dn[(0, 0)]) < 1e-10);
                for i in 1..n {
                    assert!(rel(c.line_one_end_ext(n, i), one.ext[(i - 1, 0)]) < 1e-10);
                    for j in 1..n {
                        let v = one.propagator[(i - 1, j - 1)];
                        assert!(rel(c.line_one_end_propagator(n, i, j), v) < 1e-10);
                    }
                }
                let y = BoundaryMarking::vertices_only(&g, [g.id(0), g.id(n - 1)]).unwrap();
                let both = relative_data(&g, &y, m * m).unwrap();
                let (d, o) = c.line_both_ends_dn(n);
                assert!(rel(d, both.dn[(0, 0)]) < 1e-10);
                assert!(rel(o, both.dn[(0, 1)]) < 1e-10);
                assert!(rel(c.line_both_ends_det(n), both.det) < 1e-10);
                for i in 2..n {
                    let (e1, en) = c.line_both_ends_ext(n, i);
                    assert!(rel(e1, both.ext[(i - 2, 0)]) < 1e-10);
                    assert!(rel(en, both.ext[(i - 2, 1)]) < 1e-10);
                    for j in 2..n {
                        let v = both.propagator[(i - 2, j - 2)];
                        assert!(rel(c.line_both_ends_propagator(n, i, j), v) < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn self_glued_identity() {
        for m2 in [0.01, 0.3, 1.0, 4.0] {
            let c = ClosedForm::new(m2);
            for n in 3..=20 {
                assert!(rel(c.self_glued_line_folded(n), c.self_glued_line_dn(n)) < 1e-9);
            }
            let c2 = m2 * (m2 + 4.0) / (m2 + 2.0);
            assert!(rel(c.self_glued_line_dn(3), c2) < 1e-12);
        }
    }
}
