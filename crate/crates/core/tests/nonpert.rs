use gqft::feynman::{z_pert_relative, BoundaryConvention, Potential};
use gqft::gaussian::continuum::fit_slope;
use gqft::graph::{BoundaryMarking, Graph};
use gqft::linalg::Vector;
use gqft::nonpert::{asymptotic_order_fit, hbar_grid, z_rel_nonpert, QuadratureScheme};

#[test]
fn circle3_cubic_quartic_truncations_depart_at_the_next_order() {
    let pot = Potential::new([(3, 1.0), (4, 1.0)]).unwrap();
    let grid = hbar_grid(1e-3, 1e-1, 5);
    for order in [0u32, 1, 2] {
        let fit = asymptotic_order_fit(
            &Graph::circle(3),
            1.0,
            &pot,
            order,
            &grid,
            &QuadratureScheme::default(),
        )
        .unwrap();
        let slope = fit.slope.unwrap();
        assert!(
            (slope - (order + 1) as f64).abs() < 0.2,
            "L={order}: {slope} {:?}",
            fit.residuals
        );
    }
}

#[test]
fn relative_series_against_clamped_quadrature() {
    // Boundary fields scale as √ħ, so odd powers of √ħ appear and a truncation at order L
    // departs at ħ^{L+1/2}. Above ħ ≈ 0.03 the next terms of the L = 2 series still compete.
    let g = Graph::line(3);
    let y = BoundaryMarking::vertices_only(&g, ["1", "3"]).unwrap();
    let pot = Potential::new([(3, 1.0), (4, 1.0)]).unwrap();
    let eta = Vector::from_vec(vec![0.5, -0.3]);
    let scheme = QuadratureScheme::default();
    for order in [1u32, 2] {
        let points: Vec<(f64, f64)> = hbar_grid(1e-3, 1e-2, 5)
            .into_iter()
            .map(|hbar| {
                let exact =
                    z_rel_nonpert(&g, &y, 1.0, &pot, hbar, &(&eta * hbar.sqrt()), &scheme).unwrap();
                let pert = z_pert_relative(
                    &g,
                    &y,
                    1.0,
                    &pot,
                    hbar,
                    &eta,
                    order,
                    BoundaryConvention::DnPrefactor,
                )
                .unwrap();
                (hbar, (exact.value - pert.z).abs())
            })
            .collect();
        let slope = fit_slope(&points);
        assert!(
            (slope - (order as f64 + 0.5)).abs() < 0.2,
            "L={order}: {slope} {points:?}"
        );
    }
}
