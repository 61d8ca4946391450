//! The order in `ħ` at which a perturbative truncation departs from the quadrature value.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::feynman::{z_pert_closed, Potential};
use crate::gaussian::continuum::fit_slope;
use crate::graph::Graph;

use super::{z_nonpert, QuadratureScheme};

pub const FIT_HBAR_MIN: f64 = 1e-3;
pub const FIT_HBAR_MAX: f64 = 1e-1;
pub const FIT_MIN_POINTS: usize = 5;

#[derive(Debug, Clone, Serialize)]
pub struct OrderFit {
    pub order: u32,
    /// `(ħ, |Z − Z^pert_L|)` per grid point.
    pub residuals: Vec<(f64, f64)>,
    /// Least-squares slope of `log |Z − Z^pert_L|` against `log ħ`; absent for a free theory.
    pub slope: Option<f64>,
}

/// `n` points spaced geometrically from `lo` to `hi`.
pub fn hbar_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let r = (hi / lo).powf(1.0 / (n.max(2) - 1) as f64);
    (0..n).map(|i| lo * r.powi(i as i32)).collect()
}

fn check_grid(hbars: &[f64]) -> Result<()> {
    if hbars.len() < FIT_MIN_POINTS {
        return Err(Error::InvalidArgument(format!(
            "need at least {FIT_MIN_POINTS} values of ħ, got {}",
            hbars.len()
        )));
    }
    let tol = 1e-9;
    if hbars
        .iter()
        .any(|&h| !(FIT_HBAR_MIN * (1.0 - tol)..=FIT_HBAR_MAX * (1.0 + tol)).contains(&h))
    {
        return Err(Error::InvalidArgument(format!(
            "ħ grid must lie in [{FIT_HBAR_MIN}, {FIT_HBAR_MAX}]"
        )));
    }
    let ratio = hbars[1] / hbars[0];
    if ratio <= 1.0
        || hbars
            .windows(2)
            .any(|w| ((w[1] / w[0]) / ratio - 1.0).abs() > tol)
    {
        return Err(Error::InvalidArgument(
            "ħ grid must be increasing and geometric".into(),
        ));
    }
    Ok(())
}

/// Fits the exponent of `|Z(ħ) − Z^pert_L(ħ)|` over a geometric grid of `ħ`; the expected value
/// is `L + 1`.
pub fn asymptotic_order_fit(
    g: &Graph,
    m2: f64,
    pot: &Potential,
    order: u32,
    hbars: &[f64],
    scheme: &QuadratureScheme,
) -> Result<OrderFit> {
    check_grid(hbars)?;
    let mut residuals = Vec::with_capacity(hbars.len());
    for &hbar in hbars {
        let z = z_nonpert(g, m2, pot, hbar, scheme)?;
        let pert = z_pert_closed(g, m2, pot, hbar, order)?;
        residuals.push((hbar, (z.value - pert.z).abs()));
    }
    let slope = (!pot.is_zero()).then(|| fit_slope(&residuals));
    Ok(OrderFit {
        order,
        residuals,
        slope,
    })
}
