//! Interaction potentials `p(φ) = Σ_{k≥3} p_k φ^k / k!`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finitely supported potential with coefficients `p_k` for `k ≥ 3`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    coeffs: BTreeMap<usize, f64>,
}

fn factorial(k: usize) -> f64 {
    (2..=k).map(|i| i as f64).product()
}

impl Potential {
    /// The zero potential.
    pub fn zero() -> Potential {
        Potential::default()
    }

    /// Builds a potential from `(k, p_k)` pairs; zero coefficients are dropped.
    pub fn new(coeffs: impl IntoIterator<Item = (usize, f64)>) -> Result<Potential> {
        let mut map = BTreeMap::new();
        for (k, p) in coeffs {
            if k < 3 {
                return Err(Error::InvalidPotential(format!(
                    "degree {k} is below 3; quadratic terms belong to the mass"
                )));
            }
            if !p.is_finite() {
                return Err(Error::InvalidPotential(format!("p{k} = {p} is not finite")));
            }
            if map.insert(k, p).is_some() {
                return Err(Error::InvalidPotential(format!("p{k} given twice")));
            }
        }
        map.retain(|_, p| *p != 0.0);
        Ok(Potential { coeffs: map })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `p_k`, zero outside the support.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(&k).copied().unwrap_or(0.0)
    }

    /// Degrees with a nonzero coefficient, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.coeffs.keys().copied().collect()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    /// `p(φ)`.
    pub fn value(&self, phi: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&k, &p)| p * phi.powi(k as i32) / factorial(k))
            .sum()
    }

    /// `p′(φ)`.
    pub fn derivative(&self, phi: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&k, &p)| p * phi.powi(k as i32 - 1) / factorial(k - 1))
            .sum()
    }

    /// The vertex factor `−p_k` of a Feynman graph vertex of valence `k`.
    pub fn vertex_factor(&self, k: usize) -> f64 {
        -self.coeff(k)
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(k, p)| format!("p{k}={p}"))
            .collect();
        write!(f, "{}", terms.join(","))
    }
}

impl FromStr for Potential {
    type Err = Error;

    /// Parses `p3=1,p4=0.5`; the empty string is the zero potential.
    fn from_str(s: &str) -> Result<Potential> {
        let mut pairs = Vec::new();
        for term in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let bad = || Error::InvalidPotential(format!("cannot parse term `{term}`"));
            let (key, value) = term.split_once('=').ok_or_else(bad)?;
            let k: usize = key
                .trim()
                .strip_prefix('p')
                .ok_or_else(bad)?
                .parse()
                .map_err(|_| bad())?;
            let p: f64 = value.trim().parse().map_err(|_| bad())?;
            pairs.push((k, p));
        }
        Potential::new(pairs)
    }
}
