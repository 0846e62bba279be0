//! Independent re-computations used to cross-check the main pipeline: outer
//! coefficients from a 2×2 solve on integrated boundary data, and the survival
//! amplitude from a uniform trapezoid rule in `s = √E`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::{ode_oracle_boundary, WBPotential};
use crate::spectral::{jost_modulus_sq, SpectralDensity};
use crate::specfun::riccati_pair_series;
use crate::{Error, Result};

/// Largest time the brute-force quadrature accepts.
pub const BRUTE_FORCE_T_MAX: f64 = 1000.0;

const BRUTE_FORCE_MAX_NODES: usize = 50_000_000;

/// Upper energy of the brute-force grid; the rest is an endpoint correction.
const BRUTE_FORCE_E_MAX: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    Relative,
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub quantity: String,
    pub pipeline: f64,
    pub oracle: f64,
    /// Relative or absolute deviation, per `comparison`.
    pub error: f64,
    pub comparison: Comparison,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn relative(quantity: impl Into<String>, pipeline: f64, oracle: f64, tolerance: f64) -> Self {
        let error = (pipeline - oracle).abs() / oracle.abs().max(f64::MIN_POSITIVE);
        Self::build(quantity.into(), pipeline, oracle, error, Comparison::Relative, tolerance)
    }

    pub fn absolute(quantity: impl Into<String>, pipeline: f64, oracle: f64, tolerance: f64) -> Self {
        let error = (pipeline - oracle).abs();
        Self::build(quantity.into(), pipeline, oracle, error, Comparison::Absolute, tolerance)
    }

    fn build(
        quantity: String,
        pipeline: f64,
        oracle: f64,
        error: f64,
        comparison: Comparison,
        tolerance: f64,
    ) -> Self {
        Self {
            quantity,
            pipeline,
            oracle,
            error,
            comparison,
            tolerance,
            pass: error <= tolerance,
        }
    }
}

/// Solves `φ = a ĵ + b n̂`, `φ′ = k(a ĵ′ + b n̂′)` at `r_d` by Cramer's rule,
/// with `φ, φ′` from RK4 integration.
pub fn oracle_match_coefficients(pot: &WBPotential, k: f64) -> Result<(f64, f64)> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("k must be positive, got {k}")));
    }
    let bd = ode_oracle_boundary(pot, k, 1e-5 * pot.r_d())?;
    let v = riccati_pair_series(pot.order(), Complex64::from(k * pot.r_d()))?;
    let (j, n, dj, dn) = (v.j.re, v.n.re, k * v.dj.re, k * v.dn.re);
    let det = j * dn - n * dj;
    if det.abs() < 1e-300 {
        return Err(Error::SingularSystem(det));
    }
    let (phi, dphi) = (bd.phi.re, bd.dphi.re);
    Ok(((phi * dn - n * dphi) / det, (j * dphi - phi * dj) / det))
}

/// `|f(k)|²` from the pipeline and from the matching oracle.
pub fn jost_report(pot: &WBPotential, k: f64, tolerance: f64) -> Result<OracleReport> {
    let (a, b) = oracle_match_coefficients(pot, k)?;
    let pipeline = jost_modulus_sq(pot, Complex64::from(k))?.re;
    Ok(OracleReport::relative(
        format!("|f|^2 at k={k}"),
        pipeline,
        k * k * (a * a + b * b),
        tolerance,
    ))
}

fn trapezoid_sum(f: &impl Fn(f64) -> Result<Complex64>, start: f64, h: f64, n: usize) -> Result<Complex64> {
    let mut acc = Complex64::from(0.0);
    for i in 0..n {
        acc += f(start + i as f64 * h)?;
    }
    Ok(acc)
}

/// `A(t)` from a uniform trapezoid rule in `s = √E`, Richardson
/// extrapolated from steps `h` and `h/2`, plus a two-term endpoint correction.
/// The step keeps `ΔE ≤ π/(64t)`.
pub fn oracle_amplitude_bruteforce(density: &SpectralDensity, t: f64) -> Result<Complex64> {
    if !(t >= 0.0) || t > BRUTE_FORCE_T_MAX {
        return Err(Error::ResourceLimit(usize::MAX));
    }
    // Short times see too little oscillation at E = 64 for the endpoint
    // correction, so the grid runs further out instead.
    let s_max = if t < 10.0 { 100.0 } else { BRUTE_FORCE_E_MAX.sqrt() };
    let n = if t == 0.0 {
        200_000usize
    } else {
        let h = std::f64::consts::PI / (128.0 * s_max * t);
        ((s_max / h).ceil() as usize).max(200_000)
    };
    if 2 * n > BRUTE_FORCE_MAX_NODES {
        return Err(Error::ResourceLimit(2 * n));
    }
    let h = s_max / n as f64;
    let f = |s: f64| -> Result<Complex64> {
        if s == 0.0 {
            return Ok(Complex64::from(0.0));
        }
        let e = s * s;
        Ok(2.0 * s * density.omega_real(e)? * Complex64::from_polar(1.0, -e * t))
    };
    let ends = 0.5 * (f(0.0)? + f(s_max)?);
    let coarse = h * (ends + trapezoid_sum(&f, h, h, n - 1)?);
    let mids = trapezoid_sum(&f, 0.5 * h, h, n)?;
    let fine = 0.5 * coarse + 0.5 * h * mids;
    let body = (4.0 * fine - coarse) / 3.0;

    let e_end = s_max * s_max;
    let tail = if t == 0.0 {
        // Average decay E^{−5/2} above the last oscillation.
        let de = 2.0 * s_max;
        let mean = (0..64)
            .map(|i| density.omega_real(e_end - de + de * i as f64 / 63.0))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .sum::<f64>()
            / 64.0;
        Complex64::from(mean * e_end / 1.5)
    } else {
        let d = 1e-3;
        let w0 = density.omega_real(e_end)?;
        let w1 = (density.omega_real(e_end + d)? - density.omega_real(e_end - d)?) / (2.0 * d);
        let it = Complex64::new(0.0, t);
        Complex64::from_polar(1.0, -e_end * t) * (w0 / it + w1 / (it * it))
    };
    Ok(body + tail)
}

/// `P(t)` from [`oracle_amplitude_bruteforce`].
pub fn oracle_survival_bruteforce(density: &SpectralDensity, t: f64) -> Result<f64> {
    Ok(oracle_amplitude_bruteforce(density, t)?.norm_sqr())
}
