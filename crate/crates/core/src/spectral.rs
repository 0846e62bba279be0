//! Jost modulus, energy density `ω(E)` and its threshold expansion.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exec::Exec;
use crate::model::{regular_boundary, sinhc_entire, zero_energy_boundary, InitialState, WBPotential};
use crate::quad;
use crate::specfun::{
    gamma, riccati_large_x_combos, riccati_pair_with_derivatives, SERIES_CUTOFF,
};
use crate::{Error, Result};

/// Default number of `ζ_{2m}` coefficients.
pub const DEFAULT_ZETA_TERMS: usize = 6;

/// Below this `|k_I − k_a|` the overlap factor is taken from its limit form.
const OVERLAP_SINGULAR_TOL: f64 = 1e-6;

/// Smallest admissible `|βφ₀/r_d + φ₀′|`.
const DEGENERATE_TOL: f64 = 1e-12;

/// Coefficients of the small-`k` behaviour of `|f(k)|` and `ω(E)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCoeffs {
    /// `|f(k)| ≃ D k^{−β}`.
    pub d: f64,
    /// `ω(E) ≃ ζ k^{2β+1}`.
    pub zeta: f64,
    pub lambda_minus: f64,
    /// `None` when `ν` is an integer, where `cot(νπ)` diverges.
    pub lambda_0: Option<f64>,
    /// `None` when `ν` is an integer, where `Γ(1 − ν)` has a pole.
    pub lambda_plus: Option<f64>,
    /// `ζ_2, ζ_4, …`; only `ζ_2 = ζ` when the λ set is unavailable.
    pub zeta_2m: Vec<f64>,
}

/// Bracket products `|f|²`-related quantities need at a single momentum.
#[derive(Debug, Clone, Copy)]
struct Assembled {
    c2: Complex64,
    a: Complex64,
    b: Complex64,
}

fn assemble(pot: &WBPotential, k: Complex64) -> Result<Assembled> {
    if k == Complex64::from(0.0) {
        return Err(Error::Threshold);
    }
    let bd = regular_boundary(pot, k);
    let x = k * pot.r_d();
    let phi = bd.phi;
    let dphi_k = bd.dphi / k;
    let order = pot.order();
    let (combos, a, b) = if x.norm() < SERIES_CUTOFF {
        let v = riccati_pair_with_derivatives(order, x)?;
        (v.combos(), phi * v.dn - dphi_k * v.n, dphi_k * v.j - phi * v.dj)
    } else {
        let c = riccati_large_x_combos(order, x)?;
        (c, Complex64::new(f64::NAN, f64::NAN), Complex64::new(f64::NAN, f64::NAN))
    };
    let c2 = combos.sum_sq_deriv * phi * phi + combos.sum_sq * dphi_k * dphi_k
        - 2.0 * phi * dphi_k * combos.cross;
    Ok(Assembled { c2, a, b })
}

/// `|f(k)|² = k² C²(k)`, continued analytically for complex `k`.
pub fn jost_modulus_sq(pot: &WBPotential, k: Complex64) -> Result<Complex64> {
    Ok(k * k * assemble(pot, k)?.c2)
}

/// `C²(k)`.
pub fn jost_c2(pot: &WBPotential, k: Complex64) -> Result<Complex64> {
    Ok(assemble(pot, k)?.c2)
}

/// Outer-region coefficients `(a_III, b_III)` of `φ = a ĵ + b n̂`, for real
/// `k` with `k r_d` in the series range.
pub fn matching_coefficients(pot: &WBPotential, k: f64) -> Result<(f64, f64)> {
    let s = assemble(pot, Complex64::from(k))?;
    if !s.a.re.is_finite() {
        return Err(Error::Domain {
            abs_z: k * pot.r_d(),
            cutoff: SERIES_CUTOFF,
        });
    }
    Ok((s.a.re, s.b.re))
}

/// Phase shift relative to the tail's free solutions, `atan2(−b_III, a_III)`.
/// Diagnostic only.
pub fn phase_shift(pot: &WBPotential, k: f64) -> Result<f64> {
    let (a, b) = matching_coefficients(pot, k)?;
    Ok((-b).atan2(a))
}

/// Momentum on the continuation sheet: `k = √E` with `arg k ∈ (−π/2, π/4]`.
/// The cut lies along the positive imaginary `E` axis.
pub fn continuation_momentum(e: Complex64) -> Result<Complex64> {
    if !(e.re.is_finite() && e.im.is_finite()) {
        return Err(Error::NonFinite("omega"));
    }
    if e == Complex64::from(0.0) {
        return Err(Error::Threshold);
    }
    let mut arg = e.im.atan2(e.re);
    if e.re == 0.0 && e.im > 0.0 {
        return Err(Error::BranchCut { re: e.re, im: e.im });
    }
    if arg > 0.5 * PI {
        arg -= 2.0 * PI;
    }
    Ok(Complex64::from_polar(e.norm().sqrt(), 0.5 * arg))
}

/// `[sin(k_I r_a)/k_I] / (k_a² − k_I²)` as an entire function of `k_I²`.
fn overlap_factor(init: &InitialState, r_a: f64, ki2: Complex64) -> Complex64 {
    let ka = init.k_a();
    let q = ki2.sqrt();
    let delta = q - ka;
    if delta.norm() < OVERLAP_SINGULAR_TOL {
        // sin(q r_a) = (−1)^{n_a} sin(δ r_a) and k_a² − q² = −δ (k_a + q).
        let sign = if init.n_a() % 2 == 0 { -1.0 } else { 1.0 };
        let dr2 = delta * delta * r_a * r_a;
        let sinc = r_a * (1.0 - dr2 / 6.0);
        return sign * sinc / (q * (ka + q));
    }
    sinhc_entire(-ki2, r_a) / (ka * ka - ki2)
}

/// `ω(E)` for real or complex `E` off the cut.
pub fn omega(pot: &WBPotential, init: &InitialState, e: Complex64) -> Result<Complex64> {
    let k = continuation_momentum(e)?;
    let c2 = assemble(pot, k)?.c2;
    let g = overlap_factor(init, pot.r_a(), e + pot.v0());
    let ka = init.k_a();
    let w = 2.0 * ka * ka * g * g / (PI * pot.r_a() * k * c2);
    if w.re.is_finite() && w.im.is_finite() {
        Ok(w)
    } else {
        Err(Error::NonFinite("omega"))
    }
}

/// Threshold coefficients with `n_terms` entries of `ζ_{2m}`.
pub fn threshold_coeffs(pot: &WBPotential, init: &InitialState, n_terms: usize) -> Result<ThresholdCoeffs> {
    let z = zero_energy_boundary(pot);
    let (phi0, dphi0) = (z.phi.re, z.dphi.re);
    let beta = pot.beta();
    let r_d = pot.r_d();
    let nu = beta + 0.5;
    let bracket_minus = beta * phi0 / r_d + dphi0;
    if bracket_minus.abs() < DEGENERATE_TOL {
        return Err(Error::DegenerateBoundary(bracket_minus.abs()));
    }
    let d = 2f64.powf(beta) * gamma(nu)? * bracket_minus.abs() / (PI.sqrt() * r_d.powf(beta));
    let ka = init.k_a();
    let s0 = overlap_factor(init, pot.r_a(), Complex64::from(pot.v0())).re;
    let zeta = 2.0 * ka * ka * s0 * s0 / (PI * pot.r_a()) / (d * d);

    let lambda_minus = d * d;
    let bracket_plus = (nu + 0.5) * phi0 / r_d - dphi0;
    let integer_nu = (nu - nu.round()).abs() < 1e-9;
    let (lambda_0, lambda_plus) = if integer_nu {
        (None, None)
    } else {
        let cot = 1.0 / (nu * PI).tan();
        let l0 = cot * r_d / nu * bracket_minus * bracket_plus;
        let g1 = gamma(1.0 - nu)?;
        let lp = r_d.powf(2.0 * nu + 1.0) * g1 * g1 / (PI * 2f64.powf(2.0 * nu + 1.0) * nu * nu)
            * bracket_plus
            * bracket_plus;
        (Some(l0), Some(lp))
    };

    let zeta_2m = match (lambda_0, lambda_plus) {
        (Some(l0), Some(lp)) => {
            let a = l0 / lambda_minus;
            let b = lp / lambda_minus;
            let mut c = Vec::with_capacity(n_terms);
            for j in 0..n_terms {
                let cj = match j {
                    0 => 1.0,
                    1 => -a,
                    _ => -a * c[j - 1] - b * c[j - 2],
                };
                c.push(cj);
            }
            c.into_iter().map(|cj| zeta * cj).collect()
        }
        _ => vec![zeta],
    };
    Ok(ThresholdCoeffs {
        d,
        zeta,
        lambda_minus,
        lambda_0,
        lambda_plus,
        zeta_2m,
    })
}

/// `|G(E)| = |sin²(k_I r_a) / C²|` at `E = radius·e^{2iφ}` using the
/// large-argument Riccati combinations.
pub fn arc_density_magnitude(pot: &WBPotential, radius: f64, angle: f64) -> Result<f64> {
    if !(angle > -0.25 * PI && angle <= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "arc angle must lie in (−π/4, 0], got {angle}"
        )));
    }
    let k = Complex64::from_polar(radius.sqrt(), angle);
    let x = k * pot.r_d();
    let combos = riccati_large_x_combos(pot.order(), x)?;
    let bd = regular_boundary(pot, k);
    let dphi_k = bd.dphi / k;
    let c2 = combos.sum_sq_deriv * bd.phi * bd.phi + combos.sum_sq * dphi_k * dphi_k
        - 2.0 * bd.phi * dphi_k * combos.cross;
    let ki = (k * k + pot.v0()).sqrt();
    let s = (ki * pot.r_a()).sin();
    Ok((s * s / c2).norm())
}

/// Energy density together with its threshold coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    pot: WBPotential,
    init: InitialState,
    threshold: ThresholdCoeffs,
}

impl SpectralDensity {
    pub fn new(pot: WBPotential, init: InitialState) -> Result<Self> {
        Self::with_terms(pot, init, DEFAULT_ZETA_TERMS)
    }

    pub fn with_terms(pot: WBPotential, init: InitialState, n_terms: usize) -> Result<Self> {
        let threshold = threshold_coeffs(&pot, &init, n_terms)?;
        Ok(Self {
            pot,
            init,
            threshold,
        })
    }

    pub fn pot(&self) -> &WBPotential {
        &self.pot
    }

    pub fn init(&self) -> &InitialState {
        &self.init
    }

    pub fn threshold(&self) -> &ThresholdCoeffs {
        &self.threshold
    }

    pub fn omega(&self, e: Complex64) -> Result<Complex64> {
        omega(&self.pot, &self.init, e)
    }

    /// `ω(E)` on the positive real axis.
    pub fn omega_real(&self, e: f64) -> Result<f64> {
        if !(e > 0.0) {
            return Err(if e == 0.0 {
                Error::Threshold
            } else {
                Error::InvalidParameter(format!("real energy must be positive, got {e}"))
            });
        }
        self.omega(Complex64::from(e)).map(|w| w.re)
    }

    /// `(E, ω(E))` rows for a list of positive energies.
    pub fn tabulate(&self, energies: &[f64], exec: Exec) -> Result<Vec<(f64, f64)>> {
        exec.try_map(energies, |&e| self.omega_real(e).map(|w| (e, w)))
    }

    /// Threshold-law value `ζ k^{2β+1}`.
    pub fn omega_threshold(&self, e: f64) -> f64 {
        self.threshold.zeta * e.powf(self.pot.beta() + 0.5)
    }

    /// Location and height of the largest maximum of `ω` on `(0, e_max]`.
    pub fn peak(&self, e_max: f64) -> Result<(f64, f64)> {
        let n = 4000;
        let mut best = (0.0, f64::NEG_INFINITY);
        for i in 1..=n {
            let e = e_max * i as f64 / n as f64;
            let w = self.omega_real(e)?;
            if w > best.1 {
                best = (e, w);
            }
        }
        // Golden-section refinement on the bracketing cell pair.
        let h = e_max / n as f64;
        let (mut a, mut b) = ((best.0 - h).max(1e-12), best.0 + h);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if self.omega_real(c)? > self.omega_real(d)? {
                b = d;
            } else {
                a = c;
            }
        }
        let e = 0.5 * (a + b);
        Ok((e, self.omega_real(e)?))
    }

    /// `∫₀^∞ ω(E) dE` by graded panels at threshold, adaptive panels through
    /// the resonance region and geometric panels out to `1e6`, plus a power-law
    /// tail beyond.
    pub fn normalization(&self) -> Result<f64> {
        let e_split = 40.0;
        let h0 = 1e-2;
        let mut total = 0.0;
        let edges = quad::graded_edges(h0, 0.15, 1e-18);
        for w in edges.windows(2) {
            total += try_integrate(quad::gl16(), w[0], w[1], |e| self.omega_real(e))?;
        }
        let n = ((e_split - h0) / 0.05).ceil() as usize;
        let width = (e_split - h0) / n as f64;
        for i in 0..n {
            let a = h0 + i as f64 * width;
            total += adaptive(&|e| self.omega_real(e), a, a + width, 1e-14, 20)?;
        }
        let e_end = 1e6;
        let mut a = e_split;
        let mut last_panel = (0.0, 0.0);
        while a < e_end {
            let b = (a * 1.002).min(e_end);
            let v = try_integrate(quad::gl8(), a, b, |e| self.omega_real(e))?;
            total += v;
            last_panel = (v, b - a);
            a = b;
        }
        // ω ~ E^{−5/2} on average far above the barrier.
        let mean = last_panel.0 / last_panel.1;
        Ok(total + mean * e_end / 1.5)
    }
}

fn try_integrate(
    rule: &[(f64, f64)],
    a: f64,
    b: f64,
    f: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut s = 0.0;
    for &(x, w) in rule {
        s += w * f(mid + half * x)?;
    }
    Ok(s * half)
}

/// Bisection on `GL8` against two half-panel `GL8` sums.
pub(crate) fn adaptive(
    f: &impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let mut leaves = Vec::new();
    adaptive_with_error(f, a, b, tol, depth, &mut leaves)?;
    leaves
        .iter()
        .map(|&(a, b)| try_integrate(quad::gl8(), a, b, f))
        .sum()
}

/// Same bisection, recording the accepted panels and returning the summed
/// error estimate.
pub(crate) fn adaptive_with_error(
    f: &impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
    leaves: &mut Vec<(f64, f64)>,
) -> Result<f64> {
    let whole = try_integrate(quad::gl8(), a, b, f)?;
    let m = 0.5 * (a + b);
    let left = try_integrate(quad::gl8(), a, m, f)?;
    let right = try_integrate(quad::gl8(), m, b, f)?;
    let err = (left + right - whole).abs();
    // Below ~1e−13 relative the difference is roundoff in ω itself.
    if err <= tol.max(1e-13 * whole.abs()) || depth == 0 {
        leaves.push((a, m));
        leaves.push((m, b));
        Ok(err)
    } else {
        Ok(adaptive_with_error(f, a, m, 0.5 * tol, depth - 1, leaves)?
            + adaptive_with_error(f, m, b, 0.5 * tol, depth - 1, leaves)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn density(beta: f64) -> SpectralDensity {
        let pot = WBPotential::standard(beta).unwrap();
        SpectralDensity::new(pot, InitialState::ground(&pot)).unwrap()
    }

    #[test]
    fn free_potential_has_unit_jost_modulus() {
        let pot = WBPotential::new(0.0, 0.0, 1.0, 2.0, 0.0).unwrap();
        for k in [0.05, 0.7, 3.0, 9.0] {
            let f2 = jost_modulus_sq(&pot, Complex64::from(k)).unwrap();
            assert!((f2.re - 1.0).abs() < 1e-12 && f2.im.abs() < 1e-14, "k={k} {f2}");
        }
        let init = InitialState::ground(&pot);
        let t = threshold_coeffs(&pot, &init, 4).unwrap();
        assert!((t.d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn threshold_and_branch_errors() {
        let d = density(0.3);
        assert_eq!(d.omega(Complex64::from(0.0)), Err(Error::Threshold));
        assert!(matches!(
            d.omega(Complex64::new(0.0, 2.0)),
            Err(Error::BranchCut { .. })
        ));
        assert!(d.omega_real(-1.0).is_err());
    }

    #[test]
    fn negative_imaginary_axis_branch() {
        let k = continuation_momentum(Complex64::new(0.0, -4.0)).unwrap();
        let expect = Complex64::from_polar(2.0, -0.25 * PI);
        assert!((k - expect).norm() < 1e-15);
        // Second quadrant is reached from below, through the negative real axis.
        let k = continuation_momentum(Complex64::new(-1.0, 1e-3)).unwrap();
        assert!(k.im < 0.0 && k.re < 0.0);
    }

    #[test]
    fn overlap_limit_is_continuous() {
        let d = density(0.3);
        let ka = d.init().k_a();
        let e0 = ka * ka - d.pot().v0();
        let at = d.omega_real(e0).unwrap();
        for de in [1e-5, -1e-5, 1e-7, -1e-7] {
            let near = d.omega_real(e0 + de).unwrap();
            assert!((near - at).abs() < 1e-4 * at.abs(), "{de}: {near} vs {at}");
        }
    }

    #[test]
    fn degenerate_boundary_error() {
        // φ₀′ = 1, φ₀ = r_d for the free case, so β = −1 would cancel; instead
        // search a barrier height with βφ₀/r_d + φ₀′ = 0 by bisection on vb.
        let beta = 0.3;
        let g = |vb: f64| {
            let p = WBPotential::unchecked(0.5, vb, 3.0, 3.4, beta).unwrap();
            let z = zero_energy_boundary(&p);
            beta * z.phi.re / 3.4 + z.dphi.re
        };
        let (mut lo, mut hi) = (0.0, 1.8);
        assert!(g(lo).signum() != g(hi).signum());
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if g(m).signum() == g(lo).signum() {
                lo = m;
            } else {
                hi = m;
            }
        }
        let pot = WBPotential::unchecked(0.5, lo, 3.0, 3.4, beta).unwrap();
        let err = threshold_coeffs(&pot, &InitialState::ground(&pot), 4).unwrap_err();
        assert!(matches!(err, Error::DegenerateBoundary(_)));
    }

    #[test]
    fn integer_nu_has_no_lambda_set() {
        let t = density(0.5).threshold().clone();
        assert!(t.lambda_0.is_none() && t.lambda_plus.is_none());
        assert_eq!(t.zeta_2m, vec![t.zeta]);
    }

    #[test]
    fn arc_angle_validation() {
        let pot = WBPotential::standard(0.7).unwrap();
        assert!(arc_density_magnitude(&pot, 100.0, 0.1).is_err());
        assert!(matches!(
            arc_density_magnitude(&pot, 1.0, -0.3),
            Err(Error::Domain { .. })
        ));
    }
}
