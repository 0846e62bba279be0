//! Gamma function for real and complex arguments.
//!
//! Lanczos approximation (g = 7, nine coefficients) on the right half plane and
//! the reflection formula `Γ(z) Γ(1−z) = π / sin(πz)` on the left.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Γ(x) for real `x`.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite("gamma"));
    }
    if is_pole(x) {
        return Err(Error::GammaPole(x));
    }
    Ok(gamma_real_unchecked(x))
}

fn gamma_real_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_real_unchecked(1.0 - x));
    }
    // Exact factorials keep integer arguments bit-exact.
    if x == x.round() && x <= 171.0 {
        return (1..x as u64).fold(1.0, |acc, k| acc * k as f64);
    }
    let z = x - 1.0;
    let mut sum = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * ((z + 0.5) * t.ln() - t).exp() * sum
}

/// Γ(z) for complex `z`.
pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite("gamma_complex"));
    }
    if z.im == 0.0 {
        return gamma(z.re).map(Complex64::from);
    }
    Ok(gamma_complex_unchecked(z))
}

fn gamma_complex_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let one = Complex64::from(1.0);
        return Complex64::from(PI) / ((z * PI).sin() * gamma_complex_unchecked(one - z));
    }
    let z = z - 1.0;
    let mut sum = Complex64::from(LANCZOS_COEFFS[0]);
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * ((z + 0.5) * t.ln() - t).exp() * sum
}

/// 1/Γ(x), which is entire: returns zero at the poles of Γ.
pub fn recip_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite("recip_gamma"));
    }
    if is_pole(x) {
        return Ok(0.0);
    }
    Ok(1.0 / gamma_real_unchecked(x))
}

/// Digamma at a positive integer, ψ(m) = −γ + Σ_{j<m} 1/j.
pub(crate) fn digamma_int(m: u32) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    -EULER_GAMMA + (1..m).map(|j| 1.0 / j as f64).sum::<f64>()
}
