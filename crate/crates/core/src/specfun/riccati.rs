//! Riccati-Bessel functions of fractional order.
//!
//! `ĵ_β(x) = √(πx/2) J_{β+1/2}(x)` and `n̂_β(x) = √(πx/2) Y_{β+1/2}(x)`, so that
//! `ĵ_0 = sin x` and `n̂_0 = −cos x`. Small arguments use the ascending series;
//! large arguments use the Hankel asymptotic expansion. The ascending series
//! loses roughly `e^{|x|}` in relative accuracy to cancellation, which is why
//! [`riccati_pair_with_derivatives`] switches at [`SERIES_CUTOFF`].

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{digamma_int, recip_gamma};
use crate::error::{Error, Result};

/// Maximum number of terms in either series before declaring non-convergence.
pub const TERM_CAP: usize = 200;

/// |x| at and above which the combined evaluator uses the Hankel expansion.
pub const SERIES_CUTOFF: f64 = 12.0;

/// Lower validity bound for [`riccati_large_x_combos`].
pub const LARGE_X_CUTOFF: f64 = 10.0;

/// Orders within this distance of an integer ν use the logarithmic Neumann
/// series; within this distance of an integer β, the terminating Hankel sum.
const INTEGER_NU_TOL: f64 = 1e-9;

/// For integer β the closed (terminating Hankel) form replaces the series from
/// here on, avoiding the series' cancellation near the cutoff.
const CLOSED_FORM_FROM: f64 = 2.0;

const REL_TOL: f64 = 1e-17;

/// Tail strength β together with the cylinder order ν = β + 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder {
    beta: f64,
    nu: f64,
}

impl BesselOrder {
    pub fn new(beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::NonFinite("BesselOrder"));
        }
        if beta <= -0.5 {
            return Err(Error::InvalidParameter(format!(
                "beta = {beta} must exceed -1/2"
            )));
        }
        Ok(Self {
            beta,
            nu: beta + 0.5,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// `β(β+1) = (4ν² − 1)/4`, the strength of the centrifugal-like tail.
    pub fn tail_strength(&self) -> f64 {
        self.beta * (self.beta + 1.0)
    }

    /// Integer β ≥ 0, for which the Hankel expansion terminates after β terms.
    fn integer_beta(&self) -> Option<u32> {
        let l = self.beta.round();
        (l >= 0.0 && (self.beta - l).abs() < INTEGER_NU_TOL).then_some(l as u32)
    }

    fn integer_nu(&self) -> Option<u32> {
        let n = self.nu.round();
        ((self.nu - n).abs() < INTEGER_NU_TOL).then_some(n as u32)
    }
}

/// `ĵ, n̂` and their derivatives with respect to the argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiValues {
    pub j: Complex64,
    pub n: Complex64,
    pub dj: Complex64,
    pub dn: Complex64,
}

impl RiccatiValues {
    /// `ĵ n̂′ − ĵ′ n̂`, identically 1 for these functions.
    pub fn wronskian(&self) -> Complex64 {
        self.j * self.dn - self.dj * self.n
    }

    pub fn combos(&self) -> RiccatiCombos {
        RiccatiCombos {
            sum_sq: self.n * self.n + self.j * self.j,
            cross: self.n * self.dn + self.j * self.dj,
            sum_sq_deriv: self.dn * self.dn + self.dj * self.dj,
        }
    }
}

/// The three quadratic combinations entering the Jost modulus:
/// `n̂² + ĵ²`, `n̂n̂′ + ĵĵ′`, `n̂′² + ĵ′²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiCombos {
    pub sum_sq: Complex64,
    pub cross: Complex64,
    pub sum_sq_deriv: Complex64,
}

fn check_finite(x: Complex64, what: &'static str) -> Result<()> {
    if x.re.is_finite() && x.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// ĵ_β(x).
pub fn riccati_j(order: BesselOrder, x: Complex64) -> Result<Complex64> {
    check_finite(x, "riccati_j")?;
    if x == Complex64::from(0.0) {
        return Ok(x);
    }
    riccati_pair_with_derivatives(order, x).map(|v| v.j)
}

/// n̂_β(x).
pub fn riccati_n(order: BesselOrder, x: Complex64) -> Result<Complex64> {
    riccati_pair_with_derivatives(order, x).map(|v| v.n)
}

/// ĵ, n̂, ĵ′, n̂′ at `x`: ascending series for `|x| < SERIES_CUTOFF`, Hankel
/// expansion above. Integer β uses the terminating Hankel form from
/// `|x| = 2`, where it is exact.
pub fn riccati_pair_with_derivatives(order: BesselOrder, x: Complex64) -> Result<RiccatiValues> {
    check_finite(x, "riccati_pair_with_derivatives")?;
    let closed = order.integer_beta().is_some() && x.norm() >= CLOSED_FORM_FROM;
    if x.norm() < SERIES_CUTOFF && !closed {
        riccati_pair_series(order, x)
    } else {
        riccati_pair_asymptotic(order, x)
    }
}

/// Term-wise differentiated ascending series, at any nonzero `x` within the
/// term cap.
pub fn riccati_pair_series(order: BesselOrder, x: Complex64) -> Result<RiccatiValues> {
    check_finite(x, "riccati_pair_series")?;
    if x == Complex64::from(0.0) {
        return Err(Error::ZeroArgument("riccati_n"));
    }
    let (j, dj) = j_series(order, x)?;
    let (n, dn) = match order.integer_nu() {
        Some(m) => n_series_integer(m, x, j, dj)?,
        None => n_series(order, x, j, dj)?,
    };
    Ok(RiccatiValues { j, n, dj, dn })
}

/// Sums `Σ c_p w^p` with `c_p` produced by `next(p, prev)`, returning the plain
/// sum and the sum weighted by `weight(p)`.
fn sum_series(
    first: Complex64,
    w: Complex64,
    ratio: impl Fn(usize) -> f64,
    weight: impl Fn(usize) -> f64,
    half_x: f64,
    what: &'static str,
) -> Result<(Complex64, Complex64)> {
    let mut term = first;
    let mut sum = term;
    let mut wsum = term * weight(0);
    for p in 1..=TERM_CAP {
        term = term * w * ratio(p);
        sum += term;
        wsum += term * weight(p);
        let past_peak = p as f64 > half_x;
        if past_peak && term.norm() <= REL_TOL * sum.norm().max(wsum.norm()) {
            return Ok((sum, wsum));
        }
        if term == Complex64::from(0.0) {
            return Ok((sum, wsum));
        }
    }
    Err(Error::NonConvergence {
        what,
        cap: TERM_CAP,
        abs_x: 2.0 * half_x,
    })
}

fn j_series(order: BesselOrder, x: Complex64) -> Result<(Complex64, Complex64)> {
    let beta = order.beta;
    let y = x * 0.5;
    let w = -(y * y);
    let first = Complex64::from(recip_gamma(beta + 1.5)?);
    let (s, ws) = sum_series(
        first,
        w,
        |p| 1.0 / (p as f64 * (beta + p as f64 + 0.5)),
        |p| beta + 1.0 + 2.0 * p as f64,
        y.norm(),
        "riccati_j",
    )?;
    let sqrt_pi = PI.sqrt();
    let y_beta = y.powf(beta);
    let j = sqrt_pi * y_beta * y * s;
    let dj = 0.5 * sqrt_pi * y_beta * ws;
    Ok((j, dj))
}

fn n_series(
    order: BesselOrder,
    x: Complex64,
    j: Complex64,
    dj: Complex64,
) -> Result<(Complex64, Complex64)> {
    let beta = order.beta;
    let (sin, cos) = sin_cos_pi(order.nu);
    let cot = cos / sin;
    let y = x * 0.5;
    let w = -(y * y);
    // Coefficients 1/(p! Γ(p − β + 1/2)). Near integer ν the offset 1/2 − β is
    // tiny and must enter every ratio exactly as it enters the first term.
    let offset = 0.5 - beta;
    let first = Complex64::from(recip_gamma(offset)?);
    let (s, ws) = sum_series(
        first,
        w,
        |p| 1.0 / (p as f64 * (offset + (p - 1) as f64)),
        |p| 2.0 * p as f64 - beta,
        y.norm(),
        "riccati_n",
    )?;
    let sqrt_pi = PI.sqrt();
    let y_mbeta = y.powf(-beta);
    let n = cot * j - (sqrt_pi / sin) * y_mbeta * s;
    let dn = cot * dj - (0.5 * sqrt_pi / sin) * y_mbeta / y * ws;
    Ok((n, dn))
}

/// Neumann series with the logarithmic term, for integer order ν = m ≥ 1.
fn n_series_integer(
    m: u32,
    x: Complex64,
    j: Complex64,
    dj: Complex64,
) -> Result<(Complex64, Complex64)> {
    let y = x * 0.5;
    let mf = m as f64;
    let sqrt_y = y.sqrt();
    let ln_y = y.ln();

    // Finite part: Σ_{k<m} (m−k−1)!/k! y^{2k−m+1/2}
    let mut fin = Complex64::from(0.0);
    let mut dfin = Complex64::from(0.0);
    for k in 0..m {
        let c = factorial(m - k - 1) / factorial(k);
        let e = 2.0 * k as f64 - mf + 0.5;
        let pow = y.powf(e);
        fin += c * pow;
        dfin += c * e * pow / y;
    }

    // Digamma part: Σ_k (ψ(k+1) + ψ(m+k+1)) (−y²)^k / (k!(m+k)!) y^{m+1/2}
    let w = -(y * y);
    let mut coeff = Complex64::from(1.0 / factorial(m));
    let mut s = Complex64::from(0.0);
    let mut ws = Complex64::from(0.0);
    let mut converged = false;
    for k in 0..=TERM_CAP {
        if k > 0 {
            coeff = coeff * w / (k as f64 * (mf + k as f64));
        }
        let psi = digamma_int(k as u32 + 1) + digamma_int(m + k as u32 + 1);
        let term = coeff * psi;
        s += term;
        ws += term * (2.0 * k as f64 + mf + 0.5);
        if k as f64 > y.norm() && term.norm() <= REL_TOL * s.norm().max(ws.norm()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "riccati_n",
            cap: TERM_CAP,
            abs_x: x.norm(),
        });
    }
    let y_m = y.powf(mf) * sqrt_y;
    let dig = s * y_m;
    let ddig = ws * y_m / y;

    let inv_sqrt_pi = 1.0 / PI.sqrt();
    let n = (2.0 / PI) * ln_y * j - inv_sqrt_pi * (fin + dig);
    // d/dx = (1/2) d/dy, and dĵ/dy = 2ĵ′.
    let dn = (1.0 / PI) * j / y + (2.0 / PI) * ln_y * dj - 0.5 * inv_sqrt_pi * (dfin + ddig);
    Ok((n, dn))
}

/// `(sin πx, cos πx)` with the argument reduced exactly before scaling by π.
fn sin_cos_pi(x: f64) -> (f64, f64) {
    let n = x.round();
    let (s, c) = (PI * (x - n)).sin_cos();
    if n.rem_euclid(2.0) == 0.0 {
        (s, c)
    } else {
        (-s, -c)
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// The two Hankel sums `S±(z) = Σ (±i)^k a_k(ν) z^{−k}` and their derivatives.
struct HankelSums {
    plus: Complex64,
    minus: Complex64,
    dplus: Complex64,
    dminus: Complex64,
}

fn hankel_sums(order: BesselOrder, z: Complex64) -> HankelSums {
    let mu = 4.0 * order.nu * order.nu;
    let inv_z = z.inv();
    let i = Complex64::i();
    let mut plus = Complex64::from(1.0);
    let mut minus = Complex64::from(1.0);
    let mut dplus = Complex64::from(0.0);
    let mut dminus = Complex64::from(0.0);
    // a_k z^{−k} with a_k = Π_{j≤k} (μ − (2j−1)²) / (k! 8^k)
    let mut a = Complex64::from(1.0);
    let mut i_pow = Complex64::from(1.0);
    let mut last = f64::INFINITY;
    // The first `l` terms of a terminating expansion are always kept.
    let keep = order.integer_beta().unwrap_or(0) as usize;
    for k in 1..=TERM_CAP {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a = a * (mu - odd * odd) / (8.0 * kf) * inv_z;
        i_pow *= i;
        let size = a.norm();
        // Asymptotic series: stop at the smallest term.
        if k > keep && size >= last {
            break;
        }
        last = size;
        let tp = i_pow * a;
        let tm = i_pow.conj() * a;
        plus += tp;
        minus += tm;
        dplus -= kf * tp * inv_z;
        dminus -= kf * tm * inv_z;
        if k > keep && size <= REL_TOL {
            break;
        }
    }
    HankelSums {
        plus,
        minus,
        dplus,
        dminus,
    }
}

/// Hankel-expansion evaluation, accurate to roughly `e^{−2|x|}`.
pub fn riccati_pair_asymptotic(order: BesselOrder, x: Complex64) -> Result<RiccatiValues> {
    check_finite(x, "riccati_pair_asymptotic")?;
    if x == Complex64::from(0.0) {
        return Err(Error::ZeroArgument("riccati_pair_asymptotic"));
    }
    let s = hankel_sums(order, x);
    let i = Complex64::i();
    let theta = x - (order.beta + 1.0) * 0.5 * PI;
    let e_plus = (i * theta).exp();
    let e_minus = (-i * theta).exp();
    // F = ĵ + i n̂ = e^{iθ} S₊,  G = ĵ − i n̂ = e^{−iθ} S₋
    let f = e_plus * s.plus;
    let g = e_minus * s.minus;
    let df = e_plus * (i * s.plus + s.dplus);
    let dg = e_minus * (-i * s.minus + s.dminus);
    Ok(RiccatiValues {
        j: 0.5 * (f + g),
        n: (f - g) / (2.0 * i),
        dj: 0.5 * (df + dg),
        dn: (df - dg) / (2.0 * i),
    })
}

/// `(n̂² + ĵ², n̂n̂′ + ĵĵ′, n̂′² + ĵ′²)` from the large-argument expansion; to
/// leading order these are `1 + β(β+1)/(2z²)`, `−β(β+1)/(2z³)` and
/// `1 − β(β+1)/(2z²)`. The oscillating and growing exponentials cancel
/// identically, so the result stays bounded anywhere in the lower half plane.
pub fn riccati_large_x_combos(order: BesselOrder, z: Complex64) -> Result<RiccatiCombos> {
    check_finite(z, "riccati_large_x_combos")?;
    if z.norm() < LARGE_X_CUTOFF {
        return Err(Error::Domain {
            abs_z: z.norm(),
            cutoff: LARGE_X_CUTOFF,
        });
    }
    let s = hankel_sums(order, z);
    let i = Complex64::i();
    Ok(RiccatiCombos {
        sum_sq: s.plus * s.minus,
        cross: 0.5 * (s.plus * s.dminus + s.dplus * s.minus),
        sum_sq_deriv: (i * s.plus + s.dplus) * (-i * s.minus + s.dminus),
    })
}

/// Leading small-argument terms `(ĵ, n̂)` ≈ `(√π x^{β+1} / (2^{β+1} Γ(β+3/2)),
/// −Γ(β+1/2) 2^β / (√π x^β))`.
pub fn riccati_small_x_leading(order: BesselOrder, x: f64) -> Result<(f64, f64)> {
    let beta = order.beta;
    let sqrt_pi = PI.sqrt();
    let j = sqrt_pi * x.powf(beta + 1.0) * recip_gamma(beta + 1.5)? / 2f64.powf(beta + 1.0);
    let n = -super::gamma::gamma(beta + 0.5)? * 2f64.powf(beta) / (sqrt_pi * x.powf(beta));
    Ok((j, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::from(x)
    }

    fn ord(beta: f64) -> BesselOrder {
        BesselOrder::new(beta).unwrap()
    }

    #[test]
    fn order_validation() {
        assert!(BesselOrder::new(-0.5).is_err());
        assert!(BesselOrder::new(-0.7).is_err());
        assert!(BesselOrder::new(f64::NAN).is_err());
        assert_relative_eq!(ord(0.3).nu(), 0.8);
    }

    #[test]
    fn trig_closed_forms() {
        let j = riccati_j(ord(0.0), c(PI / 2.0)).unwrap();
        assert!((j - 1.0).norm() < 1e-14);
        let j1 = riccati_j(ord(1.0), c(PI)).unwrap();
        assert!((j1 - 1.0).norm() < 1e-13);
        let n = riccati_n(ord(0.0), c(PI)).unwrap();
        assert!((n - 1.0).norm() < 1e-13);
        let n = riccati_n(ord(0.0), c(PI / 2.0)).unwrap();
        assert!(n.norm() < 1e-12);
        let v = riccati_pair_with_derivatives(ord(0.0), c(PI)).unwrap();
        assert!((v.dj + 1.0).norm() < 1e-13);
        assert!(v.dn.norm() < 1e-13);
    }

    #[test]
    fn integer_beta_closed_form_near_cutoff() {
        for &x in &[2.0, 7.3, 11.9, 12.0, 19.5] {
            let (s, co) = (x as f64).sin_cos();
            let v = riccati_pair_with_derivatives(ord(1.0), c(x)).unwrap();
            assert!((v.j.re - (s / x - co)).abs() < 1e-14, "x={x}");
            assert!((v.n.re - (-co / x - s)).abs() < 1e-14, "x={x}");
            // ĵ_2 = (3/x² − 1) sin x − 3 cos x / x, where early terms grow.
            let v = riccati_pair_with_derivatives(ord(2.0), c(x)).unwrap();
            let j2 = (3.0 / (x * x) - 1.0) * s - 3.0 * co / x;
            assert!((v.j.re - j2).abs() < 1e-14, "x={x}");
        }
        let z = Complex64::new(5.0, -1.5);
        let v = riccati_pair_with_derivatives(ord(0.0), z).unwrap();
        assert!((v.j - z.sin()).norm() < 1e-14 && (v.n + z.cos()).norm() < 1e-14);
    }

    #[test]
    fn zero_argument() {
        assert!(matches!(
            riccati_n(ord(0.3), c(0.0)),
            Err(Error::ZeroArgument(_))
        ));
        assert_eq!(riccati_j(ord(0.3), c(0.0)).unwrap(), c(0.0));
    }

    #[test]
    fn nan_is_rejected() {
        assert!(riccati_j(ord(0.3), Complex64::new(f64::NAN, 0.0)).is_err());
        assert!(riccati_large_x_combos(ord(0.3), Complex64::new(f64::INFINITY, 0.0)).is_err());
    }

    #[test]
    fn small_argument_leading_term() {
        let x = 0.01;
        let (lead_j, _) = riccati_small_x_leading(ord(0.7), x).unwrap();
        let expected = PI.sqrt() * (x / 2.0f64).powf(1.7) / super::super::gamma::gamma(2.2).unwrap();
        assert_relative_eq!(lead_j, expected, max_relative = 1e-14);
        let j = riccati_j(ord(0.7), c(x)).unwrap();
        // next term is O(x²) relative
        assert_relative_eq!(j.re, lead_j, max_relative = 1e-4);

        let x = 1e-3;
        let (_, lead_n) = riccati_small_x_leading(ord(0.3), x).unwrap();
        let n = riccati_n(ord(0.3), c(x)).unwrap();
        // ĵ enters n̂ through cot(νπ) at relative order x^{2β+1}
        assert!(((n.re - lead_n) / lead_n).abs() < 5.0 * x.powf(1.6));
    }

    #[test]
    fn integer_nu_matches_closed_form() {
        // β = 1/2 ⇒ ν = 1: n̂ = √(πx/2) Y_1(x). Compare against a nearby
        // non-integer order from both sides.
        for &x in &[0.3, 1.0, 4.0, 9.0] {
            let exact = riccati_pair_series(ord(0.5), c(x)).unwrap();
            let lo = riccati_pair_series(ord(0.5 - 1e-6), c(x)).unwrap();
            let hi = riccati_pair_series(ord(0.5 + 1e-6), c(x)).unwrap();
            let mid = 0.5 * (lo.n + hi.n);
            assert!((exact.n - mid).norm() < 1e-8 * exact.n.norm().max(1.0), "x={x}");
            let mid_d = 0.5 * (lo.dn + hi.dn);
            assert!((exact.dn - mid_d).norm() < 1e-8 * exact.dn.norm().max(1.0), "x={x}");
            assert!((exact.wronskian() - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn series_and_hankel_overlap() {
        for &beta in &[-0.45, -0.4, -0.1, 0.0, 0.3, 0.5, 0.7, 1.0] {
            for &x in &[11.0, 12.0, 13.0] {
                let s = riccati_pair_series(ord(beta), c(x)).unwrap();
                let a = riccati_pair_asymptotic(ord(beta), c(x)).unwrap();
                for (p, q) in [(s.j, a.j), (s.n, a.n), (s.dj, a.dj), (s.dn, a.dn)] {
                    assert!((p - q).norm() < 1e-10, "beta={beta} x={x} {p} {q}");
                }
            }
        }
    }

    #[test]
    fn hankel_combos_match_direct_products() {
        let z = Complex64::new(30.0, -6.0);
        let v = riccati_pair_asymptotic(ord(0.7), z).unwrap().combos();
        let w = riccati_large_x_combos(ord(0.7), z).unwrap();
        assert!((v.sum_sq - w.sum_sq).norm() < 1e-10);
        assert!((v.sum_sq_deriv - w.sum_sq_deriv).norm() < 1e-10);
        assert!((v.cross - w.cross).norm() < 1e-10);
    }

    #[test]
    fn combos_domain() {
        assert!(matches!(
            riccati_large_x_combos(ord(0.7), c(9.9)),
            Err(Error::Domain { .. })
        ));
        let b0 = riccati_large_x_combos(ord(0.0), Complex64::new(13.0, -2.0)).unwrap();
        assert!((b0.sum_sq - 1.0).norm() < 1e-15);
        assert!(b0.cross.norm() < 1e-15);
        assert!((b0.sum_sq_deriv - 1.0).norm() < 1e-15);
    }

    #[test]
    fn real_input_gives_real_output() {
        for &beta in &[-0.4, 0.3, 0.5, 1.0] {
            for &x in &[0.5, 5.0, 20.0] {
                let v = riccati_pair_with_derivatives(ord(beta), c(x)).unwrap();
                for q in [v.j, v.n, v.dj, v.dn] {
                    assert!(q.im.abs() < 1e-13);
                }
            }
        }
    }
}
