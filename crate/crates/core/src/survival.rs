//! Survival amplitude `A(t) = ∫ ω(E) e^{−iEt} dE` and probability `P = |A|²`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exec::Exec;
use crate::quad;
use crate::spectral::{adaptive_with_error, SpectralDensity, ThresholdCoeffs};
use crate::specfun::gamma;
use crate::{Error, Result};

/// Absolute error target on `P(t)` for the exact quadrature.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Upper end of the Laplace variable `u = xt`; `e^{−40}` is below double
/// precision relative to the integral.
const LAPLACE_U_MAX: f64 = 40.0;

/// Energy where the geometric extension panels stop.
const E_EXTENSION: f64 = 1e6;

/// Relative width of the geometric extension panels.
const EXTENSION_RATIO: f64 = 1e-3;

/// Largest `width·t` (radians of phase) an extension panel may span before
/// the remaining range is handed to the integration-by-parts tail.
const EXTENSION_PHASE: f64 = 2.0;

/// Per coarse panel error target for resolving structure in `ω`. Coarse
/// panels are later cut to phase-resolving widths, so this only has to catch
/// features narrower than those.
const COARSE_TOL: f64 = 1e-13;

/// Times below this share one node set; above it each octave gets its own.
const SMALL_BAND: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactQuadrature,
    LaplaceAxis,
    /// Laplace-axis integral of the rational threshold model of `ω`.
    LaplaceThreshold,
    OneTermAsymptote,
    SeriesAsymptote,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ExactQuadrature => "exact",
            Method::LaplaceAxis => "laplace-axis",
            Method::LaplaceThreshold => "laplace-threshold",
            Method::OneTermAsymptote => "one-term",
            Method::SeriesAsymptote => "series",
        }
    }

    pub const ALL: [Method; 5] = [
        Method::ExactQuadrature,
        Method::LaplaceAxis,
        Method::LaplaceThreshold,
        Method::OneTermAsymptote,
        Method::SeriesAsymptote,
    ];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown method '{s}'")))
    }
}

/// Parameters that produced a series.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub beta: f64,
    pub v0: f64,
    pub vb: f64,
    pub r_a: f64,
    pub r_d: f64,
    pub n_a: u32,
    pub n_terms: Option<usize>,
    /// Largest estimated absolute error on `P` over the grid.
    pub max_error: Option<f64>,
}

impl SeriesMeta {
    fn from_density(d: &SpectralDensity) -> Self {
        let p = d.pot();
        Self {
            beta: p.beta(),
            v0: p.v0(),
            vb: p.vb(),
            r_a: p.r_a(),
            r_d: p.r_d(),
            n_a: d.init().n_a(),
            n_terms: None,
            max_error: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub method: Method,
    pub meta: SeriesMeta,
}

impl SurvivalSeries {
    /// `(t, P)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `per_decade` logarithmically spaced times per decade from `t_min` to `t_max`.
pub fn log_grid(t_min: f64, t_max: f64, per_decade: usize) -> Vec<f64> {
    let decades = (t_max / t_min).log10();
    let n = (decades * per_decade as f64).round().max(1.0) as usize;
    (0..=n)
        .map(|i| t_min * 10f64.powf(decades * i as f64 / n as f64))
        .collect()
}

/// `n` equally spaced points on `[a, b]`.
pub fn linear_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn check_grid(times: &[f64], strictly_positive: bool) -> Result<()> {
    for (i, &t) in times.iter().enumerate() {
        if !t.is_finite() || t < 0.0 || (strictly_positive && t == 0.0) {
            return Err(Error::InvalidParameter(format!("invalid time {t}")));
        }
        if i > 0 && t <= times[i - 1] {
            return Err(Error::InvalidParameter(
                "time grid must be strictly increasing".into(),
            ));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct ExactOptions {
    /// Absolute error target on `P`.
    pub tolerance: f64,
    pub exec: Exec,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            exec: Exec::default(),
        }
    }
}

/// Node set shared by all times of one band.
struct Band {
    /// `(E, w·ω(E))`.
    nodes: Vec<(f64, f64)>,
    main_len: usize,
    /// Edges of the geometric extension panels, starting at the end of the
    /// main range. Panel `p` owns `nodes[main_len + 8p .. main_len + 8p + 8]`.
    ext_edges: Vec<f64>,
    quad_error: f64,
}

fn band_key(t: f64) -> i32 {
    if t < SMALL_BAND {
        4
    } else {
        t.log2().ceil() as i32
    }
}

/// Finite-difference derivatives `ω, ω′, ω″, ω‴` at `e`.
fn derivatives(d: &SpectralDensity, e: f64) -> Result<[f64; 4]> {
    let h = (0.01f64).min(0.25 * e);
    let f = |x: f64| d.omega_real(x);
    let (m2, m1, f0, p1, p2) = (f(e - 2.0 * h)?, f(e - h)?, f(e)?, f(e + h)?, f(e + 2.0 * h)?);
    Ok([
        f0,
        (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h),
        (-m2 + 16.0 * m1 - 30.0 * f0 + 16.0 * p1 - p2) / (12.0 * h * h),
        (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h * h * h),
    ])
}

/// `∫_e^∞ ω e^{−iEt} dE` by three integrations by parts, and the size of the
/// first omitted term.
fn ibp_tail(d: &SpectralDensity, e: f64, t: f64) -> Result<(Complex64, f64)> {
    let w = derivatives(d, e)?;
    let it = Complex64::new(0.0, t);
    let phase = Complex64::from_polar(1.0, -e * t);
    let s = w[0] / it + w[1] / (it * it) + w[2] / (it * it * it);
    Ok((phase * s, w[3].abs() / t.powi(4)))
}

fn pick_main_end(d: &SpectralDensity, t_lo: f64, target: f64) -> Result<f64> {
    const CANDIDATES: [f64; 14] = [
        6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0, 96.0, 128.0, 192.0, 256.0, 384.0, 512.0,
    ];
    for e in CANDIDATES {
        // Sample a few points since ω‴ oscillates.
        let mut worst = 0.0f64;
        for de in [0.0, 0.37, 0.71] {
            worst = worst.max(derivatives(d, e + de)?[3].abs());
        }
        if worst / t_lo.powi(4) < target {
            return Ok(e);
        }
    }
    Ok(*CANDIDATES.last().unwrap())
}

fn build_band(d: &SpectralDensity, key: i32, exec: Exec, tol_a: f64) -> Result<Band> {
    let t_max = 2f64.powi(key);
    let small = key <= band_key(SMALL_BAND - 1.0);
    let t_lo = if small { 0.0 } else { 0.5 * t_max };
    let max_width = PI / (4.0 * t_max);
    let e_main = if small {
        64.0
    } else {
        pick_main_end(d, t_lo, 0.01 * tol_a)?
    };

    let h0 = (0.01f64).min(max_width);
    let mut nodes = Vec::new();
    let mut quad_error = 0.0;
    // Threshold: ω ∝ E^{β+1/2}, graded panels keep the rule exact-ish.
    let graded = quad::graded_edges(h0, 0.15, 1e-18);
    for w in graded.windows(2) {
        let start = nodes.len();
        quad::push_panel(&mut nodes, quad::gl16(), w[0], w[1]);
        for n in &mut nodes[start..] {
            n.1 *= d.omega_real(n.0)?;
        }
    }

    // Coarse panels, refined where ω has structure, then cut to the
    // phase-resolving width.
    let coarse = 0.05;
    let n_coarse = ((e_main - h0) / coarse).ceil() as usize;
    let width = (e_main - h0) / n_coarse as f64;
    let panels: Vec<usize> = (0..n_coarse).collect();
    let leaves = exec.try_map(&panels, |&i| -> Result<(Vec<(f64, f64)>, f64)> {
        let a = h0 + i as f64 * width;
        let b = if i + 1 == n_coarse { e_main } else { a + width };
        let mut leaves = Vec::new();
        let err = adaptive_with_error(&|e| d.omega_real(e), a, b, COARSE_TOL, 24, &mut leaves)?;
        let mut out = Vec::new();
        for (la, lb) in leaves {
            let m = ((lb - la) / max_width).ceil().max(1.0) as usize;
            let step = (lb - la) / m as f64;
            for j in 0..m {
                let pa = la + j as f64 * step;
                let pb = if j + 1 == m { lb } else { pa + step };
                quad::push_panel(&mut out, quad::gl8(), pa, pb);
            }
        }
        for n in &mut out {
            n.1 *= d.omega_real(n.0)?;
        }
        Ok((out, err))
    })?;
    for (mut v, err) in leaves {
        nodes.append(&mut v);
        quad_error += err;
    }
    let main_len = nodes.len();

    // Geometric extension, kept only as far as some time in the band needs it.
    let mut ext_edges = vec![e_main];
    let mut a = e_main;
    while a < E_EXTENSION {
        let b = (a * (1.0 + EXTENSION_RATIO)).min(E_EXTENSION);
        if !small && (b - a) * t_lo > EXTENSION_PHASE {
            break;
        }
        ext_edges.push(b);
        a = b;
    }
    let ext_panels: Vec<(f64, f64)> = ext_edges.windows(2).map(|w| (w[0], w[1])).collect();
    let ext_nodes = exec.try_map(&ext_panels, |&(a, b)| -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::with_capacity(8);
        quad::push_panel(&mut out, quad::gl8(), a, b);
        for n in &mut out {
            n.1 *= d.omega_real(n.0)?;
        }
        Ok(out)
    })?;
    for mut v in ext_nodes {
        nodes.append(&mut v);
    }
    Ok(Band {
        nodes,
        main_len,
        ext_edges,
        quad_error,
    })
}

fn amplitude_in_band(d: &SpectralDensity, band: &Band, t: f64) -> Result<(Complex64, f64)> {
    let n_ext = band.ext_edges.len() - 1;
    let cut = (0..n_ext)
        .find(|&p| (band.ext_edges[p + 1] - band.ext_edges[p]) * t > EXTENSION_PHASE)
        .unwrap_or(n_ext);
    let end = band.main_len + 8 * cut;
    let mut acc = Complex64::from(0.0);
    for &(e, w) in &band.nodes[..end] {
        let (s, c) = (e * t).sin_cos();
        acc += Complex64::new(w * c, -w * s);
    }
    let e_cut = band.ext_edges[cut];
    if t == 0.0 {
        // ω falls off as E^{−5/2} on average far above the barrier.
        let (a, b) = (band.ext_edges[n_ext - 1], band.ext_edges[n_ext]);
        let last: f64 = band.nodes[end - 8..end].iter().map(|n| n.1).sum();
        let tail = last / (b - a) * b / 1.5;
        return Ok((acc + tail, 0.1 * tail + band.quad_error));
    }
    let (tail, err) = ibp_tail(d, e_cut, t)?;
    Ok((acc + tail, err + band.quad_error))
}

/// Survival amplitudes and their estimated absolute errors.
pub fn amplitudes_exact(
    density: &SpectralDensity,
    times: &[f64],
    opts: ExactOptions,
) -> Result<Vec<(Complex64, f64)>> {
    check_grid(times, false)?;
    let mut keys: Vec<i32> = times.iter().map(|&t| band_key(t)).collect();
    keys.dedup();
    let mut out = Vec::with_capacity(times.len());
    let tol_a = 0.05 * opts.tolerance;
    for key in keys {
        let band = build_band(density, key, opts.exec, tol_a)?;
        let ts: Vec<f64> = times.iter().copied().filter(|&t| band_key(t) == key).collect();
        let mut vals = opts.exec.try_map(&ts, |&t| amplitude_in_band(density, &band, t))?;
        out.append(&mut vals);
    }
    Ok(out)
}

/// `P(t)` by direct quadrature of the Fourier integral of `ω`.
pub fn survival_exact(density: &SpectralDensity, times: &[f64]) -> Result<SurvivalSeries> {
    survival_exact_with(density, times, ExactOptions::default())
}

pub fn survival_exact_with(
    density: &SpectralDensity,
    times: &[f64],
    opts: ExactOptions,
) -> Result<SurvivalSeries> {
    let amps = amplitudes_exact(density, times, opts)?;
    let mut values = Vec::with_capacity(times.len());
    let mut max_error = 0.0f64;
    for (&t, &(a, da)) in times.iter().zip(&amps) {
        let p = a.norm_sqr();
        let dp = 2.0 * a.norm() * da + da * da;
        if dp > opts.tolerance {
            return Err(Error::ToleranceNotMet {
                t,
                achieved: dp,
                tolerance: opts.tolerance,
            });
        }
        max_error = max_error.max(dp);
        values.push(p);
    }
    let mut meta = SeriesMeta::from_density(density);
    meta.max_error = Some(max_error);
    Ok(SurvivalSeries {
        times: times.to_vec(),
        values,
        method: Method::ExactQuadrature,
        meta,
    })
}

/// `(i/t) ∫₀^{40} e^{−u} g(u/t) du` for `g(x) = ω(−ix)`.
fn laplace_integral(t: f64, g: impl Fn(f64) -> Result<Complex64>) -> Result<Complex64> {
    let mut acc = Complex64::from(0.0);
    let mut panel = |a: f64, b: f64| -> Result<()> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        for &(x, w) in quad::gl16() {
            let u = mid + half * x;
            acc += w * half * (-u).exp() * g(u / t)?;
        }
        Ok(())
    };
    let graded = quad::graded_edges(1.0, 0.15, 1e-18);
    for w in graded.windows(2) {
        panel(w[0], w[1])?;
    }
    let mut a = 1.0;
    while a < LAPLACE_U_MAX {
        panel(a, a + 1.0)?;
        a += 1.0;
    }
    Ok(Complex64::i() / t * acc)
}

/// `A_v(t)`, the contribution of the negative imaginary energy axis.
pub fn amplitude_laplace_axis(density: &SpectralDensity, t: f64) -> Result<Complex64> {
    laplace_integral(t, |x| {
        density
            .omega(Complex64::new(0.0, -x))
            .map_err(|_| Error::ContinuationFailure(x))
    })
}

/// `A_v(t)` with `ω` replaced by `ζ y / (1 + (λ0/λ−) y + (λ+/λ−) y²)`,
/// `y = k^{2ν}`.
pub fn amplitude_laplace_threshold(coeffs: &ThresholdCoeffs, nu: f64, t: f64) -> Result<Complex64> {
    let (l0, lp) = match (coeffs.lambda_0, coeffs.lambda_plus) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::InvalidParameter(
                "rational threshold model needs the λ set (non-integer ν)".into(),
            ))
        }
    };
    let a = l0 / coeffs.lambda_minus;
    let b = lp / coeffs.lambda_minus;
    laplace_integral(t, |x| {
        let y = Complex64::from_polar(x.powf(nu), -0.5 * PI * nu);
        Ok(coeffs.zeta * y / (1.0 + a * y + b * y * y))
    })
}

fn laplace_series(
    density: &SpectralDensity,
    times: &[f64],
    exec: Exec,
    method: Method,
) -> Result<SurvivalSeries> {
    check_grid(times, true)?;
    let nu = density.pot().beta() + 0.5;
    let values = exec.try_map(times, |&t| -> Result<f64> {
        let a = match method {
            Method::LaplaceThreshold => amplitude_laplace_threshold(density.threshold(), nu, t)?,
            _ => amplitude_laplace_axis(density, t)?,
        };
        Ok(a.norm_sqr())
    })?;
    Ok(SurvivalSeries {
        times: times.to_vec(),
        values,
        method,
        meta: SeriesMeta::from_density(density),
    })
}

/// `|A_v(t)|²` on the grid.
pub fn survival_laplace_axis(density: &SpectralDensity, times: &[f64]) -> Result<SurvivalSeries> {
    laplace_series(density, times, Exec::default(), Method::LaplaceAxis)
}

/// `|A_v(t)|²` from the rational threshold model of `ω`.
pub fn survival_laplace_threshold(density: &SpectralDensity, times: &[f64]) -> Result<SurvivalSeries> {
    laplace_series(density, times, Exec::default(), Method::LaplaceThreshold)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelOrigin {
    /// `P ≃ ζ² Γ²(β+3/2) t^{−(2β+3)}`; the single pair describes `P`.
    OneTerm,
    /// `A_v ≃ −Σ ζ_{2m} Γ(1+mν) (it)^{−(1+mν)}`; pairs describe `A_v`.
    Series,
}

/// Closed-form long-time model as `(amplitude, exponent)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticModel {
    pub coeffs: Vec<(f64, f64)>,
    pub origin: ModelOrigin,
}

impl AsymptoticModel {
    pub fn one_term(coeffs: &ThresholdCoeffs, beta: f64) -> Result<Self> {
        let g = gamma(beta + 1.5)?;
        Ok(Self {
            coeffs: vec![(coeffs.zeta * coeffs.zeta * g * g, 2.0 * beta + 3.0)],
            origin: ModelOrigin::OneTerm,
        })
    }

    pub fn series(coeffs: &ThresholdCoeffs, nu: f64, n_terms: usize) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(Error::InvalidParameter(format!("ν must be positive, got {nu}")));
        }
        if n_terms == 0 || n_terms > coeffs.zeta_2m.len() {
            return Err(Error::InsufficientCoefficients {
                requested: n_terms,
                available: coeffs.zeta_2m.len(),
            });
        }
        let pairs = coeffs.zeta_2m[..n_terms]
            .iter()
            .enumerate()
            .map(|(i, &z)| {
                let s = 1.0 + (i + 1) as f64 * nu;
                Ok((z * gamma(s)?, s))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            coeffs: pairs,
            origin: ModelOrigin::Series,
        })
    }

    /// `A_v(t)` for the series form; `None` for the one-term form, which only
    /// fixes `P`.
    pub fn amplitude(&self, t: f64) -> Option<Complex64> {
        match self.origin {
            ModelOrigin::OneTerm => None,
            ModelOrigin::Series => Some(
                -self
                    .coeffs
                    .iter()
                    .map(|&(a, s)| Complex64::from_polar(a * t.powf(-s), -0.5 * PI * s))
                    .sum::<Complex64>(),
            ),
        }
    }

    pub fn probability(&self, t: f64) -> f64 {
        match self.origin {
            ModelOrigin::OneTerm => self.coeffs[0].0 * t.powf(-self.coeffs[0].1),
            ModelOrigin::Series => self.amplitude(t).unwrap().norm_sqr(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn model_series(
    model: &AsymptoticModel,
    times: &[f64],
    method: Method,
    meta: SeriesMeta,
) -> Result<SurvivalSeries> {
    check_grid(times, true)?;
    Ok(SurvivalSeries {
        times: times.to_vec(),
        values: times.iter().map(|&t| model.probability(t)).collect(),
        method,
        meta,
    })
}

/// `ζ² Γ²(β+3/2) t^{−(2β+3)}`.
pub fn asymptote_one_term(coeffs: &ThresholdCoeffs, beta: f64, times: &[f64]) -> Result<SurvivalSeries> {
    let model = AsymptoticModel::one_term(coeffs, beta)?;
    let meta = SeriesMeta {
        beta,
        n_terms: Some(1),
        ..Default::default()
    };
    model_series(&model, times, Method::OneTermAsymptote, meta)
}

/// `|Σ_{m ≤ n_terms} ζ_{2m} Γ(1+mν) (it)^{−(1+mν)}|²` with the principal branch
/// `i = e^{iπ/2}`.
pub fn asymptote_series(
    coeffs: &ThresholdCoeffs,
    nu: f64,
    n_terms: usize,
    times: &[f64],
) -> Result<SurvivalSeries> {
    let model = AsymptoticModel::series(coeffs, nu, n_terms)?;
    let meta = SeriesMeta {
        beta: nu - 0.5,
        n_terms: Some(n_terms),
        ..Default::default()
    };
    model_series(&model, times, Method::SeriesAsymptote, meta)
}
