//! Least-squares exponent fits, the resonance-width oracle and β sweeps.

use serde::{Deserialize, Serialize};

use crate::exec::Exec;
use crate::model::{InitialState, WBPotential};
use crate::spectral::SpectralDensity;
use crate::survival::{linear_grid, survival_exact_with, ExactOptions, SurvivalSeries};
use crate::{Error, Result};

/// Minimum number of samples inside a fit window.
pub const MIN_FIT_POINTS: usize = 10;

/// Default power-law window and sample count.
pub const DEFAULT_WINDOW: (f64, f64) = (400.0, 800.0);
pub const DEFAULT_FIT_POINTS: usize = 50;

/// `P_f(t) = M t^{−μ_f}` fitted to `ln P` against `ln t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub mu_f: f64,
    pub m: f64,
    pub window: (f64, f64),
    /// RMS residual in `ln P`.
    pub rms_residual: f64,
    pub n_points: usize,
}

fn window_points(series: &SurvivalSeries, t_lo: f64, t_hi: f64) -> Result<Vec<(f64, f64)>> {
    if !(t_lo < t_hi) {
        return Err(Error::InvalidParameter(format!(
            "fit window needs t_lo < t_hi, got [{t_lo}, {t_hi}]"
        )));
    }
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|&(t, _)| t >= t_lo && t <= t_hi)
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::WindowCoverage {
            t_lo,
            t_hi,
            found: pts.len(),
            needed: MIN_FIT_POINTS,
        });
    }
    if let Some(&(t, p)) = pts.iter().find(|&&(_, p)| !(p > 0.0)) {
        return Err(Error::NonPositive { t, p });
    }
    Ok(pts)
}

/// Ordinary least squares `y = a + b x`, summed in input order.
/// Returns `(a, b, rms residual)`.
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (a + b * x);
            r * r
        })
        .sum();
    (a, b, (ss / n).sqrt())
}

pub fn fit_power_law(series: &SurvivalSeries, t_lo: f64, t_hi: f64) -> Result<FitResult> {
    let pts = window_points(series, t_lo, t_hi)?;
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let (a, b, rms) = ols(&xs, &ys);
    Ok(FitResult {
        mu_f: -b,
        m: a.exp(),
        window: (t_lo, t_hi),
        rms_residual: rms,
        n_points: pts.len(),
    })
}

/// Decay rate `Γ` of `P ∝ e^{−Γt}` over the window, and the RMS residual in
/// `ln P`.
pub fn fit_exponential(series: &SurvivalSeries, t_lo: f64, t_hi: f64) -> Result<(f64, f64)> {
    let pts = window_points(series, t_lo, t_hi)?;
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let (_, b, rms) = ols(&xs, &ys);
    Ok((-b, rms))
}

/// Lorentzian `h (Γ/2)² / ((E − E₀)² + (Γ/2)²)` fitted to the dominant peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lorentzian {
    pub e0: f64,
    /// Full width at half maximum, equal to the decay rate for `ħ = 1`.
    pub width: f64,
    pub height: f64,
}

fn solve3(m: [[f64; 3]; 3], r: [f64; 3]) -> Result<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-300 {
        return Err(Error::SingularSystem(d));
    }
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][c] = r[row];
        }
        *o = det(mc) / d;
    }
    Ok(out)
}

fn lorentzian(p: [f64; 3], e: f64) -> (f64, [f64; 3]) {
    let [e0, g, h] = p;
    let q = (0.5 * g).powi(2);
    let den = (e - e0).powi(2) + q;
    let v = h * q / den;
    let grad = [
        2.0 * v * (e - e0) / den,
        h * 0.5 * g * (e - e0).powi(2) / (den * den),
        q / den,
    ];
    (v, grad)
}

/// Least-squares Lorentzian through the highest peak below `e_max`, fitted by
/// damped Gauss-Newton over ±3 half-widths (clipped at threshold).
pub fn lorentzian_fit(density: &SpectralDensity, e_max: f64) -> Result<Lorentzian> {
    let (ep, wp) = density.peak(e_max)?;
    let half = |e: f64| density.omega_real(e).map(|w| w - 0.5 * wp);
    let bisect = |mut a: f64, mut b: f64| -> Result<f64> {
        let fa = half(a)?.signum();
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if half(m)?.signum() == fa {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    };
    // Right half point must exist; the left one may be cut off by threshold.
    let mut right = ep * 2.0;
    while half(right)? > 0.0 {
        right *= 1.5;
        if right > e_max * 10.0 {
            return Err(Error::InvalidParameter("peak has no half-maximum".into()));
        }
    }
    let right = bisect(ep, right)?;
    let left_floor = ep * 1e-6;
    let left = if half(left_floor)? < 0.0 {
        bisect(left_floor, ep)?
    } else {
        2.0 * ep - right
    };
    let hw = 0.5 * (right - left);
    let lo = (ep - 3.0 * hw).max(ep * 1e-3);
    let hi = ep + 3.0 * hw;
    let n = 241;
    let data = (0..n)
        .map(|i| {
            let e = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            density.omega_real(e).map(|w| (e, w))
        })
        .collect::<Result<Vec<_>>>()?;
    let cost = |p: [f64; 3]| -> f64 { data.iter().map(|&(e, w)| (lorentzian(p, e).0 - w).powi(2)).sum() };

    let mut p = [ep, 2.0 * hw, wp];
    let mut c = cost(p);
    let mut lambda = 1e-3;
    for _ in 0..200 {
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for &(e, w) in &data {
            let (v, g) = lorentzian(p, e);
            for a in 0..3 {
                for b in 0..3 {
                    jtj[a][b] += g[a] * g[b];
                }
                jtr[a] += g[a] * (w - v);
            }
        }
        let mut m = jtj;
        for (a, row) in m.iter_mut().enumerate() {
            row[a] *= 1.0 + lambda;
        }
        let d = solve3(m, jtr)?;
        let trial = [p[0] + d[0], p[1] + d[1], p[2] + d[2]];
        let ct = cost(trial);
        if ct < c {
            let done = (c - ct) <= 1e-14 * c;
            p = trial;
            c = ct;
            lambda *= 0.3;
            if done {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    if !(p[1] > 0.0 && p[2] > 0.0) {
        return Err(Error::InvalidParameter("peak is not Lorentzian-like".into()));
    }
    Ok(Lorentzian {
        e0: p[0],
        width: p[1],
        height: p[2],
    })
}

/// One row of the effective-exponent table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub mu_f: f64,
    pub m: f64,
    pub mu_predicted: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub window: (f64, f64),
    pub n_points: usize,
    pub n_a: u32,
    pub tolerance: f64,
    pub exec: Exec,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            n_points: DEFAULT_FIT_POINTS,
            n_a: 1,
            tolerance: crate::survival::DEFAULT_TOLERANCE,
            exec: Exec::default(),
        }
    }
}

/// `−0.45, −0.40, …, 1.0`.
pub fn default_sweep_betas() -> Vec<f64> {
    (0..30).map(|i| (-45 + 5 * i) as f64 / 100.0).collect()
}

/// Fitted exponent for a single potential.
pub fn effective_exponent(pot: &WBPotential, opts: &SweepOptions) -> Result<FitResult> {
    let init = InitialState::new(opts.n_a, pot.r_a())?;
    let density = SpectralDensity::new(*pot, init)?;
    let times = linear_grid(opts.window.0, opts.window.1, opts.n_points);
    // Parallelism lives at the sweep level; each row runs sequentially.
    let exact = ExactOptions {
        tolerance: opts.tolerance,
        exec: Exec::Sequential,
    };
    let series = survival_exact_with(&density, &times, exact)?;
    fit_power_law(&series, opts.window.0, opts.window.1)
}

pub fn beta_sweep(base: &WBPotential, betas: &[f64], window: (f64, f64)) -> Result<Vec<SweepRow>> {
    beta_sweep_with(
        base,
        betas,
        &SweepOptions {
            window,
            ..Default::default()
        },
    )
}

/// Rows sorted by β regardless of scheduling.
pub fn beta_sweep_with(base: &WBPotential, betas: &[f64], opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    let mut rows = opts.exec.try_map(betas, |&beta| -> Result<SweepRow> {
        let pot = base.with_beta(beta)?;
        let fit = effective_exponent(&pot, opts)?;
        Ok(SweepRow {
            beta,
            mu_f: fit.mu_f,
            m: fit.m,
            mu_predicted: 2.0 * beta + 3.0,
            residual: fit.rms_residual,
        })
    })?;
    rows.sort_by(|a, b| a.beta.total_cmp(&b.beta));
    Ok(rows)
}
