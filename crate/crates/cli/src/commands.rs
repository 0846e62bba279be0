use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use nonexp::analysis::{beta_sweep_with, fit_power_law, SweepOptions};
use nonexp::io::{read_series, write_density, write_fit, write_series, write_sweep};
use nonexp::model::{ode_oracle_boundary, regular_boundary};
use nonexp::oracle::{jost_report, oracle_survival_bruteforce, OracleReport};
use nonexp::spectral::{arc_density_magnitude, SpectralDensity, DEFAULT_ZETA_TERMS};
use nonexp::survival::{
    asymptote_one_term, asymptote_series, linear_grid, log_grid, survival_exact_with,
    survival_laplace_axis, survival_laplace_threshold, AsymptoticModel, ExactOptions, Method,
    SurvivalSeries,
};
use nonexp::{Error, Result};

use crate::config::RunConfig;

/// Below this time the pole contribution is not negligible next to `A_v`.
const LAPLACE_AXIS_MIN_T: f64 = 10.0;

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let f = File::create(&path)?;
    Ok((path, BufWriter::new(f)))
}

fn density_of(cfg: &RunConfig) -> Result<SpectralDensity> {
    SpectralDensity::with_terms(
        cfg.potential()?,
        cfg.initial_state()?,
        cfg.n_terms.max(DEFAULT_ZETA_TERMS),
    )
}

fn exact_options(cfg: &RunConfig) -> ExactOptions {
    ExactOptions {
        tolerance: cfg.tolerance,
        exec: cfg.exec(),
    }
}

pub fn density(cfg: &RunConfig) -> Result<bool> {
    let d = density_of(cfg)?;
    let energies = linear_grid(cfg.e_min, cfg.e_max, cfg.e_points);
    let rows = d.tabulate(&energies, cfg.exec())?;
    let (path, w) = create(&cfg.out_dir(), "density.csv")?;
    write_density(w, &rows)?;
    let (ep, wp) = d.peak(cfg.e_max)?;
    println!("wrote {} ({} rows)", path.display(), rows.len());
    println!("peak omega = {wp:.6} at E = {ep:.6}");
    println!("integral of omega = {:.12}", d.normalization()?);
    Ok(true)
}

fn asymptotic(cfg: &RunConfig, d: &SpectralDensity, m: Method, times: &[f64]) -> Result<SurvivalSeries> {
    let beta = cfg.beta;
    match m {
        Method::ExactQuadrature => survival_exact_with(d, times, exact_options(cfg)),
        Method::LaplaceAxis => {
            if times.first().is_some_and(|&t| t < LAPLACE_AXIS_MIN_T) {
                eprintln!(
                    "warning: laplace-axis omits the pole term and is unreliable for t < {LAPLACE_AXIS_MIN_T}"
                );
            }
            survival_laplace_axis(d, times)
        }
        Method::LaplaceThreshold => survival_laplace_threshold(d, times),
        Method::OneTermAsymptote => asymptote_one_term(d.threshold(), beta, times),
        Method::SeriesAsymptote => asymptote_series(d.threshold(), beta + 0.5, cfg.n_terms, times),
    }
}

pub fn survive(cfg: &RunConfig) -> Result<bool> {
    let d = density_of(cfg)?;
    let dir = cfg.out_dir();
    let times = log_grid(cfg.t_min, cfg.t_max, cfg.t_per_decade);
    let mut curves = vec![survival_exact_with(&d, &times, exact_options(cfg))?];
    for &m in cfg.methods.iter().filter(|&&m| m != Method::ExactQuadrature) {
        curves.push(asymptotic(cfg, &d, m, &times)?);
        let model = match m {
            Method::OneTermAsymptote => Some(AsymptoticModel::one_term(d.threshold(), cfg.beta)?),
            Method::SeriesAsymptote => {
                Some(AsymptoticModel::series(d.threshold(), cfg.beta + 0.5, cfg.n_terms)?)
            }
            _ => None,
        };
        if let Some(model) = model {
            let (path, mut w) = create(&dir, &format!("asymptote-{m}.json"))?;
            writeln!(w, "{}", model.to_json())?;
            println!("wrote {}", path.display());
        }
    }
    let refs: Vec<&SurvivalSeries> = curves.iter().collect();
    let (path, w) = create(&dir, "survival.csv")?;
    write_series(w, &refs)?;
    println!("wrote {} ({} times, {} curves)", path.display(), times.len(), curves.len());
    if let Some(e) = curves[0].meta.max_error {
        println!("largest error estimate on P: {e:.2e}");
    }

    // The fit runs on its own evenly spaced grid, which is also written out so
    // that `fit` reproduces it exactly.
    let window = linear_grid(cfg.fit_lo, cfg.fit_hi, cfg.fit_points);
    let exact = survival_exact_with(&d, &window, exact_options(cfg))?;
    let (path, w) = create(&dir, "window.csv")?;
    write_series(w, &[&exact])?;
    println!("wrote {}", path.display());
    let fit = fit_power_law(&exact, cfg.fit_lo, cfg.fit_hi)?;
    let (path, w) = create(&dir, "fit.csv")?;
    write_fit(w, &[fit])?;
    println!("wrote {}", path.display());
    println!(
        "mu_f = {:.16e} (2*beta+3 = {}), M = {:.6e}, rms = {:.2e}",
        fit.mu_f,
        2.0 * cfg.beta + 3.0,
        fit.m,
        fit.rms_residual
    );
    Ok(true)
}

pub fn sweep(cfg: &RunConfig) -> Result<bool> {
    let opts = SweepOptions {
        window: (cfg.fit_lo, cfg.fit_hi),
        n_points: cfg.fit_points,
        n_a: cfg.n_a,
        tolerance: cfg.tolerance,
        exec: cfg.exec(),
    };
    let rows = beta_sweep_with(&cfg.potential()?, &cfg.betas, &opts)?;
    let (path, w) = create(&cfg.out_dir(), "sweep.csv")?;
    write_sweep(w, &rows)?;
    println!("{:>8} {:>10} {:>10} {:>10}", "beta", "mu_f", "2beta+3", "rms");
    for r in &rows {
        println!(
            "{:>8.3} {:>10.5} {:>10.5} {:>10.2e}",
            r.beta, r.mu_f, r.mu_predicted, r.residual
        );
    }
    println!("wrote {}", path.display());
    Ok(true)
}

pub fn arc_check(cfg: &RunConfig) -> Result<bool> {
    let pot = cfg.potential()?;
    let mut report = String::new();
    let mut radii = cfg.radii.clone();
    radii.sort_by(f64::total_cmp);
    for &a in &cfg.angles {
        report += &format!("angle = {a}*pi (beta = {})\n", cfg.beta);
        report += &format!("{:>10} {:>16} {:>10}\n", "radius", "|G|", "ratio");
        let mut prev: Option<f64> = None;
        for &r in &radii {
            let g = arc_density_magnitude(&pot, r, a * PI)?;
            let (ratio, flag) = match prev {
                Some(p) => (format!("{:.4}", g / p), if g >= p { "  NON-DECAY" } else { "" }),
                None => ("-".to_string(), ""),
            };
            report += &format!("{r:>10} {g:>16.6e} {ratio:>10}{flag}\n");
            prev = Some(g);
        }
    }
    print!("{report}");
    let (path, mut w) = create(&cfg.out_dir(), "arc.txt")?;
    w.write_all(report.as_bytes())?;
    println!("wrote {}", path.display());
    Ok(true)
}

pub fn fit(cfg: &RunConfig, input: &Path, method: Method) -> Result<bool> {
    let file = File::open(input).map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
    let series = read_series(file)?;
    let s = series
        .iter()
        .find(|s| s.method == method)
        .ok_or_else(|| Error::Parse(format!("no '{method}' rows in {}", input.display())))?;
    let fit = fit_power_law(s, cfg.fit_lo, cfg.fit_hi)?;
    let (path, w) = create(&cfg.out_dir(), "fit.csv")?;
    write_fit(w, &[fit])?;
    println!(
        "mu_f = {:.16e}, M = {:.6e}, rms = {:.2e}, n = {}",
        fit.mu_f, fit.m, fit.rms_residual, fit.n_points
    );
    println!("wrote {}", path.display());
    Ok(true)
}

/// Oracle cross-checks: boundary data, Jost modulus and survival.
pub fn verify(cfg: &RunConfig) -> Result<bool> {
    let pot = cfg.potential()?;
    let d = density_of(cfg)?;
    let mut reports = Vec::new();
    for i in 0..30 {
        let k = 0.05 + 0.1 * i as f64;
        let closed = regular_boundary(&pot, Complex64::from(k));
        let ode = ode_oracle_boundary(&pot, k, 1e-4 * pot.r_d())?;
        reports.push(OracleReport::relative(
            format!("phi at k={k:.2}"),
            closed.phi.re,
            ode.phi.re,
            1e-8,
        ));
        reports.push(OracleReport::relative(
            format!("dphi at k={k:.2}"),
            closed.dphi.re,
            ode.dphi.re,
            1e-8,
        ));
        reports.push(jost_report(&pot, k, 1e-8)?);
    }
    for t in [0.0, 1.0, 10.0, 100.0, 500.0] {
        let p = survival_exact_with(&d, &[t], exact_options(cfg))?.values[0];
        reports.push(OracleReport::absolute(
            format!("P at t={t}"),
            p,
            oracle_survival_bruteforce(&d, t)?,
            1e-8,
        ));
    }
    println!("quantity,pipeline,oracle,error,comparison,tolerance,pass");
    for r in &reports {
        println!(
            "{},{:.16e},{:.16e},{:.3e},{:?},{:.1e},{}",
            r.quantity, r.pipeline, r.oracle, r.error, r.comparison, r.tolerance, r.pass
        );
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    println!("{} of {} checks passed", reports.len() - failed, reports.len());
    Ok(failed == 0)
}
