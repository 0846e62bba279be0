//! Run configuration: a flat `key = value` file with command-line overrides.

use std::fmt;
use std::path::PathBuf;

use nonexp::analysis::{default_sweep_betas, DEFAULT_FIT_POINTS, DEFAULT_WINDOW};
use nonexp::model::{InitialState, WBPotential};
use nonexp::survival::{Method, DEFAULT_TOLERANCE};
use nonexp::{Error, Exec, Result};

/// Environment variable that replaces the configured output directory.
pub const OUT_DIR_ENV: &str = "NONEXP_OUT_DIR";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub v0: f64,
    pub vb: f64,
    pub r_a: f64,
    pub r_d: f64,
    pub beta: f64,
    pub n_a: u32,
    pub t_min: f64,
    pub t_max: f64,
    pub t_per_decade: usize,
    pub e_min: f64,
    pub e_max: f64,
    pub e_points: usize,
    pub fit_lo: f64,
    pub fit_hi: f64,
    pub fit_points: usize,
    /// Curves emitted next to the exact one by `survive`.
    pub methods: Vec<Method>,
    pub n_terms: usize,
    pub betas: Vec<f64>,
    pub radii: Vec<f64>,
    /// Ray angles as multiples of π.
    pub angles: Vec<f64>,
    pub tolerance: f64,
    pub parallel: bool,
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            v0: 0.5,
            vb: 1.8,
            r_a: 3.0,
            r_d: 3.4,
            beta: 0.7,
            n_a: 1,
            t_min: 0.1,
            t_max: 2000.0,
            t_per_decade: 200,
            e_min: 1e-3,
            e_max: 1.0,
            e_points: 1000,
            fit_lo: DEFAULT_WINDOW.0,
            fit_hi: DEFAULT_WINDOW.1,
            fit_points: DEFAULT_FIT_POINTS,
            methods: vec![Method::OneTermAsymptote],
            n_terms: 4,
            betas: default_sweep_betas(),
            radii: vec![50.0, 100.0, 200.0, 400.0],
            angles: vec![-1.0 / 16.0, -1.0 / 8.0, -3.0 / 16.0],
            tolerance: DEFAULT_TOLERANCE,
            parallel: true,
            output: PathBuf::from("out"),
        }
    }
}

pub const KEYS: [&str; 23] = [
    "v0",
    "vb",
    "r_a",
    "r_d",
    "beta",
    "n_a",
    "t_min",
    "t_max",
    "t_per_decade",
    "e_min",
    "e_max",
    "e_points",
    "fit_lo",
    "fit_hi",
    "fit_points",
    "methods",
    "n_terms",
    "betas",
    "radii",
    "angles",
    "tolerance",
    "parallel",
    "output",
];

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Parse(format!("{key}: cannot parse '{v}'")))
}

fn list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| num(key, s))
        .collect()
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "v0" => self.v0 = num(key, v)?,
            "vb" => self.vb = num(key, v)?,
            "r_a" => self.r_a = num(key, v)?,
            "r_d" => self.r_d = num(key, v)?,
            "beta" => self.beta = num(key, v)?,
            "n_a" => self.n_a = num(key, v)?,
            "t_min" => self.t_min = num(key, v)?,
            "t_max" => self.t_max = num(key, v)?,
            "t_per_decade" => self.t_per_decade = num(key, v)?,
            "e_min" => self.e_min = num(key, v)?,
            "e_max" => self.e_max = num(key, v)?,
            "e_points" => self.e_points = num(key, v)?,
            "fit_lo" => self.fit_lo = num(key, v)?,
            "fit_hi" => self.fit_hi = num(key, v)?,
            "fit_points" => self.fit_points = num(key, v)?,
            "methods" => self.methods = list(key, v)?,
            "n_terms" => self.n_terms = num(key, v)?,
            "betas" => self.betas = list(key, v)?,
            "radii" => self.radii = list(key, v)?,
            "angles" => self.angles = list(key, v)?,
            "tolerance" => self.tolerance = num(key, v)?,
            "parallel" => self.parallel = num(key, v)?,
            "output" => self.output = PathBuf::from(v),
            _ => return Err(Error::Parse(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", i + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = Self::default();
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn potential(&self) -> Result<WBPotential> {
        WBPotential::new(self.v0, self.vb, self.r_a, self.r_d, self.beta)
    }

    pub fn initial_state(&self) -> Result<InitialState> {
        InitialState::new(self.n_a, self.r_a)
    }

    pub fn exec(&self) -> Exec {
        if self.parallel {
            Exec::default()
        } else {
            Exec::Sequential
        }
    }

    /// Checks everything that does not need a computation to fail.
    pub fn validate(&self) -> Result<()> {
        self.potential()?;
        self.initial_state()?;
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.t_min > 0.0 && self.t_min < self.t_max) || self.t_per_decade == 0 {
            return bad("time grid needs 0 < t_min < t_max and t_per_decade > 0");
        }
        if !(self.e_min > 0.0 && self.e_min < self.e_max) || self.e_points < 2 {
            return bad("energy grid needs 0 < e_min < e_max and e_points >= 2");
        }
        if !(self.fit_lo > 0.0 && self.fit_lo < self.fit_hi) || self.fit_points < 2 {
            return bad("fit window needs 0 < fit_lo < fit_hi and fit_points >= 2");
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance must be positive");
        }
        if self.n_terms == 0 {
            return bad("n_terms must be at least 1");
        }
        if self.radii.iter().any(|&r| !(r > 0.0)) {
            return bad("radii must be positive");
        }
        if self.angles.iter().any(|&a| !(a > -0.25 && a <= 0.0)) {
            return bad("angles must lie in (-1/4, 0] (units of pi)");
        }
        Ok(())
    }

    /// Output directory, honouring [`OUT_DIR_ENV`].
    pub fn out_dir(&self) -> PathBuf {
        match std::env::var_os(OUT_DIR_ENV) {
            Some(d) if !d.is_empty() => PathBuf::from(d),
            _ => self.output.clone(),
        }
    }

    fn value(&self, key: &str) -> String {
        match key {
            "v0" => self.v0.to_string(),
            "vb" => self.vb.to_string(),
            "r_a" => self.r_a.to_string(),
            "r_d" => self.r_d.to_string(),
            "beta" => self.beta.to_string(),
            "n_a" => self.n_a.to_string(),
            "t_min" => self.t_min.to_string(),
            "t_max" => self.t_max.to_string(),
            "t_per_decade" => self.t_per_decade.to_string(),
            "e_min" => self.e_min.to_string(),
            "e_max" => self.e_max.to_string(),
            "e_points" => self.e_points.to_string(),
            "fit_lo" => self.fit_lo.to_string(),
            "fit_hi" => self.fit_hi.to_string(),
            "fit_points" => self.fit_points.to_string(),
            "methods" => join(&self.methods),
            "n_terms" => self.n_terms.to_string(),
            "betas" => join(&self.betas),
            "radii" => join(&self.radii),
            "angles" => join(&self.angles),
            "tolerance" => self.tolerance.to_string(),
            "parallel" => self.parallel.to_string(),
            "output" => self.output.display().to_string(),
            _ => unreachable!("unknown key {key}"),
        }
    }
}

/// Prints in the same format [`RunConfig::apply_text`] reads.
impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for key in KEYS {
            writeln!(f, "{key} = {}", self.value(key))?;
        }
        Ok(())
    }
}
