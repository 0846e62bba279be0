//! Well-barrier potential: a square well of depth `v0` on `(0, r_a)`, a square
//! barrier of height `vb` on `(r_a, r_d)` and the tail `β(β+1)/r²` beyond `r_d`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::specfun::BesselOrder;
use crate::{Error, Result};

/// Below this `|√s·r|` the entire functions of `s` switch to their series.
const SMALL_ARG: f64 = 1e-4;

/// Extent of the node scan for bound states, in units of `r_d`.
const NODE_SCAN_EXTENT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WBPotential {
    v0: f64,
    vb: f64,
    r_a: f64,
    r_d: f64,
    beta: f64,
}

impl WBPotential {
    /// Validates the parameters and rejects potentials whose zero-energy
    /// regular solution has a node, i.e. potentials with a bound state.
    pub fn new(v0: f64, vb: f64, r_a: f64, r_d: f64, beta: f64) -> Result<Self> {
        let pot = Self::unchecked(v0, vb, r_a, r_d, beta)?;
        let nodes = pot.zero_energy_nodes();
        if nodes > 0 {
            return Err(Error::BoundState { nodes });
        }
        Ok(pot)
    }

    /// Parameter validation only, no bound-state scan.
    pub(crate) fn unchecked(v0: f64, vb: f64, r_a: f64, r_d: f64, beta: f64) -> Result<Self> {
        let all = [v0, vb, r_a, r_d, beta];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("WBPotential::new"));
        }
        if v0 < 0.0 || vb < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "v0 and vb must be non-negative, got v0 = {v0}, vb = {vb}"
            )));
        }
        if !(r_a > 0.0 && r_d > r_a) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < r_a < r_d, got r_a = {r_a}, r_d = {r_d}"
            )));
        }
        BesselOrder::new(beta)?;
        Ok(Self {
            v0,
            vb,
            r_a,
            r_d,
            beta,
        })
    }

    /// `v0 = 0.5, vb = 1.8, r_a = 3.0, r_d = 3.4`.
    pub fn standard(beta: f64) -> Result<Self> {
        Self::new(0.5, 1.8, 3.0, 3.4, beta)
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.v0, self.vb, self.r_a, self.r_d, beta)
    }

    pub fn with_vb(&self, vb: f64) -> Result<Self> {
        Self::new(self.v0, vb, self.r_a, self.r_d, self.beta)
    }

    pub fn with_r_d(&self, r_d: f64) -> Result<Self> {
        Self::new(self.v0, self.vb, self.r_a, r_d, self.beta)
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn vb(&self) -> f64 {
        self.vb
    }

    pub fn r_a(&self) -> f64 {
        self.r_a
    }

    pub fn r_d(&self) -> f64 {
        self.r_d
    }

    /// Barrier width `r_d − r_a`.
    pub fn r_b(&self) -> f64 {
        self.r_d - self.r_a
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn order(&self) -> BesselOrder {
        BesselOrder::new(self.beta).expect("validated at construction")
    }

    /// `v(r)` in units where `E = k²`.
    pub fn v(&self, r: f64) -> f64 {
        if r < self.r_a {
            -self.v0
        } else if r < self.r_d {
            self.vb
        } else {
            self.beta * (self.beta + 1.0) / (r * r)
        }
    }

    fn zero_energy_nodes(&self) -> usize {
        let step = 1e-3 * self.r_d;
        let mut nodes = 0;
        let mut last = 0.0f64;
        let mut state = (0.0, 1.0);
        let stops = [
            (0.0, self.r_a),
            (self.r_a, self.r_d),
            (self.r_d, NODE_SCAN_EXTENT * self.r_d),
        ];
        for (a, b) in stops {
            let n = ((b - a) / step).ceil() as usize;
            let h = (b - a) / n as f64;
            for i in 0..n {
                let r = a + i as f64 * h;
                state = rk4_step(|x| self.v(x), 0.0, r, h, state);
                if state.0 != 0.0 {
                    if last != 0.0 && state.0.signum() != last.signum() {
                        nodes += 1;
                    }
                    last = state.0;
                }
            }
        }
        nodes
    }
}

/// Initial state `√(2/r_a) sin(k_a r)` confined to the well, `k_a = n_a π/r_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    n_a: u32,
    k_a: f64,
}

impl InitialState {
    pub fn new(n_a: u32, r_a: f64) -> Result<Self> {
        if n_a == 0 {
            return Err(Error::InvalidParameter("n_a must be positive".into()));
        }
        if !(r_a > 0.0 && r_a.is_finite()) {
            return Err(Error::InvalidParameter(format!("r_a must be positive, got {r_a}")));
        }
        Ok(Self {
            n_a,
            k_a: n_a as f64 * PI / r_a,
        })
    }

    /// Lowest mode of the well of `pot`.
    pub fn ground(pot: &WBPotential) -> Self {
        Self::new(1, pot.r_a).expect("validated potential")
    }

    pub fn n_a(&self) -> u32 {
        self.n_a
    }

    pub fn k_a(&self) -> f64 {
        self.k_a
    }
}

/// Regular solution `φ(k; r)` with `φ(0) = 0, φ′(0) = 1`, and its radial
/// derivative, both at `r = r_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularSolutionBoundary {
    pub phi: Complex64,
    pub dphi: Complex64,
    pub k: Complex64,
}

/// `cosh(√s r)`, even in `√s` hence entire in `s`.
pub(crate) fn cosh_entire(s: Complex64, r: f64) -> Complex64 {
    (s.sqrt() * r).cosh()
}

/// `sinh(√s r)/√s`, entire in `s`.
pub(crate) fn sinhc_entire(s: Complex64, r: f64) -> Complex64 {
    let q = s.sqrt();
    if (q * r).norm() < SMALL_ARG {
        let r2s = s * r * r;
        r * (1.0 + r2s / 6.0 * (1.0 + r2s / 20.0))
    } else {
        (q * r).sinh() / q
    }
}

/// Closed-form boundary data. Everything is written through `cosh(√s r)` and
/// `sinh(√s r)/√s` with `s = κ²` and `s = −k_I²`, so the branch points `k² = v_b`
/// and `k² = −v0` need no special handling.
pub fn regular_boundary(pot: &WBPotential, k: Complex64) -> RegularSolutionBoundary {
    let k2 = k * k;
    let kappa2 = pot.vb - k2;
    let minus_ki2 = -(k2 + pot.v0);
    let ch_b = cosh_entire(kappa2, pot.r_b());
    let sh_b = sinhc_entire(kappa2, pot.r_b());
    let cos_a = cosh_entire(minus_ki2, pot.r_a);
    let sin_a = sinhc_entire(minus_ki2, pot.r_a);
    RegularSolutionBoundary {
        phi: ch_b * sin_a + sh_b * cos_a,
        dphi: kappa2 * sh_b * sin_a + ch_b * cos_a,
        k,
    }
}

/// `φ₀(r_d)`, `φ₀′(r_d)`.
pub fn zero_energy_boundary(pot: &WBPotential) -> RegularSolutionBoundary {
    regular_boundary(pot, Complex64::from(0.0))
}

fn rk4_step(v: impl Fn(f64) -> f64, k2: f64, r: f64, h: f64, (u, du): (f64, f64)) -> (f64, f64) {
    let f = |x: f64, u: f64| (v(x) - k2) * u;
    let mid = r + 0.5 * h;
    let k1 = (du, f(r, u));
    let k2_ = (du + 0.5 * h * k1.1, f(mid, u + 0.5 * h * k1.0));
    let k3 = (du + 0.5 * h * k2_.1, f(mid, u + 0.5 * h * k2_.0));
    let k4 = (du + h * k3.1, f(r + h, u + h * k3.0));
    (
        u + h / 6.0 * (k1.0 + 2.0 * k2_.0 + 2.0 * k3.0 + k4.0),
        du + h / 6.0 * (k1.1 + 2.0 * k2_.1 + 2.0 * k3.1 + k4.1),
    )
}

/// Fixed-step RK4 integration of `u″ = (v(r) − k²) u` from the origin to `r_d`,
/// with steps aligned to `r_a` so each step sees a constant potential. The step
/// is the largest not exceeding `step` that divides each region evenly.
pub fn ode_oracle_boundary(pot: &WBPotential, k: f64, step: f64) -> Result<RegularSolutionBoundary> {
    let max = 1e-3 * pot.r_d;
    if !(step > 0.0 && step <= max) {
        return Err(Error::StepSize { step, max });
    }
    if !k.is_finite() {
        return Err(Error::NonFinite("ode_oracle_boundary"));
    }
    let mut state = (0.0, 1.0);
    for (a, b, v) in [(0.0, pot.r_a, -pot.v0), (pot.r_a, pot.r_d, pot.vb)] {
        let n = ((b - a) / step).ceil() as usize;
        let h = (b - a) / n as f64;
        for _ in 0..n {
            state = rk4_step(|_| v, k * k, 0.0, h, state);
        }
    }
    Ok(RegularSolutionBoundary {
        phi: Complex64::from(state.0),
        dphi: Complex64::from(state.1),
        k: Complex64::from(k),
    })
}
