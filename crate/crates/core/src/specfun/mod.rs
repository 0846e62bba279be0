//! Special functions: Gamma and fractional-order Riccati-Bessel functions.

mod gamma;
mod riccati;

pub use gamma::{gamma, gamma_complex, recip_gamma};
pub use riccati::{
    riccati_j, riccati_large_x_combos, riccati_n, riccati_pair_asymptotic,
    riccati_pair_series, riccati_pair_with_derivatives, riccati_small_x_leading, BesselOrder,
    RiccatiCombos, RiccatiValues, LARGE_X_CUTOFF, SERIES_CUTOFF, TERM_CAP,
};

/// Complex numbers used for continued energies and momenta.
pub type ComplexScalar = num_complex::Complex64;
