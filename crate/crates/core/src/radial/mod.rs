//! Even radial profiles and the radial Laplacian.

mod grid;
mod laplacian;
mod profile;
mod series;

pub use grid::{RadialGrid, CHOP_TOLERANCE, PARITY_TOLERANCE};
pub use laplacian::{
    apply_polynomial, apply_radial_laplacian, derivatives_at_zero, taylor_derivatives_at_zero,
};
pub use profile::{RadialProfile, TabulatedProfile};
pub use series::{compute_pj, compute_pj_exact, EvenSeries, LaplacePolynomial};
