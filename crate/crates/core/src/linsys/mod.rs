//! Dense linear-system kernels.

mod hinf;
mod lyapunov;
mod sampling;
mod signal;
mod simulate;
mod spectrum;
mod state_space;

pub use hinf::{hinf_norm, sigma_max_at, DEFAULT_HINF_TOL};
pub use lyapunov::{lyapunov_residual, solve_lyapunov};
pub use sampling::{
    gain_ratio, sample_lower_bound_2plus, trial_input, LowerBoundConfig, LowerBoundSample,
};
pub use signal::Signal;
pub use simulate::{simulate, simulation_step, Simulation};
pub(crate) use spectrum::first_negative_off_diagonal;
pub use spectrum::{
    eigenvalues, is_controllable, is_internally_positive, is_metzler, max_real_eig, max_sym_eig,
    min_sym_eig, sym_eigenvalues,
};
pub use state_space::StateSpace;

/// A matrix is Hurwitz when its spectral abscissa is below `-TOL_HURWITZ`.
pub const TOL_HURWITZ: f64 = 1e-9;
/// Sign tolerance for Metzler and nonnegativity tests.
pub const TOL_SIGN: f64 = 1e-12;
