//! Built-in benchmark systems and their reference values.

use crate::StateSpace;

/// Reference values reported for the single-input benchmark.
pub mod sec6_1_values {
    pub const HINF: f64 = 0.5033;
    pub const FILTER_FREE_BOUND: f64 = 0.5033;
    pub const BEST_BOUND: f64 = 0.3914;
    pub const BEST_ALPHA: f64 = -1.4;
    pub const BEST_DEGREE: usize = 15;
}

/// Reference values reported for the two-input benchmark.
pub mod sec6_2_values {
    pub const HINF: f64 = 0.6995;
    pub const FILTER_FREE_BOUND: f64 = 0.6611;
    pub const BEST_BOUND: f64 = 0.4981;
    pub const BEST_ALPHA: f64 = -1.4;
    pub const BEST_DEGREE: usize = 15;
}

/// Filter poles of the reference sweeps.
pub const REFERENCE_ALPHAS: [f64; 3] = [-1.0, -1.2, -1.4];
/// Largest filter degree of the reference sweeps.
pub const REFERENCE_MAX_DEGREE: usize = 15;

/// Single-input benchmark (n = 5, n_w = n_z = 1).
pub fn sec6_1() -> StateSpace {
    StateSpace::from_rows(
        &[
            &[-0.09, 0.28, 0.46, -0.48, -0.05],
            &[-0.34, -0.95, -0.42, 0.37, -0.55],
            &[-0.24, 0.04, -0.10, -0.47, -0.23],
            &[0.30, 0.29, 0.02, -1.59, 0.57],
            &[0.26, 0.25, 0.40, -0.74, -0.95],
        ],
        &[&[0.17], &[0.40], &[0.49], &[0.30], &[-0.69]],
        &[&[-0.14, -0.66, 0.10, 0.34, 0.05]],
        &[&[0.27]],
    )
    .expect("fixture dimensions are consistent")
}

/// Two-input benchmark (n = 5, n_w = 2, n_z = 1).
pub fn sec6_2() -> StateSpace {
    StateSpace::from_rows(
        &[
            &[-0.11, -0.15, 0.18, 0.15, -0.10],
            &[0.18, -0.53, -0.35, 0.37, -0.23],
            &[-0.64, -0.12, -0.75, 0.23, 0.59],
            &[0.34, -0.03, 0.13, -0.47, -0.67],
            &[0.55, 0.29, -0.08, 0.53, -0.81],
        ],
        &[
            &[-0.14, 0.32],
            &[-0.76, -0.42],
            &[-0.30, -0.03],
            &[0.64, -0.38],
            &[-0.12, 0.17],
        ],
        &[&[-0.35, 0.03, 0.33, 0.05, 0.14]],
        &[&[0.43, 0.23]],
    )
    .expect("fixture dimensions are consistent")
}

/// `1 / (s + 1)`: externally positive, so its L2 and L2+ gains coincide (= 1).
pub fn first_order_lag() -> StateSpace {
    StateSpace::from_rows(&[&[-1.0]], &[&[1.0]], &[&[1.0]], &[&[0.0]]).expect("scalar fixture")
}
