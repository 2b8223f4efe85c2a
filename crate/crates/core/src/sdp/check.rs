//! Independent re-evaluation of solver output against the LMI and the
//! structural properties an optimal point must have.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::primal::lmi_matrix;
use super::result::SolveResult;
use crate::cones::{default_resolution, simplex_min};
use crate::filterbank::AugmentedSystem;
use crate::linsys::{max_sym_eig, min_sym_eig};

pub const STRUCTURE_TOL: f64 = 1e-7;
pub const MULTIPLIER_NN_TOL: f64 = 1e-9;
const SIMPLEX_MAX_DIM: usize = 6;

/// Largest eigenvalue of the LMI matrix at the reported point, clipped at 0.
pub fn lmi_residual(aug: &AugmentedSystem, res: &SolveResult) -> f64 {
    max_sym_eig(&lmi_matrix(aug, res.t, &res.p_a, &res.q())).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub lmi_residual: f64,
    /// Smallest eigenvalue of the plant block of `P_a`.
    pub top_left_min_eig: f64,
    /// `min x^T P_a x / |x|^2` over random vectors with nonnegative filter part.
    pub min_quadratic_ratio: f64,
    pub samples: usize,
    pub s_min_eig: f64,
    pub m_min_entry: f64,
    /// Grid minimum of `S + M` over the simplex (small multipliers only).
    pub q_simplex_min: Option<f64>,
}

impl StructureReport {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.lmi_residual > STRUCTURE_TOL {
            out.push(format!("LMI residual {:e}", self.lmi_residual));
        }
        if self.top_left_min_eig < -STRUCTURE_TOL {
            out.push(format!(
                "plant block of P_a has eigenvalue {:e}",
                self.top_left_min_eig
            ));
        }
        if self.min_quadratic_ratio < -STRUCTURE_TOL {
            out.push(format!(
                "x'P_a x / |x|^2 reached {:e}",
                self.min_quadratic_ratio
            ));
        }
        if self.s_min_eig < -STRUCTURE_TOL {
            out.push(format!("S has eigenvalue {:e}", self.s_min_eig));
        }
        if self.m_min_entry < -MULTIPLIER_NN_TOL {
            out.push(format!("M has entry {:e}", self.m_min_entry));
        }
        if let Some(v) = self.q_simplex_min {
            if v < -STRUCTURE_TOL {
                out.push(format!("S + M simplex minimum {v:e}"));
            }
        }
        out
    }

    pub fn passes(&self) -> bool {
        self.failures().is_empty()
    }
}

pub fn check_structure(
    aug: &AugmentedSystem,
    res: &SolveResult,
    samples: usize,
    seed: u64,
) -> StructureReport {
    let n = aug.n;
    let n_a = aug.n_a();
    let top_left = res.p_a.view((0, 0), (n, n)).into_owned();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_ratio = f64::INFINITY;
    for _ in 0..samples {
        let x = DVector::from_fn(n_a, |i, _| {
            let g: f64 = StandardNormal.sample(&mut rng);
            if i < n {
                g
            } else {
                g.abs()
            }
        });
        let ratio = x.dot(&(&res.p_a * &x)) / x.norm_squared();
        min_ratio = min_ratio.min(ratio);
    }
    let q = res.q();
    let q_simplex_min = (q.nrows() <= SIMPLEX_MAX_DIM).then(|| {
        simplex_min(&q, default_resolution(q.nrows()))
            .map(|r| r.value)
            .unwrap_or(f64::NEG_INFINITY)
    });
    StructureReport {
        lmi_residual: lmi_residual(aug, res),
        top_left_min_eig: min_sym_eig(&top_left),
        min_quadratic_ratio: if samples == 0 { 0.0 } else { min_ratio },
        samples,
        s_min_eig: min_sym_eig(&res.s),
        m_min_entry: min_entry(&res.m),
        q_simplex_min,
    }
}

fn min_entry(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        0.0
    } else {
        m.min()
    }
}
