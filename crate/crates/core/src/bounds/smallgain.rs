use serde::Serialize;

use crate::linsys::{hinf_norm, DEFAULT_HINF_TOL};
use crate::{Result, StateSpace};

use super::cell::{solve_cell_with, BoundOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertificateMethod {
    /// `‖G‖_2 < 1`: stable for every unit-gain feedback.
    L2,
    /// `‖G‖_2 >= 1` but the L2+ bound is `< 1`: stable for every unit-gain
    /// feedback whose output is nonnegative.
    L2Plus,
    None,
}

impl CertificateMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificateMethod::L2 => "L2",
            CertificateMethod::L2Plus => "L2plus",
            CertificateMethod::None => "none",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub method: CertificateMethod,
    /// The gain that closes the argument (`None` when no certificate).
    pub gamma_used: Option<f64>,
    pub hinf: f64,
    /// L2+ bound, when it was needed and solved.
    pub bound: Option<f64>,
}

pub fn certify_small_gain(ss: &StateSpace, alpha: f64, degree: usize) -> Result<Certificate> {
    certify_small_gain_with(ss, alpha, degree, &BoundOptions::default())
}

/// Small-gain certificate for the loop `w = Phi(z)`. `Phi` maps the `n_z`
/// outputs to `n_w` inputs, so the plant need not be square.
pub fn certify_small_gain_with(
    ss: &StateSpace,
    alpha: f64,
    degree: usize,
    options: &BoundOptions,
) -> Result<Certificate> {
    ss.ensure_hurwitz()?;
    let hinf = hinf_norm(ss, DEFAULT_HINF_TOL)?;
    if hinf < 1.0 {
        return Ok(Certificate {
            method: CertificateMethod::L2,
            gamma_used: Some(hinf),
            hinf,
            bound: None,
        });
    }
    ss.validate_for_analysis()?;
    let bound = solve_cell_with(ss, alpha, degree, options)?.gamma();
    let certified = bound < 1.0;
    Ok(Certificate {
        method: if certified {
            CertificateMethod::L2Plus
        } else {
            CertificateMethod::None
        },
        gamma_used: certified.then_some(bound),
        hinf,
        bound: Some(bound),
    })
}
