//! Membership in `PSD + NN` by a small conic solve:
//! minimise `tau` subject to `Q + tau I = S + M`, `S` psd, `M >= 0`.
//! `Q` is a member iff the optimal `tau` is (numerically) nonpositive.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;

use super::backend::{solve_conic, SolveStatus, SolverSettings};
use super::layout::{smat, svec_index, tri};
use super::problem::{AffineBlock, ConeKind, ConeProblem, Sense};
use crate::{Error, Result};

pub const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Membership {
    pub member: bool,
    /// Optimal shift; `<= 0` means `Q` itself decomposes.
    pub tau: f64,
    pub s: DMatrix<f64>,
    pub m: DMatrix<f64>,
}

pub fn psd_nn_membership(q: &DMatrix<f64>) -> Result<Membership> {
    let k = q.nrows();
    if q.ncols() != k || k == 0 {
        return Err(Error::dims("membership needs a nonempty square matrix"));
    }
    let (s0, m0) = (1, 1 + tri(k));
    let mut p = ConeProblem::new(Sense::Minimize, 1 + 2 * tri(k));
    p.objective[0] = 1.0;
    let mut eq = AffineBlock::new("decomposition", ConeKind::Zero, tri(k));
    let mut s = AffineBlock::new("s", ConeKind::Psd, k);
    let mut m = AffineBlock::new("m", ConeKind::Nonnegative, tri(k));
    for j in 0..k {
        for i in 0..=j {
            let row = svec_index(i, j);
            let sc = if i == j { 1.0 } else { FRAC_1_SQRT_2 };
            eq.add_constant(row, 0, 0.5 * (q[(i, j)] + q[(j, i)]));
            if i == j {
                eq.add_term(0, row, 0, 1.0);
            }
            eq.add_term(s0 + row, row, 0, -sc);
            eq.add_term(m0 + row, row, 0, -1.0);
            s.add_term(s0 + row, i, j, sc);
            m.add_term(m0 + row, row, 0, 1.0);
        }
    }
    p.blocks = vec![eq, s, m];
    let sol = solve_conic(&p, &SolverSettings::default())?;
    if sol.status != SolveStatus::Optimal {
        return Err(Error::NumericalTrouble(format!(
            "membership solve ended with {}",
            sol.backend_status
        )));
    }
    let tau = sol.x[0];
    Ok(Membership {
        member: tau <= MEMBERSHIP_TOL,
        tau,
        s: smat(&sol.x[s0..m0], k),
        m: DMatrix::from_fn(k, k, |i, j| sol.x[m0 + svec_index(i, j)]),
    })
}
