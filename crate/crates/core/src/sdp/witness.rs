//! Explicit strictly feasible points of the primal and dual SDPs.

use nalgebra::DMatrix;

use super::dual::lyapunov_residual_matrix;
use super::primal::lmi_matrix;
use super::result::Partition;
use crate::filterbank::{build_positive_filter, AugmentedSystem, PositiveFilterSpec};
use crate::linsys::{is_controllable, min_sym_eig, solve_lyapunov};
use crate::{Error, Result};

pub const DEFAULT_WITNESS_EPS: f64 = 1e-3;
const DOUBLING_CAP: f64 = (1u64 << 40) as f64;
const EQUALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct PrimalWitness {
    pub p0: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub m: DMatrix<f64>,
    pub gamma: f64,
    pub eps: f64,
    /// Smallest eigenvalue of the negated LMI matrix.
    pub margin: f64,
}

/// `P_0` from `P_0 A_a + A_a^T P_0 + C_a^T C_a + 2 I = 0`, `S = I`,
/// `M = eps 1 1^T`, and `gamma` doubled from 1 until the negated LMI has
/// at least half the margin of its state block.
pub fn primal_interior_witness(aug: &AugmentedSystem, eps: f64) -> Result<PrimalWitness> {
    aug.ensure_hurwitz()?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Solver(format!(
            "witness eps must be positive, got {eps}"
        )));
    }
    let n_a = aug.n_a();
    let mult = aug.multiplier_dim();
    let q = aug.c.transpose() * &aug.c + DMatrix::identity(n_a, n_a) * 2.0;
    let p0 = solve_lyapunov(&aug.a, &q)?;
    let s = DMatrix::identity(mult, mult);
    let mut eps = eps;
    let (m, state_margin) = loop {
        let m = DMatrix::from_element(mult, mult, eps);
        let neg = -lmi_matrix(aug, 0.0, &p0, &(&s + &m));
        let state = min_sym_eig(&neg.view((0, 0), (n_a, n_a)).into_owned());
        if state > 0.0 {
            break (m, state);
        }
        eps *= 0.5;
        if eps < 1e-12 {
            return Err(Error::NumericalTrouble(
                "primal witness: state block never definite".into(),
            ));
        }
    };
    let q0 = &s + &m;
    let mut gamma = 1.0_f64;
    while gamma <= DOUBLING_CAP {
        let margin = min_sym_eig(&-lmi_matrix(aug, gamma * gamma, &p0, &q0));
        if margin >= 0.5 * state_margin {
            return Ok(PrimalWitness {
                p0,
                s,
                m,
                gamma,
                eps,
                margin,
            });
        }
        gamma *= 2.0;
    }
    Err(Error::NumericalTrouble(
        "primal witness: gamma exceeded 2^40".into(),
    ))
}

#[derive(Debug, Clone)]
pub struct DualWitness {
    pub z: DMatrix<f64>,
    pub partition: Partition,
    pub eps: f64,
    pub nu: f64,
    pub min_eig: f64,
    pub z_c_min: f64,
    pub equality_residual: f64,
}

/// Unique `Z_p` with `A_p Z_p + Z_p A_p^T + B_p 1 1^T B_p^T = 0`.
pub fn filter_gramian(spec: &PositiveFilterSpec) -> Result<DMatrix<f64>> {
    let f = build_positive_filter(spec)?;
    let ones = DMatrix::from_element(spec.n_w, spec.n_w, 1.0);
    let rhs = &f.b * ones * f.b.transpose();
    solve_lyapunov(&f.a.transpose(), &rhs)
}

/// Strictly feasible dual point built around the controllability Gramian of
/// `(A_a, B_a)`, with the filter columns of `Z_b` lifted by `eps` so that
/// `Z_c` becomes entrywise positive, and `Z_33 = nu I + 1 1^T`. `eps` is
/// halved until `Z_a` keeps half of the plain Gramian's smallest eigenvalue,
/// then `nu` doubled until `Z` keeps half of `Z_a`'s.
pub fn dual_interior_witness(aug: &AugmentedSystem, eps: f64, nu: f64) -> Result<DualWitness> {
    aug.ensure_hurwitz()?;
    if aug.jordan_spec().is_none() {
        return Err(Error::StructureMismatch(
            "dual witness needs the Jordan-chain positive filter".into(),
        ));
    }
    if !(eps > 0.0 && eps.is_finite() && nu > 0.0 && nu.is_finite()) {
        return Err(Error::Solver(format!(
            "witness needs eps > 0 and nu > 0, got {eps}, {nu}"
        )));
    }
    let (n, n_a, n_w) = (aug.n, aug.n_a(), aug.n_w);
    let at = aug.a.transpose();
    let z_a0 = solve_lyapunov(&at, &(&aug.b * aug.b.transpose() * 2.0))?;
    if !is_controllable(&aug.a, &aug.b) || min_sym_eig(&z_a0) <= 0.0 {
        return Err(Error::NotControllable);
    }

    let mut eps = eps;
    let (z_a, z_b) = loop {
        let mut z_b = aug.b.clone();
        z_b.view_mut((n, 0), (aug.n_p, n_w)).add_scalar_mut(eps);
        let rhs = &aug.b * z_b.transpose() + &z_b * aug.b.transpose();
        let z_a = solve_lyapunov(&at, &rhs)?;
        if min_sym_eig(&z_a) >= 0.5 * min_sym_eig(&z_a0) {
            break (z_a, z_b);
        }
        eps *= 0.5;
        if eps < 1e-14 {
            return Err(Error::NumericalTrouble(
                "dual witness: Z_a never definite".into(),
            ));
        }
    };

    // As nu grows the spectrum of Z approaches that of Z_a from below; stop
    // once half of Z_a's margin is reached.
    let target = 0.5 * min_sym_eig(&z_a);
    let l = aug.lmi_dim();
    let mut nu = nu;
    loop {
        let mut z = DMatrix::zeros(l, l);
        z.view_mut((0, 0), (n_a, n_a)).copy_from(&z_a);
        z.view_mut((0, n_a), (n_a, n_w)).copy_from(&z_b);
        z.view_mut((n_a, 0), (n_w, n_a)).copy_from(&z_b.transpose());
        let z33 = DMatrix::identity(n_w, n_w) * nu + DMatrix::from_element(n_w, n_w, 1.0);
        z.view_mut((n_a, n_a), (n_w, n_w)).copy_from(&z33);
        let min_eig = min_sym_eig(&z);
        if min_eig >= target {
            z /= z33.trace();
            let partition = Partition::of(aug);
            let z_c_min = partition.z_c(&z).min();
            let equality_residual = lyapunov_residual_matrix(aug, &z).abs().max();
            let w = DualWitness {
                min_eig: min_sym_eig(&z),
                z,
                partition,
                eps,
                nu,
                z_c_min,
                equality_residual,
            };
            if !(w.min_eig > 0.0 && w.z_c_min > 0.0) {
                return Err(Error::NumericalTrouble(format!(
                    "dual witness not strict: min eig {:e}, min Z_c {:e}",
                    w.min_eig, w.z_c_min
                )));
            }
            if w.equality_residual > EQUALITY_TOL {
                return Err(Error::NumericalTrouble(format!(
                    "dual witness equality residual {:e}",
                    w.equality_residual
                )));
            }
            return Ok(w);
        }
        nu *= 2.0;
        if nu > DOUBLING_CAP {
            return Err(Error::NumericalTrouble(
                "dual witness: nu exceeded 2^40".into(),
            ));
        }
    }
}
