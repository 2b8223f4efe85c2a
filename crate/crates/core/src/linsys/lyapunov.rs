//! Continuous Lyapunov equation `A^T P + P A + Q = 0` for symmetric `Q`.
//!
//! Solved as a dense linear system in the `n(n+1)/2` upper-triangular
//! unknowns of `P` (half-vectorised Kronecker form), followed by one step of
//! iterative refinement.

use nalgebra::{DMatrix, DVector};

use super::{max_real_eig, TOL_HURWITZ};
use crate::{Error, Result};

#[inline]
fn vech_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    j * (j + 1) / 2 + i
}

/// Solves `A^T P + P A + Q = 0`. Requires Hurwitz `A`.
pub fn solve_lyapunov(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_dims(a, q)?;
    let lambda = max_real_eig(a)?;
    if lambda >= -TOL_HURWITZ {
        return Err(Error::NotHurwitz {
            max_real_eig: lambda,
        });
    }
    lyapunov_unchecked(a, q)
}

/// `‖A^T P + P A + Q‖_F`.
pub fn lyapunov_residual(a: &DMatrix<f64>, p: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    (a.transpose() * p + p * a + q).norm()
}

fn check_dims(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<()> {
    let n = a.nrows();
    if a.ncols() != n || q.nrows() != n || q.ncols() != n {
        return Err(Error::dims(format!(
            "Lyapunov equation needs square A and Q of equal size, got {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            q.nrows(),
            q.ncols()
        )));
    }
    Ok(())
}

/// Lyapunov solve without the spectral check. The caller guarantees that no
/// two eigenvalues of `A` sum to zero (e.g. `A` block-triangular with known
/// stable diagonal blocks).
pub(crate) fn lyapunov_unchecked(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_dims(a, q)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let dim = n * (n + 1) / 2;
    let mut k = DMatrix::<f64>::zeros(dim, dim);
    for l in 0..n {
        for r in 0..=l {
            let row = vech_index(r, l);
            for m in 0..n {
                // (A^T P)_{rl} = sum_m A_{mr} P_{ml}
                k[(row, vech_index(m, l))] += a[(m, r)];
                // (P A)_{rl} = sum_m P_{rm} A_{ml}
                k[(row, vech_index(r, m))] += a[(m, l)];
            }
        }
    }
    let lu = k.lu();
    let rhs = vech(&(-(q + q.transpose()) * 0.5));
    let x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Solver("Lyapunov operator is singular".into()))?;
    let mut p = unvech(&x, n);
    let qs = (q + q.transpose()) * 0.5;
    let resid = a.transpose() * &p + &p * a + &qs;
    if let Some(delta) = lu.solve(&vech(&(-resid))) {
        p += unvech(&delta, n);
    }
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solver("Lyapunov solution is not finite".into()));
    }
    Ok(p)
}

fn vech(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows();
    let mut v = DVector::zeros(n * (n + 1) / 2);
    for j in 0..n {
        for i in 0..=j {
            v[vech_index(i, j)] = m[(i, j)];
        }
    }
    v
}

fn unvech(v: &DVector<f64>, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| v[vech_index(i, j)])
}
