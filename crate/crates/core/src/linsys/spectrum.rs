use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use super::TOL_SIGN;
use crate::{Error, Result, StateSpace};

/// Eigenvalues of a real square matrix (LAPACK `dgeev`: balancing plus
/// shifted Hessenberg QR, robust on Hamiltonian spectra).
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    if a.nrows() != a.ncols() {
        return Err(Error::dims(format!(
            "eigenvalues need a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let n = a.nrows();
    let n32 =
        i32::try_from(n).map_err(|_| Error::dims(format!("matrix of order {n} is too large")))?;
    let mut m = a.clone();
    let (mut wr, mut wi) = (vec![0.0; n], vec![0.0; n]);
    let lwork = 4 * n32.max(1);
    let mut work = vec![0.0; lwork as usize];
    let mut info = 0;
    // Column-major storage matches LAPACK; no eigenvectors are requested.
    unsafe {
        lapack::dgeev(
            b'N',
            b'N',
            n32,
            m.as_mut_slice(),
            n32,
            &mut wr,
            &mut wi,
            &mut [],
            1,
            &mut [],
            1,
            &mut work,
            lwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Solver(format!(
            "eigenvalue iteration did not converge (dgeev info {info})"
        )));
    }
    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex::new(re, im))
        .collect())
}

/// Spectral abscissa `max Re(lambda)`.
pub fn max_real_eig(a: &DMatrix<f64>) -> Result<f64> {
    if a.nrows() == 0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(eigenvalues(a)?
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Eigenvalues of the symmetric part of `m`, ascending.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> DVector<f64> {
    if m.nrows() == 0 {
        return DVector::zeros(0);
    }
    let sym = (m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    DVector::from_vec(ev)
}

pub fn min_sym_eig(m: &DMatrix<f64>) -> f64 {
    sym_eigenvalues(m)
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn max_sym_eig(m: &DMatrix<f64>) -> f64 {
    sym_eigenvalues(m)
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Rank test on `[B, AB, ..., A^{n-1} B]`; singular values below
/// `n * sigma_max * 1e-10` count as zero.
pub fn is_controllable(a: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
    let n = a.nrows();
    if n == 0 {
        return true;
    }
    let m = b.ncols();
    let mut ctrb = DMatrix::zeros(n, n * m);
    let mut block = b.clone();
    for k in 0..n {
        ctrb.view_mut((0, k * m), (n, m)).copy_from(&block);
        block = a * block;
    }
    let sv = ctrb.singular_values();
    let sigma_max = sv.iter().copied().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return false;
    }
    let threshold = n as f64 * sigma_max * 1e-10;
    sv.iter().filter(|&&s| s > threshold).count() == n
}

pub fn is_metzler(a: &DMatrix<f64>) -> bool {
    first_negative_off_diagonal(a).is_none()
}

pub(crate) fn first_negative_off_diagonal(a: &DMatrix<f64>) -> Option<(usize, usize, f64)> {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if i != j && a[(i, j)] < -TOL_SIGN {
                return Some((i, j, a[(i, j)]));
            }
        }
    }
    None
}

/// Internal positivity: Metzler `A` and entrywise nonnegative `B`, `C`, `D`.
pub fn is_internally_positive(ss: &StateSpace) -> bool {
    let nonneg = |m: &DMatrix<f64>| m.iter().all(|&v| v >= -TOL_SIGN);
    is_metzler(&ss.a) && nonneg(&ss.b) && nonneg(&ss.c) && nonneg(&ss.d)
}
