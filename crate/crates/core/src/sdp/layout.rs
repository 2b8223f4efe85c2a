//! Packing of symmetric matrix variables.
//!
//! Symmetric matrices that live in a PSD cone are stored as scaled upper
//! triangles (`svec`): column-major over `i <= j`, off-diagonal entries
//! multiplied by `sqrt(2)`, so that `<X, Y> = svec(X) . svec(Y)`. The
//! entrywise-nonnegative multiplier part is stored as plain upper-triangle
//! entries.

use nalgebra::DMatrix;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

pub const fn tri(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Position of `(i, j)` in the packed upper triangle.
#[inline]
pub fn svec_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    j * (j + 1) / 2 + i
}

/// Scale between a packed coordinate and the matrix entry it represents.
#[inline]
pub(crate) fn svec_scale(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        SQRT_2
    }
}

pub fn svec(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut v = vec![0.0; tri(n)];
    for j in 0..n {
        for i in 0..=j {
            v[svec_index(i, j)] = if i == j {
                m[(i, i)]
            } else {
                0.5 * (m[(i, j)] + m[(j, i)]) * SQRT_2
            };
        }
    }
    v
}

pub fn smat(v: &[f64], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        let x = v[svec_index(i, j)];
        if i == j {
            x
        } else {
            x * FRAC_1_SQRT_2
        }
    })
}

fn upper(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut v = vec![0.0; tri(n)];
    for j in 0..n {
        for i in 0..=j {
            v[svec_index(i, j)] = m[(i, j)];
        }
    }
    v
}

fn from_upper(v: &[f64], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| v[svec_index(i, j)])
}

/// Variable vector of the primal SDP: `[t, svec(P_a), svec(S), upper(M)]`
/// with `t = gamma^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableLayout {
    /// `n + n_p`
    pub n_a: usize,
    pub n_w: usize,
    /// `n_p + n_w`
    pub mult: usize,
}

/// Unpacked primal point.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalPoint {
    pub t: f64,
    pub p_a: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub m: DMatrix<f64>,
}

impl VariableLayout {
    pub fn new(n_a: usize, n_w: usize, mult: usize) -> Self {
        Self { n_a, n_w, mult }
    }

    pub const fn t(&self) -> usize {
        0
    }

    pub fn p(&self, i: usize, j: usize) -> usize {
        1 + svec_index(i, j)
    }

    pub fn s(&self, i: usize, j: usize) -> usize {
        1 + tri(self.n_a) + svec_index(i, j)
    }

    pub fn m(&self, i: usize, j: usize) -> usize {
        1 + tri(self.n_a) + tri(self.mult) + svec_index(i, j)
    }

    pub fn num_vars(&self) -> usize {
        1 + tri(self.n_a) + 2 * tri(self.mult)
    }

    pub fn pack(&self, point: &PrimalPoint) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.num_vars());
        x.push(point.t);
        x.extend(svec(&point.p_a));
        x.extend(svec(&point.s));
        x.extend(upper(&point.m));
        x
    }

    pub fn unpack(&self, x: &[f64]) -> PrimalPoint {
        assert_eq!(x.len(), self.num_vars(), "variable vector length");
        let p0 = 1;
        let s0 = p0 + tri(self.n_a);
        let m0 = s0 + tri(self.mult);
        PrimalPoint {
            t: x[0],
            p_a: smat(&x[p0..s0], self.n_a),
            s: smat(&x[s0..m0], self.mult),
            m: from_upper(&x[m0..], self.mult),
        }
    }
}
