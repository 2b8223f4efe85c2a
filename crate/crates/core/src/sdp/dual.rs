//! Dual SDP over `Z` in the PSD cone of order `n + n_p + n_w`:
//!
//! ```text
//! maximise   tr(G^T G Z),  G = [C_a D_a]
//! subject to Z psd,  tr(Z_33) = 1,
//!            A_a Z_a + B_a Z_b^T + (A_a Z_a + B_a Z_b^T)^T = 0,
//!            Z_c >= 0 entrywise,
//! ```
//!
//! with `Z_a` the leading `(n + n_p)` block, `Z_b` the trailing `n_w` columns
//! of the leading rows, `Z_33` the trailing `n_w` block and `Z_c` the trailing
//! `(n_p + n_w)` block. The variable vector is `svec(Z)`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use nalgebra::DMatrix;

use super::layout::{smat, svec_index, tri};
use super::primal::{output_gram, state_rows};
use super::problem::{AffineBlock, ConeKind, ConeProblem, Sense};
use crate::filterbank::AugmentedSystem;
use crate::Result;

pub const Z_BLOCK: &str = "z";
pub const TRACE_BLOCK: &str = "trace_z33";
pub const LYAPUNOV_BLOCK: &str = "lyapunov";
pub const ZC_BLOCK: &str = "z_c";

/// `Z_kc = coef * x[var]`.
fn entry(k: usize, c: usize) -> (usize, f64) {
    (svec_index(k, c), if k == c { 1.0 } else { FRAC_1_SQRT_2 })
}

pub fn build_dual(aug: &AugmentedSystem) -> Result<ConeProblem> {
    aug.ensure_hurwitz()?;
    let n_a = aug.n_a();
    let l = aug.lmi_dim();
    let mult = aug.multiplier_dim();
    let mut problem = ConeProblem::new(Sense::Maximize, tri(l));
    let gram = output_gram(aug);
    for j in 0..l {
        for i in 0..=j {
            let w = if i == j { 1.0 } else { SQRT_2 };
            problem.objective[svec_index(i, j)] = w * gram[(i, j)];
        }
    }

    let mut z = AffineBlock::new(Z_BLOCK, ConeKind::Psd, l);
    for j in 0..l {
        for i in 0..=j {
            let (var, coef) = entry(i, j);
            z.add_term(var, i, j, coef);
        }
    }

    let mut trace = AffineBlock::new(TRACE_BLOCK, ConeKind::Zero, 1);
    for i in n_a..l {
        trace.add_term(svec_index(i, i), 0, 0, 1.0);
    }
    trace.add_constant(0, 0, -1.0);

    let k = state_rows(aug);
    let mut lyap = AffineBlock::new(LYAPUNOV_BLOCK, ConeKind::Zero, tri(n_a));
    for c in 0..n_a {
        for r in 0..=c {
            let row = svec_index(r, c);
            for q in 0..l {
                let (var, coef) = entry(q, c);
                lyap.add_term(var, row, 0, k[(r, q)] * coef);
                let (var, coef) = entry(q, r);
                lyap.add_term(var, row, 0, k[(c, q)] * coef);
            }
        }
    }

    let mut zc = AffineBlock::new(ZC_BLOCK, ConeKind::Nonnegative, tri(mult));
    for j in 0..mult {
        for i in 0..=j {
            let (var, coef) = entry(aug.n + i, aug.n + j);
            zc.add_term(var, svec_index(i, j), 0, coef);
        }
    }

    problem.blocks = vec![z, trace, lyap, zc];
    Ok(problem)
}

/// Dual objective `tr(G^T G Z)` evaluated directly.
pub fn dual_objective(aug: &AugmentedSystem, z: &DMatrix<f64>) -> f64 {
    output_gram(aug).component_mul(z).sum()
}

/// `A_a Z_a + B_a Z_b^T + (.)^T`.
pub fn lyapunov_residual_matrix(aug: &AugmentedSystem, z: &DMatrix<f64>) -> DMatrix<f64> {
    let n_a = aug.n_a();
    let y = state_rows(aug) * z.columns(0, n_a);
    &y + y.transpose()
}

/// Unpacks `svec(Z)` from a dual solve.
pub fn z_from_vars(aug: &AugmentedSystem, x: &[f64]) -> DMatrix<f64> {
    smat(x, aug.lmi_dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbank::{augment, PositiveFilterSpec};
    use crate::fixtures;
    use crate::sdp::layout::svec;

    #[test]
    fn encoding_matches_direct_formulas() {
        let ss = fixtures::sec6_2();
        let aug = augment(&ss, &PositiveFilterSpec::new(-1.0, 2, 2).unwrap()).unwrap();
        let l = aug.lmi_dim();
        let z = DMatrix::from_fn(l, l, |i, j| {
            ((i * 7 + j * 7) as f64 * 0.13 + (i * j) as f64 * 0.05).cos()
        });
        let x = svec(&z);
        let p = build_dual(&aug).unwrap();
        assert!((p.objective_value(&x) - dual_objective(&aug, &z)).abs() < 1e-10);
        let lyap = p.block(LYAPUNOV_BLOCK).unwrap().evaluate(&x);
        let direct = lyapunov_residual_matrix(&aug, &z);
        for c in 0..aug.n_a() {
            for r in 0..=c {
                assert!((lyap[(svec_index(r, c), 0)] - direct[(r, c)]).abs() < 1e-10);
            }
        }
        let tr = p.block(TRACE_BLOCK).unwrap().evaluate(&x)[(0, 0)];
        let z33 = z.view((aug.n_a(), aug.n_a()), (2, 2)).trace();
        assert!((tr - (z33 - 1.0)).abs() < 1e-12);
        let zc = p.block(ZC_BLOCK).unwrap().evaluate(&x);
        assert!((zc[(svec_index(0, 3), 0)] - z[(aug.n, aug.n + 3)]).abs() < 1e-12);
        assert!((z_from_vars(&aug, &x) - z).abs().max() < 1e-12);
    }
}
