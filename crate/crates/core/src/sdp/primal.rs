//! Primal SDP: minimise `t = gamma^2` subject to the negated bounded-real
//! LMI with copositive multiplier `Q_a = S + M` on the nonnegative signals.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;

use super::layout::VariableLayout;
use super::problem::{AffineBlock, ConeKind, ConeProblem, Sense};
use crate::filterbank::AugmentedSystem;
use crate::Result;

pub const LMI_BLOCK: &str = "lmi";
pub const S_BLOCK: &str = "multiplier_psd";
pub const M_BLOCK: &str = "multiplier_nonneg";

/// `[A_a B_a]`, the rows that multiply `P_a` in the LMI.
pub(crate) fn state_rows(aug: &AugmentedSystem) -> DMatrix<f64> {
    let n_a = aug.n_a();
    let mut k = DMatrix::zeros(n_a, n_a + aug.n_w);
    k.view_mut((0, 0), (n_a, n_a)).copy_from(&aug.a);
    k.view_mut((0, n_a), (n_a, aug.n_w)).copy_from(&aug.b);
    k
}

/// `[C_a D_a]^T [C_a D_a]`.
pub(crate) fn output_gram(aug: &AugmentedSystem) -> DMatrix<f64> {
    let n_a = aug.n_a();
    let mut g = DMatrix::zeros(aug.n_z, n_a + aug.n_w);
    g.view_mut((0, 0), (aug.n_z, n_a)).copy_from(&aug.c);
    g.view_mut((0, n_a), (aug.n_z, aug.n_w)).copy_from(&aug.d);
    g.transpose() * g
}

/// The LMI matrix (the one required to be negative semidefinite) at a point.
pub fn lmi_matrix(
    aug: &AugmentedSystem,
    t: f64,
    p_a: &DMatrix<f64>,
    q: &DMatrix<f64>,
) -> DMatrix<f64> {
    let n_a = aug.n_a();
    let l = aug.lmi_dim();
    let k = state_rows(aug);
    let mut h = output_gram(aug);
    let pk = p_a * &k;
    let mut top = h.view_mut((0, 0), (n_a, l));
    top += &pk;
    let mut left = h.view_mut((0, 0), (l, n_a));
    left += pk.transpose();
    for i in 0..aug.n_w {
        h[(n_a + i, n_a + i)] -= t;
    }
    let mut corner = h.view_mut((aug.n, aug.n), (aug.multiplier_dim(), aug.multiplier_dim()));
    corner += q;
    h
}

pub fn assemble_primal(aug: &AugmentedSystem) -> Result<(ConeProblem, VariableLayout)> {
    aug.ensure_hurwitz()?;
    let n_a = aug.n_a();
    let l = aug.lmi_dim();
    let mult = aug.multiplier_dim();
    let layout = VariableLayout::new(n_a, aug.n_w, mult);
    let mut problem = ConeProblem::new(Sense::Minimize, layout.num_vars());
    problem.objective[layout.t()] = 1.0;

    let k = state_rows(aug);
    let gram = output_gram(aug);
    let mut lmi = AffineBlock::new(LMI_BLOCK, ConeKind::Psd, l);
    for c in 0..l {
        for r in 0..=c {
            lmi.add_constant(r, c, -gram[(r, c)]);
        }
    }
    for i in 0..aug.n_w {
        lmi.add_term(layout.t(), n_a + i, n_a + i, 1.0);
    }
    // P_a enters as -(U^T P K + K^T P U) with U = [I 0]; the packed unit
    // matrix for (i, j) contributes e_i k_j^T + e_j k_i^T (scaled off-diagonal).
    let mut coef = DMatrix::zeros(l, l);
    for j in 0..n_a {
        for i in 0..=j {
            coef.fill(0.0);
            let w = if i == j { 0.5 } else { FRAC_1_SQRT_2 };
            for (a, b) in [(i, j), (j, i)] {
                for col in 0..l {
                    let v = w * k[(b, col)];
                    coef[(a, col)] += v;
                    coef[(col, a)] += v;
                }
            }
            let var = layout.p(i, j);
            for c in 0..l {
                for r in 0..=c {
                    lmi.add_term(var, r, c, -coef[(r, c)]);
                }
            }
        }
    }
    let mut s_block = AffineBlock::new(S_BLOCK, ConeKind::Psd, mult);
    let mut m_block = AffineBlock::new(
        M_BLOCK,
        ConeKind::Nonnegative,
        layout.num_vars() - layout.m(0, 0),
    );
    for j in 0..mult {
        for i in 0..=j {
            let s_scale = if i == j { 1.0 } else { FRAC_1_SQRT_2 };
            lmi.add_term(layout.s(i, j), aug.n + i, aug.n + j, -s_scale);
            lmi.add_term(layout.m(i, j), aug.n + i, aug.n + j, -1.0);
            s_block.add_term(layout.s(i, j), i, j, s_scale);
            m_block.add_term(layout.m(i, j), layout.m(i, j) - layout.m(0, 0), 0, 1.0);
        }
    }
    problem.blocks = vec![lmi, s_block, m_block];
    Ok((problem, layout))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbank::{augment, PositiveFilterSpec};
    use crate::fixtures;
    use crate::sdp::layout::PrimalPoint;

    #[test]
    fn block_sizes_follow_dimensions() {
        let ss = fixtures::sec6_2();
        let aug = augment(&ss, &PositiveFilterSpec::none(2)).unwrap();
        let (p, layout) = assemble_primal(&aug).unwrap();
        assert_eq!(p.block(LMI_BLOCK).unwrap().dim, 7);
        assert_eq!(p.block(S_BLOCK).unwrap().dim, 2);
        assert_eq!(layout.mult, 2);

        let ss = fixtures::sec6_1();
        let aug = augment(&ss, &PositiveFilterSpec::new(-1.4, 15, 1).unwrap()).unwrap();
        let (p, _) = assemble_primal(&aug).unwrap();
        assert_eq!(p.block(LMI_BLOCK).unwrap().dim, 21);
        assert_eq!(p.block(S_BLOCK).unwrap().dim, 16);
    }

    #[test]
    fn affine_encoding_matches_direct_evaluation() {
        let ss = fixtures::sec6_2();
        let aug = augment(&ss, &PositiveFilterSpec::new(-1.2, 2, 2).unwrap()).unwrap();
        let (p, layout) = assemble_primal(&aug).unwrap();
        let n_a = aug.n_a();
        let mult = aug.multiplier_dim();
        let sym = |n: usize, seed: f64| {
            DMatrix::from_fn(n, n, |i, j| {
                ((i + j) as f64 * seed + (i * j) as f64 * 0.37).sin()
            })
        };
        let point = PrimalPoint {
            t: 0.7,
            p_a: sym(n_a, 0.61),
            s: sym(mult, 1.3),
            m: sym(mult, 0.29).abs(),
        };
        let x = layout.pack(&point);
        let lhs = p.block(LMI_BLOCK).unwrap().evaluate(&x);
        let rhs = -lmi_matrix(&aug, point.t, &point.p_a, &(&point.s + &point.m));
        assert!((lhs - rhs).abs().max() < 1e-12);
        assert!(
            (p.block(S_BLOCK).unwrap().evaluate(&x) - &point.s)
                .abs()
                .max()
                < 1e-12
        );
        assert_eq!(p.objective_value(&x), 0.7);
    }
}
