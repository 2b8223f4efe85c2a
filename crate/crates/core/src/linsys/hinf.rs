//! H-infinity norm by bisection on the Hamiltonian imaginary-axis test.
//!
//! For `gamma > sigma_max(D)` the system norm is below `gamma` iff the
//! Hamiltonian
//!
//! ```text
//! H = [ A + B R^-1 D^T C        B R^-1 B^T          ]
//!     [ -C^T (I + D R^-1 D^T) C  -(A + B R^-1 D^T C)^T ],   R = gamma^2 I - D^T D
//! ```
//!
//! has no eigenvalue on the imaginary axis. Whenever the test finds crossing
//! frequencies, the frequency response there (and at midpoints between
//! crossings) tightens the lower end of the bracket.

use nalgebra::{Complex, DMatrix};

use super::eigenvalues;
use crate::{Error, Result, StateSpace};

pub const DEFAULT_HINF_TOL: f64 = 1e-6;

const MAX_BISECTIONS: usize = 200;

/// `sigma_max(G(j omega))` with `G(s) = C (sI - A)^-1 B + D`.
pub fn sigma_max_at(ss: &StateSpace, omega: f64) -> Result<f64> {
    let n = ss.n();
    let to_c = |m: &DMatrix<f64>| m.map(|v| Complex::new(v, 0.0));
    let mut s_minus_a = -to_c(&ss.a);
    for i in 0..n {
        s_minus_a[(i, i)] += Complex::new(0.0, omega);
    }
    let x = s_minus_a
        .lu()
        .solve(&to_c(&ss.b))
        .ok_or_else(|| Error::Solver(format!("jwI - A singular at omega = {omega}")))?;
    let g = to_c(&ss.c) * x + to_c(&ss.d);
    Ok(g.singular_values().iter().copied().fold(0.0, f64::max))
}

fn sigma_max_real(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Imaginary-axis eigenvalues (as nonnegative frequencies) of the Hamiltonian
/// for level `gamma`.
fn crossing_frequencies(ss: &StateSpace, gamma: f64) -> Result<Vec<f64>> {
    let (n, m) = (ss.n(), ss.n_w());
    let dt = ss.d.transpose();
    let r = DMatrix::identity(m, m) * (gamma * gamma) - &dt * &ss.d;
    let r_inv = r
        .try_inverse()
        .ok_or_else(|| Error::Solver("gamma^2 I - D^T D is singular".into()))?;
    let h11 = &ss.a + &ss.b * &r_inv * &dt * &ss.c;
    let h12 = &ss.b * &r_inv * ss.b.transpose();
    let p = ss.n_z();
    let h21 = -(ss.c.transpose() * (DMatrix::identity(p, p) + &ss.d * &r_inv * &dt) * &ss.c);
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(&h11);
    h.view_mut((0, n), (n, n)).copy_from(&h12);
    h.view_mut((n, 0), (n, n)).copy_from(&h21);
    h.view_mut((n, n), (n, n)).copy_from(&(-h11.transpose()));
    let scale = 1.0 + h.norm();
    let mut freqs: Vec<f64> = eigenvalues(&h)?
        .into_iter()
        .filter(|l| l.re.abs() <= 1e-8 * scale)
        .map(|l| l.im.abs())
        .collect();
    freqs.sort_by(f64::total_cmp);
    freqs.dedup_by(|a, b| (*a - *b).abs() <= 1e-10 * scale);
    Ok(freqs)
}

/// `‖G‖_inf` to within `tol` (absolute). Requires Hurwitz `A`.
pub fn hinf_norm(ss: &StateSpace, tol: f64) -> Result<f64> {
    ss.ensure_hurwitz()?;
    let tol = if tol > 0.0 { tol } else { DEFAULT_HINF_TOL };
    let sigma_d = sigma_max_real(&ss.d);
    if ss.c.iter().all(|&v| v == 0.0) || ss.b.iter().all(|&v| v == 0.0) {
        return Ok(sigma_d);
    }

    let mut lower = sigma_d.max(sigma_max_at(ss, 0.0)?);
    for lambda in eigenvalues(&ss.a)? {
        lower = lower.max(sigma_max_at(ss, lambda.im.abs())?);
        lower = lower.max(sigma_max_at(ss, lambda.norm())?);
    }

    let probe = |gamma: f64, lower: &mut f64| -> Result<bool> {
        let freqs = crossing_frequencies(ss, gamma)?;
        if freqs.is_empty() {
            return Ok(false);
        }
        let mut best = gamma;
        for w in &freqs {
            best = best.max(sigma_max_at(ss, *w)?);
        }
        for pair in freqs.windows(2) {
            best = best.max(sigma_max_at(ss, 0.5 * (pair[0] + pair[1]))?);
        }
        *lower = lower.max(best);
        Ok(true)
    };

    let mut upper = (2.0 * lower).max(lower + tol);
    let mut doublings = 0;
    while probe(upper, &mut lower)? {
        upper = 2.0 * upper.max(lower);
        doublings += 1;
        if doublings > 60 {
            return Err(Error::Solver(
                "failed to bracket the H-infinity norm".into(),
            ));
        }
    }

    for _ in 0..MAX_BISECTIONS {
        if upper - lower <= tol {
            break;
        }
        let mid = 0.5 * (lower + upper);
        if !probe(mid, &mut lower)? {
            upper = mid;
        }
        if lower > upper {
            upper = lower + tol;
        }
    }
    Ok(0.5 * (lower + upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn first_order_lag() {
        let ss = StateSpace::from_rows(&[&[-1.0]], &[&[1.0]], &[&[1.0]], &[&[0.0]]).unwrap();
        assert_abs_diff_eq!(hinf_norm(&ss, 1e-8).unwrap(), 1.0, epsilon = 1e-7);
    }

    #[test]
    fn resonant_second_order() {
        // 1 / (s^2 + 2 zeta s + 1) peaks at 1 / (2 zeta sqrt(1 - zeta^2)).
        let zeta: f64 = 0.05;
        let ss = StateSpace::from_rows(
            &[&[0.0, 1.0], &[-1.0, -2.0 * zeta]],
            &[&[0.0], &[1.0]],
            &[&[1.0, 0.0]],
            &[&[0.0]],
        )
        .unwrap();
        let exact = 1.0 / (2.0 * zeta * (1.0 - zeta * zeta).sqrt());
        assert_abs_diff_eq!(hinf_norm(&ss, 1e-7).unwrap(), exact, epsilon = 1e-6);
    }

    #[test]
    fn feedthrough_dominates() {
        let ss = StateSpace::from_rows(&[&[-1.0]], &[&[1.0]], &[&[0.1]], &[&[-2.0]]).unwrap();
        // |G(jw)| = |-2 + 0.1 / (jw + 1)| is maximal at w = 0: 1.9 ... and 2 as w -> inf.
        assert_abs_diff_eq!(hinf_norm(&ss, 1e-8).unwrap(), 2.0, epsilon = 1e-7);
        let zero = StateSpace::from_rows(&[&[-1.0]], &[&[1.0]], &[&[0.0]], &[&[0.0]]).unwrap();
        assert_eq!(hinf_norm(&zero, 1e-6).unwrap(), 0.0);
    }
}
