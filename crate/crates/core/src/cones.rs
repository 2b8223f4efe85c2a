//! Copositive multipliers and copositivity oracles.
//!
//! The multiplier cone used by the SDP is `PSD + NN`, an inner approximation
//! of the copositive cone (exact up to order 4). Certifying copositivity is
//! co-NP-complete in general, so the oracles here are one-sided: a grid over
//! the unit simplex can refute copositivity, never prove it.

use nalgebra::DMatrix;

use crate::linsys::{first_negative_off_diagonal, min_sym_eig, solve_lyapunov};
use crate::par::{self, Execution};
use crate::{Error, Result};

pub const TOL_COP: f64 = 1e-8;
pub const SIMPLEX_DIM_CAP: usize = 8;
pub const MIN_RESOLUTION: usize = 10;

/// `Q = S + M` with `S` psd and `M` entrywise nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct CopositiveMultiplier {
    pub s: DMatrix<f64>,
    pub m: DMatrix<f64>,
}

impl CopositiveMultiplier {
    pub fn new(s: DMatrix<f64>, m: DMatrix<f64>, tol: f64) -> Result<Self> {
        let k = s.nrows();
        if s.shape() != (k, k) || m.shape() != (k, k) {
            return Err(Error::dims(format!(
                "multiplier parts must be square of equal order, got {:?} and {:?}",
                s.shape(),
                m.shape()
            )));
        }
        let out = Self { s, m };
        out.validate(tol)?;
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    pub fn q(&self) -> DMatrix<f64> {
        &self.s + &self.m
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let asym = |x: &DMatrix<f64>| (x - x.transpose()).abs().max();
        if asym(&self.s) > tol || asym(&self.m) > tol {
            return Err(Error::StructureMismatch(
                "multiplier parts must be symmetric".into(),
            ));
        }
        let lam = min_sym_eig(&self.s);
        if lam < -tol {
            return Err(Error::StructureMismatch(format!(
                "S has eigenvalue {lam:e}"
            )));
        }
        if self.dim() > 0 && self.m.min() < -tol {
            return Err(Error::StructureMismatch(format!(
                "M has entry {:e}",
                self.m.min()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexMin {
    pub value: f64,
    pub argmin: Vec<f64>,
    pub points: usize,
}

impl SimplexMin {
    /// Grid verdict; only `false` is conclusive.
    pub fn grid_copositive(&self) -> bool {
        self.value >= -TOL_COP
    }
}

/// Subdivisions per simplex edge used when none is given.
pub fn default_resolution(m: usize) -> usize {
    match m {
        0..=3 => 60,
        4..=6 => 25,
        _ => 15,
    }
}

pub fn simplex_min(q: &DMatrix<f64>, resolution: usize) -> Result<SimplexMin> {
    simplex_min_with(q, resolution, Execution::default())
}

/// Minimum of `x^T Q x` over `{x >= 0, sum x = 1, resolution * x integral}`.
pub fn simplex_min_with(
    q: &DMatrix<f64>,
    resolution: usize,
    exec: Execution,
) -> Result<SimplexMin> {
    let m = q.nrows();
    if q.ncols() != m || m == 0 {
        return Err(Error::dims(format!(
            "simplex_min needs a nonempty square matrix, got {:?}",
            q.shape()
        )));
    }
    if m > SIMPLEX_DIM_CAP {
        return Err(Error::DimensionTooLarge {
            dim: m,
            cap: SIMPLEX_DIM_CAP,
        });
    }
    if resolution < MIN_RESOLUTION {
        return Err(Error::schema(
            "resolution",
            format!("must be at least {MIN_RESOLUTION}"),
        ));
    }
    let qs = (q + q.transpose()) * 0.5;
    let h = 1.0 / resolution as f64;
    // Split on the first coordinate; each chunk scans its compositions in
    // lexicographic order so ties resolve identically under any execution.
    let chunks = par::map_range(exec, resolution + 1, |k0| {
        let mut counts = vec![0usize; m];
        counts[0] = k0;
        let mut best = (f64::INFINITY, Vec::new(), 0usize);
        scan(&qs, h, &mut counts, 1, resolution - k0, &mut best);
        best
    });
    let mut value = f64::INFINITY;
    let mut argmin = Vec::new();
    let mut points = 0;
    for (v, x, n) in chunks {
        points += n;
        if v < value {
            value = v;
            argmin = x;
        }
    }
    Ok(SimplexMin {
        value,
        argmin,
        points,
    })
}

fn scan(
    q: &DMatrix<f64>,
    h: f64,
    counts: &mut [usize],
    pos: usize,
    left: usize,
    best: &mut (f64, Vec<f64>, usize),
) {
    let m = counts.len();
    if pos == m - 1 || m == 1 {
        if m == 1 {
            if left != 0 {
                return;
            }
        } else {
            counts[pos] = left;
        }
        let x: Vec<f64> = counts.iter().map(|&c| c as f64 * h).collect();
        let mut v = 0.0;
        for j in 0..m {
            let mut row = 0.0;
            for i in 0..m {
                row += q[(i, j)] * x[i];
            }
            v += row * x[j];
        }
        best.2 += 1;
        if v < best.0 {
            best.0 = v;
            best.1 = x;
        }
        return;
    }
    for k in (0..=left).rev() {
        counts[pos] = k;
        scan(q, h, counts, pos + 1, left - k, best);
    }
}

/// Exact copositivity of a symmetric 2x2 matrix.
pub fn is_copositive_2x2(q: &DMatrix<f64>) -> bool {
    const TOL: f64 = 1e-12;
    assert_eq!(q.shape(), (2, 2), "is_copositive_2x2 needs a 2x2 matrix");
    let (a, b, c) = (q[(0, 0)], 0.5 * (q[(0, 1)] + q[(1, 0)]), q[(1, 1)]);
    a >= -TOL && c >= -TOL && b + (a.max(0.0) * c.max(0.0)).sqrt() >= -TOL
}

/// `P_p` with `P_p A_p + A_p^T P_p + Q11 = 0` for Metzler Hurwitz `A_p`.
pub fn lemma1_solution(a_p: &DMatrix<f64>, q11: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !a_p.is_square() {
        return Err(Error::dims("A_p must be square"));
    }
    if let Some((row, col, value)) = first_negative_off_diagonal(a_p) {
        return Err(Error::NotMetzler { row, col, value });
    }
    solve_lyapunov(a_p, q11)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m2(v: [f64; 4]) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &v)
    }

    #[test]
    fn simplex_min_examples() {
        let r = simplex_min(&DMatrix::identity(2, 2), 60).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        assert_eq!(r.argmin, vec![0.5, 0.5]);
        assert!(r.grid_copositive());
        let r = simplex_min(&m2([0.0, -1.0, -1.0, 0.0]), 60).unwrap();
        assert!((r.value + 0.5).abs() < 1e-12 && !r.grid_copositive());
        let r = simplex_min(&m2([1.0, -1.0, -1.0, 1.0]), 60).unwrap();
        assert!(r.value.abs() < 1e-12 && r.grid_copositive());
    }

    #[test]
    fn simplex_grid_size_and_caps() {
        // C(res + m - 1, m - 1) points
        let r = simplex_min(&DMatrix::identity(3, 3), 10).unwrap();
        assert_eq!(r.points, 66);
        assert!(matches!(
            simplex_min(&DMatrix::identity(9, 9), 10),
            Err(Error::DimensionTooLarge { dim: 9, cap: 8 })
        ));
        assert!(simplex_min(&DMatrix::identity(2, 2), 5).is_err());
        assert_eq!(
            simplex_min(&DMatrix::identity(1, 1), 10).unwrap().value,
            1.0
        );
    }

    #[test]
    fn execution_does_not_change_result() {
        let q = DMatrix::from_fn(5, 5, |i, j| ((i * 3 + j * 3) as f64 * 0.7).sin() - 0.2);
        let a = simplex_min_with(&q, 20, Execution::Sequential).unwrap();
        let b = simplex_min_with(&q, 20, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn copositive_2x2_examples() {
        assert!(is_copositive_2x2(&m2([1.0, -1.0, -1.0, 1.0])));
        assert!(!is_copositive_2x2(&m2([1.0, -2.0, -2.0, 1.0])));
        assert!(is_copositive_2x2(&m2([0.0, 1.0, 1.0, 0.0])));
        assert!(!is_copositive_2x2(&m2([-0.1, 1.0, 1.0, 1.0])));
    }

    #[test]
    fn nonnegative_lyapunov_examples() {
        let p = lemma1_solution(
            &DMatrix::from_element(1, 1, -1.0),
            &DMatrix::from_element(1, 1, 2.0),
        )
        .unwrap();
        assert!((p[(0, 0)] - 1.0).abs() < 1e-12);
        // By hand: p11 = 1/2, p12 = 1/4, p22 = 3/4.
        let a = m2([-1.0, 1.0, 0.0, -1.0]);
        let p = lemma1_solution(&a, &DMatrix::identity(2, 2)).unwrap();
        assert!((p - m2([0.5, 0.25, 0.25, 0.75])).abs().max() < 1e-12);
        assert!(matches!(
            lemma1_solution(&m2([-1.0, -0.1, 0.0, -1.0]), &DMatrix::identity(2, 2)),
            Err(Error::NotMetzler { row: 0, col: 1, .. })
        ));
        assert!(matches!(
            lemma1_solution(&m2([0.5, 0.0, 0.0, -1.0]), &DMatrix::identity(2, 2)),
            Err(Error::NotHurwitz { .. })
        ));
    }

    #[test]
    fn multiplier_validation() {
        let ok = CopositiveMultiplier::new(DMatrix::identity(2, 2), m2([0.0, 0.3, 0.3, 0.0]), 1e-9)
            .unwrap();
        assert!(simplex_min(&ok.q(), 60).unwrap().value >= -TOL_COP);
        assert!(
            CopositiveMultiplier::new(m2([1.0, 0.0, 0.0, -1.0]), DMatrix::zeros(2, 2), 1e-9)
                .is_err()
        );
        assert!(CopositiveMultiplier::new(
            DMatrix::identity(2, 2),
            m2([0.0, -0.3, -0.3, 0.0]),
            1e-9
        )
        .is_err());
    }

    fn sym3() -> impl Strategy<Value = DMatrix<f64>> {
        proptest::collection::vec(-1.0..1.0f64, 6).prop_map(|v| {
            DMatrix::from_row_slice(
                3,
                3,
                &[v[0], v[1], v[2], v[1], v[3], v[4], v[2], v[4], v[5]],
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn adding_nonnegative_never_lowers_min(q in sym3(), n in sym3()) {
            let nn = n.abs();
            let a = simplex_min(&q, 20).unwrap().value;
            let b = simplex_min(&(&q + nn), 20).unwrap().value;
            prop_assert!(b >= a - 1e-12);
        }

        #[test]
        fn psd_plus_nn_is_grid_copositive(f in sym3(), n in sym3()) {
            let s = &f * f.transpose();
            let q = CopositiveMultiplier::new(s, n.abs(), 1e-9).unwrap().q();
            prop_assert!(simplex_min(&q, 20).unwrap().value >= -TOL_COP);
        }
    }
}
