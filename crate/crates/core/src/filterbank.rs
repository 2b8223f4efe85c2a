//! Positive Jordan-chain filter and the plant/filter augmentation.
//!
//! The filter is `x_p' = A_p x_p + B_p w` with `A_p = J_{alpha,N} ⊗ I_{n_w}`
//! (upper bidiagonal Jordan block) and `B_p = e_N ⊗ I_{n_w}`. Block `k` of
//! `x_p` (counting from the top, `k = 1..N`) is `w / (s - alpha)^{N-k+1}`, so
//! every filter state is nonnegative whenever `w` is. The augmented system
//! stacks plant and filter and exposes `z_p = [x_p; w]` as the vector of
//! signals known to be nonnegative.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linsys::{self, first_negative_off_diagonal, TOL_HURWITZ, TOL_SIGN};
use crate::{Error, Result, StateSpace};

/// Filter pole `alpha < 0`, degree `N >= 0` (`N = 0`: no filter), input width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositiveFilterSpec {
    pub alpha: f64,
    pub degree: usize,
    pub n_w: usize,
}

impl PositiveFilterSpec {
    pub fn new(alpha: f64, degree: usize, n_w: usize) -> Result<Self> {
        if !(alpha < 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidAlpha(alpha));
        }
        if n_w == 0 {
            return Err(Error::dims("filter needs n_w >= 1"));
        }
        Ok(Self { alpha, degree, n_w })
    }

    /// Filter-free specification (`N = 0`); the pole is irrelevant.
    pub fn none(n_w: usize) -> Self {
        Self {
            alpha: -1.0,
            degree: 0,
            n_w,
        }
    }

    pub fn n_p(&self) -> usize {
        self.degree * self.n_w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositiveFilter {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

/// `(J_{alpha,N} ⊗ I, e_N ⊗ I)`. For `N = 0` both matrices are empty.
pub fn build_positive_filter(spec: &PositiveFilterSpec) -> Result<PositiveFilter> {
    if !(spec.alpha < 0.0 && spec.alpha.is_finite()) {
        return Err(Error::InvalidAlpha(spec.alpha));
    }
    let (deg, m) = (spec.degree, spec.n_w);
    let n_p = deg * m;
    let mut a = DMatrix::zeros(n_p, n_p);
    let mut b = DMatrix::zeros(n_p, m);
    for blk in 0..deg {
        for i in 0..m {
            a[(blk * m + i, blk * m + i)] = spec.alpha;
            if blk + 1 < deg {
                a[(blk * m + i, (blk + 1) * m + i)] = 1.0;
            }
        }
    }
    if deg > 0 {
        for i in 0..m {
            b[((deg - 1) * m + i, i)] = 1.0;
        }
    }
    Ok(PositiveFilter { a, b })
}

#[derive(Debug, Clone, PartialEq)]
enum FilterKind {
    Jordan(PositiveFilterSpec),
    Custom,
}

/// Plant plus positive filter, with the nonnegative certificate output
/// `z_p = C_zp x_a + D_zp w = [x_p; w]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedSystem {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub c_zp: DMatrix<f64>,
    pub d_zp: DMatrix<f64>,
    pub n: usize,
    pub n_p: usize,
    pub n_w: usize,
    pub n_z: usize,
    kind: FilterKind,
    plant_abscissa: f64,
    filter_abscissa: f64,
}

/// Augments `ss` with the filter of `spec`.
pub fn augment(ss: &StateSpace, spec: &PositiveFilterSpec) -> Result<AugmentedSystem> {
    if spec.n_w != ss.n_w() {
        return Err(Error::dims(format!(
            "filter n_w = {} but plant n_w = {}",
            spec.n_w,
            ss.n_w()
        )));
    }
    let filter = build_positive_filter(spec)?;
    let filter_abscissa = if spec.degree > 0 {
        spec.alpha
    } else {
        f64::NEG_INFINITY
    };
    AugmentedSystem::assemble(ss, &filter, FilterKind::Jordan(*spec), filter_abscissa)
}

impl AugmentedSystem {
    /// Augments with an arbitrary positive filter (Metzler `A_p`, nonnegative
    /// `B_p`). Such systems are accepted by the primal SDP but not by the dual
    /// interior-witness construction, which relies on the Jordan structure.
    pub fn with_filter(ss: &StateSpace, filter: &PositiveFilter) -> Result<Self> {
        let n_p = filter.a.nrows();
        if filter.a.ncols() != n_p || filter.b.nrows() != n_p || filter.b.ncols() != ss.n_w() {
            return Err(Error::dims(format!(
                "filter must be A_p {n_p}x{n_p}, B_p {n_p}x{}, got {}x{} and {}x{}",
                ss.n_w(),
                filter.a.nrows(),
                filter.a.ncols(),
                filter.b.nrows(),
                filter.b.ncols()
            )));
        }
        if let Some((row, col, value)) = first_negative_off_diagonal(&filter.a) {
            return Err(Error::NotMetzler { row, col, value });
        }
        if filter.b.iter().any(|&v| v < -TOL_SIGN) {
            return Err(Error::StructureMismatch(
                "B_p must be entrywise nonnegative".into(),
            ));
        }
        let abscissa = linsys::max_real_eig(&filter.a)?;
        Self::assemble(ss, filter, FilterKind::Custom, abscissa)
    }

    fn assemble(
        ss: &StateSpace,
        filter: &PositiveFilter,
        kind: FilterKind,
        filter_abscissa: f64,
    ) -> Result<Self> {
        let (n, n_w, n_z) = (ss.n(), ss.n_w(), ss.n_z());
        let n_p = filter.a.nrows();
        let n_a = n + n_p;
        let mut a = DMatrix::zeros(n_a, n_a);
        a.view_mut((0, 0), (n, n)).copy_from(&ss.a);
        a.view_mut((n, n), (n_p, n_p)).copy_from(&filter.a);
        let mut b = DMatrix::zeros(n_a, n_w);
        b.view_mut((0, 0), (n, n_w)).copy_from(&ss.b);
        b.view_mut((n, 0), (n_p, n_w)).copy_from(&filter.b);
        let mut c = DMatrix::zeros(n_z, n_a);
        c.view_mut((0, 0), (n_z, n)).copy_from(&ss.c);
        let mut c_zp = DMatrix::zeros(n_p + n_w, n_a);
        for i in 0..n_p {
            c_zp[(i, n + i)] = 1.0;
        }
        let mut d_zp = DMatrix::zeros(n_p + n_w, n_w);
        for i in 0..n_w {
            d_zp[(n_p + i, i)] = 1.0;
        }
        Ok(Self {
            a,
            b,
            c,
            d: ss.d.clone(),
            c_zp,
            d_zp,
            n,
            n_p,
            n_w,
            n_z,
            kind,
            plant_abscissa: linsys::max_real_eig(&ss.a)?,
            filter_abscissa,
        })
    }

    pub fn n_a(&self) -> usize {
        self.n + self.n_p
    }

    /// Size of the copositive multiplier, `n_p + n_w`.
    pub fn multiplier_dim(&self) -> usize {
        self.n_p + self.n_w
    }

    /// Size of the LMI block, `n + n_p + n_w`.
    pub fn lmi_dim(&self) -> usize {
        self.n + self.n_p + self.n_w
    }

    /// Filter specification when the filter has the Jordan-chain form.
    pub fn jordan_spec(&self) -> Option<&PositiveFilterSpec> {
        match &self.kind {
            FilterKind::Jordan(spec) => Some(spec),
            FilterKind::Custom => None,
        }
    }

    pub fn filter_a(&self) -> DMatrix<f64> {
        self.a
            .view((self.n, self.n), (self.n_p, self.n_p))
            .into_owned()
    }

    pub fn filter_b(&self) -> DMatrix<f64> {
        self.b.view((self.n, 0), (self.n_p, self.n_w)).into_owned()
    }

    /// Spectral abscissa of `A_a`, computed blockwise so the defective
    /// filter block does not go through a nonsymmetric eigensolver.
    pub fn max_real_eig(&self) -> f64 {
        self.plant_abscissa.max(self.filter_abscissa)
    }

    pub fn ensure_hurwitz(&self) -> Result<()> {
        let lambda = self.max_real_eig();
        if lambda >= -TOL_HURWITZ {
            return Err(Error::NotHurwitz {
                max_real_eig: lambda,
            });
        }
        Ok(())
    }

    /// `(A_a, B_a, C_a, D_a)` as a plain state-space system.
    pub fn performance_system(&self) -> StateSpace {
        StateSpace {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            d: self.d.clone(),
        }
    }

    /// `(A_a, B_a, C_zp, D_zp)`: the map from `w` to the nonnegative signals.
    pub fn certificate_system(&self) -> StateSpace {
        StateSpace {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c_zp.clone(),
            d: self.d_zp.clone(),
        }
    }

    /// `(A_p, B_p, I, 0)`, only meaningful for `n_p > 0`.
    pub fn filter_system(&self) -> Option<StateSpace> {
        (self.n_p > 0).then(|| StateSpace {
            a: self.filter_a(),
            b: self.filter_b(),
            c: DMatrix::identity(self.n_p, self.n_p),
            d: DMatrix::zeros(self.n_p, self.n_w),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linsys::{is_internally_positive, simulate, Signal};
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    #[test]
    fn degree_two_scalar_filter() {
        let f = build_positive_filter(&PositiveFilterSpec::new(-1.0, 2, 1).unwrap()).unwrap();
        assert_eq!(f.a, DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 0.0, -1.0]));
        assert_eq!(f.b, DMatrix::from_column_slice(2, 1, &[0.0, 1.0]));
    }

    #[test]
    fn degree_one_is_diagonal() {
        for n_w in 1..4 {
            let f = build_positive_filter(&PositiveFilterSpec::new(-0.7, 1, n_w).unwrap()).unwrap();
            assert_eq!(f.a, DMatrix::identity(n_w, n_w) * -0.7);
            assert_eq!(f.b, DMatrix::identity(n_w, n_w));
        }
    }

    #[test]
    fn kronecker_expansion_by_hand() {
        let f = build_positive_filter(&PositiveFilterSpec::new(-1.4, 3, 2).unwrap()).unwrap();
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(6, 6, &[
            -1.4, 0.0, 1.0, 0.0, 0.0, 0.0,
            0.0, -1.4, 0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, -1.4, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, -1.4, 0.0, 1.0,
            0.0, 0.0, 0.0, 0.0, -1.4, 0.0,
            0.0, 0.0, 0.0, 0.0, 0.0, -1.4,
        ]);
        assert_eq!(f.a, expected);
        #[rustfmt::skip]
        let expected_b = DMatrix::from_row_slice(6, 2, &[
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0,
        ]);
        assert_eq!(f.b, expected_b);
    }

    #[test]
    fn rejects_nonnegative_alpha() {
        assert!(matches!(
            PositiveFilterSpec::new(0.0, 2, 1),
            Err(Error::InvalidAlpha(_))
        ));
        let spec = PositiveFilterSpec {
            alpha: 0.5,
            degree: 2,
            n_w: 1,
        };
        assert!(matches!(
            build_positive_filter(&spec),
            Err(Error::InvalidAlpha(_))
        ));
    }

    #[test]
    fn filter_is_internally_positive() {
        let ss =
            StateSpace::from_rows(&[&[-1.0]], &[&[1.0, 2.0]], &[&[1.0]], &[&[0.0, 0.0]]).unwrap();
        let aug = augment(&ss, &PositiveFilterSpec::new(-1.0, 2, 2).unwrap()).unwrap();
        assert!(is_internally_positive(&aug.filter_system().unwrap()));
    }

    #[test]
    fn static_gain_matches_cascade() {
        // At s = 0, block k from the bottom carries 1 / (-alpha)^k.
        for alpha in [-0.6, -1.0, -2.3] {
            let deg = 5;
            let f =
                build_positive_filter(&PositiveFilterSpec::new(alpha, deg, 1).unwrap()).unwrap();
            let gain = (-&f.a).try_inverse().unwrap() * &f.b;
            for k in 1..=deg {
                assert_abs_diff_eq!(
                    gain[(deg - k, 0)],
                    1.0 / (-alpha).powi(k as i32),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn augmented_layout() {
        let ss = StateSpace::from_rows(
            &[&[-1.0, 0.5], &[0.0, -2.0]],
            &[&[1.0, 0.0], &[0.0, 1.0]],
            &[&[1.0, -1.0]],
            &[&[0.2, 0.1]],
        )
        .unwrap();
        let aug = augment(&ss, &PositiveFilterSpec::new(-1.2, 2, 2).unwrap()).unwrap();
        assert_eq!((aug.n_a(), aug.multiplier_dim(), aug.lmi_dim()), (6, 6, 8));
        assert_eq!(aug.a.view((0, 0), (2, 2)).into_owned(), ss.a);
        assert!(aug.a.view((0, 2), (2, 4)).iter().all(|&v| v == 0.0));
        assert_eq!(aug.c.view((0, 0), (1, 2)).into_owned(), ss.c);
        assert_eq!(aug.d, ss.d);
        assert_eq!(
            aug.c_zp.view((0, 2), (4, 4)).into_owned(),
            DMatrix::identity(4, 4)
        );
        assert_eq!(
            aug.d_zp.view((4, 0), (2, 2)).into_owned(),
            DMatrix::identity(2, 2)
        );
        assert!(aug.d_zp.view((0, 0), (4, 2)).iter().all(|&v| v == 0.0));
        assert_eq!(aug.max_real_eig(), -1.0);
    }

    #[test]
    fn degree_zero_is_passthrough() {
        let ss = StateSpace::from_rows(&[&[-1.0]], &[&[1.0]], &[&[1.0]], &[&[0.0]]).unwrap();
        let aug = augment(&ss, &PositiveFilterSpec::none(1)).unwrap();
        assert_eq!(aug.a, ss.a);
        assert_eq!(aug.b, ss.b);
        assert_eq!(aug.c_zp.shape(), (1, 1));
        assert_eq!(aug.c_zp[(0, 0)], 0.0);
        assert_eq!(aug.d_zp, DMatrix::identity(1, 1));
    }

    #[test]
    fn nonnegative_step_gives_nonnegative_certificate_output() {
        let ss = StateSpace::from_rows(&[&[-0.5]], &[&[-1.0]], &[&[1.0]], &[&[0.0]]).unwrap();
        let aug = augment(&ss, &PositiveFilterSpec::new(-1.0, 4, 1).unwrap()).unwrap();
        let w = Signal::uniform(0.01, DMatrix::from_element(800, 1, 1.0)).unwrap();
        let sim = simulate(&aug.certificate_system(), &w, &DVector::zeros(aug.n_a())).unwrap();
        assert!(sim.output.is_nonnegative(1e-9));
    }

    #[test]
    fn mismatched_width() {
        let ss = StateSpace::from_rows(&[&[-1.0]], &[&[1.0]], &[&[1.0]], &[&[0.0]]).unwrap();
        assert!(matches!(
            augment(&ss, &PositiveFilterSpec::new(-1.0, 1, 2).unwrap()),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
