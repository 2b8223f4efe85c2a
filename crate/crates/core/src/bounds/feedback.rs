//! Time-domain check of the feedback loop `x' = A x + B w`, `z = C x + D w`,
//! `w = K Phi(z)` with `Phi` the entrywise positive part.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::linsys::{max_sym_eig, simulation_step};
use crate::{Error, Result, StateSpace};

/// States beyond this norm are declared divergent and integration stops.
pub const DIVERGENCE_LIMIT: f64 = 1e6;
const LOOP_TOL: f64 = 1e-13;
const LOOP_MAX_ITER: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Nonlinearity {
    /// `Phi(z) = max(z, 0)` entrywise.
    #[default]
    Relu,
    /// `Phi = 0` (open loop).
    Zero,
}

#[derive(Debug, Clone, Default)]
pub struct FeedbackOptions {
    pub nonlinearity: Nonlinearity,
    /// `n_w x n_z` entrywise nonnegative map with spectral norm <= 1 applied
    /// after `Phi`; required when `n_w != n_z` (identity otherwise).
    pub fan_out: Option<DMatrix<f64>>,
    /// Integration step; defaults to `min(0.01, 0.1 / |max Re(lambda)|)`.
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeedbackTrajectory {
    pub times: Vec<f64>,
    /// samples x n
    #[serde(skip)]
    pub states: DMatrix<f64>,
    pub sup_norm: f64,
    pub final_norm: f64,
    pub diverged: bool,
}

impl FeedbackTrajectory {
    pub fn bounded(&self) -> bool {
        !self.diverged
    }
}

struct Loop<'a> {
    ss: &'a StateSpace,
    k: DMatrix<f64>,
    nonlinearity: Nonlinearity,
}

impl Loop<'_> {
    fn phi(&self, z: &DVector<f64>) -> DVector<f64> {
        match self.nonlinearity {
            Nonlinearity::Relu => &self.k * z.map(|v| v.max(0.0)),
            Nonlinearity::Zero => DVector::zeros(self.k.nrows()),
        }
    }

    /// Solves `w = K Phi(C x + D w)` by fixed-point iteration.
    fn input(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let cx = &self.ss.c * x;
        let mut w = self.phi(&cx);
        if self.nonlinearity == Nonlinearity::Zero || self.ss.d.iter().all(|&v| v == 0.0) {
            return Ok(w);
        }
        for _ in 0..LOOP_MAX_ITER {
            let next = self.phi(&(&cx + &self.ss.d * &w));
            let step = (&next - &w).norm();
            w = next;
            if step <= LOOP_TOL * (1.0 + w.norm()) {
                return Ok(w);
            }
        }
        Err(Error::IllPosedLoop(
            "w = K Phi(C x + D w) has no fixed point reachable by iteration".into(),
        ))
    }

    fn rhs(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(&self.ss.a * x + &self.ss.b * self.input(x)?)
    }
}

/// Integrates the closed loop with classical RK4 from `x0` over `[0, horizon]`
/// and reports `sup_t |x(t)|`.
pub fn relu_feedback_sim(
    ss: &StateSpace,
    x0: &DVector<f64>,
    horizon: f64,
    options: &FeedbackOptions,
) -> Result<FeedbackTrajectory> {
    let lambda = ss.ensure_hurwitz()?;
    if x0.len() != ss.n() {
        return Err(Error::dims(format!(
            "initial state has length {}, system has n = {}",
            x0.len(),
            ss.n()
        )));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::schema("horizon", "must be positive and finite"));
    }
    let k = match &options.fan_out {
        Some(k) => {
            if k.shape() != (ss.n_w(), ss.n_z()) {
                return Err(Error::dims(format!(
                    "fan-out must be {} x {}, got {:?}",
                    ss.n_w(),
                    ss.n_z(),
                    k.shape()
                )));
            }
            if k.iter().any(|&v| v < 0.0) {
                return Err(Error::StructureMismatch(
                    "fan-out must be entrywise nonnegative".into(),
                ));
            }
            let gain = max_sym_eig(&(k.transpose() * k)).max(0.0).sqrt();
            if gain > 1.0 + 1e-12 {
                return Err(Error::StructureMismatch(format!(
                    "fan-out has gain {gain} > 1"
                )));
            }
            k.clone()
        }
        None if ss.n_w() == ss.n_z() => DMatrix::identity(ss.n_w(), ss.n_z()),
        None => {
            return Err(Error::NotSquare {
                n_z: ss.n_z(),
                n_w: ss.n_w(),
            })
        }
    };
    let lp = Loop {
        ss,
        k,
        nonlinearity: options.nonlinearity,
    };
    let dt = options.dt.unwrap_or_else(|| simulation_step(lambda));
    let steps = (horizon / dt).ceil() as usize;
    let mut states = DMatrix::zeros(steps + 1, ss.n());
    let mut times = Vec::with_capacity(steps + 1);
    let mut x = x0.clone();
    let mut sup = x.norm();
    let mut diverged = false;
    let mut last = 0;
    states.row_mut(0).copy_from(&x.transpose());
    times.push(0.0);
    for step in 1..=steps {
        let k1 = lp.rhs(&x)?;
        let k2 = lp.rhs(&(&x + &k1 * (0.5 * dt)))?;
        let k3 = lp.rhs(&(&x + &k2 * (0.5 * dt)))?;
        let k4 = lp.rhs(&(&x + &k3 * dt))?;
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        states.row_mut(step).copy_from(&x.transpose());
        times.push(step as f64 * dt);
        last = step;
        let nx = x.norm();
        sup = sup.max(nx);
        if !nx.is_finite() || nx > DIVERGENCE_LIMIT {
            diverged = true;
            break;
        }
    }
    Ok(FeedbackTrajectory {
        times,
        states: states.rows(0, last + 1).into_owned(),
        sup_norm: sup,
        final_norm: x.norm(),
        diverged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn zero_initial_state_stays_at_rest() {
        let ss = fixtures::first_order_lag();
        let t =
            relu_feedback_sim(&ss, &DVector::zeros(1), 5.0, &FeedbackOptions::default()).unwrap();
        assert_eq!(t.sup_norm, 0.0);
        assert!(t.states.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn open_loop_decays() {
        let ss = fixtures::sec6_1();
        let x0 = DVector::from_element(5, 1.0);
        let opts = FeedbackOptions {
            nonlinearity: Nonlinearity::Zero,
            ..Default::default()
        };
        let t = relu_feedback_sim(&ss, &x0, 200.0, &opts).unwrap();
        assert!(t.final_norm < 1e-6 * x0.norm());
    }

    #[test]
    fn relu_loop_matches_closed_form_on_scalar() {
        // x' = -x + relu(x/2): for x0 > 0, x(t) = x0 e^{-t/2}
        let ss = StateSpace::from_rows(&[&[-1.0]], &[&[1.0]], &[&[0.5]], &[&[0.0]]).unwrap();
        let t = relu_feedback_sim(
            &ss,
            &DVector::from_element(1, 2.0),
            4.0,
            &FeedbackOptions::default(),
        )
        .unwrap();
        let end = *t.times.last().unwrap();
        assert!((t.final_norm - 2.0 * (-0.5 * end).exp()).abs() < 1e-8);
    }

    #[test]
    fn positive_feedback_above_one_diverges() {
        // x' = -x + 2 relu(x) = x for x > 0
        let ss = StateSpace::from_rows(&[&[-1.0]], &[&[2.0]], &[&[1.0]], &[&[0.0]]).unwrap();
        let t = relu_feedback_sim(
            &ss,
            &DVector::from_element(1, 1.0),
            100.0,
            &FeedbackOptions::default(),
        )
        .unwrap();
        assert!(t.diverged);
    }

    #[test]
    fn non_square_needs_fan_out() {
        let ss = fixtures::sec6_2();
        let x0 = DVector::from_element(5, 0.1);
        assert!(matches!(
            relu_feedback_sim(&ss, &x0, 1.0, &FeedbackOptions::default()),
            Err(Error::NotSquare { n_z: 1, n_w: 2 })
        ));
        let opts = FeedbackOptions {
            fan_out: Some(DMatrix::from_element(2, 1, std::f64::consts::FRAC_1_SQRT_2)),
            ..Default::default()
        };
        assert!(relu_feedback_sim(&ss, &x0, 1.0, &opts).unwrap().bounded());
        let loud = FeedbackOptions {
            fan_out: Some(DMatrix::from_element(2, 1, 1.0)),
            ..Default::default()
        };
        assert!(matches!(
            relu_feedback_sim(&ss, &x0, 1.0, &loud),
            Err(Error::StructureMismatch(_))
        ));
    }

    #[test]
    fn algebraic_loop_without_fixed_point_is_reported() {
        // w = relu(x + 2 w) has no solution for x > 0
        let ss = StateSpace::from_rows(&[&[-1.0]], &[&[1.0]], &[&[1.0]], &[&[2.0]]).unwrap();
        assert!(matches!(
            relu_feedback_sim(
                &ss,
                &DVector::from_element(1, 1.0),
                1.0,
                &FeedbackOptions::default()
            ),
            Err(Error::IllPosedLoop(_))
        ));
    }
}
