use nalgebra::{DMatrix, DVector};

use super::Signal;
use crate::{Error, Result, StateSpace};

/// Zero-order-hold trajectory of a [`StateSpace`].
#[derive(Debug, Clone)]
pub struct Simulation {
    pub output: Signal,
    /// samples x n, row k is `x(t_k)`.
    pub states: DMatrix<f64>,
}

/// Default grid step `min(0.01, 0.1 / |max Re(lambda)|)`.
pub fn simulation_step(max_real_eig: f64) -> f64 {
    let rate = max_real_eig.abs();
    if rate > 0.0 {
        0.01f64.min(0.1 / rate)
    } else {
        0.01
    }
}

/// Exact ZOH discretisation `(e^{A dt}, int_0^dt e^{A s} ds B)` from the
/// exponential of the `(n + n_w)` block `[[A, B], [0, 0]] dt`.
pub(crate) fn zoh(ss: &StateSpace, dt: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let (n, m) = (ss.n(), ss.n_w());
    let mut blk = DMatrix::zeros(n + m, n + m);
    blk.view_mut((0, 0), (n, n)).copy_from(&(&ss.a * dt));
    blk.view_mut((0, n), (n, m)).copy_from(&(&ss.b * dt));
    let e = blk.exp();
    (
        e.view((0, 0), (n, n)).into_owned(),
        e.view((0, n), (n, m)).into_owned(),
    )
}

/// Simulates `x' = A x + B w`, `z = C x + D w` from `x(t0) = x0` on the grid
/// of `w`, with `w` held constant between samples.
pub fn simulate(ss: &StateSpace, w: &Signal, x0: &DVector<f64>) -> Result<Simulation> {
    if w.channels() != ss.n_w() {
        return Err(Error::dims(format!(
            "input has {} channels, system has n_w = {}",
            w.channels(),
            ss.n_w()
        )));
    }
    if x0.len() != ss.n() {
        return Err(Error::dims(format!(
            "initial state has length {}, system has n = {}",
            x0.len(),
            ss.n()
        )));
    }
    let (ad, bd) = zoh(ss, w.dt());
    let samples = w.len();
    let mut states = DMatrix::zeros(samples, ss.n());
    let mut out = DMatrix::zeros(samples, ss.n_z());
    let mut x = x0.clone();
    for k in 0..samples {
        let wk = w.values().row(k).transpose();
        let zk = &ss.c * &x + &ss.d * &wk;
        states.row_mut(k).copy_from(&x.transpose());
        out.row_mut(k).copy_from(&zk.transpose());
        x = &ad * &x + &bd * &wk;
    }
    Ok(Simulation {
        output: Signal::uniform_from(w.t0(), w.dt(), out)?,
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lag() -> StateSpace {
        StateSpace::from_rows(&[&[-1.0]], &[&[1.0]], &[&[1.0]], &[&[0.0]]).unwrap()
    }

    #[test]
    fn zero_input_zero_state() {
        let ss = lag();
        let sim = simulate(
            &ss,
            &Signal::zeros(0.01, 100, 1).unwrap(),
            &DVector::zeros(1),
        )
        .unwrap();
        assert!(sim.output.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn step_response_of_lag() {
        let ss = lag();
        let w = Signal::uniform(0.01, DMatrix::from_element(1001, 1, 1.0)).unwrap();
        let sim = simulate(&ss, &w, &DVector::zeros(1)).unwrap();
        for k in 0..w.len() {
            let t = w.time(k);
            assert!(
                (sim.output.values()[(k, 0)] - (1.0 - (-t).exp())).abs() < 1e-6,
                "t = {t}"
            );
        }
    }

    #[test]
    fn channel_mismatch() {
        assert!(simulate(
            &lag(),
            &Signal::zeros(0.01, 3, 2).unwrap(),
            &DVector::zeros(1)
        )
        .is_err());
    }
}
