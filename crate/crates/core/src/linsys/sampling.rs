//! Heuristic lower bound of the L2+ gain: the best output/input energy ratio
//! over random piecewise-constant nonnegative inputs. A valid lower bound only
//! up to discretisation error; never used as a certificate.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{simulate, simulation_step, Signal};
use crate::par::{self, Execution};
use crate::{Result, StateSpace};

/// Number of constant pieces used by trial `k` is `PIECES[k % PIECES.len()]`.
const PIECES: [usize; 12] = [1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64];

#[derive(Debug, Clone, Copy)]
pub struct LowerBoundConfig {
    pub trials: usize,
    /// Input horizon; `None` means `max(10 / |max Re(lambda)|, 20)`.
    pub horizon: Option<f64>,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for LowerBoundConfig {
    fn default() -> Self {
        Self {
            trials: 200,
            horizon: None,
            seed: 0,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundSample {
    pub gamma_lb: f64,
    pub best_trial: usize,
    pub trials: usize,
    pub seed: u64,
    pub horizon: f64,
    pub dt: f64,
    #[serde(skip)]
    pub ratios: Vec<f64>,
}

/// Sampling grid `(horizon, tail, dt)` for a system with spectral abscissa
/// `lambda`. The tail lets the output decay after the input is switched off.
fn grid(lambda: f64, horizon: Option<f64>) -> (f64, f64, f64) {
    let rate = lambda.abs();
    let horizon = horizon.unwrap_or_else(|| (10.0 / rate).max(20.0));
    (horizon, 10.0 / rate, simulation_step(lambda))
}

/// Input of trial `trial`: `pieces` equal-length constant segments on
/// `[0, horizon)` with levels `|N(0,1)|`, followed by `tail_steps` zeros,
/// normalised to unit L2 norm.
pub fn trial_input(
    n_w: usize,
    trial: usize,
    horizon: f64,
    tail: f64,
    dt: f64,
    seed: u64,
) -> Result<Signal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let pieces = PIECES[trial % PIECES.len()];
    let on_steps = ((horizon / dt).ceil() as usize).max(pieces);
    let total = on_steps + (tail / dt).ceil() as usize;
    let levels = DMatrix::from_fn(pieces, n_w, |_, _| {
        let v: f64 = StandardNormal.sample(&mut rng);
        v.abs()
    });
    let mut values = DMatrix::zeros(total, n_w);
    for k in 0..on_steps {
        let piece = k * pieces / on_steps;
        values.row_mut(k).copy_from(&levels.row(piece));
    }
    let mut w = Signal::uniform(dt, values)?;
    let norm = w.l2_norm();
    if norm > 0.0 {
        w = Signal::uniform(dt, w.values() / norm)?;
    }
    Ok(w)
}

/// `‖z‖_2 / ‖w‖_2` from zero initial state.
pub fn gain_ratio(ss: &StateSpace, w: &Signal) -> Result<f64> {
    let wn = w.l2_norm();
    if wn == 0.0 {
        return Ok(0.0);
    }
    let sim = simulate(ss, w, &DVector::zeros(ss.n()))?;
    Ok(sim.output.l2_norm() / wn)
}

pub fn sample_lower_bound_2plus(
    ss: &StateSpace,
    config: &LowerBoundConfig,
) -> Result<LowerBoundSample> {
    let lambda = ss.ensure_hurwitz()?;
    let (horizon, tail, dt) = grid(lambda, config.horizon);
    let ratios = par::map_range(config.execution, config.trials, |k| {
        trial_input(ss.n_w(), k, horizon, tail, dt, config.seed).and_then(|w| gain_ratio(ss, &w))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let (best_trial, gamma_lb) = ratios.iter().copied().enumerate().fold(
        (0, 0.0),
        |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) },
    );
    Ok(LowerBoundSample {
        gamma_lb,
        best_trial,
        trials: config.trials,
        seed: config.seed,
        horizon,
        dt,
        ratios,
    })
}

impl LowerBoundSample {
    /// Regenerates the input of trial `k` on the grid used by this sample.
    pub fn input_of(&self, ss: &StateSpace, k: usize) -> Result<Signal> {
        let lambda = ss.ensure_hurwitz()?;
        let (_, tail, _) = grid(lambda, Some(self.horizon));
        trial_input(ss.n_w(), k, self.horizon, tail, self.dt, self.seed)
    }
}
