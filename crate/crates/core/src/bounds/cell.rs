use std::time::Instant;

use crate::filterbank::{augment, AugmentedSystem, PositiveFilterSpec};
use crate::sdp::{solve_primal, SolveResult, SolveStatus, SolverSettings};
use crate::{Error, Result, StateSpace};

#[derive(Debug, Clone, Default)]
pub struct BoundOptions {
    pub solver: SolverSettings,
}

/// One solved `(alpha, N)` cell.
#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub alpha: f64,
    pub degree: usize,
    /// Plant plus filter the cell was solved on.
    pub system: AugmentedSystem,
    pub result: SolveResult,
    /// Wall time including assembly.
    pub seconds: f64,
}

impl CellOutcome {
    pub fn gamma(&self) -> f64 {
        self.result.gamma
    }
}

fn filter_spec(ss: &StateSpace, alpha: f64, degree: usize) -> Result<PositiveFilterSpec> {
    if degree == 0 {
        Ok(PositiveFilterSpec::none(ss.n_w()))
    } else {
        PositiveFilterSpec::new(alpha, degree, ss.n_w())
    }
}

pub fn solve_cell(ss: &StateSpace, alpha: f64, degree: usize) -> Result<CellOutcome> {
    solve_cell_with(ss, alpha, degree, &BoundOptions::default())
}

/// Builds the filter, augments, assembles and solves one cell. The system is
/// assumed validated; any status other than optimal is an error.
pub fn solve_cell_with(
    ss: &StateSpace,
    alpha: f64,
    degree: usize,
    options: &BoundOptions,
) -> Result<CellOutcome> {
    let wrap = |source: Error| Error::Cell {
        alpha,
        degree,
        source: Box::new(source),
    };
    let start = Instant::now();
    let spec = filter_spec(ss, alpha, degree).map_err(wrap)?;
    let aug = augment(ss, &spec).map_err(wrap)?;
    let result = solve_primal(&aug, &options.solver).map_err(wrap)?;
    let detail = || {
        format!(
            "backend {}, primal residual {:e}, relative gap {:e}",
            result.backend_status, result.primal_residual, result.relative_gap
        )
    };
    match result.status {
        SolveStatus::Optimal => Ok(CellOutcome {
            alpha,
            degree,
            system: aug,
            result,
            seconds: start.elapsed().as_secs_f64(),
        }),
        SolveStatus::Infeasible => Err(wrap(Error::Infeasible(detail()))),
        SolveStatus::NumericalTrouble => Err(wrap(Error::NumericalTrouble(detail()))),
    }
}

/// Upper bound of the L2+ gain from the filter `(alpha, degree)`; `degree = 0`
/// is the filter-free bound and ignores `alpha`.
pub fn compute_bound(ss: &StateSpace, alpha: f64, degree: usize) -> Result<f64> {
    ss.validate_for_analysis()?;
    Ok(solve_cell(ss, alpha, degree)?.gamma())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn lag_bound_is_its_gain() {
        let ss = fixtures::first_order_lag();
        for (alpha, n) in [(-1.0, 0), (-1.4, 1), (-2.0, 3)] {
            let g = compute_bound(&ss, alpha, n).unwrap();
            assert!((g - 1.0).abs() < 1e-3, "{alpha} {n}: {g}");
        }
    }

    #[test]
    fn errors_carry_cell_context() {
        let ss = fixtures::first_order_lag();
        match compute_bound(&ss, 0.5, 2) {
            Err(Error::Cell {
                alpha,
                degree,
                source,
            }) => {
                assert_eq!((alpha, degree), (0.5, 2));
                assert!(matches!(*source, Error::InvalidAlpha(_)));
            }
            other => panic!("unexpected {other:?}"),
        }
        let unstable = StateSpace::from_rows(&[&[0.5]], &[&[1.0]], &[&[1.0]], &[&[0.0]]).unwrap();
        assert!(matches!(
            compute_bound(&unstable, -1.0, 1),
            Err(Error::NotHurwitz { .. })
        ));
    }
}
