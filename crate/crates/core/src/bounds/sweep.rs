use crate::linsys::{hinf_norm, sample_lower_bound_2plus, LowerBoundConfig};
use crate::par::{self, Execution};
use crate::sdp::{check_structure, StructureReport};
use crate::{Error, Result, StateSpace};

use super::cell::{solve_cell_with, BoundOptions};
use super::report::{BoundReport, BoundRow};

/// H-infinity tolerance used for the report's reference value.
const REPORT_HINF_TOL: f64 = 1e-9;
const STRUCTURE_SAMPLES: usize = 1000;
const STRUCTURE_SEED: u64 = 0;

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub system: String,
    pub bound: BoundOptions,
    /// Cell-level execution policy.
    pub execution: Execution,
    /// Sampled lower bound attached to the report; `None` skips sampling.
    pub lower_bound: Option<LowerBoundConfig>,
    /// Random vectors per solved cell for the structure re-check; 0 skips it.
    pub structure_samples: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            system: "system".into(),
            bound: BoundOptions::default(),
            execution: Execution::default(),
            lower_bound: Some(LowerBoundConfig::default()),
            structure_samples: STRUCTURE_SAMPLES,
        }
    }
}

pub fn sweep(ss: &StateSpace, alphas: &[f64], max_degree: usize) -> Result<BoundReport> {
    sweep_with(ss, alphas, max_degree, &SweepOptions::default())
}

/// Bounds for every `alpha` and `N = 0..=max_degree`. The filter-free cell
/// does not depend on `alpha` and is solved once. Failed cells are kept in
/// the report with an empty `gamma`.
pub fn sweep_with(
    ss: &StateSpace,
    alphas: &[f64],
    max_degree: usize,
    options: &SweepOptions,
) -> Result<BoundReport> {
    ss.validate_for_analysis()?;
    if alphas.is_empty() {
        return Err(Error::schema(
            "alpha",
            "at least one filter pole is required",
        ));
    }
    if let Some(&bad) = alphas.iter().find(|a| !(a.is_finite() && **a < 0.0)) {
        return Err(Error::InvalidAlpha(bad));
    }
    let mut unique: Vec<f64> = Vec::with_capacity(alphas.len());
    for &a in alphas {
        if !unique.contains(&a) {
            unique.push(a);
        }
    }
    let alphas = unique;
    let hinf = hinf_norm(ss, REPORT_HINF_TOL)?;

    let mut cells = vec![(alphas[0], 0usize)];
    for &alpha in &alphas {
        cells.extend((1..=max_degree).map(|n| (alpha, n)));
    }
    let outcomes = par::map(options.execution, cells, |(alpha, n)| {
        let out = solve_cell_with(ss, alpha, n, &options.bound);
        let structure = match (&out, options.structure_samples) {
            (Ok(cell), k) if k > 0 => Some(check_structure(
                &cell.system,
                &cell.result,
                k,
                STRUCTURE_SEED,
            )),
            _ => None,
        };
        (alpha, n, out, structure)
    });

    let mut rows = Vec::with_capacity(alphas.len() * (max_degree + 1));
    let mut outcomes = outcomes.into_iter();
    let base = outcomes
        .next()
        .map(|(_, _, out, structure)| to_row(alphas[0], 0, out, structure))
        .expect("filter-free cell");
    let mut by_alpha: Vec<Vec<BoundRow>> = alphas
        .iter()
        .map(|&a| {
            vec![BoundRow {
                alpha: a,
                ..base.clone()
            }]
        })
        .collect();
    for (alpha, n, out, structure) in outcomes {
        let k = alphas
            .iter()
            .position(|&a| a == alpha)
            .expect("alpha from input");
        by_alpha[k].push(to_row(alpha, n, out, structure));
    }
    for col in by_alpha {
        rows.extend(col);
    }

    let lower_bound = match &options.lower_bound {
        Some(cfg) => Some(sample_lower_bound_2plus(ss, cfg)?),
        None => None,
    };
    let mut report = BoundReport {
        system: options.system.clone(),
        hinf,
        max_degree,
        alphas,
        rows,
        lower_bound,
        monotonicity: Vec::new(),
        improvement: Vec::new(),
        filter_free_below_hinf: None,
        sandwich: None,
        warnings: Vec::new(),
    };
    report.evaluate();
    Ok(report)
}

fn to_row(
    alpha: f64,
    degree: usize,
    out: Result<super::cell::CellOutcome>,
    structure: Option<StructureReport>,
) -> BoundRow {
    match out {
        Ok(cell) => BoundRow {
            alpha,
            degree,
            gamma: Some(cell.gamma()),
            status: cell.result.status.to_string(),
            gap: Some(cell.result.relative_gap),
            seconds: cell.seconds,
            error: None,
            structure,
        },
        Err(e) => {
            let status = match &e {
                Error::Cell { source, .. } => match **source {
                    Error::Infeasible(_) => "infeasible",
                    Error::NumericalTrouble(_) => "numerical_trouble",
                    _ => "error",
                },
                _ => "error",
            };
            BoundRow {
                alpha,
                degree,
                gamma: None,
                status: status.into(),
                gap: None,
                seconds: 0.0,
                error: Some(e.to_string()),
                structure: None,
            }
        }
    }
}
