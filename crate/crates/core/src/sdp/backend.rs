//! Conic backend: translation of a [`ConeProblem`] into the homogeneous
//! self-dual interior-point solver `clarabel`, and status/residual mapping.
//!
//! Each block row `k` carries the slack `s_k = scale_k * F_b(x)_rc`, where
//! `scale_k = sqrt(2)` for off-diagonal PSD entries, so the solver's
//! `A x + s = b` form has `b = scale * F_b0` and `A = -scale * F_bj`.

use std::time::Instant;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::layout::{smat, svec_index, svec_scale};
use super::problem::{ConeKind, ConeProblem, Sense};
use crate::linsys::min_sym_eig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NumericalTrouble,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::NumericalTrouble => "numerical_trouble",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Acceptance thresholds for an `Optimal` verdict.
pub const OPTIMAL_RESIDUAL_TOL: f64 = 1e-7;
pub const OPTIMAL_GAP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    pub tol_gap_abs: f64,
    pub tol_gap_rel: f64,
    pub tol_feas: f64,
    pub max_iter: u32,
    /// `"qdldl"` or `"faer"`.
    pub direct_solve_method: String,
    pub time_limit: Option<f64>,
    /// Print the backend's iteration log.
    pub verbose: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol_gap_abs: 1e-9,
            tol_gap_rel: 1e-9,
            tol_feas: 1e-9,
            max_iter: 200,
            direct_solve_method: "faer".into(),
            time_limit: None,
            verbose: false,
        }
    }
}

/// Raw primal-dual pair plus independently recomputed diagnostics.
#[derive(Debug, Clone)]
pub struct ConicSolution {
    pub status: SolveStatus,
    /// Backend status string, kept for diagnostics.
    pub backend_status: String,
    pub x: Vec<f64>,
    /// Dual matrix per block (PSD: symmetric; vector blocks: a column).
    pub duals: Vec<DMatrix<f64>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// Largest primal cone violation, recomputed from the problem data.
    pub primal_residual: f64,
    /// Largest dual-equation or dual-cone violation.
    pub dual_residual: f64,
    /// `|primal - dual| / max(|primal|, |dual|, 1)`.
    pub relative_gap: f64,
    pub iterations: u32,
    pub seconds: f64,
}

pub(crate) fn relative_gap(p: f64, d: f64) -> f64 {
    (p - d).abs() / p.abs().max(d.abs()).max(1.0)
}

struct Translation {
    a: CscMatrix<f64>,
    b: Vec<f64>,
    q: Vec<f64>,
    cones: Vec<SupportedConeT<f64>>,
    offsets: Vec<usize>,
}

fn row_of(cone: ConeKind, r: usize, c: usize) -> usize {
    match cone {
        ConeKind::Psd => svec_index(r, c),
        _ => r,
    }
}

fn scale_of(cone: ConeKind, r: usize, c: usize) -> f64 {
    match cone {
        ConeKind::Psd => svec_scale(r, c),
        _ => 1.0,
    }
}

fn translate(problem: &ConeProblem) -> Translation {
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut b = Vec::new();
    let mut cones = Vec::new();
    let mut offsets = Vec::new();
    let mut base = 0;
    for blk in &problem.blocks {
        offsets.push(base);
        let len = blk.rows();
        let mut rhs = vec![0.0; len];
        for (&(r, c), &v) in &blk.constant {
            rhs[row_of(blk.cone, r, c)] = scale_of(blk.cone, r, c) * v;
        }
        match blk.cone {
            ConeKind::Psd if problem.margin > 0.0 => {
                for i in 0..blk.dim {
                    rhs[svec_index(i, i)] -= problem.margin;
                }
            }
            ConeKind::Nonnegative if problem.margin > 0.0 => {
                rhs.iter_mut().for_each(|v| *v -= problem.margin)
            }
            _ => {}
        }
        for (&(j, r, c), &v) in &blk.terms {
            rows.push(base + row_of(blk.cone, r, c));
            cols.push(j);
            vals.push(-scale_of(blk.cone, r, c) * v);
        }
        b.extend(rhs);
        cones.push(match blk.cone {
            ConeKind::Psd => SupportedConeT::PSDTriangleConeT(blk.dim),
            ConeKind::Nonnegative => SupportedConeT::NonnegativeConeT(len),
            ConeKind::Zero => SupportedConeT::ZeroConeT(len),
        });
        base += len;
    }
    let sign = match problem.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    Translation {
        a: CscMatrix::new_from_triplets(base, problem.num_vars(), rows, cols, vals),
        b,
        q: problem.objective.iter().map(|c| sign * c).collect(),
        cones,
        offsets,
    }
}

/// Objective of the dual problem and residual of its equations at `duals`.
pub fn dual_diagnostics(problem: &ConeProblem, duals: &[DMatrix<f64>]) -> (f64, f64) {
    let n = problem.num_vars();
    let mut adj = DVector::zeros(n);
    let mut constant = 0.0;
    let mut cone_violation: f64 = 0.0;
    for (blk, z) in problem.blocks.iter().zip(duals) {
        adj += blk.adjoint(z, n);
        constant += blk.constant_inner(z);
        match blk.cone {
            ConeKind::Psd => {
                constant -= problem.margin * z.trace();
                cone_violation = cone_violation.max(-min_sym_eig(z));
            }
            ConeKind::Nonnegative => {
                constant -= problem.margin * z.sum();
                cone_violation = cone_violation.max(-z.min());
            }
            ConeKind::Zero => {}
        }
    }
    let (obj, sign) = match problem.sense {
        Sense::Minimize => (-constant, 1.0),
        Sense::Maximize => (constant, -1.0),
    };
    let eq = problem
        .objective
        .iter()
        .zip(adj.iter())
        .map(|(c, g)| (c - sign * g).abs())
        .fold(0.0, f64::max);
    (obj, eq.max(cone_violation))
}

fn backend_status_name(status: SolverStatus) -> String {
    format!("{status:?}")
}

pub fn solve_conic(problem: &ConeProblem, settings: &SolverSettings) -> Result<ConicSolution> {
    problem.validate()?;
    let start = Instant::now();
    let tr = translate(problem);
    let n = problem.num_vars();
    let p = CscMatrix::zeros((n, n));
    let mut builder = DefaultSettingsBuilder::default();
    builder
        .verbose(settings.verbose)
        .max_iter(settings.max_iter)
        .tol_gap_abs(settings.tol_gap_abs)
        .tol_gap_rel(settings.tol_gap_rel)
        .tol_feas(settings.tol_feas)
        .direct_solve_method(settings.direct_solve_method.clone())
        .chordal_decomposition_enable(false)
        .presolve_enable(false);
    if let Some(limit) = settings.time_limit {
        builder.time_limit(limit);
    }
    let cfg = builder
        .build()
        .map_err(|e| Error::Solver(format!("invalid solver settings: {e}")))?;
    let mut solver = DefaultSolver::new(&p, &tr.q, &tr.a, &tr.b, &tr.cones, cfg)
        .map_err(|e| Error::Solver(format!("backend rejected problem: {e}")))?;
    solver.solve();
    let sol = &solver.solution;

    let mut duals = Vec::with_capacity(problem.blocks.len());
    for (blk, &off) in problem.blocks.iter().zip(&tr.offsets) {
        let seg = &sol.z[off..off + blk.rows()];
        duals.push(match blk.cone {
            ConeKind::Psd => smat(seg, blk.dim),
            _ => DMatrix::from_column_slice(blk.dim, 1, seg),
        });
    }
    let x = sol.x.clone();
    let primal_objective = problem.objective_value(&x);
    let primal_residual = problem.primal_violation(&x);
    let (dual_objective, dual_residual) = dual_diagnostics(problem, &duals);
    let gap = relative_gap(primal_objective, dual_objective);
    let accurate = primal_residual <= OPTIMAL_RESIDUAL_TOL && gap <= OPTIMAL_GAP_TOL;
    let status = match sol.status {
        SolverStatus::Solved | SolverStatus::AlmostSolved if accurate => SolveStatus::Optimal,
        SolverStatus::PrimalInfeasible
        | SolverStatus::DualInfeasible
        | SolverStatus::AlmostPrimalInfeasible
        | SolverStatus::AlmostDualInfeasible => SolveStatus::Infeasible,
        _ => SolveStatus::NumericalTrouble,
    };
    Ok(ConicSolution {
        status,
        backend_status: backend_status_name(sol.status),
        x,
        duals,
        primal_objective,
        dual_objective,
        primal_residual,
        dual_residual,
        relative_gap: gap,
        iterations: sol.iterations,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::problem::AffineBlock;

    #[test]
    fn solves_small_sdp_with_dual() {
        // min x0  s.t.  [[x0, 1], [1, x1]] psd,  x1 = 4  ->  x0 = 1/4
        let mut p = ConeProblem::new(Sense::Minimize, 2);
        p.objective[0] = 1.0;
        let mut psd = AffineBlock::new("lmi", ConeKind::Psd, 2);
        psd.add_term(0, 0, 0, 1.0);
        psd.add_constant(0, 1, 1.0);
        psd.add_term(1, 1, 1, 1.0);
        let mut eq = AffineBlock::new("eq", ConeKind::Zero, 1);
        eq.add_term(1, 0, 0, 1.0);
        eq.add_constant(0, 0, -4.0);
        p.blocks = vec![psd, eq];
        let sol = solve_conic(&p, &SolverSettings::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.x[0] - 0.25).abs() < 1e-7);
        assert!((sol.dual_objective - 0.25).abs() < 1e-7);
        assert!(sol.dual_residual < 1e-7);
    }

    #[test]
    fn maximisation_sense() {
        // max x  s.t.  1 - x >= 0
        let mut p = ConeProblem::new(Sense::Maximize, 1);
        p.objective[0] = 1.0;
        let mut nn = AffineBlock::new("cap", ConeKind::Nonnegative, 1);
        nn.add_constant(0, 0, 1.0);
        nn.add_term(0, 0, 0, -1.0);
        p.blocks = vec![nn];
        let sol = solve_conic(&p, &SolverSettings::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.primal_objective - 1.0).abs() < 1e-7);
        assert!((sol.dual_objective - 1.0).abs() < 1e-7);
    }

    #[test]
    fn infeasible_detected() {
        // x >= 1 and x <= -1
        let mut p = ConeProblem::new(Sense::Minimize, 1);
        let mut nn = AffineBlock::new("both", ConeKind::Nonnegative, 2);
        nn.add_term(0, 0, 0, 1.0);
        nn.add_constant(0, 0, -1.0);
        nn.add_term(0, 1, 0, -1.0);
        nn.add_constant(1, 0, -1.0);
        p.blocks = vec![nn];
        let sol = solve_conic(&p, &SolverSettings::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn margin_tightens_feasible_set() {
        // min x  s.t.  x >= 0  with margin 0.5  ->  x = 0.5
        let mut p = ConeProblem::new(Sense::Minimize, 1);
        p.objective[0] = 1.0;
        p.margin = 0.5;
        let mut nn = AffineBlock::new("x", ConeKind::Nonnegative, 1);
        nn.add_term(0, 0, 0, 1.0);
        p.blocks = vec![nn];
        let sol = solve_conic(&p, &SolverSettings::default()).unwrap();
        assert!((sol.x[0] - 0.5).abs() < 1e-7);
        assert!((sol.dual_objective - 0.5).abs() < 1e-7);
    }
}
