//! Solved primal/dual pairs of the bound SDP.

use nalgebra::DMatrix;

use super::backend::{solve_conic, ConicSolution, SolveStatus, SolverSettings};
use super::dual::{build_dual, z_from_vars};
use super::primal::{assemble_primal, LMI_BLOCK};
use crate::filterbank::AugmentedSystem;
use crate::Result;

/// Dimensions of the partition `Z = [Z11 Z12 Z13; . Z22 Z23; . . Z33]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Partition {
    pub n: usize,
    pub n_p: usize,
    pub n_w: usize,
}

impl Partition {
    pub fn of(aug: &AugmentedSystem) -> Self {
        Self {
            n: aug.n,
            n_p: aug.n_p,
            n_w: aug.n_w,
        }
    }

    fn n_a(&self) -> usize {
        self.n + self.n_p
    }

    pub fn z_a(&self, z: &DMatrix<f64>) -> DMatrix<f64> {
        z.view((0, 0), (self.n_a(), self.n_a())).into_owned()
    }

    pub fn z_b(&self, z: &DMatrix<f64>) -> DMatrix<f64> {
        z.view((0, self.n_a()), (self.n_a(), self.n_w)).into_owned()
    }

    pub fn z_c(&self, z: &DMatrix<f64>) -> DMatrix<f64> {
        let m = self.n_p + self.n_w;
        z.view((self.n, self.n), (m, m)).into_owned()
    }

    pub fn z_33(&self, z: &DMatrix<f64>) -> DMatrix<f64> {
        z.view((self.n_a(), self.n_a()), (self.n_w, self.n_w))
            .into_owned()
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub backend_status: String,
    /// `t* = gamma*^2`
    pub t: f64,
    pub gamma: f64,
    pub p_a: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub m: DMatrix<f64>,
    /// Dual matrix of the LMI block.
    pub z: DMatrix<f64>,
    pub partition: Partition,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub dual_value: f64,
    pub relative_gap: f64,
    pub iterations: u32,
    pub seconds: f64,
}

impl SolveResult {
    pub fn q(&self) -> DMatrix<f64> {
        &self.s + &self.m
    }

    pub fn z_a(&self) -> DMatrix<f64> {
        self.partition.z_a(&self.z)
    }

    pub fn z_b(&self) -> DMatrix<f64> {
        self.partition.z_b(&self.z)
    }

    pub fn z_c(&self) -> DMatrix<f64> {
        self.partition.z_c(&self.z)
    }

    pub fn z_33(&self) -> DMatrix<f64> {
        self.partition.z_33(&self.z)
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

/// Assembles and solves the primal bound SDP.
pub fn solve_primal(aug: &AugmentedSystem, settings: &SolverSettings) -> Result<SolveResult> {
    let (problem, layout) = assemble_primal(aug)?;
    let sol = solve_conic(&problem, settings)?;
    let point = layout.unpack(&sol.x);
    let lmi = problem
        .blocks
        .iter()
        .position(|b| b.name == LMI_BLOCK)
        .expect("lmi block");
    Ok(SolveResult {
        status: sol.status,
        backend_status: sol.backend_status.clone(),
        t: point.t,
        gamma: point.t.max(0.0).sqrt(),
        p_a: point.p_a,
        s: point.s,
        m: point.m,
        z: sol.duals[lmi].clone(),
        partition: Partition::of(aug),
        primal_residual: sol.primal_residual,
        dual_residual: sol.dual_residual,
        dual_value: sol.dual_objective,
        relative_gap: sol.relative_gap,
        iterations: sol.iterations,
        seconds: sol.seconds,
    })
}

#[derive(Debug, Clone)]
pub struct DualSolveResult {
    pub status: SolveStatus,
    pub value: f64,
    pub z: DMatrix<f64>,
    pub partition: Partition,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub relative_gap: f64,
    pub seconds: f64,
    pub raw: ConicSolution,
}

/// Assembles and solves the dual SDP directly.
pub fn solve_dual(aug: &AugmentedSystem, settings: &SolverSettings) -> Result<DualSolveResult> {
    let problem = build_dual(aug)?;
    let sol = solve_conic(&problem, settings)?;
    Ok(DualSolveResult {
        status: sol.status,
        value: sol.primal_objective,
        z: z_from_vars(aug, &sol.x),
        partition: Partition::of(aug),
        primal_residual: sol.primal_residual,
        dual_residual: sol.dual_residual,
        relative_gap: sol.relative_gap,
        seconds: sol.seconds,
        raw: sol,
    })
}
