//! Semidefinite relaxation of the copositive bound program: problem
//! encoding, primal and dual assembly, conic backend, solution checks and
//! interior-point witnesses.

mod backend;
mod check;
mod dual;
mod layout;
mod membership;
mod primal;
mod problem;
mod result;
mod witness;

pub use backend::{
    dual_diagnostics, solve_conic, ConicSolution, SolveStatus, SolverSettings, OPTIMAL_GAP_TOL,
    OPTIMAL_RESIDUAL_TOL,
};
pub use check::{check_structure, lmi_residual, StructureReport};
pub use dual::{
    build_dual, dual_objective, lyapunov_residual_matrix, LYAPUNOV_BLOCK, TRACE_BLOCK, ZC_BLOCK,
    Z_BLOCK,
};
pub use layout::{smat, svec, svec_index, tri, PrimalPoint, VariableLayout};
pub use membership::{psd_nn_membership, Membership};
pub use primal::{assemble_primal, lmi_matrix, LMI_BLOCK, M_BLOCK, S_BLOCK};
pub use problem::{AffineBlock, ConeKind, ConeProblem, Sense};
pub use result::{solve_dual, solve_primal, DualSolveResult, Partition, SolveResult};
pub use witness::{
    dual_interior_witness, filter_gramian, primal_interior_witness, DualWitness, PrimalWitness,
    DEFAULT_WITNESS_EPS,
};
