//! Bound sweeps over the filter parameters, the ordering checks that go with
//! them, and small-gain certificates for feedback with nonnegative
//! nonlinearities.

mod cell;
mod feedback;
mod report;
mod smallgain;
mod sweep;

pub use cell::{compute_bound, solve_cell, solve_cell_with, BoundOptions, CellOutcome};
pub use feedback::{
    relu_feedback_sim, FeedbackOptions, FeedbackTrajectory, Nonlinearity, DIVERGENCE_LIMIT,
};
pub use report::{
    BoundReport, BoundRow, ImprovementVerdict, MonotonicityVerdict, ReportFormat, ORDER_SLACK,
};
pub use smallgain::{certify_small_gain, certify_small_gain_with, Certificate, CertificateMethod};
pub use sweep::{sweep, sweep_with, SweepOptions};
