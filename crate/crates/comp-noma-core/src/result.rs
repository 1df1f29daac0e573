//! Result types shared by the centralized and semi-centralized solvers.

use alloc::vec::Vec;

use crate::sinr::{AllocationState, ConstraintReport};

/// How a solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Terminated by its own convergence test.
    Converged,
    /// Hit the iteration or memory budget; values carry the achieved gap.
    MaxIterations,
    /// No feasible point was found within the budget.
    InfeasibleOrUndetected,
}

/// One point of the iteration trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub iteration: usize,
    /// Best objective known at this iteration.
    pub objective: f64,
    /// Certified upper bound (global solver) or NaN when not applicable.
    pub bound: f64,
    /// Inner iterations spent in the beamforming subproblem this round.
    pub inner_beam: usize,
    /// Inner iterations spent in the assignment subproblem this round.
    pub inner_assign: usize,
    /// Max-norm of the dual multipliers after this round.
    pub multiplier_norm: f64,
}

/// Who sent a signaling message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sender {
    Bs { inp: usize, bs: usize },
    Coordinator,
}

/// Who received it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recipients {
    AllBsAndCoordinator,
    AllBs,
    Coordinator,
}

/// What was carried, matching the quantization table rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayloadTag {
    /// Aggregated interference-pricing term, one scalar per user.
    InterferenceAggregate,
    /// Per-user rate multipliers.
    RateMultiplier,
    /// Per-MVNO power multipliers.
    MvnoMultiplier,
    /// Full channel vectors (centralized upload).
    ChannelVectors,
    /// Final beam/scheduling decisions (centralized download).
    Decisions,
}

/// One ledger entry of the signaling exchange of a solver run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MessageRecord {
    pub sender: Sender,
    pub recipients: Recipients,
    pub tag: PayloadTag,
    pub bits: u64,
    pub outer_iteration: usize,
    pub inner_iteration: usize,
}

/// Instrumented operation counters (multiply-accumulate units) split by
/// where the work runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounters {
    /// Work executed at base stations, summed over all BSs.
    pub per_bs_total: u64,
    /// Work executed at the central coordinator.
    pub central_total: u64,
}

/// Final allocation, objective value, per-constraint residuals and the
/// iteration trace of one solver run.
#[derive(Debug, Clone)]
pub struct SolverResult {
    /// Headline objective in bps/Hz. For the global solver this is the best
    /// feasible value of the relaxed monotone problem; for the
    /// semi-centralized solver it is the final binary sum rate.
    pub objective: f64,
    /// Sum rate of `allocation` (always binary, post rounding).
    pub binary_objective: f64,
    /// Certified optimality gap of the relaxed problem, when available.
    pub gap: Option<f64>,
    pub status: SolveStatus,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub allocation: AllocationState,
    pub report: ConstraintReport,
    pub trace: Vec<TraceEntry>,
    pub messages: Vec<MessageRecord>,
    pub ops: OpCounters,
}
