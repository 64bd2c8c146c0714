//! Rank-one coupling at the origin and operators with infinite sites.

mod generalized;
mod rank_one;

pub use generalized::{
    cayley_matrix, operator_norm, strong_convergence_probe, verify_norm_bound, GeneralizedOperator, NormBoundReport,
};
pub use rank_one::{
    free_gap_eigenvalue, gap_eigenvalue, trace_gap_flow, EdgeValue, FlowSample, GapEigenvalue, GapFlowCurve,
    PeriodicBase, SpectralGap,
};
