//! Link-path column generation with a structured basis.
//!
//! Each iteration solves three linear systems — flows, pivot direction
//! and duals — all reduced to the saturated-link matrix `M = C·B − D`,
//! prices entering columns by shortest paths under dual-adjusted
//! weights, applies the classical ratio test, and updates the basis
//! through the transition rules in [`state`].

pub mod blocks;
pub mod engine;
pub mod paths;
pub mod state;

pub use blocks::{
    assemble_basis_matrix, assemble_blocks, build_m, iterate_data, solve_direction_system,
    solve_dual_system, solve_flow_system, BackendKind, BlockVec, Blocks, IterateData, LinSolver,
};
pub use engine::{
    init_solution, price_entering, ratio_test, run, verify_feasibility, write_stats_csv,
    EngineError, EnterKind, FeasibilityReport, IterTrace, PhaseTimings, PriceOutcome, RunOptions,
    Solution, StatsRecord,
};
pub use paths::{remaining_capacity, shortest_path, CapacityFloor};
pub use state::{apply_transition, basic_vector, BasisEntity, BasisState, Entering, Layout, Leaving};
