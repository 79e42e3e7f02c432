//! Numeric tolerances used across the solver, in one place.

/// Relative residual bound for linear solves: a solution `x` of `Ax = b`
/// is accepted when `‖Ax − b‖∞ ≤ EPS_RES · (1 + ‖b‖∞)`.
pub const EPS_RES: f64 = 1e-8;

/// Dense LU pivot threshold; a pivot below this aborts the factorization
/// as singular. Absolute, sized for integer-derived data in f64.
pub const EPS_PIV: f64 = 1e-11;

/// Reduced-cost tolerance for pricing: a link or path enters only when
/// its reduced cost is below `−EPS_OPT`.
pub const EPS_OPT: f64 = 1e-7;

/// Feasibility tolerance: basic variables may dip to `−EPS_FEAS` before
/// the invariant checker flags them.
pub const EPS_FEAS: f64 = 1e-8;

/// Absolute bound on the per-iteration basis-system residuals
/// `A_k x − b`, `A_k λ − β`, `A_kᵀ μ + c` enforced by the invariant
/// checker.
pub const EPS_BASIS_RESIDUAL: f64 = 1e-8;

/// Candidates whose key lies within this of the best are treated as tied
/// and broken by smallest index, so that near-equal floating keys pick
/// the same pivot on every backend.
pub const EPS_TIE: f64 = 1e-9;

/// Grid to which link duals are snapped before shortest-path pricing.
/// Backend-dependent rounding in the dual solve is far below this, so
/// all backends price on bit-identical weights.
pub const PRICE_SNAP: f64 = 1e-9;

/// Entries of the incremental right-hand side `Δb = b − Aξ′` at or below
/// `EPS_INC_SUPP · (1 + ‖b‖∞)` are treated as exact zeros when forming
/// the localized support. Sits roughly 20× above the f64 rounding floor
/// of the residual matvec; anything larger lets conditioning push
/// solution components past the basis feasibility tolerance.
pub const EPS_INC_SUPP: f64 = 1e-14;

/// Internal refresh trigger for the incremental solver: when the
/// combined solution misses `EPS_INC_REFRESH · (1 + ‖b‖∞)` it is redone
/// from scratch before the public `EPS_RES` bound is ever at risk.
pub const EPS_INC_REFRESH: f64 = 1e-10;

/// Consecutive degenerate (zero-ratio) pivots tolerated before the
/// engine switches to smallest-index (Bland-style) selection.
pub const BLAND_TRIGGER: usize = 50;

/// The full reduced matrix is LU-checked each iteration only up to this
/// dimension; above it, solvability is certified by the per-solve
/// projection factorizations plus the basis-residual bounds.
pub const FULL_LU_CHECK_DIM: usize = 150;

/// Projection systems up to this dimension are solved by the dense
/// kernel; larger ones go through the left-looking sparse LU, whose fill
/// stays near the nonzero count on the matrices seen here.
pub const DENSE_KERNEL_MAX: usize = 48;
