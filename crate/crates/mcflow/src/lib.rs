//! Minimum-cost multi-commodity flow by link-path column generation.
//!
//! The solver maintains the structured basis of the link-path model and
//! reduces every per-iteration linear system to the saturated-link
//! matrix `M = C·B − D`, which stays small and very sparse in practice.
//! Three interchangeable backends drive the reduced solves:
//!
//! * `dense` — LU on the full reduced matrix each call,
//! * `loc`   — localized solves restricted to the rows/columns reachable
//!   from the right-hand side's support,
//! * `inc`   — incremental solves that reuse the previous iteration's
//!   solution and localize only the correction.
//!
//! [`oracle`] provides an independent exhaustive-enumeration LP used to
//! certify objectives on small instances; [`instance`] holds the data
//! model, text format and the random benchmark generator.

pub mod colgen;
pub mod fixtures;
pub mod instance;
pub mod oracle;
pub mod spla;
pub mod tol;

pub use colgen::{run, BackendKind, EngineError, RunOptions, Solution};
pub use instance::{generate_random, parse_instance, write_instance, Instance};
