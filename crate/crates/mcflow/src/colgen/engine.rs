//! The column-generation engine: initialization, pricing, pivoting and
//! the main loop, with per-iteration invariant checking and statistics.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};
use std::time::{Duration, Instant};

use crate::instance::{Instance, Path};
use crate::spla::{residual_inf, DenseLu, SolveError, SparseMat};
use crate::tol;

use super::blocks::{
    assemble_basis_matrix, assemble_blocks, build_m, iterate_data, solve_direction_system,
    solve_dual_system, solve_flow_system, BackendKind, BlockVec, Blocks, IterateData, LinSolver,
};
use super::paths::{shortest_path, shortest_tree, extract_path, CapacityFloor};
use super::state::{apply_transition, BasisState, Entering, Layout, Leaving};

/// Options for [`run`].
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub backend: BackendKind,
    pub max_iters: usize,
    /// Reduced-cost tolerance for pricing decisions.
    pub opt_tol: f64,
    /// Check the per-iteration invariants (balance, cardinality,
    /// nonnegativity, basis residuals, reduced-matrix solvability).
    pub check_invariants: bool,
    /// Record per-iteration `x`, `λ`, `μ` and pivot identities.
    pub trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            backend: BackendKind::Inc,
            max_iters: 10_000_000,
            opt_tol: tol::EPS_OPT,
            check_invariants: true,
            trace: false,
        }
    }
}

/// What entered the basis in one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnterKind {
    Link,
    Path,
}

impl EnterKind {
    pub fn name(self) -> &'static str {
        match self {
            EnterKind::Link => "link",
            EnterKind::Path => "path",
        }
    }
}

/// One row of the per-iteration statistics stream.
#[derive(Debug, Clone)]
pub struct StatsRecord {
    pub iter: usize,
    pub dim_m: usize,
    pub nnz_m: usize,
    pub enter_kind: EnterKind,
    pub t_dual_us: u64,
    pub t_dir_us: u64,
    pub t_flow_us: u64,
}

/// Writes the stats stream as CSV
/// (`iter,dim_M,nnz_M,enter_kind,t_dual_us,t_dir_us,t_flow_us`).
pub fn write_stats_csv<W: Write>(records: &[StatsRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "iter,dim_M,nnz_M,enter_kind,t_dual_us,t_dir_us,t_flow_us")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.iter,
            r.dim_m,
            r.nnz_m,
            r.enter_kind.name(),
            r.t_dual_us,
            r.t_dir_us,
            r.t_flow_us
        )?;
    }
    Ok(())
}

/// Wall-clock split of a run, following the benchmark table layout:
/// shortest-path time, linear-equation time, and everything else.
#[derive(Debug, Clone, Copy, Default)]
pub struct PhaseTimings {
    pub total: Duration,
    pub shortest_path: Duration,
    pub lin_solve: Duration,
}

impl PhaseTimings {
    pub fn rest(&self) -> Duration {
        self.total
            .saturating_sub(self.shortest_path)
            .saturating_sub(self.lin_solve)
    }
}

/// Per-iteration trace entry for backend-lockstep comparisons.
#[derive(Debug, Clone)]
pub struct IterTrace {
    pub entering: Entering,
    /// Global column index (block layout) of the leaving variable.
    pub leaving: usize,
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
}

/// Result of a solve.
#[derive(Debug, Clone)]
pub struct Solution {
    /// True when pricing proved optimality; false for a partial solution
    /// surfaced through the iteration-cap error.
    pub optimal: bool,
    pub objective: f64,
    /// Basic real paths with their flows.
    pub flows: Vec<(Path, f64)>,
    /// Undelivered demand per commodity (dummy-path flow).
    pub dummy_flows: Vec<f64>,
    /// Delivered demand per commodity.
    pub delivered: Vec<f64>,
    /// Pivots performed.
    pub iterations: usize,
    pub stats: Vec<StatsRecord>,
    pub timings: PhaseTimings,
    pub trace: Vec<IterTrace>,
    /// Incremental-backend diagnostics: (delta solves, summed support
    /// rows, summed projection rows, cover rebuilds, residual
    /// fallbacks). Zeroes under other backends.
    pub inc_diag: (usize, usize, usize, usize, usize),
}

/// Engine failure modes.
#[derive(Debug)]
pub enum EngineError {
    /// Iteration cap reached; carries the feasible partial solution.
    IterationCap(Box<Solution>),
    /// A loop invariant failed; indicates a bookkeeping or numeric bug.
    Invariant { iter: usize, what: String },
    /// A reduced-system solve failed.
    Solve {
        iter: usize,
        system: &'static str,
        source: SolveError,
    },
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::IterationCap(sol) => {
                write!(f, "iteration cap exceeded after {} pivots", sol.iterations)
            }
            EngineError::Invariant { iter, what } => {
                write!(f, "invariant breach at iteration {iter}: {what}")
            }
            EngineError::Solve {
                iter,
                system,
                source,
            } => write!(f, "{system} solve failed at iteration {iter}: {source}"),
        }
    }
}

impl std::error::Error for EngineError {}

/// Initial solution: per commodity in order, the weight-shortest path
/// whose remaining capacity carries the whole demand, else the dummy.
/// Returns the initial state and the basic values (primary flows and
/// slacks).
pub fn init_solution(inst: &Instance) -> (BasisState, BlockVec) {
    let weights: Vec<f64> = inst.network.edges.iter().map(|e| e.weight).collect();
    let mut remaining: Vec<f64> = inst.network.edges.iter().map(|e| e.capacity).collect();
    let mut primary = Vec::with_capacity(inst.commodity_count());
    for (i, com) in inst.commodities.iter().enumerate() {
        let found = shortest_path(
            inst,
            i,
            &weights,
            Some(CapacityFloor {
                remaining: &remaining,
                floor: com.demand,
            }),
        );
        match found {
            Some(p) => {
                for &e in &p.edges {
                    remaining[e] -= com.demand;
                }
                primary.push(p);
            }
            None => primary.push(Path::dummy(i)),
        }
    }
    let x = BlockVec {
        k: inst.commodities.iter().map(|c| c.demand).collect(),
        s: Vec::new(),
        n: remaining,
    };
    (BasisState::initial(primary), x)
}

/// Outcome of pricing.
#[derive(Debug, Clone, PartialEq)]
pub enum PriceOutcome {
    Entering(Entering),
    Optimal,
}

fn snap(v: f64) -> f64 {
    (v / tol::PRICE_SNAP).round() * tol::PRICE_SNAP
}

/// Adjacency caches reused across pricing rounds.
#[derive(Debug, Clone)]
pub struct PricingGraph {
    out_edges: Vec<Vec<usize>>,
    edge_ends: Vec<(usize, usize)>,
}

impl PricingGraph {
    pub fn new(inst: &Instance) -> PricingGraph {
        PricingGraph {
            out_edges: inst.network.out_edges(),
            edge_ends: inst.network.edges.iter().map(|e| (e.src, e.dst)).collect(),
        }
    }
}

/// Chooses the entering variable: the most negative link dual if one is
/// below `−opt_tol`, otherwise the commodity whose re-priced shortest
/// path under `w + μ` improves most on its primary. Near-equal keys are
/// tied and broken by smallest index; under `bland`, the first eligible
/// index is taken outright.
pub fn price_entering(
    inst: &Instance,
    graph: &PricingGraph,
    state: &BasisState,
    mu: &BlockVec,
    opt_tol: f64,
    bland: bool,
    sp_time: &mut Duration,
) -> PriceOutcome {
    let edge_count = inst.network.edge_count();
    let mut mu_edge = vec![0.0; edge_count];
    for (k, &e) in state.sat.iter().enumerate() {
        mu_edge[e] = mu.s[k];
    }

    // link candidate
    let link = if bland {
        (0..edge_count).find(|&e| mu_edge[e] < -opt_tol)
    } else {
        let mut best = f64::INFINITY;
        for &v in &mu_edge {
            if v < best {
                best = v;
            }
        }
        if best < -opt_tol {
            (0..edge_count).find(|&e| mu_edge[e] <= best + tol::EPS_TIE)
        } else {
            None
        }
    };
    if let Some(e) = link {
        return PriceOutcome::Entering(Entering::Link(e));
    }

    if inst.commodity_count() == 0 {
        return PriceOutcome::Optimal;
    }

    // path pricing under the dual-adjusted weights, snapped so that all
    // backends price on identical bits
    let w_eff: Vec<f64> = inst
        .network
        .edges
        .iter()
        .zip(&mu_edge)
        .map(|(e, &m)| snap(e.weight + m))
        .collect();
    let dummy_w = inst.dummy_weight();

    let t0 = Instant::now();
    let mut trees: HashMap<usize, (Vec<f64>, Vec<usize>)> = HashMap::new();
    let mut delta = vec![f64::INFINITY; inst.commodity_count()];
    // the augmenting network always offers the dummy at weight W, so the
    // candidate for a commodity is the cheaper of the re-priced real
    // shortest path and the dummy
    let mut dummy_wins = vec![false; inst.commodity_count()];
    for (i, com) in inst.commodities.iter().enumerate() {
        let (dist, _) = trees.entry(com.source).or_insert_with(|| {
            shortest_tree(
                inst.network.node_count,
                &graph.out_edges,
                &graph.edge_ends,
                com.source,
                &w_eff,
                None,
            )
        });
        let reach_cost = dist[com.target];
        let best = if state.primary[i].is_dummy() {
            // dummy basic: its reduced cost is zero, only real paths count
            reach_cost
        } else if reach_cost <= dummy_w {
            reach_cost
        } else {
            dummy_wins[i] = true;
            dummy_w
        };
        if best.is_finite() {
            let primary_cost = if state.primary[i].is_dummy() {
                dummy_w
            } else {
                state.primary[i].weight(&w_eff)
            };
            delta[i] = best - primary_cost;
        }
    }
    *sp_time += t0.elapsed();

    let chosen = if bland {
        (0..delta.len()).find(|&i| delta[i] < -opt_tol)
    } else {
        let best = delta.iter().cloned().fold(f64::INFINITY, f64::min);
        if best < -opt_tol {
            (0..delta.len()).find(|&i| delta[i] <= best + tol::EPS_TIE)
        } else {
            None
        }
    };
    match chosen {
        Some(j) if dummy_wins[j] => PriceOutcome::Entering(Entering::Path(Path::dummy(j))),
        Some(j) => {
            let com = &inst.commodities[j];
            let (_, pred) = &trees[&com.source];
            let edges = extract_path(pred, &graph.edge_ends, com.source, com.target)
                .expect("finite distance implies an extractable path");
            PriceOutcome::Entering(Entering::Path(Path {
                commodity: j,
                edges,
            }))
        }
        None => PriceOutcome::Optimal,
    }
}

/// The classical ratio test: over components with `λ_i > εpiv`, the
/// smallest `x_i / λ_i` wins; near-ties go to the smallest column index.
/// Returns the global column index and the ratio, or `None` when no
/// component is eligible.
pub fn ratio_test(x: &BlockVec, lambda: &BlockVec) -> Option<(usize, f64)> {
    let n = x.len();
    debug_assert_eq!(n, lambda.len());
    let mut best: Option<(usize, f64)> = None;
    for i in 0..n {
        let l = lambda.get(i);
        if l > tol::EPS_PIV {
            let r = x.get(i).max(0.0) / l;
            match best {
                Some((_, rb)) if r >= rb - tol::EPS_TIE * (1.0 + rb.abs()) => {}
                _ => best = Some((i, r)),
            }
        }
    }
    // re-scan for the smallest index within the tie band of the minimum
    if let Some((_, rmin)) = best {
        let band = tol::EPS_TIE * (1.0 + rmin.abs());
        for i in 0..n {
            let l = lambda.get(i);
            if l > tol::EPS_PIV && x.get(i).max(0.0) / l <= rmin + band {
                return Some((i, x.get(i).max(0.0) / l));
            }
        }
    }
    best
}

fn leaving_of_index(idx: usize, l: usize, s: usize) -> Leaving {
    if idx < l {
        Leaving::Primary(idx)
    } else if idx < l + s {
        Leaving::Secondary(idx - l)
    } else {
        Leaving::Slack(idx - l - s)
    }
}

/// Basic vector of the entering variable in block layout.
fn entering_beta(entering: &Entering, state: &BasisState, layout: &Layout) -> BlockVec {
    let l = layout.commodity_count;
    let s = state.sat.len();
    let mut beta = BlockVec {
        k: vec![0.0; l],
        s: vec![0.0; s],
        n: vec![0.0; layout.nonsat.len()],
    };
    match entering {
        Entering::Link(e) => {
            let (is_sat, k) = layout.edge_pos[*e];
            debug_assert!(is_sat, "entering link must be saturated");
            beta.s[k] = 1.0;
        }
        Entering::Path(p) => {
            beta.k[p.commodity] = 1.0;
            for &e in &p.edges {
                let (is_sat, k) = layout.edge_pos[e];
                if is_sat {
                    beta.s[k] = 1.0;
                } else {
                    beta.n[k] = 1.0;
                }
            }
        }
    }
    beta
}

struct Loop<'a> {
    inst: &'a Instance,
    opts: &'a RunOptions,
    graph: PricingGraph,
    state: BasisState,
    layout: Layout,
    blocks: Blocks,
    m: SparseMat,
    data: IterateData,
    x: BlockVec,
    backend: LinSolver,
    prev_obj: f64,
    degenerate_streak: usize,
    bland: bool,
    iterations: usize,
    stats: Vec<StatsRecord>,
    trace: Vec<IterTrace>,
    sp_time: Duration,
    lin_time: Duration,
}

impl<'a> Loop<'a> {
    fn objective(&self) -> f64 {
        let ck: f64 = self
            .data
            .cost_k
            .iter()
            .zip(&self.x.k)
            .map(|(c, x)| c * x)
            .sum();
        let cs: f64 = self
            .data
            .cost_s
            .iter()
            .zip(&self.x.s)
            .map(|(c, x)| c * x)
            .sum();
        ck + cs
    }

    fn rhs_full(&self) -> Vec<f64> {
        let mut b = self.data.rhs_k.clone();
        b.extend_from_slice(&self.data.rhs_s);
        b.extend_from_slice(&self.data.rhs_n);
        b
    }

    fn cost_full(&self) -> Vec<f64> {
        let mut c = self.data.cost_k.clone();
        c.extend_from_slice(&self.data.cost_s);
        c.extend(vec![0.0; self.layout.nonsat.len()]);
        c
    }

    fn fail(&self, what: String) -> EngineError {
        EngineError::Invariant {
            iter: self.iterations + 1,
            what,
        }
    }

    /// Start-of-iteration invariants on the current state and flows.
    fn check_state(&mut self, basis: &SparseMat) -> Result<(), EngineError> {
        self.state
            .check_structure()
            .map_err(|e| self.fail(e))?;
        let xv = self.x.concat();
        let res = residual_inf(basis, &xv, &self.rhs_full());
        if res > tol::EPS_BASIS_RESIDUAL {
            return Err(self.fail(format!("flow residual {res:e} exceeds bound")));
        }
        let min_x = xv.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_x < -tol::EPS_FEAS {
            return Err(self.fail(format!("basic variable {min_x:e} below feasibility bound")));
        }
        let obj = self.objective();
        if obj > self.prev_obj + self.opts.opt_tol * (1.0 + self.prev_obj.abs()) {
            return Err(self.fail(format!(
                "objective increased from {} to {}",
                self.prev_obj, obj
            )));
        }
        if self.bland && obj < self.prev_obj - tol::EPS_FEAS * (1.0 + obj.abs()) {
            self.bland = false;
            self.degenerate_streak = 0;
        }
        self.prev_obj = obj;
        // explicit solvability check of the reduced matrix where cheap;
        // the dense backend factors it on every solve anyway
        if self.backend.kind() != BackendKind::Dense
            && self.m.nrows() > 0
            && self.m.nrows() <= tol::FULL_LU_CHECK_DIM
        {
            DenseLu::factor(self.m.nrows(), self.m.to_dense())
                .map_err(|_| self.fail("reduced matrix failed LU".into()))?;
        }
        Ok(())
    }

    fn rebuild(&mut self) {
        self.layout = self.state.layout(self.inst);
        self.blocks = assemble_blocks(&self.state, &self.layout);
        self.m = build_m(&self.blocks);
        self.data = iterate_data(&self.state, &self.layout, self.inst);
    }

    fn build_solution(&self, optimal: bool, total: Duration) -> Solution {
        let mut flows = Vec::new();
        let mut dummy_flows = vec![0.0; self.inst.commodity_count()];
        for (i, p) in self.state.primary.iter().enumerate() {
            if p.is_dummy() {
                dummy_flows[i] = self.x.k[i];
            } else {
                flows.push((p.clone(), self.x.k[i]));
            }
        }
        for (j, p) in self.state.assoc.iter().enumerate() {
            flows.push((p.clone(), self.x.s[j]));
        }
        let delivered = self
            .inst
            .commodities
            .iter()
            .zip(&dummy_flows)
            .map(|(c, y)| c.demand - y)
            .collect();
        Solution {
            optimal,
            objective: self.objective(),
            flows,
            dummy_flows,
            delivered,
            iterations: self.iterations,
            stats: self.stats.clone(),
            timings: PhaseTimings {
                total,
                shortest_path: self.sp_time,
                lin_solve: self.lin_time,
            },
            trace: self.trace.clone(),
            inc_diag: self.backend.inc_diagnostics(),
        }
    }
}

/// Solves the instance by column generation with the chosen backend.
pub fn run(inst: &Instance, opts: &RunOptions) -> Result<Solution, EngineError> {
    let started = Instant::now();
    let t_init = Instant::now();
    let (state, x) = init_solution(inst);
    let sp_init = t_init.elapsed();

    let mut lp = Loop {
        inst,
        opts,
        graph: PricingGraph::new(inst),
        state,
        layout: Layout {
            commodity_count: 0,
            edge_count: 0,
            nonsat: Vec::new(),
            edge_pos: Vec::new(),
        },
        blocks: assemble_blocks(&BasisState::initial(Vec::new()), &Layout {
            commodity_count: 0,
            edge_count: 0,
            nonsat: Vec::new(),
            edge_pos: Vec::new(),
        }),
        m: SparseMat::zero(0, 0),
        data: IterateData {
            cost_k: Vec::new(),
            cost_s: Vec::new(),
            rhs_k: Vec::new(),
            rhs_s: Vec::new(),
            rhs_n: Vec::new(),
        },
        x,
        backend: LinSolver::new(opts.backend),
        prev_obj: f64::INFINITY,
        degenerate_streak: 0,
        bland: false,
        iterations: 0,
        stats: Vec::new(),
        trace: Vec::new(),
        sp_time: sp_init,
        lin_time: Duration::ZERO,
    };
    lp.rebuild();

    loop {
        let basis = if opts.check_invariants || opts.trace {
            Some(assemble_basis_matrix(&lp.state, &lp.layout))
        } else {
            None
        };
        if opts.check_invariants {
            lp.check_state(basis.as_ref().expect("assembled above"))?;
        } else {
            // objective tracking still drives the anti-cycling switch
            let obj = lp.objective();
            if lp.bland && obj < lp.prev_obj - tol::EPS_FEAS * (1.0 + obj.abs()) {
                lp.bland = false;
                lp.degenerate_streak = 0;
            }
            lp.prev_obj = obj;
        }

        // duals
        let t = Instant::now();
        let mu = solve_dual_system(&lp.blocks, &lp.m, &lp.data, &mut lp.backend).map_err(|e| {
            EngineError::Solve {
                iter: lp.iterations + 1,
                system: "dual",
                source: e,
            }
        })?;
        let t_dual = t.elapsed();
        lp.lin_time += t_dual;
        if opts.check_invariants {
            let basis = basis.as_ref().expect("assembled above");
            let neg_c: Vec<f64> = lp.cost_full().iter().map(|v| -v).collect();
            let res = residual_inf(&basis.transpose(), &mu.concat(), &neg_c);
            if res > tol::EPS_BASIS_RESIDUAL {
                return Err(lp.fail(format!("dual residual {res:e} exceeds bound")));
            }
        }

        // pricing
        let outcome = price_entering(
            inst,
            &lp.graph,
            &lp.state,
            &mu,
            opts.opt_tol,
            lp.bland,
            &mut lp.sp_time,
        );
        let entering = match outcome {
            PriceOutcome::Optimal => return Ok(lp.build_solution(true, started.elapsed())),
            PriceOutcome::Entering(e) => e,
        };

        // direction
        let beta = entering_beta(&entering, &lp.state, &lp.layout);
        let t = Instant::now();
        let lambda = solve_direction_system(&lp.blocks, &lp.m, &beta, &mut lp.backend).map_err(
            |e| EngineError::Solve {
                iter: lp.iterations + 1,
                system: "direction",
                source: e,
            },
        )?;
        let t_dir = t.elapsed();
        lp.lin_time += t_dir;
        if opts.check_invariants {
            let basis = basis.as_ref().expect("assembled above");
            let res = residual_inf(basis, &lambda.concat(), &beta.concat());
            if res > tol::EPS_BASIS_RESIDUAL {
                return Err(lp.fail(format!("direction residual {res:e} exceeds bound")));
            }
        }

        // leaving variable
        let (leave_idx, ratio) = ratio_test(&lp.x, &lambda)
            .ok_or_else(|| lp.fail("no positive direction component in ratio test".into()))?;
        if ratio <= tol::EPS_FEAS {
            lp.degenerate_streak += 1;
            if lp.degenerate_streak >= tol::BLAND_TRIGGER {
                lp.bland = true;
            }
        } else {
            lp.degenerate_streak = 0;
        }
        let leaving = leaving_of_index(leave_idx, lp.layout.commodity_count, lp.state.sat.len());

        if opts.trace {
            lp.trace.push(IterTrace {
                entering: entering.clone(),
                leaving: leave_idx,
                x: lp.x.concat(),
                lambda: lambda.concat(),
                mu: mu.concat(),
            });
        }
        lp.stats.push(StatsRecord {
            iter: lp.iterations + 1,
            dim_m: lp.m.nrows(),
            nnz_m: lp.m.nnz(),
            enter_kind: match entering {
                Entering::Link(_) => EnterKind::Link,
                Entering::Path(_) => EnterKind::Path,
            },
            t_dual_us: t_dual.as_micros() as u64,
            t_dir_us: t_dir.as_micros() as u64,
            t_flow_us: 0,
        });

        // pivot
        let change = apply_transition(&mut lp.state, &lp.layout, &entering, &leaving)
            .map_err(|e| lp.fail(e.to_string()))?;
        lp.backend.note_dim_change(change);
        lp.rebuild();

        // flows for the new basis
        let t = Instant::now();
        lp.x = solve_flow_system(&lp.blocks, &lp.m, &lp.data, &mut lp.backend).map_err(|e| {
            EngineError::Solve {
                iter: lp.iterations + 1,
                system: "flow",
                source: e,
            }
        })?;
        let t_flow = t.elapsed();
        lp.lin_time += t_flow;
        if let Some(last) = lp.stats.last_mut() {
            last.t_flow_us = t_flow.as_micros() as u64;
        }

        lp.iterations += 1;
        if lp.iterations >= opts.max_iters {
            let sol = lp.build_solution(false, started.elapsed());
            return Err(EngineError::IterationCap(Box::new(sol)));
        }
    }
}

/// Feasibility report for a solution against the model constraints.
#[derive(Debug, Clone, Copy, Default)]
pub struct FeasibilityReport {
    /// Largest per-edge excess of flow over capacity.
    pub max_capacity_violation: f64,
    /// Largest per-commodity deviation of path flow + dummy flow from
    /// the demand.
    pub max_balance_violation: f64,
    /// Largest per-node flow-conservation deviation of the induced edge
    /// flows per commodity.
    pub max_conservation_violation: f64,
    /// Magnitude of the most negative flow variable.
    pub max_negative_flow: f64,
}

impl FeasibilityReport {
    pub fn max_violation(&self) -> f64 {
        self.max_capacity_violation
            .max(self.max_balance_violation)
            .max(self.max_conservation_violation)
            .max(self.max_negative_flow)
    }

    pub fn ok(&self, tolerance: f64) -> bool {
        self.max_violation() <= tolerance
    }
}

/// Checks capacity, per-commodity balance, flow conservation of the
/// induced edge flows, and nonnegativity.
pub fn verify_feasibility(inst: &Instance, sol: &Solution) -> FeasibilityReport {
    let l = inst.commodity_count();
    let edge_count = inst.network.edge_count();
    let mut report = FeasibilityReport::default();

    let mut total_load = vec![0.0; edge_count];
    let mut per_commodity_load = vec![vec![0.0; edge_count]; l];
    let mut path_flow = vec![0.0; l];
    for (p, f) in &sol.flows {
        report.max_negative_flow = report.max_negative_flow.max(-*f);
        path_flow[p.commodity] += f;
        for &e in &p.edges {
            total_load[e] += f;
            per_commodity_load[p.commodity][e] += f;
        }
    }
    for (i, y) in sol.dummy_flows.iter().enumerate() {
        report.max_negative_flow = report.max_negative_flow.max(-*y);
        let d = inst.commodities[i].demand;
        report.max_balance_violation = report
            .max_balance_violation
            .max((path_flow[i] + y - d).abs());
    }
    for (e, edge) in inst.network.edges.iter().enumerate() {
        report.max_capacity_violation = report
            .max_capacity_violation
            .max(total_load[e] - edge.capacity);
    }
    for (i, load) in per_commodity_load.iter().enumerate() {
        let com = &inst.commodities[i];
        let mut net = vec![0.0; inst.network.node_count + 1];
        for (e, &f) in load.iter().enumerate() {
            let edge = &inst.network.edges[e];
            net[edge.src] += f;
            net[edge.dst] -= f;
        }
        let delivered = sol.delivered[i];
        for node in 1..=inst.network.node_count {
            let want = if node == com.source {
                delivered
            } else if node == com.target {
                -delivered
            } else {
                0.0
            };
            report.max_conservation_violation = report
                .max_conservation_violation
                .max((net[node] - want).abs());
        }
    }
    report.max_capacity_violation = report.max_capacity_violation.max(0.0);
    report
}
