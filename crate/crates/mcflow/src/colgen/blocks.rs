//! Block assembly for the structured basis and the three reduced linear
//! systems, generic over the linear-solve backend.
//!
//! With columns ordered primaries / secondaries / slacks and rows
//! ordered commodities / saturated / unsaturated edges, the basis is
//!
//! ```text
//!         ⎡ I   B   0 ⎤
//!   A  =  ⎢ C   D   0 ⎥        M = C·B − D
//!         ⎣ H   F   I ⎦
//! ```
//!
//! and each of the flow, direction and dual systems reduces to one solve
//! with `M` (or `Mᵀ`) of dimension `|S|`, followed by back-substitution.

use crate::instance::Instance;
use crate::spla::{
    loc_solve, lu_solve_dense, DimChange, IncContext, ProjectionSource, SolveError, SparseMat,
};

use super::state::{BasisState, Layout};

/// The five sparse blocks of the structured basis.
#[derive(Debug, Clone)]
pub struct Blocks {
    /// `l × |S|`: commodity membership of each secondary path.
    pub b: SparseMat,
    /// `|S| × l`: saturated-edge incidence of each primary path.
    pub c: SparseMat,
    /// `|S| × |S|`: saturated-edge incidence of each secondary path.
    pub d: SparseMat,
    /// `|N| × l`: unsaturated-edge incidence of each primary path.
    pub h: SparseMat,
    /// `|N| × |S|`: unsaturated-edge incidence of each secondary path.
    pub f: SparseMat,
}

/// Cost and right-hand-side vectors in block order.
#[derive(Debug, Clone)]
pub struct IterateData {
    /// Primary-path weights (dummy weight for dummies).
    pub cost_k: Vec<f64>,
    /// Secondary-path weights.
    pub cost_s: Vec<f64>,
    /// Demands.
    pub rhs_k: Vec<f64>,
    /// Capacities of the saturated edges, in their matrix order.
    pub rhs_s: Vec<f64>,
    /// Capacities of the unsaturated edges, ascending edge order.
    pub rhs_n: Vec<f64>,
}

fn incidence_cols(
    paths: &[&crate::instance::Path],
    layout: &Layout,
    want_sat: bool,
) -> Vec<Vec<(usize, f64)>> {
    paths
        .iter()
        .map(|p| {
            let mut rows: Vec<usize> = p
                .edges
                .iter()
                .filter_map(|&e| {
                    let (is_sat, k) = layout.edge_pos[e];
                    (is_sat == want_sat).then_some(k)
                })
                .collect();
            rows.sort_unstable();
            rows.into_iter().map(|r| (r, 1.0)).collect()
        })
        .collect()
}

/// Builds the incidence blocks of the current state.
pub fn assemble_blocks(state: &BasisState, layout: &Layout) -> Blocks {
    let l = layout.commodity_count;
    let s = state.sat.len();
    let n = layout.nonsat.len();
    let primaries: Vec<&crate::instance::Path> = state.primary.iter().collect();
    let secondaries: Vec<&crate::instance::Path> = state.assoc.iter().collect();

    let b_cols = secondaries
        .iter()
        .map(|p| vec![(p.commodity, 1.0)])
        .collect();
    Blocks {
        b: SparseMat::from_sorted_cols(l, b_cols),
        c: SparseMat::from_sorted_cols(s, incidence_cols(&primaries, layout, true)),
        d: SparseMat::from_sorted_cols(s, incidence_cols(&secondaries, layout, true)),
        h: SparseMat::from_sorted_cols(n, incidence_cols(&primaries, layout, false)),
        f: SparseMat::from_sorted_cols(n, incidence_cols(&secondaries, layout, false)),
    }
}

/// The reduced matrix `M = C·B − D`.
pub fn build_m(blocks: &Blocks) -> SparseMat {
    blocks.c.mul(&blocks.b).sub(&blocks.d)
}

/// Cost and rhs vectors for the current state.
pub fn iterate_data(state: &BasisState, layout: &Layout, inst: &Instance) -> IterateData {
    let weights: Vec<f64> = inst.network.edges.iter().map(|e| e.weight).collect();
    let dummy_w = inst.dummy_weight();
    let path_cost = |p: &crate::instance::Path| {
        if p.is_dummy() {
            dummy_w
        } else {
            p.weight(&weights)
        }
    };
    IterateData {
        cost_k: state.primary.iter().map(path_cost).collect(),
        cost_s: state.assoc.iter().map(path_cost).collect(),
        rhs_k: inst.commodities.iter().map(|c| c.demand).collect(),
        rhs_s: state
            .sat
            .iter()
            .map(|&e| inst.network.edges[e].capacity)
            .collect(),
        rhs_n: layout
            .nonsat
            .iter()
            .map(|&e| inst.network.edges[e].capacity)
            .collect(),
    }
}

/// Solution vectors in block order.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVec {
    pub k: Vec<f64>,
    pub s: Vec<f64>,
    pub n: Vec<f64>,
}

impl BlockVec {
    pub fn concat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.k.len() + self.s.len() + self.n.len());
        out.extend_from_slice(&self.k);
        out.extend_from_slice(&self.s);
        out.extend_from_slice(&self.n);
        out
    }

    pub fn get(&self, idx: usize) -> f64 {
        if idx < self.k.len() {
            self.k[idx]
        } else if idx < self.k.len() + self.s.len() {
            self.s[idx - self.k.len()]
        } else {
            self.n[idx - self.k.len() - self.s.len()]
        }
    }

    pub fn len(&self) -> usize {
        self.k.len() + self.s.len() + self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Which linear-solve backend drives the reduced systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    /// Dense LU on the full reduced matrix, every solve.
    Dense,
    /// Localized solves with fresh reachability every call.
    Loc,
    /// Incremental solves reusing the previous iteration's solutions;
    /// the direction system (sparse rhs) goes through the localized
    /// solver over the maintained cover.
    Inc,
}

impl BackendKind {
    pub fn name(self) -> &'static str {
        match self {
            BackendKind::Dense => "dense",
            BackendKind::Loc => "loc",
            BackendKind::Inc => "inc",
        }
    }

    pub fn parse(s: &str) -> Option<BackendKind> {
        match s {
            "dense" => Some(BackendKind::Dense),
            "loc" => Some(BackendKind::Loc),
            "inc" => Some(BackendKind::Inc),
            _ => None,
        }
    }
}

/// Backend state: incremental contexts for the flow and dual systems and
/// the dimension change pending for each since the last transition.
#[derive(Debug)]
pub struct LinSolver {
    kind: BackendKind,
    flow_ctx: IncContext,
    dual_ctx: IncContext,
    pending_flow: DimChange,
    pending_dual: DimChange,
}

impl LinSolver {
    pub fn new(kind: BackendKind) -> LinSolver {
        LinSolver {
            kind,
            flow_ctx: IncContext::new(),
            dual_ctx: IncContext::new(),
            pending_flow: DimChange::Same,
            pending_dual: DimChange::Same,
        }
    }

    pub fn kind(&self) -> BackendKind {
        self.kind
    }

    /// Records the basis transition; consumed by the next flow and dual
    /// solves respectively.
    pub fn note_dim_change(&mut self, change: DimChange) {
        self.pending_flow = change;
        self.pending_dual = change;
    }

    /// Total from-scratch fallbacks taken by the incremental contexts.
    pub fn inc_fallbacks(&self) -> usize {
        self.flow_ctx.fallbacks + self.dual_ctx.fallbacks
    }

    /// Aggregated incremental-solve diagnostics over both contexts:
    /// delta solves, summed support rows, summed projection rows,
    /// rebuilds, fallbacks.
    pub fn inc_diagnostics(&self) -> (usize, usize, usize, usize, usize) {
        (
            self.flow_ctx.delta_solves + self.dual_ctx.delta_solves,
            self.flow_ctx.supp_rows_total + self.dual_ctx.supp_rows_total,
            self.flow_ctx.proj_rows_total + self.dual_ctx.proj_rows_total,
            self.flow_ctx.rebuilds + self.dual_ctx.rebuilds,
            self.flow_ctx.fallbacks + self.dual_ctx.fallbacks,
        )
    }

    fn solve_m(&mut self, m: &SparseMat, rhs: &[f64]) -> Result<Vec<f64>, SolveError> {
        match self.kind {
            BackendKind::Dense => lu_solve_dense(m, rhs),
            BackendKind::Loc => loc_solve(m, rhs, ProjectionSource::Reach),
            BackendKind::Inc => {
                let change = std::mem::replace(&mut self.pending_flow, DimChange::Same);
                self.flow_ctx.solve_owned(m.clone(), rhs, change)
            }
        }
    }

    fn solve_mt(&mut self, m: &SparseMat, rhs: &[f64]) -> Result<Vec<f64>, SolveError> {
        match self.kind {
            BackendKind::Dense => lu_solve_dense(&m.transpose(), rhs),
            BackendKind::Loc => loc_solve(&m.transpose(), rhs, ProjectionSource::Reach),
            BackendKind::Inc => {
                let change = std::mem::replace(&mut self.pending_dual, DimChange::Same);
                self.dual_ctx.solve_owned(m.transpose(), rhs, change)
            }
        }
    }

    fn solve_sparse_rhs(&mut self, m: &SparseMat, rhs: &[f64]) -> Result<Vec<f64>, SolveError> {
        match self.kind {
            BackendKind::Dense => lu_solve_dense(m, rhs),
            BackendKind::Loc => loc_solve(m, rhs, ProjectionSource::Reach),
            BackendKind::Inc => {
                // the flow context's cover describes the current reduced
                // matrix; reuse it instead of a fresh reachability sweep
                if self.flow_ctx.cover().dim() == m.nrows() {
                    loc_solve(m, rhs, ProjectionSource::Cover(self.flow_ctx.cover()))
                } else {
                    loc_solve(m, rhs, ProjectionSource::Reach)
                }
            }
        }
    }
}

/// Flow system: `M x_S = C b_K − b_S`, then `x_K = b_K − B x_S` and
/// `x_N = b_N − H x_K − F x_S`.
pub fn solve_flow_system(
    blocks: &Blocks,
    m: &SparseMat,
    data: &IterateData,
    backend: &mut LinSolver,
) -> Result<BlockVec, SolveError> {
    let cb: Vec<f64> = blocks.c.matvec(&data.rhs_k);
    let rhs: Vec<f64> = cb.iter().zip(&data.rhs_s).map(|(a, b)| a - b).collect();
    let x_s = backend.solve_m(m, &rhs)?;
    let bx = blocks.b.matvec(&x_s);
    let x_k: Vec<f64> = data.rhs_k.iter().zip(&bx).map(|(b, v)| b - v).collect();
    let hk = blocks.h.matvec(&x_k);
    let fs = blocks.f.matvec(&x_s);
    let x_n: Vec<f64> = data
        .rhs_n
        .iter()
        .zip(hk.iter().zip(&fs))
        .map(|(b, (p, q))| b - p - q)
        .collect();
    Ok(BlockVec {
        k: x_k,
        s: x_s,
        n: x_n,
    })
}

/// Direction system: `M λ_S = C β_K − β_S`, then `λ_K = β_K − B λ_S`
/// and `λ_N = β_N − H λ_K − F λ_S`. The rhs is sparse, so backends may
/// localize directly.
pub fn solve_direction_system(
    blocks: &Blocks,
    m: &SparseMat,
    beta: &BlockVec,
    backend: &mut LinSolver,
) -> Result<BlockVec, SolveError> {
    let cb = blocks.c.matvec(&beta.k);
    let rhs: Vec<f64> = cb.iter().zip(&beta.s).map(|(a, b)| a - b).collect();
    let l_s = backend.solve_sparse_rhs(m, &rhs)?;
    let bl = blocks.b.matvec(&l_s);
    let l_k: Vec<f64> = beta.k.iter().zip(&bl).map(|(b, v)| b - v).collect();
    let hk = blocks.h.matvec(&l_k);
    let fs = blocks.f.matvec(&l_s);
    let l_n: Vec<f64> = beta
        .n
        .iter()
        .zip(hk.iter().zip(&fs))
        .map(|(b, (p, q))| b - p - q)
        .collect();
    Ok(BlockVec {
        k: l_k,
        s: l_s,
        n: l_n,
    })
}

/// Dual system: `Mᵀ μ_S = c_S − Bᵀ c_K`, then `μ_K = −c_K − Cᵀ μ_S`
/// and `μ_N = 0`.
pub fn solve_dual_system(
    blocks: &Blocks,
    m: &SparseMat,
    data: &IterateData,
    backend: &mut LinSolver,
) -> Result<BlockVec, SolveError> {
    let btc = blocks.b.matvec_t(&data.cost_k);
    let rhs: Vec<f64> = data.cost_s.iter().zip(&btc).map(|(a, b)| a - b).collect();
    let mu_s = backend.solve_mt(m, &rhs)?;
    let ct = blocks.c.matvec_t(&mu_s);
    let mu_k: Vec<f64> = data.cost_k.iter().zip(&ct).map(|(c, v)| -c - v).collect();
    Ok(BlockVec {
        k: mu_k,
        s: mu_s,
        n: vec![0.0; blocks.h.nrows()],
    })
}

/// Reassembles the full basis matrix in block order, for residual checks
/// and tests.
pub fn assemble_basis_matrix(state: &BasisState, layout: &Layout) -> SparseMat {
    let l = layout.commodity_count;
    let s = state.sat.len();
    let size = layout.basis_size();
    let mut cols = Vec::with_capacity(size);
    for (i, p) in state.primary.iter().enumerate() {
        let mut rows = vec![i];
        rows.extend(p.edges.iter().map(|&e| layout.edge_row(e, s)));
        rows.sort_unstable();
        cols.push(rows.into_iter().map(|r| (r, 1.0)).collect());
    }
    for p in state.assoc.iter() {
        let mut rows = vec![p.commodity];
        rows.extend(p.edges.iter().map(|&e| layout.edge_row(e, s)));
        rows.sort_unstable();
        cols.push(rows.into_iter().map(|r| (r, 1.0)).collect());
    }
    for j in 0..layout.nonsat.len() {
        cols.push(vec![(l + s + j, 1.0)]);
    }
    SparseMat::from_sorted_cols(size, cols)
}
