//! Independent small-instance reference solver.
//!
//! Enumerates every simple path per commodity and solves the full
//! link-path model as a dense LP by tableau simplex with Bland's rule,
//! starting from the all-dummy basis. Deliberately shares nothing with
//! the column-generation code path, so the two can certify each other on
//! small instances. Refuses instances whose total path count exceeds the
//! cap rather than subsampling.

use std::fmt;

use crate::instance::{Instance, Path};

/// Default cap on the total number of enumerated path columns.
pub const DEFAULT_PATH_CAP: usize = 20_000;

const DEFAULT_PIVOT_CAP: usize = 200_000;
const RC_TOL: f64 = 1e-9;
const PIV_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// Path enumeration exceeded the cap; the instance is too large for
    /// the oracle.
    PathCapExceeded { commodity: usize, cap: usize },
    /// The simplex did not finish within its pivot budget.
    PivotCapExceeded,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::PathCapExceeded { commodity, cap } => write!(
                f,
                "more than {cap} simple paths while enumerating commodity {}",
                commodity + 1
            ),
            OracleError::PivotCapExceeded => write!(f, "oracle simplex exceeded its pivot cap"),
        }
    }
}

impl std::error::Error for OracleError {}

/// All simple paths from the commodity's source to its target, by DFS
/// with visited-node pruning, in deterministic edge order. Errors when
/// more than `cap` paths exist.
pub fn enumerate_simple_paths(
    inst: &Instance,
    commodity: usize,
    cap: usize,
) -> Result<Vec<Path>, OracleError> {
    let com = &inst.commodities[commodity];
    let out_edges = inst.network.out_edges();
    let mut visited = vec![false; inst.network.node_count + 1];
    let mut stack_edges: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    visited[com.source] = true;

    fn dfs(
        at: usize,
        target: usize,
        inst: &Instance,
        out_edges: &[Vec<usize>],
        visited: &mut [bool],
        stack_edges: &mut Vec<usize>,
        out: &mut Vec<Path>,
        commodity: usize,
        cap: usize,
    ) -> Result<(), OracleError> {
        if at == target {
            if out.len() >= cap {
                return Err(OracleError::PathCapExceeded { commodity, cap });
            }
            out.push(Path {
                commodity,
                edges: stack_edges.clone(),
            });
            return Ok(());
        }
        for &e in &out_edges[at] {
            let next = inst.network.edges[e].dst;
            if !visited[next] {
                visited[next] = true;
                stack_edges.push(e);
                dfs(
                    next,
                    target,
                    inst,
                    out_edges,
                    visited,
                    stack_edges,
                    out,
                    commodity,
                    cap,
                )?;
                stack_edges.pop();
                visited[next] = false;
            }
        }
        Ok(())
    }

    dfs(
        com.source,
        com.target,
        inst,
        &out_edges,
        &mut visited,
        &mut stack_edges,
        &mut out,
        commodity,
        cap,
    )?;
    Ok(out)
}

/// Optimal objective of the link-path model with the default caps.
pub fn oracle_objective(inst: &Instance) -> Result<f64, OracleError> {
    oracle_objective_capped(inst, DEFAULT_PATH_CAP, DEFAULT_PIVOT_CAP)
}

/// Optimal objective with explicit path and pivot caps.
pub fn oracle_objective_capped(
    inst: &Instance,
    path_cap: usize,
    pivot_cap: usize,
) -> Result<f64, OracleError> {
    let l = inst.commodity_count();
    let edge_count = inst.network.edge_count();
    let weights: Vec<f64> = inst.network.edges.iter().map(|e| e.weight).collect();
    let dummy_w = inst.dummy_weight();

    let mut paths: Vec<Path> = Vec::new();
    for i in 0..l {
        let remaining = path_cap - paths.len();
        let mut p = enumerate_simple_paths(inst, i, remaining)?;
        paths.append(&mut p);
    }

    let rows = l + edge_count;
    let n_paths = paths.len();
    let cols = n_paths + l + edge_count;
    let width = cols + 1; // rhs in the last column

    let mut tab = vec![0.0; rows * width];
    let mut cost = vec![0.0; cols];
    for (j, p) in paths.iter().enumerate() {
        cost[j] = p.weight(&weights);
        tab[p.commodity * width + j] = 1.0;
        for &e in &p.edges {
            tab[(l + e) * width + j] = 1.0;
        }
    }
    for i in 0..l {
        cost[n_paths + i] = dummy_w;
        tab[i * width + n_paths + i] = 1.0;
    }
    for e in 0..edge_count {
        tab[(l + e) * width + n_paths + l + e] = 1.0;
    }
    for (i, c) in inst.commodities.iter().enumerate() {
        tab[i * width + cols] = c.demand;
    }
    for (e, edge) in inst.network.edges.iter().enumerate() {
        tab[(l + e) * width + cols] = edge.capacity;
    }

    // all-dummy starting basis: dummies cover demand rows, slacks cover
    // capacity rows; the tableau is already in canonical form
    let mut basis: Vec<usize> = (0..l)
        .map(|i| n_paths + i)
        .chain((0..edge_count).map(|e| n_paths + l + e))
        .collect();

    for _pivot in 0..pivot_cap {
        // Bland: the lowest-index column with a negative reduced cost
        let mut entering = None;
        for j in 0..cols {
            let mut rc = cost[j];
            for (row, &bj) in basis.iter().enumerate() {
                let a = tab[row * width + j];
                if a != 0.0 {
                    rc -= cost[bj] * a;
                }
            }
            if rc < -RC_TOL {
                entering = Some(j);
                break;
            }
        }
        let j = match entering {
            Some(j) => j,
            None => {
                let obj = basis
                    .iter()
                    .enumerate()
                    .map(|(row, &bj)| cost[bj] * tab[row * width + cols])
                    .sum();
                return Ok(obj);
            }
        };

        // ratio test; ties resolved by the smallest basis column index
        let mut leave: Option<(usize, f64)> = None;
        for row in 0..rows {
            let a = tab[row * width + j];
            if a > PIV_TOL {
                let r = tab[row * width + cols] / a;
                match leave {
                    Some((lr, best)) => {
                        if r < best - RC_TOL
                            || (r < best + RC_TOL && basis[row] < basis[lr])
                        {
                            leave = Some((row, r.min(best)));
                        }
                    }
                    None => leave = Some((row, r)),
                }
            }
        }
        let (prow, _) = leave.expect("bounded model cannot yield an unbounded ray");

        // pivot
        let piv = tab[prow * width + j];
        for c in 0..width {
            tab[prow * width + c] /= piv;
        }
        for row in 0..rows {
            if row != prow {
                let factor = tab[row * width + j];
                if factor != 0.0 {
                    for c in 0..width {
                        tab[row * width + c] -= factor * tab[prow * width + c];
                    }
                }
            }
        }
        basis[prow] = j;
    }
    Err(OracleError::PivotCapExceeded)
}
