//! Shortest-path machinery for initialization and pricing.
//!
//! Pricing weights are reduced costs `w + μ` and stay nonnegative up to
//! tolerance whenever shortest paths are priced at all (a negative link
//! dual enters as a link instead), so the workhorse is a binary-heap
//! Dijkstra with tiny negatives clamped to zero. A label-correcting
//! sweep covers the remaining corner where a zero-weight edge carries a
//! dual slightly below the clamp tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::instance::{Instance, Path};
use crate::tol;

/// Restricts the search to edges whose remaining capacity is at least
/// `floor` ("the remaining capacity carries the demand").
#[derive(Debug, Clone, Copy)]
pub struct CapacityFloor<'a> {
    pub remaining: &'a [f64],
    pub floor: f64,
}

const NO_PRED: usize = usize::MAX;

#[derive(PartialEq)]
struct HeapItem {
    dist: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed for a min-heap; ties settle the smaller node first
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest-path tree. Returns per-node distances
/// (`f64::INFINITY` when unreachable) and predecessor edge indices
/// (`usize::MAX` when none). Nodes are 1-based; slot 0 is unused.
pub fn shortest_tree(
    node_count: usize,
    out_edges: &[Vec<usize>],
    edge_ends: &[(usize, usize)],
    source: usize,
    weights: &[f64],
    filter: Option<CapacityFloor>,
) -> (Vec<f64>, Vec<usize>) {
    let active = |e: usize| match filter {
        Some(f) => f.remaining[e] >= f.floor,
        None => true,
    };
    let has_bad_negative = weights
        .iter()
        .enumerate()
        .any(|(e, &w)| w < -tol::EPS_FEAS && active(e));

    let mut dist = vec![f64::INFINITY; node_count + 1];
    let mut pred = vec![NO_PRED; node_count + 1];
    dist[source] = 0.0;

    if !has_bad_negative {
        let mut heap = BinaryHeap::new();
        heap.push(HeapItem {
            dist: 0.0,
            node: source,
        });
        let mut done = vec![false; node_count + 1];
        while let Some(HeapItem { dist: d, node: u }) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for &e in &out_edges[u] {
                if !active(e) {
                    continue;
                }
                let w = weights[e].max(0.0);
                let (_, v) = edge_ends[e];
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = e;
                    heap.push(HeapItem { dist: nd, node: v });
                }
            }
        }
    } else {
        // label-correcting fallback: Bellman-Ford rounds, bounded by the
        // node count, which suffices without negative cycles
        for _ in 0..node_count {
            let mut changed = false;
            for (e, &(u, v)) in edge_ends.iter().enumerate() {
                if !active(e) || dist[u] == f64::INFINITY {
                    continue;
                }
                let nd = dist[u] + weights[e];
                if nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = e;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
    (dist, pred)
}

/// Reads the path to `target` out of a predecessor tree. Returns `None`
/// when the target is unreachable or extraction revisits a node (which
/// only a numerically negative cycle could cause).
pub fn extract_path(
    pred: &[usize],
    edge_ends: &[(usize, usize)],
    source: usize,
    target: usize,
) -> Option<Vec<usize>> {
    let mut rev = Vec::new();
    let mut at = target;
    let mut hops = 0;
    while at != source {
        let e = pred[at];
        if e == NO_PRED {
            return None;
        }
        rev.push(e);
        at = edge_ends[e].0;
        hops += 1;
        if hops > pred.len() {
            return None;
        }
    }
    rev.reverse();
    Some(rev)
}

/// Minimum-weight simple path for one commodity under the given edge
/// weights, restricted to well-capacitated edges when a floor is given.
pub fn shortest_path(
    inst: &Instance,
    commodity: usize,
    weights: &[f64],
    filter: Option<CapacityFloor>,
) -> Option<Path> {
    let com = &inst.commodities[commodity];
    let out_edges = inst.network.out_edges();
    let edge_ends: Vec<(usize, usize)> =
        inst.network.edges.iter().map(|e| (e.src, e.dst)).collect();
    let (_, pred) = shortest_tree(
        inst.network.node_count,
        &out_edges,
        &edge_ends,
        com.source,
        weights,
        filter,
    );
    extract_path(&pred, &edge_ends, com.source, com.target).map(|edges| Path { commodity, edges })
}

/// Minimum over the path's edges of capacity minus current load.
/// `None` for the dummy path, whose edge list is empty.
pub fn remaining_capacity(p: &Path, capacity: &[f64], load: &[f64]) -> Option<f64> {
    p.edges
        .iter()
        .map(|&e| capacity[e] - load[e])
        .fold(None, |acc, r| {
            Some(match acc {
                None => r,
                Some(a) => a.min(r),
            })
        })
}
