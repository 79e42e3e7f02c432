//! Basis bookkeeping for the column-generation engine: the transition
//! system state, basic vectors, and the rules applied after each pivot.
//!
//! A state holds, per commodity, a *primary* path (possibly the dummy)
//! plus the *secondary* basic paths, and the ordered list of saturated
//! edges. Secondary paths are stored aligned with the saturated edges:
//! `assoc[j]` is the basic path associated with `sat[j]`, which is also
//! the `j`-th column of the reduced matrix. The transition rules keep
//! indices stable: a link swap reuses the leaving link's position, a new
//! saturated link is appended, and a removal shifts only the tail.

use std::collections::HashSet;
use std::fmt;

use crate::instance::{Instance, Path};
use crate::spla::DimChange;

/// Transition-system state after iteration `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisState {
    /// Primary path per commodity, dummy when no real path carries flow.
    pub primary: Vec<Path>,
    /// Saturated edges in matrix-index order.
    pub sat: Vec<usize>,
    /// Secondary path associated with each saturated edge, same order.
    pub assoc: Vec<Path>,
}

/// Row/column bookkeeping derived from a state: where each edge sits.
#[derive(Debug, Clone)]
pub struct Layout {
    pub commodity_count: usize,
    pub edge_count: usize,
    /// Unsaturated edges in ascending edge order.
    pub nonsat: Vec<usize>,
    /// For each edge: `(true, k)` if it is `sat[k]`, else `(false, k)`
    /// with `k` its position in `nonsat`.
    pub edge_pos: Vec<(bool, usize)>,
}

impl BasisState {
    /// Initial state: given primaries, no secondary paths, no saturated
    /// edges.
    pub fn initial(primary: Vec<Path>) -> BasisState {
        BasisState {
            primary,
            sat: Vec::new(),
            assoc: Vec::new(),
        }
    }

    pub fn sat_count(&self) -> usize {
        self.sat.len()
    }

    pub fn layout(&self, inst: &Instance) -> Layout {
        let edge_count = inst.network.edge_count();
        let mut edge_pos = vec![(false, usize::MAX); edge_count];
        for (k, &e) in self.sat.iter().enumerate() {
            edge_pos[e] = (true, k);
        }
        let mut nonsat = Vec::with_capacity(edge_count - self.sat.len());
        for e in 0..edge_count {
            if !edge_pos[e].0 {
                edge_pos[e] = (false, nonsat.len());
                nonsat.push(e);
            }
        }
        Layout {
            commodity_count: inst.commodity_count(),
            edge_count,
            nonsat,
            edge_pos,
        }
    }

    /// The Lemma-2 style structural invariants: secondary count matches
    /// the saturated count by construction, so the substantive checks are
    /// that basic columns are pairwise distinct, secondaries are real
    /// paths, and saturated edges are unique.
    pub fn check_structure(&self) -> Result<(), String> {
        let mut seen_edges = HashSet::new();
        for &e in &self.sat {
            if !seen_edges.insert(e) {
                return Err(format!("edge {e} appears twice in the saturated set"));
            }
        }
        let mut cols: HashSet<(usize, &[usize])> = HashSet::new();
        for p in self.primary.iter().chain(self.assoc.iter()) {
            if !cols.insert((p.commodity, &p.edges)) {
                return Err(format!(
                    "duplicate basic column for commodity {}",
                    p.commodity + 1
                ));
            }
        }
        for p in &self.assoc {
            if p.is_dummy() {
                return Err(format!(
                    "dummy path of commodity {} held as secondary",
                    p.commodity + 1
                ));
            }
        }
        Ok(())
    }
}

impl Layout {
    pub fn basis_size(&self) -> usize {
        self.commodity_count + self.edge_count
    }

    /// Block-layout row index of an edge's capacity constraint.
    pub fn edge_row(&self, e: usize, sat_count: usize) -> usize {
        let (is_sat, k) = self.edge_pos[e];
        if is_sat {
            self.commodity_count + k
        } else {
            self.commodity_count + sat_count + k
        }
    }
}

/// Entity whose basic vector is requested.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisEntity {
    Edge(usize),
    Path(Path),
}

/// Positions of the ones in an entity's basic vector, in the raw layout
/// where component `i < l` is commodity `i` and component `l + e` is
/// edge `e`.
pub fn basic_vector(entity: &BasisEntity, commodity_count: usize) -> Vec<usize> {
    match entity {
        BasisEntity::Edge(e) => vec![commodity_count + e],
        BasisEntity::Path(p) => {
            let mut ones = Vec::with_capacity(p.edges.len() + 1);
            ones.push(p.commodity);
            let mut edge_ones: Vec<usize> =
                p.edges.iter().map(|&e| commodity_count + e).collect();
            edge_ones.sort_unstable();
            ones.extend(edge_ones);
            ones
        }
    }
}

/// Entering variable chosen by pricing.
#[derive(Debug, Clone, PartialEq)]
pub enum Entering {
    /// The slack of a saturated link enters.
    Link(usize),
    /// A priced path enters.
    Path(Path),
}

/// Leaving variable located by the ratio test, by block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leaving {
    /// Primary path of this commodity.
    Primary(usize),
    /// Secondary at this saturated position.
    Secondary(usize),
    /// Slack at this position of the unsaturated list.
    Slack(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionError(pub String);

impl fmt::Display for TransitionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no transition rule applies: {}", self.0)
    }
}

impl std::error::Error for TransitionError {}

/// Applies the matching transition rule and reports how the reduced
/// matrix dimension moved. `layout` must describe the state before the
/// transition.
pub fn apply_transition(
    state: &mut BasisState,
    layout: &Layout,
    entering: &Entering,
    leaving: &Leaving,
) -> Result<DimChange, TransitionError> {
    // first secondary belonging to a commodity, for promotions
    let first_secondary = |state: &BasisState, i: usize| -> Option<usize> {
        state.assoc.iter().position(|p| p.commodity == i)
    };
    match (entering, leaving) {
        (Entering::Link(e_star), leaving) => {
            let pos = state
                .sat
                .iter()
                .position(|&e| e == *e_star)
                .ok_or_else(|| TransitionError(format!("entering link {e_star} not saturated")))?;
            match leaving {
                Leaving::Primary(i) => {
                    // promote a secondary of commodity i; prefer the one
                    // freed by the leaving link so no re-association is
                    // needed
                    let promoted = if state.assoc[pos].commodity == *i {
                        pos
                    } else {
                        first_secondary(state, *i).ok_or_else(|| {
                            TransitionError(format!(
                                "commodity {} has no secondary to promote",
                                i + 1
                            ))
                        })?
                    };
                    state.primary[*i] = state.assoc[promoted].clone();
                    if promoted != pos {
                        state.assoc[promoted] = state.assoc[pos].clone();
                    }
                    state.sat.remove(pos);
                    state.assoc.remove(pos);
                    Ok(DimChange::Shrank(pos))
                }
                Leaving::Secondary(j) => {
                    if *j != pos {
                        state.assoc[*j] = state.assoc[pos].clone();
                    }
                    state.sat.remove(pos);
                    state.assoc.remove(pos);
                    Ok(DimChange::Shrank(pos))
                }
                Leaving::Slack(nk) => {
                    // in-place swap keeps every other index stable
                    let e = layout.nonsat[*nk];
                    state.sat[pos] = e;
                    Ok(DimChange::Same)
                }
            }
        }
        (Entering::Path(p), leaving) => {
            let j = p.commodity;
            if p.is_dummy() && state.primary[j].is_dummy() {
                return Err(TransitionError(format!(
                    "dummy of commodity {} entered while already basic",
                    j + 1
                )));
            }
            match leaving {
                Leaving::Primary(i) if *i == j => {
                    state.primary[j] = p.clone();
                    Ok(DimChange::Same)
                }
                Leaving::Primary(i) => {
                    let promoted = first_secondary(state, *i).ok_or_else(|| {
                        TransitionError(format!(
                            "commodity {} has no secondary to promote",
                            i + 1
                        ))
                    })?;
                    state.primary[*i] = state.assoc[promoted].clone();
                    // an entering dummy takes the primary slot of its
                    // commodity; the displaced real primary fills the
                    // vacated basic slot instead
                    state.assoc[promoted] = if p.is_dummy() {
                        std::mem::replace(&mut state.primary[j], p.clone())
                    } else {
                        p.clone()
                    };
                    Ok(DimChange::Same)
                }
                Leaving::Secondary(j2) => {
                    state.assoc[*j2] = if p.is_dummy() {
                        std::mem::replace(&mut state.primary[j], p.clone())
                    } else {
                        p.clone()
                    };
                    Ok(DimChange::Same)
                }
                Leaving::Slack(nk) => {
                    let e = layout.nonsat[*nk];
                    state.sat.push(e);
                    let filler = if p.is_dummy() {
                        std::mem::replace(&mut state.primary[j], p.clone())
                    } else {
                        p.clone()
                    };
                    state.assoc.push(filler);
                    Ok(DimChange::Grew)
                }
            }
        }
    }
}
