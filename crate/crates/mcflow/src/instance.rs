//! Network/commodity data model, instance file I/O and the random
//! instance generator used by the benchmarks.
//!
//! An instance is a directed graph with per-edge capacities and weights
//! plus an ordered list of commodities `(source, target, demand)`. Edge
//! and commodity order is canonical: it defines the indices used by the
//! solver everywhere downstream.
//!
//! The text format is line oriented:
//!
//! ```text
//! c optional comment
//! p mcf <node_count> <edge_count> <commodity_count>
//! a <src> <dst> <capacity> <weight>
//! d <src> <dst> <demand>
//! ```
//!
//! with exactly one `p` header before any `a`/`d` line. Node ids are
//! 1-based. Parallel edges are permitted, self-loops are not.

use std::fmt;
use std::io::{self, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A directed edge with capacity and weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Source node id in `[1, node_count]`.
    pub src: usize,
    /// Target node id in `[1, node_count]`.
    pub dst: usize,
    pub capacity: f64,
    pub weight: f64,
}

/// A capacitated and weighted directed graph. Node ids are 1-based;
/// the edge list order is canonical and defines edge indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub node_count: usize,
    pub edges: Vec<Edge>,
}

impl Network {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Adjacency lists: for each node, the indices of its outgoing edges.
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count + 1];
        for (idx, e) in self.edges.iter().enumerate() {
            adj[e.src].push(idx);
        }
        adj
    }
}

/// A demand `(source, target, demand)` whose flow may split across paths.
#[derive(Debug, Clone, PartialEq)]
pub struct Commodity {
    pub source: usize,
    pub target: usize,
    pub demand: f64,
}

/// A network together with an ordered list of commodities.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub network: Network,
    pub commodities: Vec<Commodity>,
}

/// A simple path for one commodity, stored as the list of edge indices
/// along the walk. An empty edge list denotes the commodity's dummy
/// path (the artificial path of weight `W` absorbing undelivered demand).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    /// 0-based commodity index.
    pub commodity: usize,
    pub edges: Vec<usize>,
}

impl Path {
    pub fn dummy(commodity: usize) -> Self {
        Path {
            commodity,
            edges: Vec::new(),
        }
    }

    pub fn is_dummy(&self) -> bool {
        self.edges.is_empty()
    }

    /// Path weight under an arbitrary per-edge weight vector. The dummy
    /// path has no edges; its weight is the big-W constant and must be
    /// handled by the caller.
    pub fn weight(&self, weights: &[f64]) -> f64 {
        self.edges.iter().map(|&e| weights[e]).sum()
    }

    /// Checks that the edge list is a contiguous walk from the
    /// commodity's source to its target with no repeated node.
    pub fn is_simple_walk(&self, inst: &Instance) -> bool {
        if self.is_dummy() {
            return true;
        }
        let com = &inst.commodities[self.commodity];
        let edges = &inst.network.edges;
        let mut seen = vec![com.source];
        let mut at = com.source;
        for &ei in &self.edges {
            let e = match edges.get(ei) {
                Some(e) => e,
                None => return false,
            };
            if e.src != at || seen.contains(&e.dst) {
                return false;
            }
            at = e.dst;
            seen.push(at);
        }
        at == com.target
    }
}

impl Instance {
    pub fn commodity_count(&self) -> usize {
        self.commodities.len()
    }

    /// Sum of all edge weights: the paper's example choice for the
    /// penalty constant `W`. Since a simple path repeats no edge, this
    /// bounds every simple-path weight from above when all weights are
    /// nonnegative.
    pub fn weight_sum(&self) -> f64 {
        self.network.edges.iter().map(|e| e.weight).sum()
    }

    /// The dummy-path weight actually used by the solver and the oracle:
    /// `weight_sum`, bumped by 1 when any edge weight is zero so that
    /// `W > ω_p` stays strict for every simple path.
    pub fn dummy_weight(&self) -> f64 {
        let s = self.weight_sum();
        if self.network.edges.iter().any(|e| e.weight == 0.0) {
            s + 1.0
        } else {
            s
        }
    }

    pub fn total_demand(&self) -> f64 {
        self.commodities.iter().map(|c| c.demand).sum()
    }
}

/// Error raised by [`parse_instance`], carrying the 1-based line number.
#[derive(Debug, Clone, PartialEq)]
pub enum ParseError {
    MissingHeader,
    DuplicateHeader { line: usize },
    Malformed { line: usize, what: String },
    NodeOutOfRange { line: usize, node: usize },
    SelfLoop { line: usize, node: usize },
    NegativeValue { line: usize, what: String },
    CountMismatch { what: String, declared: usize, found: usize },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::MissingHeader => write!(f, "missing `p mcf` header line"),
            ParseError::DuplicateHeader { line } => {
                write!(f, "line {line}: duplicate `p` header")
            }
            ParseError::Malformed { line, what } => write!(f, "line {line}: {what}"),
            ParseError::NodeOutOfRange { line, node } => {
                write!(f, "line {line}: node id {node} out of range")
            }
            ParseError::SelfLoop { line, node } => {
                write!(f, "line {line}: self-loop at node {node}")
            }
            ParseError::NegativeValue { line, what } => {
                write!(f, "line {line}: negative {what}")
            }
            ParseError::CountMismatch {
                what,
                declared,
                found,
            } => write!(
                f,
                "{what} count mismatch: header declares {declared}, file has {found}"
            ),
        }
    }
}

impl std::error::Error for ParseError {}

fn parse_num(tok: &str, line: usize, what: &str) -> Result<f64, ParseError> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ParseError::Malformed {
            line,
            what: format!("cannot parse {what} `{tok}`"),
        })
}

fn parse_node(tok: &str, line: usize, node_count: usize) -> Result<usize, ParseError> {
    let id: usize = tok.parse().map_err(|_| ParseError::Malformed {
        line,
        what: format!("cannot parse node id `{tok}`"),
    })?;
    if id < 1 || id > node_count {
        return Err(ParseError::NodeOutOfRange { line, node: id });
    }
    Ok(id)
}

/// Parses the text instance format. Edges and commodities keep file order.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    let mut commodities = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let mut toks = raw.split_whitespace();
        let tag = match toks.next() {
            None => continue,
            Some("c") => continue,
            Some(t) => t,
        };
        match tag {
            "p" => {
                if header.is_some() {
                    return Err(ParseError::DuplicateHeader { line });
                }
                let kind = toks.next().unwrap_or("");
                if kind != "mcf" {
                    return Err(ParseError::Malformed {
                        line,
                        what: format!("expected `p mcf`, got `p {kind}`"),
                    });
                }
                let mut next_count = |what: &str| -> Result<usize, ParseError> {
                    toks.next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| ParseError::Malformed {
                            line,
                            what: format!("bad {what} in header"),
                        })
                };
                let n = next_count("node count")?;
                let m = next_count("edge count")?;
                let l = next_count("commodity count")?;
                header = Some((n, m, l));
            }
            "a" | "d" => {
                let (node_count, ..) = header.ok_or(ParseError::MissingHeader)?;
                let src = parse_node(toks.next().unwrap_or(""), line, node_count)?;
                let dst = parse_node(toks.next().unwrap_or(""), line, node_count)?;
                if tag == "a" {
                    if src == dst {
                        return Err(ParseError::SelfLoop { line, node: src });
                    }
                    let capacity = parse_num(toks.next().unwrap_or(""), line, "capacity")?;
                    let weight = parse_num(toks.next().unwrap_or(""), line, "weight")?;
                    if capacity < 0.0 {
                        return Err(ParseError::NegativeValue {
                            line,
                            what: "capacity".into(),
                        });
                    }
                    if weight < 0.0 {
                        return Err(ParseError::NegativeValue {
                            line,
                            what: "weight".into(),
                        });
                    }
                    edges.push(Edge {
                        src,
                        dst,
                        capacity,
                        weight,
                    });
                } else {
                    let demand = parse_num(toks.next().unwrap_or(""), line, "demand")?;
                    if demand <= 0.0 {
                        return Err(ParseError::NegativeValue {
                            line,
                            what: "or zero demand".into(),
                        });
                    }
                    commodities.push(Commodity {
                        source: src,
                        target: dst,
                        demand,
                    });
                }
            }
            other => {
                return Err(ParseError::Malformed {
                    line,
                    what: format!("unknown line tag `{other}`"),
                });
            }
        }
    }

    let (node_count, edge_count, commodity_count) = header.ok_or(ParseError::MissingHeader)?;
    if edges.len() != edge_count {
        return Err(ParseError::CountMismatch {
            what: "edge".into(),
            declared: edge_count,
            found: edges.len(),
        });
    }
    if commodities.len() != commodity_count {
        return Err(ParseError::CountMismatch {
            what: "commodity".into(),
            declared: commodity_count,
            found: commodities.len(),
        });
    }
    Ok(Instance {
        network: Network { node_count, edges },
        commodities,
    })
}

/// Writes the canonical text form. `parse_instance(write_instance(x)) == x`.
pub fn write_instance<W: Write>(inst: &Instance, mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "p mcf {} {} {}",
        inst.network.node_count,
        inst.network.edge_count(),
        inst.commodity_count()
    )?;
    for e in &inst.network.edges {
        writeln!(out, "a {} {} {} {}", e.src, e.dst, e.capacity, e.weight)?;
    }
    for c in &inst.commodities {
        writeln!(out, "d {} {} {}", c.source, c.target, c.demand)?;
    }
    Ok(())
}

/// Convenience wrapper collecting [`write_instance`] into a string.
pub fn instance_to_string(inst: &Instance) -> String {
    let mut buf = Vec::new();
    write_instance(inst, &mut buf).expect("write to Vec cannot fail");
    String::from_utf8(buf).expect("instance text is ASCII")
}

/// Number of commodities produced by [`generate_random`].
pub const RANDOM_COMMODITIES: usize = 1000;

/// Error for a generator request with fewer than two nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TooFewNodes(pub usize);

impl fmt::Display for TooFewNodes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "generator needs at least 2 nodes, got {}", self.0)
    }
}

impl std::error::Error for TooFewNodes {}

/// The random instance family `R(n)`: `5n` edges with uniform endpoints
/// (self-loops resampled, parallel edges kept), capacities in `1..=300`,
/// weights in `1..=10`, and 1000 commodities with distinct endpoints and
/// demands in `1..=100`. Deterministic for a fixed seed.
pub fn generate_random(n: usize, seed: u64) -> Result<Instance, TooFewNodes> {
    if n < 2 {
        return Err(TooFewNodes(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(5 * n);
    for _ in 0..5 * n {
        let (src, dst) = loop {
            let u = rng.gen_range(1..=n);
            let v = rng.gen_range(1..=n);
            if u != v {
                break (u, v);
            }
        };
        let capacity = rng.gen_range(1..=300) as f64;
        let weight = rng.gen_range(1..=10) as f64;
        edges.push(Edge {
            src,
            dst,
            capacity,
            weight,
        });
    }
    let mut commodities = Vec::with_capacity(RANDOM_COMMODITIES);
    for _ in 0..RANDOM_COMMODITIES {
        let (source, target) = loop {
            let s = rng.gen_range(1..=n);
            let t = rng.gen_range(1..=n);
            if s != t {
                break (s, t);
            }
        };
        let demand = rng.gen_range(1..=100) as f64;
        commodities.push(Commodity {
            source,
            target,
            demand,
        });
    }
    Ok(Instance {
        network: Network {
            node_count: n,
            edges,
        },
        commodities,
    })
}
