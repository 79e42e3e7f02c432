//! Small instances shared by unit tests, integration tests and examples.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::instance::{Commodity, Edge, Instance, Network};

/// A 10-node network of two directed rails `1-3-5-7-9` and `2-4-6-8-10`
/// with five cross links, 13 edges in total, and two commodities
/// `(1,9,10)` and `(2,10,11)`. Edge weights sum to 34. The capacity
/// vector in edge order is `[10,10,10,10,10,15,8,10,10,7,10,5,10]`, so
/// the rail to node 10 bottlenecks at 8 and the second demand cannot be
/// delivered in one piece.
pub fn two_rail_example() -> Instance {
    let caps = [
        10.0, 10.0, 10.0, 10.0, 10.0, 15.0, 8.0, 10.0, 10.0, 7.0, 10.0, 5.0, 10.0,
    ];
    let weights = [
        2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 4.0, 4.0, 4.0, 3.0, 3.0,
    ];
    let ends = [
        (1, 3),
        (3, 5),
        (5, 7),
        (7, 9),
        (2, 4),
        (4, 6),
        (6, 8),
        (8, 10),
        (3, 4),
        (5, 4),
        (6, 5),
        (6, 7),
        (8, 9),
    ];
    let edges = ends
        .iter()
        .zip(caps.iter().zip(weights.iter()))
        .map(|(&(src, dst), (&capacity, &weight))| Edge {
            src,
            dst,
            capacity,
            weight,
        })
        .collect();
    Instance {
        network: Network {
            node_count: 10,
            edges,
        },
        commodities: vec![
            Commodity {
                source: 1,
                target: 9,
                demand: 10.0,
            },
            Commodity {
                source: 2,
                target: 10,
                demand: 11.0,
            },
        ],
    }
}

/// Deterministic small random instance with `m` edges and `l` commodities,
/// using the same value ranges as the benchmark generator. Used heavily by
/// the oracle-equivalence and backend-lockstep tests.
pub fn random_small(n: usize, m: usize, l: usize, seed: u64) -> Instance {
    random_with_capacity(n, m, l, seed, 300)
}

/// Like [`random_small`] but with capacities drawn from `1..=max_capacity`.
/// Small capacities against demands up to 100 force heavy saturation and
/// long pivot sequences.
pub fn random_with_capacity(
    n: usize,
    m: usize,
    l: usize,
    seed: u64,
    max_capacity: u64,
) -> Instance {
    assert!(n >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (src, dst) = loop {
            let u = rng.gen_range(1..=n);
            let v = rng.gen_range(1..=n);
            if u != v {
                break (u, v);
            }
        };
        edges.push(Edge {
            src,
            dst,
            capacity: rng.gen_range(1..=max_capacity) as f64,
            weight: rng.gen_range(1..=10) as f64,
        });
    }
    let mut commodities = Vec::with_capacity(l);
    for _ in 0..l {
        let (source, target) = loop {
            let s = rng.gen_range(1..=n);
            let t = rng.gen_range(1..=n);
            if s != t {
                break (s, t);
            }
        };
        commodities.push(Commodity {
            source,
            target,
            demand: rng.gen_range(1..=100) as f64,
        });
    }
    Instance {
        network: Network {
            node_count: n,
            edges,
        },
        commodities,
    }
}
