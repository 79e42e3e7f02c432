//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured quantities (run with `--nocapture` to see them).
//!
//! The two R(300) benchmark criteria live at the bottom; they take
//! minutes, not seconds. Everything here runs with per-iteration
//! invariant checking enabled.

use mcflow::colgen::{run, BackendKind, Entering, RunOptions};
use mcflow::fixtures::{random_small, random_with_capacity};
use mcflow::instance::generate_random;
use mcflow::oracle::{oracle_objective, OracleError};
use mcflow::spla::{
    compute_projection, loc_solve, lu_solve_dense, Cover, DimChange, IncContext,
    ProjectionSource, SolveError, SparseMat,
};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn opts(backend: BackendKind) -> RunOptions {
    RunOptions {
        backend,
        ..RunOptions::default()
    }
}

const BACKENDS: [BackendKind; 3] = [BackendKind::Dense, BackendKind::Loc, BackendKind::Inc];

/// Criterion 1: on ≥100 small random instances, every backend's
/// objective equals the enumeration oracle's within 1e-6.
#[test]
fn acceptance_1_oracle_equivalence() {
    let mut checked = 0;
    let mut skipped = 0;
    let mut idx = 0u64;
    let mut worst_gap: f64 = 0.0;
    while checked < 100 {
        let n = 5 + (idx as usize % 26); // 5..=30
        let m = (5 * n).min(60);
        let l = 1 + (idx as usize % 5); // 1..=5
        let inst = random_small(n, m, l, 1000 + idx);
        idx += 1;
        let oracle = match oracle_objective(&inst) {
            Ok(v) => v,
            Err(OracleError::PathCapExceeded { .. }) => {
                skipped += 1;
                assert!(skipped < 50, "too many instances exceed the oracle cap");
                continue;
            }
            Err(e) => panic!("oracle failed: {e}"),
        };
        for backend in BACKENDS {
            let sol = run(&inst, &opts(backend)).unwrap_or_else(|e| {
                panic!("{} failed on instance {idx}: {e}", backend.name())
            });
            assert!(sol.optimal);
            let gap = (sol.objective - oracle).abs();
            worst_gap = worst_gap.max(gap);
            assert!(
                gap <= 1e-6,
                "instance {idx} backend {}: objective {} vs oracle {} (gap {gap:e})",
                backend.name(),
                sol.objective,
                oracle
            );
        }
        checked += 1;
    }
    println!(
        "ACCEPTANCE 1 (oracle equivalence): PASS — {checked} instances × 3 backends, worst gap {worst_gap:.2e}, {skipped} skipped over the path cap"
    );
}

/// Criterion 2: dense/loc/inc produce identical pivot sequences and
/// per-iteration x, λ, μ within 1e-6 elementwise.
#[test]
fn acceptance_2_backend_lockstep() {
    let mut compared_iters = 0usize;
    for idx in 0..20u64 {
        let n = 10 + (idx as usize * 2) % 41; // 10..=50
        let m = 5 * n;
        let l = 10 + (idx as usize % 31);
        // tight capacities force long, degenerate pivot sequences
        let inst = random_with_capacity(n, m, l, 2000 + idx, 40);
        let mut runs = Vec::new();
        for backend in BACKENDS {
            let mut o = opts(backend);
            o.trace = true;
            let sol = run(&inst, &o)
                .unwrap_or_else(|e| panic!("{} failed on {idx}: {e}", backend.name()));
            runs.push(sol);
        }
        let (a, b, c) = (&runs[0], &runs[1], &runs[2]);
        for other in [b, c] {
            assert_eq!(
                a.trace.len(),
                other.trace.len(),
                "instance {idx}: iteration counts diverge"
            );
            for (k, (ta, to)) in a.trace.iter().zip(&other.trace).enumerate() {
                let same_enter = match (&ta.entering, &to.entering) {
                    (Entering::Link(x), Entering::Link(y)) => x == y,
                    (Entering::Path(x), Entering::Path(y)) => x == y,
                    _ => false,
                };
                assert!(same_enter, "instance {idx} iter {k}: entering diverges");
                assert_eq!(ta.leaving, to.leaving, "instance {idx} iter {k}: leaving");
                for (name, va, vo) in [
                    ("x", &ta.x, &to.x),
                    ("lambda", &ta.lambda, &to.lambda),
                    ("mu", &ta.mu, &to.mu),
                ] {
                    assert_eq!(va.len(), vo.len());
                    for (p, q) in va.iter().zip(vo) {
                        assert!(
                            (p - q).abs() <= 1e-6,
                            "instance {idx} iter {k}: {name} differs by {:e}",
                            (p - q).abs()
                        );
                    }
                }
            }
        }
        compared_iters += a.trace.len();
    }
    println!(
        "ACCEPTANCE 2 (backend lockstep): PASS — 20 instances, {compared_iters} pivots compared across 3 backends"
    );
}

/// Criterion 3: the per-iteration invariant suite (balance, cardinality,
/// nonnegativity, saturation equality, basis residuals, reduced-matrix
/// solvability) holds on every run. The checks run inside the engine
/// (`check_invariants`, on by default); any breach turns into an error.
#[test]
fn acceptance_3_invariant_suite() {
    let mut pivots = 0usize;
    let mut runs = 0usize;
    for idx in 0..30u64 {
        let n = 6 + (idx as usize % 30);
        let m = (5 * n).min(120);
        let l = 4 + (idx as usize % 20);
        let cap = if idx % 2 == 0 { 30 } else { 300 };
        let inst = random_with_capacity(n, m, l, 3000 + idx, cap);
        for backend in BACKENDS {
            let mut o = opts(backend);
            assert!(o.check_invariants, "checks must be on by default");
            let sol = run(&inst, &o)
                .unwrap_or_else(|e| panic!("invariant breach ({}, {idx}): {e}", backend.name()));
            pivots += sol.iterations;
            runs += 1;
        }
    }
    assert!(pivots > 1000, "suite must exercise a substantial pivot count");
    println!(
        "ACCEPTANCE 3 (invariant suite): PASS — {runs} runs, {pivots} pivots, every iteration checked"
    );
}

fn random_sparse_nonsingular(n: usize, rng: &mut ChaCha8Rng) -> SparseMat {
    // nonzero diagonal plus up to 4n off-diagonal entries: density ≤ 5/n
    let mut entries: Vec<(usize, usize, f64)> = (0..n)
        .map(|i| (i, i, 1.5 + rng.gen_range(0.0..2.0)))
        .collect();
    let extra = rng.gen_range(0..=4 * n);
    for _ in 0..extra {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i != j {
            entries.push((i, j, rng.gen_range(-1.0..1.0)));
        }
    }
    SparseMat::from_triplets(n, n, &entries).unwrap()
}

/// Criterion 4: the localized solver agrees with dense LU on ≥1000
/// random sparse nonsingular systems; projections are square and factor;
/// NoSolution comes exactly from the unreachable-support condition.
#[test]
fn acceptance_4_loc_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut solved = 0;
    let mut no_solution_cases = 0;
    let mut max_dev: f64 = 0.0;
    for t in 0..1150usize {
        let n = 5 + (t * 7) % 196; // 5..=200
        let a = random_sparse_nonsingular(n, &mut rng);
        let mut b = vec![0.0; n];
        for _ in 0..rng.gen_range(1..=3) {
            b[rng.gen_range(0..n)] = rng.gen_range(0.5..2.0) * if rng.gen() { 1.0 } else { -1.0 };
        }

        if t % 25 == 0 {
            // zero out one supported row: the system must be reported
            // infeasible through the reach condition
            let h = b.iter().position(|&v| v != 0.0).unwrap();
            let mut entries = Vec::new();
            for j in 0..n {
                for &(i, v) in a.col(j) {
                    if i != h {
                        entries.push((i, j, v));
                    }
                }
            }
            let broken = SparseMat::from_triplets(n, n, &entries).unwrap();
            assert_eq!(
                loc_solve(&broken, &b, ProjectionSource::Reach),
                Err(SolveError::NoSolution)
            );
            no_solution_cases += 1;
            continue;
        }
        if t % 25 == 1 && n > 4 {
            // an all-zero row and column outside the support must not
            // trigger NoSolution: the reach never touches it
            let mut entries = Vec::new();
            for j in 0..n {
                for &(i, v) in a.col(j) {
                    if i != n - 1 && j != n - 1 {
                        entries.push((i, j, v));
                    }
                }
            }
            let isolated = SparseMat::from_triplets(n, n, &entries).unwrap();
            let mut b2 = b.clone();
            b2[n - 1] = 0.0;
            if b2.iter().all(|&v| v == 0.0) {
                continue;
            }
            let res = loc_solve(&isolated, &b2, ProjectionSource::Reach);
            assert_ne!(res, Err(SolveError::NoSolution), "support is reachable");
            continue;
        }

        let dense = match lu_solve_dense(&a, &b) {
            Ok(x) => x,
            Err(_) => continue, // singular draw; not a test subject
        };
        let proj = compute_projection(&a, &b, ProjectionSource::Reach);
        assert_eq!(
            proj.rows.len(),
            proj.cols.len(),
            "projection of a nonsingular matrix must be square (t={t}, n={n})"
        );
        let x = loc_solve(&a, &b, ProjectionSource::Reach)
            .unwrap_or_else(|e| panic!("loc_solve failed on nonsingular case t={t}: {e}"));
        for (u, v) in x.iter().zip(&dense) {
            let dev = (u - v).abs();
            max_dev = max_dev.max(dev);
            assert!(dev <= 1e-7, "t={t} n={n}: loc vs dense deviation {dev:e}");
        }
        solved += 1;
    }
    assert!(solved >= 1000, "solved {solved}");
    println!(
        "ACCEPTANCE 4 (locSolver): PASS — {solved} nonsingular systems (max deviation {max_dev:.2e}), {no_solution_cases} constructed infeasible cases detected"
    );
}

/// Criterion 5: incremental solves over perturbation chains equal the
/// from-scratch localized solve at every step, and the maintained cover
/// stays a valid over-disjoint cover.
#[test]
fn acceptance_5_inc_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut steps_checked = 0usize;
    let mut fallbacks = 0usize;
    for chain in 0..120usize {
        let n = 10 + (chain * 3) % 90;
        let mut a = random_sparse_nonsingular(n, &mut rng);
        let mut b: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut ctx = IncContext::new();
        for _step in 0..10 {
            // perturb up to 5 entries off the diagonal, and the rhs a bit
            let mut entries: Vec<(usize, usize, f64)> = Vec::new();
            for j in 0..n {
                for &(i, v) in a.col(j) {
                    entries.push((i, j, v));
                }
            }
            for _ in 0..rng.gen_range(1..=5) {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                if i == j {
                    continue;
                }
                match rng.gen_range(0..3) {
                    0 => entries.push((i, j, rng.gen_range(-0.8..0.8))), // add/merge
                    1 => {
                        // flip an existing entry's value
                        if let Some(e) = entries.iter_mut().find(|e| e.0 == i && e.1 == j) {
                            e.2 = rng.gen_range(-0.8..0.8);
                        }
                    }
                    _ => {
                        // remove an off-diagonal entry outright
                        entries.retain(|e| !(e.0 == i && e.1 == j));
                    }
                }
            }
            let next = SparseMat::from_triplets(n, n, &entries).unwrap();
            for _ in 0..rng.gen_range(0..=2) {
                let i = rng.gen_range(0..n);
                b[i] += rng.gen_range(-0.5..0.5);
            }
            let scratch = match loc_solve(&next, &b, ProjectionSource::Reach) {
                Ok(x) => x,
                Err(_) => continue, // perturbation went singular; skip step
            };
            let before_fallbacks = ctx.fallbacks;
            let inc = ctx
                .solve(&next, &b, DimChange::Same)
                .unwrap_or_else(|e| panic!("inc solve failed (chain {chain}): {e}"));
            fallbacks += ctx.fallbacks - before_fallbacks;
            for (u, v) in inc.iter().zip(&scratch) {
                assert!(
                    (u - v).abs() <= 1e-7,
                    "chain {chain}: inc vs scratch deviation {:e}",
                    (u - v).abs()
                );
            }
            assert!(
                ctx.cover().is_valid_for(&next),
                "cover invalid after update (chain {chain})"
            );
            a = next;
            steps_checked += 1;
        }
    }
    assert!(steps_checked >= 1000, "checked {steps_checked} steps");
    println!(
        "ACCEPTANCE 5 (incSolver): PASS — {steps_checked} perturbation steps verified against scratch solves ({fallbacks} residual fallbacks), cover valid throughout"
    );
}

/// Criterion 6: on R(300) the reduced matrix stays sparse — the mean of
/// nnz/dim over iterations with dim ≥ 50 is below 8.
#[test]
#[ignore = "multi-minute benchmark; run explicitly or via the full acceptance pass"]
fn acceptance_6_sparsity_r300() {
    let inst = generate_random(300, 1).unwrap();
    let sol = run(&inst, &opts(BackendKind::Inc)).expect("R(300) must solve to optimality");
    assert!(sol.optimal);
    let ratios: Vec<f64> = sol
        .stats
        .iter()
        .filter(|r| r.dim_m >= 50)
        .map(|r| r.nnz_m as f64 / r.dim_m as f64)
        .collect();
    assert!(!ratios.is_empty());
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!(mean < 8.0, "mean nnz/dim = {mean}");
    println!(
        "ACCEPTANCE 6 (sparsity on R(300)): PASS — {} iterations, mean nnz/dim {:.3} over {} iterations with dim ≥ 50, total {:.1}s",
        sol.iterations,
        mean,
        ratios.len(),
        sol.timings.total.as_secs_f64()
    );
}

/// Criterion 7: on R(300) the incremental backend spends at most half
/// the dense backend's linear-solve time (observational smoke test).
#[test]
#[ignore = "multi-minute benchmark; run explicitly or via the full acceptance pass"]
fn acceptance_7_relative_performance_r300() {
    let inst = generate_random(300, 1).unwrap();
    let dense = run(&inst, &opts(BackendKind::Dense)).expect("dense run");
    let inc = run(&inst, &opts(BackendKind::Inc)).expect("inc run");
    assert!(
        (dense.objective - inc.objective).abs() <= 1e-6 * (1.0 + dense.objective.abs()),
        "backends disagree on the objective"
    );
    let td = dense.timings.lin_solve.as_secs_f64();
    let ti = inc.timings.lin_solve.as_secs_f64();
    let ratio = ti / td;
    assert!(
        ratio <= 0.5,
        "inc linear-solve time {ti:.2}s vs dense {td:.2}s (ratio {ratio:.3})"
    );
    println!(
        "ACCEPTANCE 7 (relative performance on R(300)): PASS — linear-solve inc {ti:.2}s vs dense {td:.2}s, ratio {ratio:.3} ≤ 0.5"
    );
}
