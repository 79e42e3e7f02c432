// scratch probe: run a capped solve and dump incremental diagnostics
use mcflow::colgen::{run, BackendKind, EngineError, RunOptions};
use mcflow::instance::generate_random;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    let cap: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(8000);
    let backend = match std::env::args().nth(3).as_deref() {
        Some("dense") => BackendKind::Dense,
        Some("loc") => BackendKind::Loc,
        _ => BackendKind::Inc,
    };
    let inst = generate_random(n, 1).unwrap();
    let opts = RunOptions {
        backend,
        max_iters: cap,
        ..RunOptions::default()
    };
    let sol = match run(&inst, &opts) {
        Ok(s) => s,
        Err(EngineError::IterationCap(s)) => *s,
        Err(e) => panic!("{e}"),
    };
    let (solves, supp, proj, rebuilds, fallbacks) = sol.inc_diag;
    println!(
        "iters {} lin {:.2}s sp {:.2}s total {:.2}s",
        sol.iterations,
        sol.timings.lin_solve.as_secs_f64(),
        sol.timings.shortest_path.as_secs_f64(),
        sol.timings.total.as_secs_f64()
    );
    if solves > 0 {
        println!(
            "delta solves {solves}, mean supp {:.1}, mean proj rows {:.1}, rebuilds {rebuilds}, fallbacks {fallbacks}",
            supp as f64 / solves as f64,
            proj as f64 / solves as f64
        );
    }
    let last = sol.stats.last().unwrap();
    println!("final dim {} nnz {}", last.dim_m, last.nnz_m);
}
