//! Command-line front end: generate instances, solve them with a chosen
//! backend, and run backend-comparison benchmarks.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mcflow::colgen::{self, BackendKind, EngineError, RunOptions, Solution};
use mcflow::instance::{self, Instance};
use mcflow::oracle;

#[derive(Parser)]
#[command(name = "mcflow", version, about = "Multi-commodity flow solver")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random instance file
    Gen {
        /// Node count (edges are 5n, commodities 1000)
        #[arg(short)]
        n: usize,
        /// RNG seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve an instance and print a summary
    Solve {
        /// Instance file
        instance: PathBuf,
        /// Linear-solve backend
        #[arg(long, default_value = "inc", value_parser = parse_backend)]
        backend: BackendKind,
        /// Cross-check the objective against the enumeration oracle
        #[arg(long)]
        check: bool,
        /// Write the per-iteration stats CSV here
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Iteration cap
        #[arg(long, default_value_t = 10_000_000)]
        max_iters: usize,
        /// Reduced-cost tolerance override
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Solve instances under several backends and emit a timing table
    Bench {
        /// Instance files
        instances: Vec<PathBuf>,
        /// Comma-separated backends
        #[arg(long, default_value = "dense,loc,inc", value_delimiter = ',', value_parser = parse_backend)]
        backends: Vec<BackendKind>,
        /// Output CSV (stdout when omitted)
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Iteration cap applied to every run
        #[arg(long, default_value_t = 10_000_000)]
        max_iters: usize,
    },
}

fn parse_backend(s: &str) -> Result<BackendKind, String> {
    BackendKind::parse(s).ok_or_else(|| format!("unknown backend `{s}` (dense|loc|inc)"))
}

fn load_instance(path: &PathBuf) -> Result<Instance, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    instance::parse_instance(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Gen { n, seed, output } => cmd_gen(n, seed, &output),
        Cmd::Solve {
            instance,
            backend,
            check,
            stats,
            max_iters,
            tol,
        } => cmd_solve(&instance, backend, check, stats.as_ref(), max_iters, tol),
        Cmd::Bench {
            instances,
            backends,
            output,
            max_iters,
        } => cmd_bench(&instances, &backends, output.as_ref(), max_iters),
    }
    .unwrap_or_else(|msg| {
        eprintln!("error: {msg}");
        ExitCode::FAILURE
    })
}

fn cmd_gen(n: usize, seed: u64, output: &PathBuf) -> Result<ExitCode, String> {
    let inst = instance::generate_random(n, seed).map_err(|e| e.to_string())?;
    let file =
        fs::File::create(output).map_err(|e| format!("cannot write {}: {e}", output.display()))?;
    instance::write_instance(&inst, std::io::BufWriter::new(file)).map_err(|e| e.to_string())?;
    println!(
        "wrote {} ({} nodes, {} edges, {} commodities, seed {seed})",
        output.display(),
        inst.network.node_count,
        inst.network.edge_count(),
        inst.commodity_count()
    );
    Ok(ExitCode::SUCCESS)
}

fn print_summary(path: &PathBuf, backend: BackendKind, inst: &Instance, sol: &Solution) {
    println!("instance: {}", path.display());
    println!("backend: {}", backend.name());
    println!(
        "nodes: {} edges: {} commodities: {}",
        inst.network.node_count,
        inst.network.edge_count(),
        inst.commodity_count()
    );
    println!(
        "status: {}",
        if sol.optimal { "optimal" } else { "iteration-cap" }
    );
    println!("iterations: {}", sol.iterations);
    println!("objective: {:.6}", sol.objective);
    let total_delivered: f64 = sol.delivered.iter().sum();
    println!(
        "delivered: {:.6} of {:.6}",
        total_delivered,
        inst.total_demand()
    );
    for (i, (d, c)) in sol.delivered.iter().zip(&inst.commodities).enumerate() {
        println!("commodity {}: delivered {:.6} of {:.6}", i + 1, d, c.demand);
    }
    let rep = colgen::verify_feasibility(inst, sol);
    println!(
        "feasibility: max violation {:e} (capacity {:e}, balance {:e}, conservation {:e}, negativity {:e})",
        rep.max_violation(),
        rep.max_capacity_violation,
        rep.max_balance_violation,
        rep.max_conservation_violation,
        rep.max_negative_flow
    );
}

fn print_timings(sol: &Solution) {
    let t = sol.timings;
    println!(
        "timing: total {:.6}s shortest-path {:.6}s linear-solve {:.6}s rest {:.6}s",
        t.total.as_secs_f64(),
        t.shortest_path.as_secs_f64(),
        t.lin_solve.as_secs_f64(),
        t.rest().as_secs_f64()
    );
}

fn cmd_solve(
    path: &PathBuf,
    backend: BackendKind,
    check: bool,
    stats: Option<&PathBuf>,
    max_iters: usize,
    tol: Option<f64>,
) -> Result<ExitCode, String> {
    let inst = load_instance(path)?;
    let opts = RunOptions {
        backend,
        max_iters,
        opt_tol: tol.unwrap_or(mcflow::tol::EPS_OPT),
        ..RunOptions::default()
    };
    let (sol, solved) = match colgen::run(&inst, &opts) {
        Ok(sol) => (sol, true),
        Err(EngineError::IterationCap(sol)) => (*sol, false),
        Err(e) => return Err(e.to_string()),
    };
    print_summary(path, backend, &inst, &sol);
    if check {
        let oracle_obj = oracle::oracle_objective(&inst).map_err(|e| e.to_string())?;
        println!(
            "check: oracle {:.6} gap {:.6}",
            oracle_obj,
            (sol.objective - oracle_obj).abs()
        );
    }
    print_timings(&sol);
    if let Some(stats_path) = stats {
        let file = fs::File::create(stats_path)
            .map_err(|e| format!("cannot write {}: {e}", stats_path.display()))?;
        colgen::write_stats_csv(&sol.stats, std::io::BufWriter::new(file))
            .map_err(|e| e.to_string())?;
    }
    let feasible = colgen::verify_feasibility(&inst, &sol).ok(1e-6);
    if solved && feasible {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_bench(
    paths: &[PathBuf],
    backends: &[BackendKind],
    output: Option<&PathBuf>,
    max_iters: usize,
) -> Result<ExitCode, String> {
    if paths.is_empty() {
        return Err("bench needs at least one instance".into());
    }
    let mut rows = String::from(
        "instance,backend,status,objective,iterations,total_s,shortest_path_s,lin_solve_s,rest_s\n",
    );
    let mut mismatch = false;
    for path in paths {
        let inst = load_instance(path)?;
        let mut first_objective: Option<f64> = None;
        for &backend in backends {
            let opts = RunOptions {
                backend,
                max_iters,
                ..RunOptions::default()
            };
            let (sol, status) = match colgen::run(&inst, &opts) {
                Ok(sol) => (sol, "optimal"),
                Err(EngineError::IterationCap(sol)) => (*sol, "cap"),
                Err(e) => return Err(format!("{}: {e}", path.display())),
            };
            let t = sol.timings;
            rows.push_str(&format!(
                "{},{},{},{:.6},{},{:.6},{:.6},{:.6},{:.6}\n",
                path.display(),
                backend.name(),
                status,
                sol.objective,
                sol.iterations,
                t.total.as_secs_f64(),
                t.shortest_path.as_secs_f64(),
                t.lin_solve.as_secs_f64(),
                t.rest().as_secs_f64()
            ));
            match first_objective {
                None => first_objective = Some(sol.objective),
                Some(first) => {
                    if (sol.objective - first).abs() > 1e-6 * (1.0 + first.abs()) {
                        eprintln!(
                            "objective mismatch on {}: {} vs {} ({})",
                            path.display(),
                            first,
                            sol.objective,
                            backend.name()
                        );
                        mismatch = true;
                    }
                }
            }
        }
    }
    match output {
        Some(p) => fs::write(p, rows).map_err(|e| format!("cannot write {}: {e}", p.display()))?,
        None => {
            std::io::stdout()
                .write_all(rows.as_bytes())
                .map_err(|e| e.to_string())?;
        }
    }
    Ok(if mismatch {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}
