use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};

use dbsearch::analysis::{curves_csv, make_distribution, standard_curves, verify_theorems, DistributionSpec, Family};
use dbsearch::bench::{
    comparison_table, emit_pls, format_table, generate_pls, parse_pls_file, parse_tsplib_file, run_experiment, run_pls,
    run_tsp, tour_target, BenchConfig, Limits, OptimumSource, Outcome, Strategy,
};

const NO_SOLUTION: u8 = 1;
const INPUT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "dbsearch", version, about = "Decomposition based search benchmarks and analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a TSPLIB instance (explicit weights) until the optimum is found.
    SolveTsp {
        file: PathBuf,
        /// lds, dbs, dfs or ib:C1/C2/...
        #[arg(long, default_value = "dbs")]
        strategy: String,
        /// Tour length to stop at: an integer, `auto` (exact for up to 20
        /// cities) or `none` (search until exhausted or out of time).
        #[arg(long, default_value = "auto")]
        optimum: String,
        /// Seconds.
        #[arg(long, default_value_t = 900.0)]
        time_limit: f64,
        #[arg(long)]
        node_limit: Option<u64>,
    },
    /// Complete a partial latin square.
    SolvePls {
        file: PathBuf,
        #[arg(long, default_value = "dbs")]
        strategy: String,
        #[arg(long, default_value_t = 900.0)]
        time_limit: f64,
        #[arg(long)]
        node_limit: Option<u64>,
    },
    /// Generate a partial latin square with a known completion.
    GenPls {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        holes: usize,
        /// Spread holes evenly over rows and columns.
        #[arg(long)]
        balanced: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cumulative success curves of LDS and DBS under a branch distribution.
    Curves {
        #[arg(long)]
        b: usize,
        #[arg(long)]
        n: usize,
        /// linear, poisson or binomial.
        #[arg(long, default_value = "linear")]
        family: String,
        /// Average into plateaus: `COUNTxSIZE`, or b/2 plateaus of size 2
        /// when given without a value.
        #[arg(long, num_args = 0..=1, default_missing_value = "pairs")]
        plateaus: Option<String>,
        /// CSV output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the strategy comparison theorems over a parameter grid.
    VerifyTheorems {
        #[arg(long, default_value_t = 6)]
        max_b: usize,
        #[arg(long, default_value_t = 5)]
        max_n: usize,
    },
    /// Run a batch described by a key = value configuration file.
    Bench {
        #[arg(long)]
        config: PathBuf,
    },
}

type CliResult = Result<ExitCode, String>;

fn limits(time_limit: f64, node_limit: Option<u64>) -> Result<Limits, String> {
    if !(time_limit > 0.0 && time_limit.is_finite()) {
        return Err(format!("time limit must be positive, got {time_limit}"));
    }
    Ok(Limits {
        time: Duration::from_secs_f64(time_limit),
        nodes: node_limit,
    })
}

fn stats_line(stats: &dbsearch::search::SearchStats) -> String {
    format!(
        "time {:.3} s, fails {}, nodes {}, discrepancy {}",
        stats.wall_time.as_secs_f64(),
        stats.fails,
        stats.nodes_expanded,
        stats.solution_discrepancy.map_or("-".to_string(), |d| d.to_string())
    )
}

fn solve_tsp(file: PathBuf, strategy: &str, optimum: &str, lim: Limits) -> CliResult {
    let strategy = Strategy::parse(strategy).map_err(|e| e.to_string())?;
    let instance = parse_tsplib_file(&file).map_err(|e| e.to_string())?;
    let source = match optimum {
        "auto" => OptimumSource::Auto,
        "none" => OptimumSource::None,
        v => OptimumSource::Known(v.parse().map_err(|_| format!("bad optimum {v:?}"))?),
    };
    let target = tour_target(&instance, source).map_err(|e| e.to_string())?;
    let r = run_tsp(&instance, target, &strategy, &lim).map_err(|e| e.to_string())?;
    println!("instance {} ({} cities), strategy {strategy}", instance.name, instance.n());
    println!("outcome {}", r.outcome);
    if let Some(t) = target {
        println!("target {t}");
    }
    println!("{}", stats_line(&r.stats));
    match (&r.solution, r.objective) {
        (Some(next), Some(len)) => {
            let mut tour = vec![0usize];
            while tour.len() < next.len() {
                tour.push(next[*tour.last().unwrap()] as usize);
            }
            let cities: Vec<String> = tour.iter().map(|c| (c + 1).to_string()).collect();
            println!("length {len}");
            println!("tour {}", cities.join(" "));
            Ok(ExitCode::SUCCESS)
        }
        _ => Ok(ExitCode::from(NO_SOLUTION)),
    }
}

fn solve_pls(file: PathBuf, strategy: &str, lim: Limits) -> CliResult {
    let strategy = Strategy::parse(strategy).map_err(|e| e.to_string())?;
    let instance = parse_pls_file(&file).map_err(|e| e.to_string())?;
    let r = run_pls(&instance.name(), &instance, &strategy, &lim).map_err(|e| e.to_string())?;
    eprintln!("{} {strategy}: {}, {}", instance.name(), r.outcome, stats_line(&r.stats));
    match r.solution {
        Some(sol) => {
            let n = instance.order();
            let mut grid = instance.clone();
            for (i, row) in grid.grid.iter_mut().enumerate() {
                row.copy_from_slice(&sol[i * n..(i + 1) * n]);
            }
            print!("{}", emit_pls(&grid));
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("{}", r.outcome);
            Ok(ExitCode::from(NO_SOLUTION))
        }
    }
}

fn write_out(out: Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(&p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn curves(b: usize, n: usize, family: &str, plateaus: Option<String>, out: Option<PathBuf>) -> CliResult {
    let family = Family::parse(family).ok_or_else(|| format!("unknown family {family:?}"))?;
    let mut spec = DistributionSpec::new(family);
    match plateaus.as_deref() {
        None => {}
        Some("pairs") => spec = spec.with_plateaus(b / 2, 2),
        Some(v) => {
            let (count, size) = v
                .split_once('x')
                .and_then(|(c, s)| Some((c.parse().ok()?, s.parse().ok()?)))
                .ok_or_else(|| format!("bad plateaus {v:?}, expected COUNTxSIZE"))?;
            spec = spec.with_plateaus(count, size);
        }
    }
    let model = make_distribution(&spec, b, n).map_err(|e| e.to_string())?;
    let points = standard_curves(&model).map_err(|e| e.to_string())?;
    write_out(out, &curves_csv(&points))?;
    Ok(ExitCode::SUCCESS)
}

fn verify(max_b: usize, max_n: usize) -> CliResult {
    if max_b < 2 || max_n < 1 || max_b > 12 || max_n > 8 {
        return Err("grid must satisfy 2 <= max-b <= 12 and 1 <= max-n <= 8".into());
    }
    let r = verify_theorems(max_b, max_n);
    println!("grid b = 2..={max_b}, n = 1..={max_n}");
    println!("theorem 1 (broadening emulation): {} cutoff chains", r.theorem1_points);
    println!("theorem 2 (mean success per leaf): {} points", r.theorem2_points);
    println!("theorem 3 (equal leaf budget): {} points", r.theorem3_points);
    println!("skipped (precondition not met): {}", r.skipped);
    let middle: Vec<_> = r
        .equality_pairs
        .iter()
        .filter(|(b, _, p)| p.c + 1 == *b && p.k > 0)
        .collect();
    let unequal = middle.iter().filter(|(_, _, p)| !p.equal).count();
    let admissible = middle.iter().filter(|(_, _, p)| p.admissible).count();
    println!(
        "pair (c = b-1, k = n(b-1)-1): {} evaluated, {admissible} within the leaf budget, {unequal} unequal",
        middle.len()
    );
    for f in &r.failures {
        println!("FAIL {f}");
    }
    if r.passed() {
        println!("all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(NO_SOLUTION))
    }
}

fn bench(config: PathBuf) -> CliResult {
    let cfg = BenchConfig::load(&config).map_err(|e| e.to_string())?;
    let instances = cfg.instances().map_err(|e| e.to_string())?;
    if instances.is_empty() {
        return Err("configuration names no instances".into());
    }
    let records = run_experiment(&instances, &cfg.strategies, &cfg.limits, cfg.parallel).map_err(|e| e.to_string())?;
    print!("{}", format_table(&records));
    println!();
    print!("{}", comparison_table(&records, &cfg.strategies));
    let all = records.iter().all(|r| matches!(r.outcome, Outcome::Solved | Outcome::Optimal));
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(NO_SOLUTION) })
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::SolveTsp {
            file,
            strategy,
            optimum,
            time_limit,
            node_limit,
        } => solve_tsp(file, &strategy, &optimum, limits(time_limit, node_limit)?),
        Command::SolvePls {
            file,
            strategy,
            time_limit,
            node_limit,
        } => solve_pls(file, &strategy, limits(time_limit, node_limit)?),
        Command::GenPls {
            order,
            holes,
            balanced,
            seed,
            out,
        } => {
            let p = generate_pls(order, holes, balanced, seed).map_err(|e| e.to_string())?;
            write_out(out, &emit_pls(&p))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Curves {
            b,
            n,
            family,
            plateaus,
            out,
        } => curves(b, n, &family, plateaus, out),
        Command::VerifyTheorems { max_b, max_n } => verify(max_b, max_n),
        Command::Bench { config } => bench(config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
