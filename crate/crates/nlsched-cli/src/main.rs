//! Command-line front end: generate instance sets, solve single instances,
//! dump dominance relations, measure hardness, and drive experiment grids.
//!
//! Exit status: 0 on success, 1 on a usage error, 2 on a runtime error,
//! 3 when a single `solve` hits the node cap. Diagnostics go to standard
//! error; data goes to standard output or the file/directory named by
//! `--out`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use nlsched::bench::{
    gen_nodes_by_n, run_experiment, Experiment, GridOptions, NodesByNSpec, HARDNESS_HEADER,
};
use nlsched::dominance::{build_table, relations_csv, RuleSet};
use nlsched::instance::{read_instance, Instance};
use nlsched::instgen::{gen_custom, gen_main_grid, gen_set_n, gen_set_t, read_set, write_set, GenSpec};
use nlsched::oracle::{brute_force_opt, dp_opt};
use nlsched::penalty::PenaltyFn;
use nlsched::search::{solve, Direction, SolveConfig, SolveStatus, SOLVE_CSV_HEADER};

#[derive(Parser)]
#[command(name = "nlsched", version, about = "Exact solver and benchmark harness for one-machine scheduling with power-law completion costs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance set under OUT/SETNAME with a manifest
    Gen(GenArgs),
    /// Solve one instance and print a result CSV plus the schedule
    Solve(SolveArgs),
    /// Dump the pairwise dominance table of an instance as CSV
    Relations(RelationsArgs),
    /// Per-instance hardness of a generated set at one beta
    Hardness(HardnessArgs),
    /// Run an experiment grid over a set; append-only and resumable
    Bench(BenchArgs),
    /// Exhaustive reference solvers for cross-checking
    Oracle(OracleArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Which set to generate: main | set-n | set-T | custom
    #[arg(long)]
    set: String,
    /// Jobs per instance (custom only)
    #[arg(long)]
    n: Option<usize>,
    /// Ratio spread parameter (custom only)
    #[arg(long)]
    sigma: Option<f64>,
    /// Target beta recorded in the manifest (custom only)
    #[arg(long)]
    beta: Option<f64>,
    /// Number of instances (custom only)
    #[arg(long)]
    count: Option<usize>,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory the set is written under
    #[arg(long)]
    out: PathBuf,
    /// Full-scale main grid (20 jobs, 25 per cell) instead of the desk
    /// scale (16 jobs, 5 per cell); main only
    #[arg(long)]
    full: bool,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file
    #[arg(long)]
    instance: PathBuf,
    /// Cost exponent
    #[arg(long)]
    beta: f64,
    /// Search direction: forward | backward | auto
    #[arg(long, default_value = "auto")]
    direction: String,
    /// Pruning rule set: none | local | mshj | new | all
    #[arg(long, default_value = "all")]
    rules: String,
    /// Abort after this many generated nodes
    #[arg(long, default_value_t = 1_000_000)]
    node_cap: u64,
}

#[derive(Args)]
struct RelationsArgs {
    /// Instance file
    #[arg(long)]
    instance: PathBuf,
    /// Cost exponent
    #[arg(long)]
    beta: f64,
    /// Output file; standard output if omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HardnessArgs {
    /// Set directory (contains manifest.csv)
    #[arg(long)]
    dir: PathBuf,
    /// Cost exponent
    #[arg(long)]
    beta: f64,
    /// Output file; standard output if omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// solve-rate | direction | improvement | nodes-by-n | set-n | set-T
    #[arg(long)]
    experiment: String,
    /// Set directory with the instances to run (all but nodes-by-n)
    #[arg(long)]
    dir: Option<PathBuf>,
    /// Comma-separated betas; restricts the run to matching grid cells
    #[arg(long)]
    beta_grid: Option<String>,
    /// Output root; raw rows land in OUT/results/{experiment}.csv
    #[arg(long)]
    out: PathBuf,
    /// Full-scale nodes-by-n sweep (sizes to 22, 100 per cell)
    #[arg(long)]
    full: bool,
    /// Also write aggregated (x, y, series) CSVs under OUT/plots
    #[arg(long)]
    plot_data: bool,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance file
    #[arg(long)]
    instance: PathBuf,
    /// Cost exponent
    #[arg(long)]
    beta: f64,
    /// perm (all permutations, n <= 10) | dp (subset table, n <= 24)
    #[arg(long, default_value = "perm")]
    method: String,
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Tokens come from the dedicated FromStr impls; a bad token is a usage
/// error, not a runtime one.
fn parse_token<T>(s: &str, what: &str) -> Result<T, CliError>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| usage(format!("invalid {what}: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests arrive here too; they print to
            // standard output and succeed.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Relations(args) => cmd_relations(args),
        Command::Hardness(args) => cmd_hardness(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn cmd_gen(args: GenArgs) -> Result<u8, CliError> {
    let custom_flags = [
        args.n.map(|_| "--n"),
        args.sigma.map(|_| "--sigma"),
        args.beta.map(|_| "--beta"),
        args.count.map(|_| "--count"),
    ];
    let reject_custom_flags = || -> Result<(), CliError> {
        if let Some(flag) = custom_flags.iter().flatten().next() {
            return Err(usage(format!("{flag} only applies to --set custom")));
        }
        Ok(())
    };
    let require = |val: Option<f64>, flag: &str| {
        val.ok_or_else(|| usage(format!("--set custom requires {flag}")))
    };
    let instances = match args.set.as_str() {
        "main" => {
            reject_custom_flags()?;
            gen_main_grid(args.seed, args.full)?
        }
        "set-n" => {
            reject_custom_flags()?;
            if args.full {
                return Err(usage("--full only applies to --set main"));
            }
            gen_set_n(args.seed)?
        }
        "set-T" => {
            reject_custom_flags()?;
            if args.full {
                return Err(usage("--full only applies to --set main"));
            }
            gen_set_t(args.seed)?
        }
        "custom" => {
            if args.full {
                return Err(usage("--full only applies to --set main"));
            }
            let spec = GenSpec {
                n: args.n.ok_or_else(|| usage("--set custom requires --n"))?,
                sigma: require(args.sigma, "--sigma")?,
                beta: require(args.beta, "--beta")?,
                count: args.count.ok_or_else(|| usage("--set custom requires --count"))?,
                seed: args.seed,
            };
            gen_custom(&spec)?
        }
        other => return Err(usage(format!("unknown set `{other}`"))),
    };
    write_set(&args.out, &args.set, &instances)?;
    eprintln!(
        "wrote {} instances to {}",
        instances.len(),
        args.out.join(&args.set).display()
    );
    Ok(0)
}

fn cmd_solve(args: SolveArgs) -> Result<u8, CliError> {
    let direction: Direction = parse_token(&args.direction, "--direction")?;
    let rules: RuleSet = parse_token(&args.rules, "--rules")?;
    let instance = read_instance(&args.instance)?;
    let f = PenaltyFn::new(args.beta)?;
    let config = SolveConfig { direction, rules, node_cap: args.node_cap };
    let started = Instant::now();
    let result = solve(&instance, &f, &config)?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    println!("{SOLVE_CSV_HEADER}");
    println!("{}", result.csv_row(&instance.name, args.beta, rules, wall_ms));
    if let Some(schedule) = &result.schedule {
        let ids: Vec<String> = schedule.iter().map(|id| id.to_string()).collect();
        println!("schedule: {}", ids.join(" "));
    }
    Ok(if result.status == SolveStatus::NodeCapExceeded { 3 } else { 0 })
}

fn write_or_print(out: Option<&PathBuf>, data: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, data)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{data}"),
    }
    Ok(())
}

fn cmd_relations(args: RelationsArgs) -> Result<u8, CliError> {
    let instance = read_instance(&args.instance)?;
    let f = PenaltyFn::new(args.beta)?;
    let table = build_table(&instance, &f, RuleSet::All)?;
    write_or_print(args.out.as_ref(), &relations_csv(&table))?;
    Ok(0)
}

fn cmd_hardness(args: HardnessArgs) -> Result<u8, CliError> {
    let instances = read_set(&args.dir)?;
    let f = PenaltyFn::new(args.beta)?;
    let report = nlsched::bench::hardness_report(&instances, &f)?;
    debug_assert!(report.starts_with(HARDNESS_HEADER));
    write_or_print(args.out.as_ref(), &report)?;
    Ok(0)
}

fn cmd_bench(args: BenchArgs) -> Result<u8, CliError> {
    let experiment: Experiment = parse_token(&args.experiment, "--experiment")?;
    let mut opts = GridOptions::new(&args.out);
    opts.plot_data = args.plot_data;
    if let Some(grid) = &args.beta_grid {
        for tok in grid.split(',') {
            let beta: f64 = tok
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad --beta-grid entry `{tok}`")))?;
            opts.betas.push(beta);
        }
    }
    let instances = match experiment {
        Experiment::NodesByN => {
            // Generates its own sweep; fixed seed keeps reruns resumable.
            gen_nodes_by_n(&NodesByNSpec::preset(args.full, 0))?
        }
        _ => {
            let dir = args.dir.ok_or_else(|| {
                usage(format!("--experiment {} requires --dir", experiment.as_str()))
            })?;
            read_set(&dir)?
        }
    };
    let outcome = run_experiment(experiment, &instances, &opts)?;
    eprintln!(
        "{}: {} new rows, {} total, results in {}",
        outcome.experiment.as_str(),
        outcome.new_rows,
        outcome.total_rows,
        outcome.results_path.display()
    );
    Ok(0)
}

fn cmd_oracle(args: OracleArgs) -> Result<u8, CliError> {
    let instance: Instance = read_instance(&args.instance)?;
    let f = PenaltyFn::new(args.beta)?;
    match args.method.as_str() {
        "perm" => {
            let (schedule, cost) = brute_force_opt(&instance, &f)?;
            println!("cost: {cost}");
            let ids: Vec<String> = schedule.iter().map(|id| id.to_string()).collect();
            println!("schedule: {}", ids.join(" "));
        }
        "dp" => {
            let cost = dp_opt(&instance, &f)?;
            println!("cost: {cost}");
        }
        other => return Err(usage(format!("unknown oracle method `{other}`"))),
    }
    Ok(0)
}
