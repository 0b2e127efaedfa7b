//! `innerpave run` solves one problem and writes its artifacts;
//! `innerpave compare` tabulates runs across benchmarks, algorithms and
//! precisions.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use innerpave::bench;
use innerpave::contract::ContractorKind;
use innerpave::io::{render_svg, view_of, PavingFile};
use innerpave::solver::{solve, Method, Schedule, SolverConfig, Solution, Strategy};
use innerpave::{parse, Problem};

use report::{with_ratios, write_compare_csv, write_csv, Row};

#[derive(Parser)]
#[command(name = "innerpave", version, about = "Inner approximations of quantified inequality systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and write paving.json, report.csv and optionally an SVG.
    Run(RunArgs),
    /// Run every (benchmark, algorithm, eps) combination and print a CSV table.
    Compare(CompareArgs),
}

/// JLA slice width: a number, or `eps` to slice at the splitting precision.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Omega {
    Fixed(f64),
    Eps,
}

impl Omega {
    fn at(self, eps: f64) -> f64 {
        match self {
            Omega::Fixed(w) => w,
            Omega::Eps => eps,
        }
    }
}

impl FromStr for Omega {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "eps" {
            return Ok(Omega::Eps);
        }
        s.parse()
            .map(Omega::Fixed)
            .map_err(|_| format!("expected a number or `eps`, got `{s}`"))
    }
}

#[derive(Args)]
struct Tuning {
    #[arg(long, default_value = "bc3")]
    contractor: ContractorKind,
    #[arg(long, default_value = "normal")]
    strategy: Strategy,
    #[arg(long, default_value = "dfs")]
    schedule: Schedule,
    /// Stop at the first inner box.
    #[arg(long)]
    first_only: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-clock limit in seconds; unfinished work is reported undecided.
    #[arg(long, default_value_t = 600.0)]
    timeout: f64,
    /// Search-step budget; like the timeout, unfinished work is reported
    /// undecided, but the result does not depend on machine speed.
    #[arg(long)]
    max_iterations: Option<u64>,
}

impl Tuning {
    fn config(&self, eps: f64, omega: f64) -> SolverConfig {
        SolverConfig {
            epsilon: eps,
            omega,
            contractor: self.contractor,
            strategy: self.strategy,
            schedule: self.schedule,
            seed: self.seed,
            first_only: self.first_only,
            timeout: Some(Duration::from_secs_f64(self.timeout.max(0.0))),
            max_iterations: self.max_iterations,
            ..SolverConfig::default()
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Problem file in the text format.
    #[arg(long, conflicts_with = "bench", required_unless_present = "bench")]
    problem: Option<PathBuf>,
    /// Built-in benchmark name.
    #[arg(long)]
    bench: Option<String>,
    #[arg(long, default_value = "ipabc")]
    algo: Method,
    #[arg(long, default_value_t = 1e-2)]
    eps: f64,
    #[arg(long, default_value = "0.1")]
    omega: Omega,
    #[command(flatten)]
    tuning: Tuning,
    /// Directory for the artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also draw paving.svg over two variables, e.g. `x,y`.
    #[arg(long)]
    svg: Option<String>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    benches: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "jla,ipabc")]
    algos: Vec<Method>,
    #[arg(long = "eps-list", value_delimiter = ',', default_value = "1e-2")]
    eps_list: Vec<f64>,
    /// JLA slice width; `eps` ties it to each precision.
    #[arg(long, default_value = "eps")]
    omega: Omega,
    #[command(flatten)]
    tuning: Tuning,
    /// Also write the table to this directory as report.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes through a temporary sibling and a rename.
fn write_atomic(path: &Path, data: &[u8]) -> Result<(), CliError> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, data).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn load(problem: Option<&Path>, bench_name: Option<&str>) -> Result<(String, Problem), CliError> {
    match (problem, bench_name) {
        (_, Some(name)) => Ok((name.to_string(), bench::build(name).map_err(usage)?.problem)),
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            let p = parse(&text).map_err(|e| usage(format!("{}:{e}", path.display())))?;
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("problem");
            Ok((stem.to_string(), p))
        }
        (None, None) => Err(usage("one of --problem or --bench is required")),
    }
}

fn solve_checked(p: &Problem, method: Method, cfg: &SolverConfig) -> Result<Solution, CliError> {
    solve(p, method, cfg).map_err(usage)
}

fn svg_dims(p: &Problem, spec: &str) -> Result<(usize, usize), CliError> {
    let (x, y) = spec
        .split_once(',')
        .ok_or_else(|| usage(format!("--svg expects `x-var,y-var`, got `{spec}`")))?;
    let find = |name: &str| {
        p.var_index(name.trim())
            .ok_or_else(|| usage(format!("--svg: unknown variable `{}`", name.trim())))
    };
    Ok((find(x)?, find(y)?))
}

fn run(args: RunArgs) -> Result<ExitCode, CliError> {
    let (name, problem) = load(args.problem.as_deref(), args.bench.as_deref())?;
    let svg = args.svg.as_deref().map(|s| svg_dims(&problem, s)).transpose()?;
    let cfg = args.tuning.config(args.eps, args.omega.at(args.eps));
    let s = solve_checked(&problem, args.algo, &cfg)?;

    fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;
    let file = PavingFile::new(&problem, &s, args.algo, &cfg);
    write_atomic(&args.out.join("paving.json"), file.to_json().as_bytes())?;
    let mut csv = Vec::new();
    write_csv(&mut csv, &[Row::new(&name, args.algo, &cfg, &s)]).map_err(usage)?;
    write_atomic(&args.out.join("report.csv"), &csv)?;
    if let Some((dx, dy)) = svg {
        let picture = render_svg(&s.paving, dx, dy, view_of(&problem.domain, dx, dy, 600.0));
        write_atomic(&args.out.join("paving.svg"), picture.as_bytes())?;
    }

    println!(
        "{name}: {} inner, {} outer, {} undecided; inner volume {}; {:.3} s{}",
        s.paving.inner.len(),
        s.stats.outer_count,
        s.paving.undecided.len(),
        s.inner_volume(),
        s.stats.elapsed.as_secs_f64(),
        if s.stats.timed_out {
            " (timeout)"
        } else if s.stats.exhausted {
            " (iteration budget spent)"
        } else {
            ""
        }
    );
    if s.paving.inner.is_empty() && s.paving.undecided.is_empty() {
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn compare(args: CompareArgs) -> Result<ExitCode, CliError> {
    let problems = args
        .benches
        .iter()
        .map(|b| load(None, Some(b)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for (name, problem) in &problems {
        for &eps in &args.eps_list {
            for &algo in &args.algos {
                if algo == Method::Jla && problem.quantifier.is_none() {
                    eprintln!("note: skipping jla on {name}, which has no quantifier");
                    continue;
                }
                let cfg = args.tuning.config(eps, args.omega.at(eps));
                let s = solve_checked(problem, algo, &cfg)?;
                rows.push(Row::new(name, algo, &cfg, &s));
            }
        }
    }
    let table = with_ratios(rows, args.tuning.first_only);
    let mut csv = Vec::new();
    write_compare_csv(&mut csv, &table).map_err(usage)?;
    print!("{}", String::from_utf8_lossy(&csv));
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        write_atomic(&dir.join("report.csv"), &csv)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Compare(a) => compare(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })
}
