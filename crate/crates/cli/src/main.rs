use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hscc::oracle::brute_force_solve;
use hscc::{
    builtin_family, core_solver, fast_solvers, gen, parse_edge_list, path_solver, Digraph, FamilyKind, FamilySpec,
    ForbiddenFamily, Lambda, Separator, SolveError, SolveStats, SolverConfig, TerminalPair, VertexSet,
};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "hscc", version, about = "Delete at most k vertices so that no strong component contains a forbidden pattern")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with one of the FPT solvers.
    Solve {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, value_enum, default_value_t = SolverName::Auto)]
        solver: SolverName,
        /// Worker threads for the partition loop.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Exhaustive search over all vertex subsets of size ≤ k.
    Oracle {
        #[command(flatten)]
        problem: Problem,
    },
    /// Minimum and important separators between two vertex sets.
    Separators {
        /// Comma-separated source vertices.
        #[arg(long, value_delimiter = ',', required = true)]
        source: Vec<usize>,
        /// Comma-separated sink vertices.
        #[arg(long, value_delimiter = ',', required = true)]
        sink: Vec<usize>,
        /// Also enumerate important separators of size ≤ k.
        #[arg(short = 'k', allow_negative_numbers = true)]
        k: Option<i64>,
        /// Edge-list file, or `-` for standard input.
        input: PathBuf,
    },
    /// Print a seeded random instance in edge-list format.
    Gen {
        #[arg(short = 'n')]
        n: usize,
        /// Exact arc count (uniform over simple digraphs with m arcs).
        #[arg(short = 'm', conflicts_with = "p")]
        m: Option<usize>,
        /// Independent arc probability instead of a fixed count.
        #[arg(short = 'p')]
        p: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct Problem {
    /// dfvs | out-degree:<d> | bounded-size:<s> | path:<p> | custom:<file>
    #[arg(long)]
    family: FamilySpec,
    #[arg(short = 'k', allow_negative_numbers = true)]
    k: i64,
    /// Edge-list file, or `-` for standard input.
    input: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverName {
    Auto,
    Rooted,
    Path,
    OneOutRegular,
    BoundedSize,
    Oracle,
}

#[derive(Serialize)]
struct Stats {
    nodes: u64,
    depth: usize,
    time_ms: u128,
}

#[derive(Serialize)]
struct SolveOutput {
    schema: u32,
    status: &'static str,
    solution: Option<Vec<usize>>,
    k: usize,
    solver: &'static str,
    family: String,
    stats: Stats,
}

#[derive(Serialize)]
struct SeparatorOutput {
    cut: Vec<usize>,
    reach: Vec<usize>,
}

impl From<&Separator> for SeparatorOutput {
    fn from(s: &Separator) -> Self {
        SeparatorOutput {
            cut: s.cut.to_vec(),
            reach: s.reach.to_vec(),
        }
    }
}

#[derive(Serialize)]
struct SeparatorsOutput {
    schema: u32,
    /// `null` when a source has an arc into the sink set.
    lambda: Option<usize>,
    closest: Option<SeparatorOutput>,
    furthest: Option<SeparatorOutput>,
    important: Option<Vec<Vec<usize>>>,
}

fn read_graph(path: &PathBuf) -> Result<Digraph> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    parse_edge_list(&text).with_context(|| format!("parsing {}", path.display()))
}

fn budget(k: i64) -> Result<usize> {
    usize::try_from(k).map_err(|_| anyhow::anyhow!("budget k must be non-negative, got {k}"))
}

/// Auto choice: DFVS goes to bounded-size(1), which is the same problem.
fn pick_solver(fam: &ForbiddenFamily) -> Result<SolverName> {
    if *fam == ForbiddenFamily::dfvs() || fam.component_bound().is_some() {
        return Ok(SolverName::BoundedSize);
    }
    if *fam == ForbiddenFamily::out_degree(1) {
        return Ok(SolverName::OneOutRegular);
    }
    match fam.kind() {
        FamilyKind::AllRooted => Ok(SolverName::Rooted),
        FamilyKind::HasPath => Ok(SolverName::Path),
        FamilyKind::General => bail!("no solver handles a family that is neither rooted nor contains a directed path"),
    }
}

fn solver_label(s: SolverName) -> &'static str {
    match s {
        SolverName::Auto => "auto",
        SolverName::Rooted => "rooted",
        SolverName::Path => "path",
        SolverName::OneOutRegular => "one-out-regular",
        SolverName::BoundedSize => "bounded-size",
        SolverName::Oracle => "oracle",
    }
}

fn dispatch(
    solver: SolverName,
    d: &Digraph,
    fam: &ForbiddenFamily,
    k: usize,
    config: &SolverConfig,
) -> Result<(Option<VertexSet>, SolveStats)> {
    let report = match solver {
        SolverName::Auto => unreachable!("resolved before dispatch"),
        SolverName::Rooted => {
            if !fam.is_rooted() {
                bail!("the rooted solver needs every pattern to have a root");
            }
            core_solver::solve_with(d, fam, k, config)
        }
        SolverName::Path => {
            if fam.shortest_path_member().is_none() || fam.patterns().is_none() {
                bail!("the path solver needs an explicit family with a directed-path member");
            }
            path_solver::solve_path_scc_with(d, fam, k, config)
        }
        SolverName::OneOutRegular => {
            if *fam != ForbiddenFamily::out_degree(1) {
                bail!("the one-out-regular solver only handles --family out-degree:1");
            }
            fast_solvers::solve_one_out_regular_with(d, k, config)
        }
        SolverName::BoundedSize => {
            let s = if *fam == ForbiddenFamily::dfvs() {
                1
            } else {
                fam.component_bound()
                    .ok_or_else(|| anyhow::anyhow!("the bounded-size solver needs --family bounded-size:<s> or dfvs"))?
            };
            fast_solvers::solve_bounded_size_with(d, s, k, config)
        }
        SolverName::Oracle => {
            let x = brute_force_solve(d, fam, k, &VertexSet::new())?;
            return Ok((x, SolveStats::default()));
        }
    };
    match report {
        Ok(r) => Ok((r.solution, r.stats)),
        Err(SolveError::Unsupported(msg)) => bail!("unsupported: {msg}"),
        Err(e) => Err(e.into()),
    }
}

fn solve(problem: &Problem, solver: SolverName, threads: usize) -> Result<ExitCode> {
    let k = budget(problem.k)?;
    let fam = builtin_family(&problem.family)?;
    let d = read_graph(&problem.input)?;
    let solver = match solver {
        SolverName::Auto => pick_solver(&fam)?,
        other => other,
    };
    let config = SolverConfig {
        threads: threads.max(1),
        ..SolverConfig::default()
    };
    let start = Instant::now();
    let (solution, stats) = dispatch(solver, &d, &fam, k, &config)?;
    let out = SolveOutput {
        schema: SCHEMA,
        status: if solution.is_some() { "YES" } else { "NO" },
        solution: solution.as_ref().map(VertexSet::to_vec),
        k,
        solver: solver_label(solver),
        family: problem.family.to_string(),
        stats: Stats {
            nodes: stats.nodes,
            depth: stats.max_depth,
            time_ms: start.elapsed().as_millis(),
        },
    };
    println!("{}", serde_json::to_string(&out)?);
    Ok(if solution.is_some() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn separators(source: &[usize], sink: &[usize], k: Option<i64>, input: &PathBuf) -> Result<ExitCode> {
    let k = k.map(budget).transpose()?;
    let d = read_graph(input)?;
    let tp = TerminalPair::new(&d, source.iter().collect(), sink.iter().collect())?;
    let out = match tp.lambda() {
        Lambda::Infinite => SeparatorsOutput {
            schema: SCHEMA,
            lambda: None,
            closest: None,
            furthest: None,
            important: k.map(|_| Vec::new()),
        },
        Lambda::Finite(lambda) => SeparatorsOutput {
            schema: SCHEMA,
            lambda: Some(lambda),
            closest: Some((&tp.closest_min_separator()?).into()),
            furthest: Some((&tp.furthest_min_separator()?).into()),
            important: k.map(|k| tp.important_separators(k).iter().map(|s| s.cut.to_vec()).collect()),
        },
    };
    println!("{}", serde_json::to_string(&out)?);
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { problem, solver, threads } => solve(&problem, solver, threads),
        Command::Oracle { problem } => solve(&problem, SolverName::Oracle, 1),
        Command::Separators { source, sink, k, input } => separators(&source, &sink, k, &input),
        Command::Gen { n, m, p, seed } => {
            let d = match (m, p) {
                (Some(m), None) => gen::gnm(n, m, seed),
                (None, Some(p)) if (0.0..=1.0).contains(&p) => gen::gnp(n, p, seed),
                (None, Some(p)) => bail!("arc probability must lie in [0, 1], got {p}"),
                _ => bail!("gen needs either -m <arcs> or -p <probability>"),
            };
            print!("{}", d.to_edge_list());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hscc: {e:#}");
            ExitCode::from(2)
        }
    }
}
