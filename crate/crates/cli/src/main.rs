//! `louvain`: community detection, benchmarking and graph conversion.

mod run;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use louvain_core::graph::io::{load_edge_list, save_edge_list, Format};
use louvain_core::graph::{generate, to_edge_list};
use louvain_core::{build_csr, CsrGraph, GraphError, LouvainError};

use run::{membership_tsv, report, EngineArgs};

#[derive(Parser)]
#[command(name = "louvain", version, about = "Parallel Louvain community detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a graph and write its membership and a run report.
    Detect {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, env = "LOUVAIN_THREADS", default_value_t = default_threads())]
        threads: usize,
        /// Membership TSV destination.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Report destination; standard output when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Time repeated runs over a list of thread counts.
    Bench {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        engine: EngineArgs,
        /// Comma-separated thread counts, e.g. `1,2,4`.
        #[arg(long, env = "LOUVAIN_THREADS", value_delimiter = ',', default_value = "1")]
        threads: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Convert between MatrixMarket and TSV edge lists.
    Convert {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        output: PathBuf,
        /// Output format; guessed from the extension when omitted.
        #[arg(long)]
        output_format: Option<Format>,
        /// Emit both directions of every edge, merging duplicates.
        #[arg(long)]
        symmetrize: bool,
    },
    /// Write a synthetic graph.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        vertices: usize,
        /// Edge count for `random`.
        #[arg(long, default_value_t = 0)]
        edges: usize,
        /// Block count for `planted`.
        #[arg(long, default_value_t = 10)]
        blocks: usize,
        #[arg(long, default_value_t = 0.3)]
        p_in: f64,
        #[arg(long, default_value_t = 0.01)]
        p_out: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        format: Option<Format>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Planted,
    Random,
}

#[derive(Debug, clap::Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// `mtx` or `tsv`; guessed from the extension when omitted.
    #[arg(long)]
    format: Option<Format>,
}

impl InputArgs {
    fn format(&self) -> Format {
        self.format.unwrap_or_else(|| Format::from_path(&self.input))
    }

    fn load(&self) -> Result<CsrGraph, CliError> {
        let el = load_edge_list(&self.input, self.format())?;
        Ok(build_csr(&el, true)?)
    }
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug)]
enum CliError {
    Graph(GraphError),
    Louvain(LouvainError),
    Io(PathBuf, std::io::Error),
    Usage(String),
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Graph(e)
    }
}

impl From<LouvainError> for CliError {
    fn from(e: LouvainError) -> Self {
        CliError::Louvain(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Louvain(LouvainError::DegenerateGraph) => 2,
            CliError::Louvain(e) if e.is_internal() => 3,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Graph(e) => write!(f, "{e}"),
            CliError::Louvain(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(path.to_owned(), e))
}

fn emit(dest: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match dest {
        Some(path) => write_file(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn detect(
    input: &InputArgs,
    engine: &EngineArgs,
    threads: usize,
    output: Option<&Path>,
    report_to: Option<&Path>,
) -> Result<(), CliError> {
    let g = input.load()?;
    let r = engine.run(&g, threads)?;
    if let Some(path) = output {
        write_file(path, &membership_tsv(&r))?;
    }
    emit(report_to, &report(&input.input, &g, engine, threads, &r)?)
}

fn bench(
    input: &InputArgs,
    engine: &EngineArgs,
    threads: &[usize],
    repetitions: usize,
    report_to: Option<&Path>,
) -> Result<(), CliError> {
    if repetitions == 0 || threads.is_empty() {
        return Err(CliError::Usage("need at least one repetition and one thread count".into()));
    }
    let g = input.load()?;
    let edges = run::edge_count(&g);
    let mut out = String::new();
    let _ = writeln!(out, "input.path={}", input.input.display());
    let _ = writeln!(out, "input.vertices={}", g.num_vertices());
    let _ = writeln!(out, "input.edges={edges}");
    let _ = writeln!(out, "engine={}", engine.engine.name());
    let mut rows = Vec::new();
    for &t in threads {
        let mut log_time = 0.0;
        let (mut q, mut lm, mut agg, mut other) = (0.0, 0.0, 0.0, 0.0);
        let mut pass_split: Vec<(f64, usize)> = Vec::new();
        for rep in 0..repetitions {
            let r = engine.run(&g, t)?;
            let wall = r.wall_time().as_secs_f64().max(1e-9);
            let s = r.phase_times.split();
            let _ = writeln!(
                out,
                "run.threads={t} run.repetition={} run.wall_time={wall} run.modularity={} run.passes={}",
                rep + 1,
                r.modularity,
                r.passes
            );
            log_time += wall.ln();
            q += r.modularity;
            lm += s.local_moving;
            agg += s.aggregation;
            other += s.other;
            let total: f64 = r.pass_times.iter().map(|d| d.as_secs_f64()).sum();
            for (k, d) in r.pass_times.iter().enumerate() {
                if pass_split.len() <= k {
                    pass_split.push((0.0, 0));
                }
                pass_split[k].0 += if total > 0.0 { d.as_secs_f64() / total } else { 0.0 };
                pass_split[k].1 += 1;
            }
        }
        let n = repetitions as f64;
        let geo = (log_time / n).exp();
        let passes: Vec<String> = pass_split.iter().map(|(s, c)| format!("{:.4}", s / *c as f64)).collect();
        rows.push((t, geo, q / n, lm / n, agg / n, other / n, passes.join(",")));
    }
    let base = rows.iter().find(|r| r.0 == 1).map_or(rows[0].1, |r| r.1);
    let _ = writeln!(
        out,
        "{:<8} {:>14} {:>12} {:>12} {:>12} {:>8} {:>8} {:>14}  pass_split",
        "threads", "time_geomean", "modularity", "local_moving", "aggregation", "other", "speedup", "edges_per_sec"
    );
    for (t, geo, q, lm, agg, other, passes) in rows {
        let _ = writeln!(
            out,
            "{t:<8} {geo:>14.6} {q:>12.6} {lm:>12.4} {agg:>12.4} {other:>8.4} {:>8.2} {:>14.0}  {passes}",
            base / geo,
            edges / geo
        );
    }
    emit(report_to, &out)
}

fn convert(
    input: &InputArgs,
    output: &Path,
    output_format: Option<Format>,
    symmetrize: bool,
) -> Result<(), CliError> {
    let mut el = load_edge_list(&input.input, input.format())?;
    if symmetrize {
        el = to_edge_list(&build_csr(&el, true)?);
    }
    let format = output_format.unwrap_or_else(|| Format::from_path(output));
    Ok(save_edge_list(output, format, &el)?)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Detect { input, engine, threads, output, report } => {
            detect(&input, &engine, threads, output.as_deref(), report.as_deref())
        }
        Command::Bench { input, engine, threads, repetitions, report } => {
            bench(&input, &engine, &threads, repetitions, report.as_deref())
        }
        Command::Convert { input, output, output_format, symmetrize } => {
            convert(&input, &output, output_format, symmetrize)
        }
        Command::Generate { kind, vertices, edges, blocks, p_in, p_out, seed, output, format } => {
            let el = match kind {
                Kind::Planted => {
                    if blocks == 0 || vertices < blocks {
                        return Err(CliError::Usage("planted graphs need 1 <= blocks <= vertices".into()));
                    }
                    generate::planted_partition(vertices, blocks, p_in, p_out, seed).0
                }
                Kind::Random => {
                    if edges > vertices * vertices.saturating_sub(1) / 2 {
                        return Err(CliError::Usage("more edges than vertex pairs".into()));
                    }
                    generate::random_graph(vertices, edges, 1..=1, seed)
                }
            };
            let format = format.unwrap_or_else(|| Format::from_path(&output));
            Ok(save_edge_list(&output, format, &el)?)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::debug!("{e:?}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
