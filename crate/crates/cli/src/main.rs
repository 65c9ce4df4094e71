use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::Failure;

/// Sparse-matrix RDF store: build, query, inspect, generate and benchmark.
#[derive(Debug, Parser)]
#[command(name = "gsmat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a store directory from an N-Triples file.
    Build {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a SELECT query and print its bindings as TSV.
    Query {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[command(flatten)]
        exec: ExecArgs,
        /// Print the join plan instead of running the query.
        #[arg(long)]
        explain: bool,
        /// Print the per-step execution report to stderr.
        #[arg(long)]
        report: bool,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
    /// Print per-predicate statistics.
    Stats {
        #[arg(long)]
        store: PathBuf,
        /// Also print the node degree histogram.
        #[arg(long)]
        histogram: bool,
        /// Comma-separated bucket bounds for the histogram.
        #[arg(long, value_delimiter = ',', requires = "histogram")]
        bounds: Option<Vec<u64>>,
    },
    /// Write synthetic N-Triples.
    Gen {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        triples: u64,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        predicates: u32,
        #[arg(long, default_value_t = 1.0)]
        zipf: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Node pool size; defaults to half the triple count.
        #[arg(long)]
        nodes: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time every *.rq query in a directory, sequentially and in parallel.
    Bench {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        runs: u64,
        /// Worker threads for the parallel column.
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        workers: u64,
        #[arg(long, default_value_t = gsmat::executor::DEFAULT_ROW_BUDGET)]
        row_budget: u64,
    },
}

#[derive(Debug, Args)]
struct ExecArgs {
    /// Run the parallel executor with this many worker threads.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    /// Largest number of rows a single join may produce.
    #[arg(long, default_value_t = gsmat::executor::DEFAULT_ROW_BUDGET)]
    row_budget: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Header line then one row per binding.
    Tsv,
    /// Only the number of result rows.
    Count,
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
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, message }) => {
            eprintln!("gsmat: {message}");
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Build { input, out } => commands::build(&input, &out),
        Command::Query {
            store,
            query,
            exec,
            explain,
            report,
            format,
        } => commands::query(&commands::QueryArgs {
            store,
            query,
            workers: exec.workers.map(|w| w as usize),
            row_budget: exec.row_budget,
            explain,
            report,
            count_only: format == Format::Count,
        }),
        Command::Stats {
            store,
            histogram,
            bounds,
        } => commands::stats(&store, histogram, bounds.as_deref()),
        Command::Gen {
            triples,
            predicates,
            zipf,
            seed,
            nodes,
            out,
        } => commands::gen(
            &gsmat::gen::GenConfig {
                triples,
                predicates,
                zipf,
                seed,
                nodes,
            },
            &out,
        ),
        Command::Bench {
            store,
            queries,
            runs,
            workers,
            row_budget,
        } => commands::bench(
            &store,
            &queries,
            runs as usize,
            workers as usize,
            row_budget,
        ),
    }
}
