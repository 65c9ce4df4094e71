use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use gsmat::bench::{bench_query, BENCH_HEADER};
use gsmat::dictionary::escape_term;
use gsmat::error::{Error, ExecError, StorageError};
use gsmat::gen::{generate, write_ntriples, GenConfig};
use gsmat::storage::default_bounds;
use gsmat::{parse_query, Engine, ExecMode, QueryGraph, Store};

pub const USAGE: u8 = 1;
pub const PARSE: u8 = 2;
pub const STORE_IO: u8 = 3;
pub const BUDGET: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        Failure::new(STORE_IO, format!("{}: {e}", path.display()))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) | Error::Plan(_) => PARSE,
            Error::Storage(_) | Error::Dictionary(_) => STORE_IO,
            Error::Exec(ExecError::RowBudget { .. }) => BUDGET,
            Error::Exec(_) | Error::Gen(_) => USAGE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<StorageError> for Failure {
    fn from(e: StorageError) -> Self {
        Error::from(e).into()
    }
}

pub fn build(input: &Path, out: &Path) -> Result<(), Failure> {
    let file = File::open(input).map_err(|e| Failure::io(input, e))?;
    let store = Store::from_ntriples(BufReader::new(file)).map_err(|e| match e {
        Error::Storage(StorageError::Io { source, .. }) => Failure::io(input, source),
        Error::Parse(p) => Failure::new(PARSE, format!("{}: {p}", input.display())),
        other => other.into(),
    })?;
    store.persist(out)?;
    println!(
        "{} triples, {} predicates, {} nodes",
        store.triple_count(),
        store.predicate_count(),
        store.node_count()
    );
    Ok(())
}

pub struct QueryArgs {
    pub store: PathBuf,
    pub query: PathBuf,
    pub workers: Option<usize>,
    pub row_budget: u64,
    pub explain: bool,
    pub report: bool,
    pub count_only: bool,
}

fn read_query(path: &Path) -> Result<QueryGraph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    parse_query(&text).map_err(|e| Failure::new(PARSE, format!("{}: {e}", path.display())))
}

fn mode(workers: Option<usize>) -> ExecMode {
    match workers {
        Some(workers) => ExecMode::Parallel { workers },
        None => ExecMode::Sequential,
    }
}

pub fn query(args: &QueryArgs) -> Result<(), Failure> {
    let graph = read_query(&args.query)?;
    let store = Store::load(&args.store)?;
    let engine = Engine::new(&store).with_row_budget(args.row_budget);
    let plan = engine.plan(&graph)?;
    for w in &plan.warnings {
        eprintln!("warning: {w}");
    }
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let stdout_err = |e: io::Error| Failure::new(STORE_IO, format!("<stdout>: {e}"));
    if args.explain {
        out.write_all(plan.explain().as_bytes())
            .map_err(stdout_err)?;
        return out.flush().map_err(stdout_err);
    }

    let result = engine
        .execute(&plan, mode(args.workers))
        .map_err(Error::from)?;
    if args.count_only {
        writeln!(out, "{}", result.len()).map_err(stdout_err)?;
    } else {
        let header: Vec<String> = result
            .table
            .schema()
            .iter()
            .map(|v| format!("?{v}"))
            .collect();
        writeln!(out, "{}", header.join("\t")).map_err(stdout_err)?;
        let rows = result
            .decoded_rows(store.dictionary())
            .map_err(Error::from)?;
        for row in rows {
            let cells: Vec<_> = row.iter().map(|t| escape_term(t)).collect();
            writeln!(out, "{}", cells.join("\t")).map_err(stdout_err)?;
        }
    }
    out.flush().map_err(stdout_err)?;
    if args.report {
        eprint!("{}", result.report.to_tsv());
    }
    Ok(())
}

pub fn stats(store: &Path, histogram: bool, bounds: Option<&[u64]>) -> Result<(), Failure> {
    let store = Store::load(store)?;
    print!("{}", store.stats().to_tsv());
    if histogram {
        let bounds = match bounds {
            Some(b) => b.to_vec(),
            None => default_bounds(store.node_count() as u64),
        };
        println!();
        println!("degree\tnodes\tpercent");
        print!("{}", store.degree_histogram(&bounds));
    }
    Ok(())
}

pub fn gen(cfg: &GenConfig, out: &Path) -> Result<(), Failure> {
    let triples = generate(cfg).map_err(Error::from)?;
    let file = File::create(out).map_err(|e| Failure::io(out, e))?;
    write_ntriples(&triples, BufWriter::new(file)).map_err(|e| Failure::io(out, e))?;
    eprintln!("wrote {} triples to {}", triples.len(), out.display());
    Ok(())
}

pub fn bench(
    store: &Path,
    queries: &Path,
    runs: usize,
    workers: usize,
    row_budget: u64,
) -> Result<(), Failure> {
    let mut files: Vec<PathBuf> = fs::read_dir(queries)
        .map_err(|e| Failure::io(queries, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "rq"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::new(
            USAGE,
            format!("{}: no .rq query files", queries.display()),
        ));
    }
    let store = Store::load(store)?;
    let engine = Engine::new(&store).with_row_budget(row_budget);
    println!("{BENCH_HEADER}");
    let mut first_failure = None;
    for path in &files {
        let name = path.file_stem().map_or_else(
            || path.display().to_string(),
            |s| s.to_string_lossy().into_owned(),
        );
        let outcome = read_query(path)
            .and_then(|q| bench_query(&engine, &name, &q, runs, workers).map_err(Failure::from));
        match outcome {
            Ok(row) => println!("{}", row.to_tsv()),
            Err(f) => {
                eprintln!("gsmat: {name}: {}", f.message);
                first_failure.get_or_insert(f.code);
            }
        }
    }
    match first_failure {
        None => Ok(()),
        Some(code) => Err(Failure::new(code, "some queries failed")),
    }
}
