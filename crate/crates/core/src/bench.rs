//! Repeated timing of queries in sequential and parallel mode.

use std::time::{Duration, Instant};

use crate::error::Error;
use crate::executor::{Engine, ExecMode};
use crate::query::QueryGraph;

pub const BENCH_HEADER: &str =
    "query\truns\tseq_mean_ms\tpar_mean_ms\tworkers\tintermediate_rows\tresults";

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub query: String,
    pub runs: usize,
    pub sequential: Duration,
    pub parallel: Duration,
    pub workers: usize,
    pub intermediate_rows: u64,
    pub results: usize,
}

impl BenchRow {
    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{:.3}\t{:.3}\t{}\t{}\t{}",
            self.query,
            self.runs,
            self.sequential.as_secs_f64() * 1e3,
            self.parallel.as_secs_f64() * 1e3,
            self.workers,
            self.intermediate_rows,
            self.results
        )
    }
}

/// Plans `query` once, then times `runs` executions in each mode and
/// reports the means. Fails if the two modes disagree on the result size.
pub fn bench_query(
    engine: &Engine<'_>,
    name: &str,
    query: &QueryGraph,
    runs: usize,
    workers: usize,
) -> Result<BenchRow, Error> {
    let runs = runs.max(1);
    let plan = engine.plan(query)?;
    let timed = |mode: ExecMode| -> Result<(Duration, u64, usize), Error> {
        let mut total = Duration::ZERO;
        let mut last = (0, 0);
        for _ in 0..runs {
            let t0 = Instant::now();
            let r = engine.execute(&plan, mode)?;
            total += t0.elapsed();
            last = (r.report.intermediate_rows(), r.len());
        }
        Ok((total / runs as u32, last.0, last.1))
    };
    let (sequential, intermediate_rows, results) = timed(ExecMode::Sequential)?;
    let (parallel, _, par_results) = timed(ExecMode::Parallel { workers })?;
    assert_eq!(
        results, par_results,
        "sequential and parallel execution disagree on {name}"
    );
    Ok(BenchRow {
        query: name.to_owned(),
        runs,
        sequential,
        parallel,
        workers,
        intermediate_rows,
        results,
    })
}
