//! Plan evaluation by iterated sparse-matrix joins.
//!
//! The accumulated table is always the left side. Each later step's
//! pattern becomes the right side, indexed on the first join variable; when
//! both of its ends are variables the stored matrix orientation is used as
//! is.

mod cache;
mod join;
mod table;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use rayon::{ThreadPool, ThreadPoolBuilder};

pub use cache::MatrixCache;
pub use join::{
    cross_product, parallel_sm_join, preallocate, scan, sm_join, sm_join_counts, IndexedRelation,
    JoinOutcome, JoinSpec, MatchCounts, PreallocPlan,
};
pub use table::BindingTable;

use crate::dictionary::TermDictionary;
use crate::error::{DictionaryError, Error, ExecError};
use crate::planner::{plan, Plan, PlanStep};
use crate::query::{bind_constants, QueryGraph};
use crate::storage::Store;

pub const DEFAULT_ROW_BUDGET: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel { workers: usize },
}

/// What happened at one plan step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepReport {
    pub ordinal: usize,
    pub join_vars: Vec<String>,
    pub left_rows: usize,
    pub right_rows: usize,
    /// Sum of pre-allocated row counts; zero for scans and cross products.
    pub prealloc_total: u64,
    pub rows: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExecutionReport {
    pub steps: Vec<StepReport>,
    pub preparations: usize,
    pub uses: usize,
    pub elapsed: Duration,
}

impl ExecutionReport {
    /// Rows produced by every step after the first.
    pub fn intermediate_rows(&self) -> u64 {
        self.steps.iter().skip(1).map(|s| s.rows as u64).sum()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("step\tordinal\tjoin_vars\trows\tprealloc\tmicros\n");
        for (i, s) in self.steps.iter().enumerate() {
            let vars = if s.join_vars.is_empty() {
                "-".to_owned()
            } else {
                s.join_vars
                    .iter()
                    .map(|v| format!("?{v}"))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                i + 1,
                s.ordinal,
                vars,
                s.rows,
                s.prealloc_total,
                s.elapsed.as_micros()
            );
        }
        let _ = writeln!(out, "preparations\t{}", self.preparations);
        let _ = writeln!(out, "uses\t{}", self.uses);
        let _ = writeln!(out, "intermediate_rows\t{}", self.intermediate_rows());
        let _ = writeln!(out, "total_micros\t{}", self.elapsed.as_micros());
        out
    }
}

/// The inputs and bookkeeping of one join, kept when tracing is on.
#[derive(Clone, Debug)]
pub struct JoinTrace {
    pub step: usize,
    pub left: BindingTable,
    pub right: BindingTable,
    /// Column of `right` holding the first join variable.
    pub right_key: usize,
    pub join_vars: Vec<String>,
    pub prealloc: PreallocPlan,
    pub emitted: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct QueryResult {
    /// Rows over the projected variables, in SELECT order.
    pub table: BindingTable,
    pub report: ExecutionReport,
    pub traces: Vec<JoinTrace>,
}

impl QueryResult {
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn decoded_rows<'d>(
        &self,
        dict: &'d TermDictionary,
    ) -> Result<Vec<Vec<&'d str>>, DictionaryError> {
        self.table.decode(dict)
    }
}

pub struct Engine<'s> {
    store: &'s Store,
    row_budget: u64,
    trace: bool,
    /// Worker pools by thread count, built on first use.
    pools: Mutex<HashMap<usize, Arc<ThreadPool>>>,
}

impl<'s> Engine<'s> {
    pub fn new(store: &'s Store) -> Self {
        Engine {
            store,
            row_budget: DEFAULT_ROW_BUDGET,
            trace: false,
            pools: Mutex::new(HashMap::new()),
        }
    }

    /// Largest number of rows a single join may allocate.
    pub fn with_row_budget(mut self, budget: u64) -> Self {
        self.row_budget = budget;
        self
    }

    /// Keeps a copy of every join's inputs in the result.
    pub fn with_trace(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }

    pub fn store(&self) -> &'s Store {
        self.store
    }

    pub fn plan(&self, query: &QueryGraph) -> Result<Plan, Error> {
        let bound = bind_constants(query, self.store.dictionary());
        Ok(plan(&bound, self.store.stats())?)
    }

    pub fn run(&self, query: &QueryGraph, mode: ExecMode) -> Result<QueryResult, Error> {
        let plan = self.plan(query)?;
        Ok(self.execute(&plan, mode)?)
    }

    pub fn execute(&self, plan: &Plan, mode: ExecMode) -> Result<QueryResult, ExecError> {
        let (first, rest) = plan.steps.split_first().ok_or(ExecError::EmptyPlan)?;
        let pool = match mode {
            ExecMode::Sequential => None,
            ExecMode::Parallel { workers } => Some(self.pool(workers)?),
        };
        let started = Instant::now();
        let mut cache = MatrixCache::new(self.store);
        cache.mark(plan);
        let mut report = ExecutionReport::default();
        let mut traces = Vec::new();

        let t0 = Instant::now();
        let mut current = scan(&first.pattern, cache.get(first.pattern.predicate));
        report.steps.push(StepReport {
            ordinal: first.pattern.ordinal(),
            join_vars: Vec::new(),
            left_rows: 0,
            right_rows: current.len(),
            prealloc_total: 0,
            rows: current.len(),
            elapsed: t0.elapsed(),
        });

        for (i, step) in rest.iter().enumerate() {
            let t0 = Instant::now();
            let step_no = i + 2;
            let (next, right_rows, prealloc_total) = self
                .step(
                    &current,
                    step,
                    &mut cache,
                    pool.as_deref(),
                    step_no,
                    &mut traces,
                )
                .map_err(|e| match e {
                    ExecError::RowBudget { rows, budget, .. } => ExecError::RowBudget {
                        step: step_no,
                        rows,
                        budget,
                    },
                    e => e,
                })?;
            report.steps.push(StepReport {
                ordinal: step.pattern.ordinal(),
                join_vars: step.join_vars.clone(),
                left_rows: current.len(),
                right_rows,
                prealloc_total,
                rows: next.len(),
                elapsed: t0.elapsed(),
            });
            current = next;
        }

        let mut table = current.project(&plan.projection);
        if plan.distinct {
            table = table.distinct();
        }
        report.preparations = cache.preparations();
        report.uses = cache.uses();
        report.elapsed = started.elapsed();
        Ok(QueryResult {
            table,
            report,
            traces,
        })
    }

    fn pool(&self, workers: usize) -> Result<Arc<ThreadPool>, ExecError> {
        if workers == 0 {
            return Err(ExecError::NoWorkers);
        }
        let mut pools = self.pools.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(pool) = pools.get(&workers) {
            return Ok(Arc::clone(pool));
        }
        let pool = ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| ExecError::Pool(e.to_string()))?;
        let pool = Arc::new(pool);
        pools.insert(workers, Arc::clone(&pool));
        Ok(pool)
    }

    fn step(
        &self,
        left: &BindingTable,
        step: &PlanStep,
        cache: &mut MatrixCache<'s>,
        pool: Option<&ThreadPool>,
        step_no: usize,
        traces: &mut Vec<JoinTrace>,
    ) -> Result<(BindingTable, usize, u64), ExecError> {
        let matrix = cache.get(step.pattern.predicate);
        let shared: Vec<String> = left
            .schema()
            .iter()
            .filter(|v| step.pattern.variables().contains(&v.as_str()))
            .cloned()
            .collect();

        if left.is_empty() {
            let mut schema = left.schema().to_vec();
            for v in step.pattern.variables() {
                if !schema.iter().any(|s| s == v) {
                    schema.push(v.to_owned());
                }
            }
            return Ok((BindingTable::empty(schema), 0, 0));
        }

        let Some(key) = shared.first() else {
            let right = scan(&step.pattern, matrix);
            let n = right.len();
            return Ok((cross_product(left, &right, self.row_budget)?, n, 0));
        };
        let right = IndexedRelation::for_pattern(&step.pattern, matrix, key)?;
        let outcome = match pool {
            None => join::join_sequential(left, &right, &shared, self.row_budget)?,
            Some(pool) => join::join_parallel(left, &right, &shared, pool, self.row_budget)?,
        };
        if self.trace {
            traces.push(JoinTrace {
                step: step_no,
                left: left.clone(),
                right: right.to_table(),
                right_key: right.key_col(),
                join_vars: shared.clone(),
                prealloc: outcome.prealloc.clone(),
                emitted: outcome.emitted.clone(),
            });
        }
        Ok((outcome.table, right.len(), outcome.prealloc.total))
    }
}
