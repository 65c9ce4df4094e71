//! Join ordering by predicate statistics.
//!
//! Patterns are sorted by estimated cardinality. The smallest goes first;
//! after that the planner always takes the cheapest remaining pattern that
//! touches a node (variable or constant) already in the plan, so Cartesian
//! products only appear when the query graph itself is disconnected.

use std::collections::HashSet;
use std::fmt;

use crate::error::PlanError;
use crate::query::{BoundPattern, BoundQuery, QueryTerm, Slot};
use crate::storage::PredicateStats;

/// Bounds on the total number of intermediate tuples of a join sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostBounds {
    pub lower: u64,
    pub upper: u64,
}

/// For relation sizes `c1..cn` joined left to right:
/// `lower = sum_k min(c1..ck)` and `upper = sum_k c1*...*ck` over `k >= 2`.
/// A single relation gives `(c1, c1)`. Arithmetic saturates.
pub fn delta_bounds(cards: &[u64]) -> Result<CostBounds, PlanError> {
    let (&first, rest) = cards.split_first().ok_or(PlanError::EmptyCardinalities)?;
    if rest.is_empty() {
        return Ok(CostBounds {
            lower: first,
            upper: first,
        });
    }
    let (mut min, mut product) = (first, first);
    let (mut lower, mut upper) = (0u64, 0u64);
    for &c in rest {
        min = min.min(c);
        product = product.saturating_mul(c);
        lower = lower.saturating_add(min);
        upper = upper.saturating_add(product);
    }
    Ok(CostBounds { lower, upper })
}

/// Estimated matches of one pattern: the predicate's cardinality, divided
/// (rounding up) by its distinct subjects when the subject is constant and
/// by its distinct objects when the object is constant.
pub fn estimate_cardinality(pattern: &BoundPattern, stats: &PredicateStats) -> u64 {
    if pattern.is_unsatisfiable() {
        return 0;
    }
    let Some(stat) = pattern.predicate.and_then(|p| stats.get(p)) else {
        return 0;
    };
    let mut divisor = 1u64;
    if matches!(pattern.subject, Slot::Node(_)) {
        divisor = divisor.saturating_mul(stat.distinct_subjects.max(1));
    }
    if matches!(pattern.object, Slot::Node(_)) {
        divisor = divisor.saturating_mul(stat.distinct_objects.max(1));
    }
    let estimate = stat.cardinality.div_ceil(divisor);
    if divisor > 1 {
        estimate.max(1)
    } else {
        estimate
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanWarning {
    /// The step shares no variable with earlier steps and is evaluated as
    /// a cross product.
    CrossProduct { ordinal: usize },
}

impl fmt::Display for PlanWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanWarning::CrossProduct { ordinal } => write!(
                f,
                "pattern {ordinal} shares no variable with earlier patterns; \
                 it will be joined as a Cartesian product"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanStep {
    pub pattern: BoundPattern,
    pub estimate: u64,
    /// Variables this step shares with earlier steps, in order of first
    /// appearance; the first is the key of the join.
    pub join_vars: Vec<String>,
    /// Bounds over the estimates of steps up to and including this one.
    pub bounds: CostBounds,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
    pub projection: Vec<String>,
    pub distinct: bool,
    pub warnings: Vec<PlanWarning>,
}

impl Plan {
    pub fn estimates(&self) -> Vec<u64> {
        self.steps.iter().map(|s| s.estimate).collect()
    }

    /// One tab-separated line per step: ordinal, pattern, estimate, join
    /// variables, cumulative lower and upper bound.
    pub fn explain(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            let vars = if step.join_vars.is_empty() {
                "-".to_owned()
            } else {
                step.join_vars
                    .iter()
                    .map(|v| format!("?{v}"))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                step.pattern.ordinal(),
                step.pattern.source,
                step.estimate,
                vars,
                step.bounds.lower,
                step.bounds.upper
            ));
        }
        out
    }
}

pub fn plan(query: &BoundQuery, stats: &PredicateStats) -> Result<Plan, PlanError> {
    if query.patterns.is_empty() {
        return Err(PlanError::EmptyQuery);
    }
    let estimates: Vec<u64> = query
        .patterns
        .iter()
        .map(|p| estimate_cardinality(p, stats))
        .collect();
    let mut residual: Vec<usize> = (0..query.patterns.len()).collect();
    residual.sort_by_key(|&i| (estimates[i], query.patterns[i].ordinal()));

    let mut order = Vec::with_capacity(residual.len());
    let mut nodes: HashSet<&QueryTerm> = HashSet::new();
    while !residual.is_empty() {
        let pos = residual
            .iter()
            .position(|&i| {
                query.patterns[i]
                    .endpoints()
                    .iter()
                    .any(|t| nodes.contains(t))
            })
            .unwrap_or(0);
        let chosen = residual.remove(pos);
        nodes.extend(query.patterns[chosen].endpoints());
        order.push(chosen);
    }

    let mut steps: Vec<PlanStep> = Vec::with_capacity(order.len());
    let mut warnings = Vec::new();
    let mut seen_vars: Vec<&str> = Vec::new();
    let mut cards = Vec::with_capacity(order.len());
    for &i in &order {
        let pattern = &query.patterns[i];
        let vars = pattern.variables();
        let mut join_vars: Vec<String> = seen_vars
            .iter()
            .filter(|v| vars.contains(v))
            .map(|v| v.to_string())
            .collect();
        join_vars.dedup();
        if !steps.is_empty() && join_vars.is_empty() {
            warnings.push(PlanWarning::CrossProduct {
                ordinal: pattern.ordinal(),
            });
        }
        for v in vars {
            if !seen_vars.contains(&v) {
                seen_vars.push(v);
            }
        }
        cards.push(estimates[i]);
        steps.push(PlanStep {
            pattern: pattern.clone(),
            estimate: estimates[i],
            join_vars,
            bounds: delta_bounds(&cards)?,
        });
    }
    Ok(Plan {
        steps,
        projection: query.projection.clone(),
        distinct: query.distinct,
        warnings,
    })
}
