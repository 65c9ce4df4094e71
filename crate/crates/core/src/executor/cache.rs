use std::collections::HashMap;

use crate::dictionary::PredicateId;
use crate::planner::Plan;
use crate::storage::{PredicateMatrix, Store};

/// Hands out predicate matrices to plan steps, preparing each predicate
/// once however many steps reference it.
#[derive(Debug)]
pub struct MatrixCache<'s> {
    store: &'s Store,
    marks: HashMap<PredicateId, usize>,
    prepared: HashMap<PredicateId, Option<&'s PredicateMatrix>>,
    preparations: usize,
    uses: usize,
}

impl<'s> MatrixCache<'s> {
    pub fn new(store: &'s Store) -> Self {
        MatrixCache {
            store,
            marks: HashMap::new(),
            prepared: HashMap::new(),
            preparations: 0,
            uses: 0,
        }
    }

    /// Counts how many steps of `plan` reference each predicate.
    pub fn mark(&mut self, plan: &Plan) {
        for step in &plan.steps {
            if let Some(pid) = step.pattern.predicate {
                *self.marks.entry(pid).or_default() += 1;
            }
        }
    }

    /// Number of steps of the marked plan that use `pid`.
    pub fn marked(&self, pid: PredicateId) -> usize {
        self.marks.get(&pid).copied().unwrap_or(0)
    }

    /// Predicates marked for reuse by more than one step.
    pub fn shared(&self) -> usize {
        self.marks.values().filter(|&&k| k > 1).count()
    }

    /// Returns the matrix of `pid`, preparing it on first request. Returns
    /// `None` for predicates without a matrix.
    pub fn get(&mut self, pid: Option<PredicateId>) -> Option<&'s PredicateMatrix> {
        self.uses += 1;
        let pid = pid?;
        let store = self.store;
        let preparations = &mut self.preparations;
        *self.prepared.entry(pid).or_insert_with(|| {
            *preparations += 1;
            store.matrix(pid)
        })
    }

    pub fn preparations(&self) -> usize {
        self.preparations
    }

    pub fn uses(&self) -> usize {
        self.uses
    }
}
