use std::borrow::Cow;
use std::collections::BTreeMap;
use std::ops::Range;

use rayon::prelude::*;
use rayon::ThreadPool;

use super::table::BindingTable;
use crate::dictionary::NodeId;
use crate::error::ExecError;
use crate::query::{BoundPattern, Slot};
use crate::storage::{AuxArray, Orientation, PredicateMatrix};

/// All bindings of one pattern against its predicate matrix. The schema is
/// the pattern's variables in (subject, object) order.
pub fn scan(pattern: &BoundPattern, matrix: Option<&PredicateMatrix>) -> BindingTable {
    let schema: Vec<String> = pattern.variables().iter().map(|v| v.to_string()).collect();
    let Some(m) = matrix.filter(|_| !pattern.is_unsatisfiable()) else {
        return BindingTable::empty(schema);
    };
    match (&pattern.subject, &pattern.object) {
        (Slot::Var(a), Slot::Var(b)) if a == b => {
            let data: Vec<NodeId> = m
                .so_pairs()
                .iter()
                .filter(|[s, o]| s == o)
                .map(|p| p[0])
                .collect();
            let rows = data.len();
            BindingTable::from_flat(schema, data, rows, Some(0))
        }
        (Slot::Var(_), Slot::Var(_)) => {
            let data = m.so_pairs().as_flattened().to_vec();
            BindingTable::from_flat(schema, data, m.len(), Some(0))
        }
        (Slot::Node(s), Slot::Var(_)) => {
            let data: Vec<NodeId> = m
                .row(Orientation::SubjectObject, *s)
                .iter()
                .map(|p| p[1])
                .collect();
            let rows = data.len();
            BindingTable::from_flat(schema, data, rows, Some(0))
        }
        (Slot::Var(_), Slot::Node(o)) => {
            let data: Vec<NodeId> = m
                .row(Orientation::ObjectSubject, *o)
                .iter()
                .map(|p| p[1])
                .collect();
            let rows = data.len();
            BindingTable::from_flat(schema, data, rows, Some(0))
        }
        (Slot::Node(s), Slot::Node(o)) => {
            let rows = usize::from(m.contains(*s, *o));
            BindingTable::from_flat(schema, Vec::new(), rows, None)
        }
        _ => BindingTable::empty(schema),
    }
}

/// The right-hand side of a join: rows grouped by a key column, with an
/// auxiliary row index over the key.
#[derive(Clone, Debug)]
pub struct IndexedRelation<'a> {
    schema: Vec<String>,
    data: Cow<'a, [NodeId]>,
    key_col: usize,
    index: Cow<'a, AuxArray>,
}

impl<'a> IndexedRelation<'a> {
    /// Borrows one orientation of a matrix directly: the key variable binds
    /// the row, `other` the column.
    pub fn from_matrix(
        matrix: &'a PredicateMatrix,
        orientation: Orientation,
        key: &str,
        other: &str,
    ) -> Self {
        let (pairs, index) = matrix.oriented(orientation);
        IndexedRelation {
            schema: vec![key.to_owned(), other.to_owned()],
            data: Cow::Borrowed(pairs.as_flattened()),
            key_col: 0,
            index: Cow::Borrowed(index),
        }
    }

    /// Indexes an owned table on one of its columns.
    pub fn from_table(mut table: BindingTable, key_col: usize) -> IndexedRelation<'static> {
        table.sort_by_column(key_col);
        let index = AuxArray::from_keys(table.rows().map(|r| r[key_col]))
            .expect("rows were just sorted on the key");
        IndexedRelation {
            data: Cow::Owned(table.flat().to_vec()),
            schema: table.schema().to_vec(),
            key_col,
            index: Cow::Owned(index),
        }
    }

    /// The relation for one plan step, keyed on `key`. Patterns with two
    /// distinct variable ends reuse the matrix's stored orientation.
    pub fn for_pattern(
        pattern: &BoundPattern,
        matrix: Option<&'a PredicateMatrix>,
        key: &str,
    ) -> Result<Self, ExecError> {
        if let (Slot::Var(s), Slot::Var(o), Some(m)) = (&pattern.subject, &pattern.object, matrix) {
            if s != o && !pattern.is_unsatisfiable() {
                if key == s {
                    return Ok(Self::from_matrix(m, Orientation::SubjectObject, s, o));
                } else if key == o {
                    return Ok(Self::from_matrix(m, Orientation::ObjectSubject, o, s));
                }
            }
        }
        let table = scan(pattern, matrix);
        let col = table
            .column_of(key)
            .ok_or_else(|| ExecError::MissingJoinVariable(key.to_owned()))?;
        Ok(Self::from_table(table, col))
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn arity(&self) -> usize {
        self.schema.len()
    }

    pub fn len(&self) -> usize {
        if self.schema.is_empty() {
            0
        } else {
            self.data.len() / self.arity()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn key_col(&self) -> usize {
        self.key_col
    }

    pub fn key_var(&self) -> &str {
        &self.schema[self.key_col]
    }

    pub fn index(&self) -> &AuxArray {
        &self.index
    }

    pub fn row(&self, i: usize) -> &[NodeId] {
        let a = self.arity();
        &self.data[i * a..(i + 1) * a]
    }

    /// Row indices whose key equals `key`.
    pub fn run(&self, key: NodeId) -> Range<usize> {
        self.index.span(key)
    }

    pub fn to_table(&self) -> BindingTable {
        BindingTable::from_flat(
            self.schema.clone(),
            self.data.to_vec(),
            self.len(),
            Some(self.key_col),
        )
    }
}

/// Column bookkeeping for one join.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinSpec {
    /// Left column of the first join variable.
    pub left_key: usize,
    /// Further (left column, right column) pairs that must agree.
    pub secondary: Vec<(usize, usize)>,
    /// Right columns appended to each output row.
    pub right_extra: Vec<usize>,
    pub out_schema: Vec<String>,
}

impl JoinSpec {
    /// The first join variable is the one that appears earliest in the left
    /// schema; the right relation must be keyed on it.
    pub fn new(
        left: &BindingTable,
        right: &IndexedRelation<'_>,
        join_vars: &[String],
    ) -> Result<JoinSpec, ExecError> {
        let mut cols = Vec::with_capacity(join_vars.len());
        for v in join_vars {
            let l = left
                .column_of(v)
                .ok_or_else(|| ExecError::MissingJoinVariable(v.clone()))?;
            let r = right
                .schema()
                .iter()
                .position(|x| x == v)
                .ok_or_else(|| ExecError::MissingJoinVariable(v.clone()))?;
            cols.push((l, r));
        }
        cols.sort_unstable();
        let Some(&(left_key, right_key)) = cols.first() else {
            return Err(ExecError::MissingJoinVariable(String::new()));
        };
        if right_key != right.key_col() {
            return Err(ExecError::KeyMismatch {
                expected: right.schema()[right_key].clone(),
                found: right.key_var().to_owned(),
            });
        }
        let right_extra: Vec<usize> = (0..right.arity())
            .filter(|c| !cols.iter().any(|&(_, r)| r == *c))
            .collect();
        let mut out_schema = left.schema().to_vec();
        out_schema.extend(right_extra.iter().map(|&c| right.schema()[c].clone()));
        Ok(JoinSpec {
            left_key,
            secondary: cols[1..].to_vec(),
            right_extra,
            out_schema,
        })
    }

    pub fn out_arity(&self) -> usize {
        self.out_schema.len()
    }

    /// Appends every output row of one left tuple; returns how many.
    fn emit(&self, lrow: &[NodeId], right: &IndexedRelation<'_>, out: &mut Vec<NodeId>) -> usize {
        let mut n = 0;
        for i in right.run(lrow[self.left_key]) {
            let rrow = right.row(i);
            if self.secondary.iter().all(|&(l, r)| lrow[l] == rrow[r]) {
                out.extend_from_slice(lrow);
                out.extend(self.right_extra.iter().map(|&c| rrow[c]));
                n += 1;
            }
        }
        n
    }

    /// Like `emit`, writing into a fixed slice.
    fn emit_into(
        &self,
        lrow: &[NodeId],
        right: &IndexedRelation<'_>,
        out: &mut [NodeId],
        mut pos: usize,
    ) -> usize {
        let a = self.out_arity();
        let start = pos;
        for i in right.run(lrow[self.left_key]) {
            let rrow = right.row(i);
            if self.secondary.iter().all(|&(l, r)| lrow[l] == rrow[r]) {
                let dst = &mut out[pos * a..(pos + 1) * a];
                dst[..lrow.len()].copy_from_slice(lrow);
                for (d, &c) in dst[lrow.len()..].iter_mut().zip(&self.right_extra) {
                    *d = rrow[c];
                }
                pos += 1;
            }
        }
        pos - start
    }
}

/// Output sizes computed before a join runs. Left tuples are grouped into
/// maximal runs of equal values in their first column; `counts[i]` is the
/// number of right rows whose key matches some tuple of group `i` (before
/// secondary join variables filter them), and `offsets` are the exclusive
/// prefix sums of `counts`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreallocPlan {
    pub groups: Vec<Range<usize>>,
    pub counts: Vec<u64>,
    pub offsets: Vec<u64>,
    pub total: u64,
}

pub fn preallocate(
    left: &BindingTable,
    right: &IndexedRelation<'_>,
    spec: &JoinSpec,
) -> PreallocPlan {
    let groups = left_groups(left);
    let counts: Vec<u64> = groups
        .iter()
        .map(|g| {
            g.clone()
                .map(|i| right.index().num(left.row(i)[spec.left_key]) as u64)
                .sum()
        })
        .collect();
    let mut offsets = Vec::with_capacity(counts.len());
    let mut total = 0u64;
    for &c in &counts {
        offsets.push(total);
        total += c;
    }
    PreallocPlan {
        groups,
        counts,
        offsets,
        total,
    }
}

fn left_groups(left: &BindingTable) -> Vec<Range<usize>> {
    let n = left.len();
    if n == 0 {
        return Vec::new();
    }
    if left.arity() == 0 {
        return std::iter::once(0..n).collect();
    }
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..n {
        if left.row(i)[0] != left.row(start)[0] {
            groups.push(start..i);
            start = i;
        }
    }
    groups.push(start..n);
    groups
}

/// A finished join plus the bookkeeping that produced it.
#[derive(Clone, Debug)]
pub struct JoinOutcome {
    pub table: BindingTable,
    pub prealloc: PreallocPlan,
    /// Rows actually written per left group.
    pub emitted: Vec<usize>,
}

/// Sequential SM-join: for each left tuple in order, the matching run of
/// the right relation, filtered on the remaining join variables.
pub fn sm_join(
    left: &BindingTable,
    right: &IndexedRelation<'_>,
    join_vars: &[String],
) -> Result<BindingTable, ExecError> {
    Ok(join_sequential(left, right, join_vars, u64::MAX)?.table)
}

pub(crate) fn join_sequential(
    left: &BindingTable,
    right: &IndexedRelation<'_>,
    join_vars: &[String],
    budget: u64,
) -> Result<JoinOutcome, ExecError> {
    let spec = JoinSpec::new(left, right, join_vars)?;
    let prealloc = preallocate(left, right, &spec);
    check_budget(prealloc.total, budget)?;
    let mut data = Vec::with_capacity(prealloc.total as usize * spec.out_arity());
    let mut emitted = Vec::with_capacity(prealloc.groups.len());
    for g in &prealloc.groups {
        let mut n = 0;
        for i in g.clone() {
            n += spec.emit(left.row(i), right, &mut data);
        }
        emitted.push(n);
    }
    let rows = emitted.iter().sum();
    let sorted_by = left.sorted_by();
    Ok(JoinOutcome {
        table: BindingTable::from_flat(spec.out_schema, data, rows, sorted_by),
        prealloc,
        emitted,
    })
}

/// Parallel SM-join. Every left group writes into its own pre-allocated
/// region of one output buffer; the regions are then compacted in group
/// order, so the result is row-for-row identical to [`sm_join`].
pub fn parallel_sm_join(
    left: &BindingTable,
    right: &IndexedRelation<'_>,
    join_vars: &[String],
    pool: &ThreadPool,
) -> Result<BindingTable, ExecError> {
    Ok(join_parallel(left, right, join_vars, pool, u64::MAX)?.table)
}

pub(crate) fn join_parallel(
    left: &BindingTable,
    right: &IndexedRelation<'_>,
    join_vars: &[String],
    pool: &ThreadPool,
    budget: u64,
) -> Result<JoinOutcome, ExecError> {
    let spec = JoinSpec::new(left, right, join_vars)?;
    let prealloc = preallocate(left, right, &spec);
    check_budget(prealloc.total, budget)?;
    let a = spec.out_arity();
    let mut data = vec![0 as NodeId; prealloc.total as usize * a];

    let mut regions: Vec<&mut [NodeId]> = Vec::with_capacity(prealloc.groups.len());
    let mut rest = data.as_mut_slice();
    for &n in &prealloc.counts {
        let (head, tail) = rest.split_at_mut(n as usize * a);
        regions.push(head);
        rest = tail;
    }
    let emitted: Vec<usize> = pool.install(|| {
        prealloc
            .groups
            .par_iter()
            .zip(regions.par_iter_mut())
            .with_min_len(16)
            .map(|(g, region)| {
                let mut pos = 0;
                for i in g.clone() {
                    pos += spec.emit_into(left.row(i), right, region, pos);
                }
                pos
            })
            .collect()
    });

    let mut cursor = 0;
    for (i, &e) in emitted.iter().enumerate() {
        let start = prealloc.offsets[i] as usize * a;
        if start != cursor {
            data.copy_within(start..start + e * a, cursor);
        }
        cursor += e * a;
    }
    data.truncate(cursor);
    let rows = emitted.iter().sum();
    Ok(JoinOutcome {
        table: BindingTable::from_flat(spec.out_schema, data, rows, left.sorted_by()),
        prealloc,
        emitted,
    })
}

/// Output schema and, per distinct output row, its multiplicity.
pub type MatchCounts = (Vec<String>, Vec<(Vec<NodeId>, u64)>);

/// Counting variant of the join: instead of materializing rows, counts how
/// many ways each binding of the non-join variables is produced.
pub fn sm_join_counts(
    left: &BindingTable,
    right: &IndexedRelation<'_>,
    join_vars: &[String],
) -> Result<MatchCounts, ExecError> {
    let spec = JoinSpec::new(left, right, join_vars)?;
    let joined = join_sequential(left, right, join_vars, u64::MAX)?.table;
    let keep: Vec<String> = spec
        .out_schema
        .iter()
        .filter(|v| !join_vars.contains(v))
        .cloned()
        .collect();
    let projected = joined.project(&keep);
    let mut counts: BTreeMap<Vec<NodeId>, u64> = BTreeMap::new();
    for row in projected.rows() {
        *counts.entry(row.to_vec()).or_default() += 1;
    }
    Ok((keep, counts.into_iter().collect()))
}

/// Every pairing of a left row with a right row, left-major.
pub fn cross_product(
    left: &BindingTable,
    right: &BindingTable,
    budget: u64,
) -> Result<BindingTable, ExecError> {
    let rows = (left.len() as u64).saturating_mul(right.len() as u64);
    check_budget(rows, budget)?;
    let mut schema = left.schema().to_vec();
    schema.extend(right.schema().iter().cloned());
    let mut data = Vec::with_capacity(rows as usize * schema.len());
    for l in left.rows() {
        for r in right.rows() {
            data.extend_from_slice(l);
            data.extend_from_slice(r);
        }
    }
    Ok(BindingTable::from_flat(
        schema,
        data,
        rows as usize,
        left.sorted_by(),
    ))
}

fn check_budget(rows: u64, budget: u64) -> Result<(), ExecError> {
    if rows > budget {
        Err(ExecError::RowBudget {
            step: 0,
            rows,
            budget,
        })
    } else {
        Ok(())
    }
}
