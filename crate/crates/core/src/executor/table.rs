use std::collections::HashSet;

use crate::dictionary::{NodeId, TermDictionary};
use crate::error::DictionaryError;

/// An n-ary relation over node ids with bag semantics. Rows are stored
/// flat, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BindingTable {
    schema: Vec<String>,
    data: Vec<NodeId>,
    rows: usize,
    sorted_by: Option<usize>,
}

impl BindingTable {
    pub fn empty(schema: Vec<String>) -> Self {
        Self::from_flat(schema, Vec::new(), 0, None)
    }

    /// Builds a table from explicit rows.
    ///
    /// # Panics
    ///
    /// If a row's length differs from the schema's, or a variable repeats.
    pub fn from_rows<R: AsRef<[NodeId]>>(
        schema: Vec<String>,
        rows: impl IntoIterator<Item = R>,
    ) -> Self {
        let arity = schema.len();
        let mut data = Vec::new();
        let mut count = 0;
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), arity, "row arity does not match schema");
            data.extend_from_slice(row);
            count += 1;
        }
        Self::from_flat(schema, data, count, None)
    }

    pub(crate) fn from_flat(
        schema: Vec<String>,
        data: Vec<NodeId>,
        rows: usize,
        sorted_by: Option<usize>,
    ) -> Self {
        debug_assert_eq!(data.len(), rows * schema.len());
        debug_assert_eq!(
            schema.iter().collect::<HashSet<_>>().len(),
            schema.len(),
            "duplicate variable in schema"
        );
        BindingTable {
            schema,
            data,
            rows,
            sorted_by,
        }
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn arity(&self) -> usize {
        self.schema.len()
    }

    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    /// Column the rows are known to be non-decreasing on.
    pub fn sorted_by(&self) -> Option<usize> {
        self.sorted_by
    }

    pub fn column_of(&self, var: &str) -> Option<usize> {
        self.schema.iter().position(|v| v == var)
    }

    pub fn flat(&self) -> &[NodeId] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[NodeId] {
        let a = self.arity();
        &self.data[i * a..(i + 1) * a]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[NodeId]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    /// Stable sort on one column.
    pub fn sort_by_column(&mut self, col: usize) {
        if self.sorted_by == Some(col) {
            return;
        }
        let a = self.arity();
        let mut order: Vec<usize> = (0..self.rows).collect();
        order.sort_by_key(|&i| self.data[i * a + col]);
        let mut data = Vec::with_capacity(self.data.len());
        for i in order {
            data.extend_from_slice(&self.data[i * a..(i + 1) * a]);
        }
        self.data = data;
        self.sorted_by = Some(col);
    }

    /// Keeps the given variables, in the given order.
    ///
    /// # Panics
    ///
    /// If a variable is not in the schema.
    pub fn project(&self, vars: &[String]) -> BindingTable {
        let cols: Vec<usize> = vars
            .iter()
            .map(|v| {
                self.column_of(v)
                    .unwrap_or_else(|| panic!("?{v} is not in the schema"))
            })
            .collect();
        if cols.iter().copied().eq(0..self.arity()) {
            return self.clone();
        }
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for row in self.rows() {
            data.extend(cols.iter().map(|&c| row[c]));
        }
        let sorted_by = self
            .sorted_by
            .and_then(|s| cols.iter().position(|&c| c == s));
        BindingTable::from_flat(vars.to_vec(), data, self.rows, sorted_by)
    }

    /// Drops repeated rows, keeping first occurrences in order.
    pub fn distinct(&self) -> BindingTable {
        let mut seen: HashSet<&[NodeId]> = HashSet::with_capacity(self.rows);
        let mut data = Vec::new();
        let mut rows = 0;
        for row in self.rows() {
            if seen.insert(row) {
                data.extend_from_slice(row);
                rows += 1;
            }
        }
        BindingTable::from_flat(self.schema.clone(), data, rows, self.sorted_by)
    }

    /// Rows sorted lexicographically: a canonical form for bag comparison.
    pub fn sorted_rows(&self) -> Vec<Vec<NodeId>> {
        let mut rows: Vec<Vec<NodeId>> = self.rows().map(<[NodeId]>::to_vec).collect();
        rows.sort_unstable();
        rows
    }

    pub fn decode<'d>(
        &self,
        dict: &'d TermDictionary,
    ) -> Result<Vec<Vec<&'d str>>, DictionaryError> {
        self.rows()
            .map(|row| row.iter().map(|&id| dict.decode_node(id)).collect())
            .collect()
    }
}
