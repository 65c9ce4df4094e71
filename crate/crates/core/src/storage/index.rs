use std::ops::Range;

use crate::dictionary::NodeId;
use crate::error::StorageError;

/// One non-empty row of a sparse matrix: its key, how many pairs it holds,
/// and where its run starts in the sorted pair list (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuxEntry {
    pub row: NodeId,
    pub num: usize,
    pub rpos: usize,
}

impl AuxEntry {
    /// 0-based index range of the run.
    pub fn span(&self) -> Range<usize> {
        self.rpos - 1..self.rpos - 1 + self.num
    }
}

/// Row index over a key-sorted list: the non-empty rows only, so its size
/// follows the number of distinct keys rather than the key domain.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuxArray {
    entries: Vec<AuxEntry>,
}

impl AuxArray {
    /// Indexes pairs by their first component.
    pub fn build(pairs: &[[NodeId; 2]]) -> Result<Self, StorageError> {
        Self::from_keys(pairs.iter().map(|p| p[0]))
    }

    /// Indexes a run-ordered key sequence. Keys must be non-decreasing.
    pub fn from_keys(keys: impl IntoIterator<Item = NodeId>) -> Result<Self, StorageError> {
        let mut entries: Vec<AuxEntry> = Vec::new();
        for (i, key) in keys.into_iter().enumerate() {
            match entries.last_mut() {
                Some(last) if last.row == key => last.num += 1,
                Some(last) if last.row > key => {
                    return Err(StorageError::Unsorted { position: i + 1 })
                }
                _ => entries.push(AuxEntry {
                    row: key,
                    num: 1,
                    rpos: i + 1,
                }),
            }
        }
        Ok(AuxArray { entries })
    }

    pub fn entries(&self) -> &[AuxEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn find(&self, key: NodeId) -> Option<&AuxEntry> {
        self.entries
            .binary_search_by_key(&key, |e| e.row)
            .ok()
            .map(|i| &self.entries[i])
    }

    /// Number of pairs under `key` (zero when the row is empty).
    pub fn num(&self, key: NodeId) -> usize {
        self.find(key).map_or(0, |e| e.num)
    }

    /// 0-based run of `key`; empty when the row is empty.
    pub fn span(&self, key: NodeId) -> Range<usize> {
        self.find(key).map_or(0..0, AuxEntry::span)
    }

    /// Total number of indexed pairs.
    pub fn total(&self) -> usize {
        self.entries.last().map_or(0, |e| e.rpos - 1 + e.num)
    }
}
