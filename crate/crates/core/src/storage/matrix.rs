use super::index::AuxArray;
use crate::dictionary::{NodeId, PredicateId};

/// Which endpoint a pair list is keyed on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// `(subject, object)` pairs, indexed by subject.
    SubjectObject,
    /// `(object, subject)` pairs, indexed by object.
    ObjectSubject,
}

/// The edge set of one predicate as a boolean sparse matrix, kept in both
/// orientations so either endpoint has a row index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateMatrix {
    pid: PredicateId,
    so: Vec<[NodeId; 2]>,
    os: Vec<[NodeId; 2]>,
    so_index: AuxArray,
    os_index: AuxArray,
}

impl PredicateMatrix {
    /// Builds from `(s, o)` pairs in any order; duplicates are dropped.
    pub fn from_pairs(pid: PredicateId, mut so: Vec<[NodeId; 2]>) -> Self {
        so.sort_unstable();
        so.dedup();
        let mut os: Vec<[NodeId; 2]> = so.iter().map(|&[s, o]| [o, s]).collect();
        os.sort_unstable();
        let so_index = AuxArray::build(&so).expect("sorted");
        let os_index = AuxArray::build(&os).expect("sorted");
        PredicateMatrix {
            pid,
            so,
            os,
            so_index,
            os_index,
        }
    }

    /// Builds from already sorted pair lists, checking that both are
    /// strictly sorted and describe the same edge set.
    pub(crate) fn from_sorted(
        pid: PredicateId,
        so: Vec<[NodeId; 2]>,
        os: Vec<[NodeId; 2]>,
    ) -> Result<Self, String> {
        for (name, list) in [("so", &so), ("os", &os)] {
            if let Some(i) = list.windows(2).position(|w| w[0] >= w[1]) {
                return Err(format!("{name} pairs not strictly sorted at {}", i + 2));
            }
        }
        if so.len() != os.len() {
            return Err("so and os pair counts differ".into());
        }
        let mut swapped: Vec<[NodeId; 2]> = so.iter().map(|&[s, o]| [o, s]).collect();
        swapped.sort_unstable();
        if swapped != os {
            return Err("so and os pairs describe different edges".into());
        }
        let so_index = AuxArray::build(&so).map_err(|e| e.to_string())?;
        let os_index = AuxArray::build(&os).map_err(|e| e.to_string())?;
        Ok(PredicateMatrix {
            pid,
            so,
            os,
            so_index,
            os_index,
        })
    }

    pub fn pid(&self) -> PredicateId {
        self.pid
    }

    pub fn len(&self) -> usize {
        self.so.len()
    }

    pub fn is_empty(&self) -> bool {
        self.so.is_empty()
    }

    pub fn so_pairs(&self) -> &[[NodeId; 2]] {
        &self.so
    }

    pub fn os_pairs(&self) -> &[[NodeId; 2]] {
        &self.os
    }

    pub fn so_index(&self) -> &AuxArray {
        &self.so_index
    }

    pub fn os_index(&self) -> &AuxArray {
        &self.os_index
    }

    pub fn oriented(&self, orientation: Orientation) -> (&[[NodeId; 2]], &AuxArray) {
        match orientation {
            Orientation::SubjectObject => (&self.so, &self.so_index),
            Orientation::ObjectSubject => (&self.os, &self.os_index),
        }
    }

    /// The run of pairs whose key (in the given orientation) is `key`.
    pub fn row(&self, orientation: Orientation, key: NodeId) -> &[[NodeId; 2]] {
        let (pairs, index) = self.oriented(orientation);
        &pairs[index.span(key)]
    }

    pub fn contains(&self, s: NodeId, o: NodeId) -> bool {
        self.row(Orientation::SubjectObject, s)
            .binary_search(&[s, o])
            .is_ok()
    }
}

impl From<&PredicateMatrix> for super::PredicateStat {
    fn from(m: &PredicateMatrix) -> Self {
        super::PredicateStat {
            cardinality: m.len() as u64,
            distinct_subjects: m.so_index.len() as u64,
            distinct_objects: m.os_index.len() as u64,
        }
    }
}
