//! Predicate-partitioned sparse-matrix storage.
//!
//! Every predicate owns one [`PredicateMatrix`]: its `(s, o)` edge set
//! sorted both ways with an [`AuxArray`] row index per orientation. Only
//! non-zero entries are stored, so a store holds two integers per distinct
//! triple and orientation.

mod histogram;
mod index;
mod matrix;
mod persist;

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use rayon::prelude::*;

pub use histogram::{default_bounds, DegreeBucket, DegreeHistogram};
pub use index::{AuxArray, AuxEntry};
pub use matrix::{Orientation, PredicateMatrix};
pub use persist::{MAGIC, STATS_HEADER};

use crate::dictionary::{NodeId, PredicateId, TermDictionary};
use crate::error::{Error, StorageError};
use crate::parser::{NTriplesReader, RawTriple, ReadError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EncodedTriple {
    pub s: NodeId,
    pub p: PredicateId,
    pub o: NodeId,
}

impl EncodedTriple {
    pub fn new(s: NodeId, p: u64, o: NodeId) -> Self {
        EncodedTriple {
            s,
            p: PredicateId(p),
            o,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PredicateStat {
    pub cardinality: u64,
    pub distinct_subjects: u64,
    pub distinct_objects: u64,
}

/// Per-predicate counts used by the planner.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PredicateStats {
    by_pid: BTreeMap<PredicateId, PredicateStat>,
}

impl PredicateStats {
    pub fn get(&self, pid: PredicateId) -> Option<&PredicateStat> {
        self.by_pid.get(&pid)
    }

    pub fn insert(&mut self, pid: PredicateId, stat: PredicateStat) {
        self.by_pid.insert(pid, stat);
    }

    pub fn iter(&self) -> impl Iterator<Item = (PredicateId, &PredicateStat)> {
        self.by_pid.iter().map(|(&p, s)| (p, s))
    }

    pub fn len(&self) -> usize {
        self.by_pid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_pid.is_empty()
    }

    /// The `stats.tsv` rendering: a header, then one line per predicate.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(STATS_HEADER);
        out.push('\n');
        for (pid, s) in self.iter() {
            out.push_str(&format!(
                "{pid}\t{}\t{}\t{}\n",
                s.cardinality, s.distinct_subjects, s.distinct_objects
            ));
        }
        out
    }
}

/// An immutable, query-ready triple store.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Store {
    dict: TermDictionary,
    matrices: BTreeMap<PredicateId, PredicateMatrix>,
    stats: PredicateStats,
    triple_count: u64,
}

impl Store {
    /// Partitions encoded triples by predicate and builds one matrix per
    /// predicate. Duplicate triples are stored once.
    pub fn build(
        dict: TermDictionary,
        triples: impl IntoIterator<Item = EncodedTriple>,
    ) -> Result<Store, StorageError> {
        let nodes = dict.node_count() as u64;
        let preds = dict.predicate_count() as u64;
        let mut parts: HashMap<PredicateId, Vec<[NodeId; 2]>> = HashMap::new();
        for t in triples {
            let valid = (1..=nodes).contains(&t.s)
                && (1..=nodes).contains(&t.o)
                && (1..=preds).contains(&t.p.0);
            if !valid {
                return Err(StorageError::InvalidTriple {
                    s: t.s,
                    p: t.p.0,
                    o: t.o,
                });
            }
            parts.entry(t.p).or_default().push([t.s, t.o]);
        }
        Ok(Self::from_partitions(dict, parts))
    }

    fn from_partitions(
        dict: TermDictionary,
        parts: HashMap<PredicateId, Vec<[NodeId; 2]>>,
    ) -> Store {
        let built: Vec<PredicateMatrix> = parts
            .into_par_iter()
            .map(|(pid, pairs)| PredicateMatrix::from_pairs(pid, pairs))
            .collect();
        Self::from_matrices(dict, built)
    }

    pub(crate) fn from_matrices(
        dict: TermDictionary,
        matrices: impl IntoIterator<Item = PredicateMatrix>,
    ) -> Store {
        let matrices: BTreeMap<_, _> = matrices.into_iter().map(|m| (m.pid(), m)).collect();
        let mut stats = PredicateStats::default();
        for (&pid, m) in &matrices {
            stats.insert(pid, PredicateStat::from(m));
        }
        let triple_count = matrices.values().map(|m| m.len() as u64).sum();
        Store {
            dict,
            matrices,
            stats,
            triple_count,
        }
    }

    /// Reads N-Triples, encoding terms in first-occurrence order.
    pub fn from_ntriples<R: BufRead>(input: R) -> Result<Store, Error> {
        let mut builder = StoreBuilder::new();
        for item in NTriplesReader::new(input) {
            match item {
                Ok(t) => builder.add(&t),
                Err(ReadError::Parse(e)) => return Err(e.into()),
                Err(ReadError::Io(e)) => {
                    return Err(StorageError::io("<input>", e).into());
                }
            }
        }
        Ok(builder.finish())
    }

    pub fn dictionary(&self) -> &TermDictionary {
        &self.dict
    }

    pub fn stats(&self) -> &PredicateStats {
        &self.stats
    }

    /// Number of distinct triples.
    pub fn triple_count(&self) -> u64 {
        self.triple_count
    }

    pub fn node_count(&self) -> usize {
        self.dict.node_count()
    }

    pub fn predicate_count(&self) -> usize {
        self.dict.predicate_count()
    }

    pub fn matrix(&self, pid: PredicateId) -> Option<&PredicateMatrix> {
        self.matrices.get(&pid)
    }

    pub fn matrix_for(&self, pid: PredicateId) -> Result<&PredicateMatrix, StorageError> {
        self.matrix(pid)
            .ok_or(StorageError::UnknownPredicate(pid.0))
    }

    pub fn matrices(&self) -> impl Iterator<Item = &PredicateMatrix> {
        self.matrices.values()
    }

    /// Integers held by the `(s, o)` pair lists of all predicates.
    pub fn pair_integer_count(&self) -> u64 {
        self.matrices.values().map(|m| 2 * m.len() as u64).sum()
    }

    /// All stored triples, ordered by predicate, subject, object.
    pub fn triples(&self) -> impl Iterator<Item = EncodedTriple> + '_ {
        self.matrices.values().flat_map(|m| {
            m.so_pairs()
                .iter()
                .map(move |&[s, o]| EncodedTriple { s, p: m.pid(), o })
        })
    }
}

/// Encodes string triples and collects them for [`Store::build`].
#[derive(Debug, Default)]
pub struct StoreBuilder {
    dict: TermDictionary,
    parts: HashMap<PredicateId, Vec<[NodeId; 2]>>,
}

impl StoreBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Encodes subject, predicate, object in that order.
    pub fn add_terms(&mut self, s: &str, p: &str, o: &str) {
        let s = self.dict.encode_node(s);
        let p = self.dict.encode_predicate(p);
        let o = self.dict.encode_node(o);
        self.parts.entry(p).or_default().push([s, o]);
    }

    pub fn add(&mut self, t: &RawTriple) {
        self.add_terms(&t.subject, &t.predicate, &t.object);
    }

    pub fn dictionary(&self) -> &TermDictionary {
        &self.dict
    }

    pub fn finish(self) -> Store {
        Store::from_partitions(self.dict, self.parts)
    }
}
