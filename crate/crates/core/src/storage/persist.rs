//! On-disk store layout:
//!
//! ```text
//! meta         GSMAT1 magic line, then "triples", "predicates", "nodes" counts
//! nodes.dict   one escaped node term per line, line number = id
//! preds.dict   one escaped predicate term per line, line number = id
//! p<ID>.so     (s, o) pairs sorted by (s, o), u64 little endian
//! p<ID>.os     (o, s) pairs sorted by (o, s), u64 little endian
//! stats.tsv    pid, cardinality, distinct_subjects, distinct_objects
//! ```
//!
//! Row indexes are rebuilt on load.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use super::{PredicateMatrix, PredicateStat, Store};
use crate::dictionary::{read_terms, write_terms, NodeId, PredicateId, TermDictionary};
use crate::error::StorageError;

pub const MAGIC: &str = "GSMAT1";
pub const STATS_HEADER: &str = "pid\tcardinality\tdistinct_subjects\tdistinct_objects";

const META: &str = "meta";
const NODES: &str = "nodes.dict";
const PREDS: &str = "preds.dict";
const STATS: &str = "stats.tsv";

fn pair_file(dir: &Path, pid: PredicateId, ext: &str) -> PathBuf {
    dir.join(format!("p{pid}.{ext}"))
}

fn encode_pairs(pairs: &[[NodeId; 2]]) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(pairs.len() * 16);
    for &[a, b] in pairs {
        bytes.extend_from_slice(&a.to_le_bytes());
        bytes.extend_from_slice(&b.to_le_bytes());
    }
    bytes
}

impl Store {
    /// Writes the store into `dir`, creating it if needed. Output bytes
    /// depend only on the store contents.
    pub fn persist(&self, dir: impl AsRef<Path>) -> Result<(), StorageError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| StorageError::io(dir, e))?;

        let meta = format!(
            "{MAGIC}\ntriples\t{}\npredicates\t{}\nnodes\t{}\n",
            self.triple_count(),
            self.predicate_count(),
            self.node_count()
        );
        write_file(&dir.join(META), meta.as_bytes())?;

        let dict = self.dictionary();
        write_terms_file(&dir.join(NODES), dict.node_terms())?;
        write_terms_file(&dir.join(PREDS), dict.predicate_terms())?;

        for m in self.matrices() {
            write_file(&pair_file(dir, m.pid(), "so"), &encode_pairs(m.so_pairs()))?;
            write_file(&pair_file(dir, m.pid(), "os"), &encode_pairs(m.os_pairs()))?;
        }
        write_file(&dir.join(STATS), self.stats().to_tsv().as_bytes())
    }

    /// Loads a store written by [`Store::persist`], validating counts,
    /// ordering, and id ranges.
    pub fn load(dir: impl AsRef<Path>) -> Result<Store, StorageError> {
        let dir = dir.as_ref();
        let meta = Meta::read(&dir.join(META))?;

        let nodes = read_terms_file(&dir.join(NODES))?;
        let preds = read_terms_file(&dir.join(PREDS))?;
        if nodes.len() as u64 != meta.nodes || preds.len() as u64 != meta.predicates {
            return Err(StorageError::Corrupt {
                path: dir.join(META),
                detail: format!(
                    "meta declares {} nodes and {} predicates, dictionaries hold {} and {}",
                    meta.nodes,
                    meta.predicates,
                    nodes.len(),
                    preds.len()
                ),
            });
        }
        let dict = TermDictionary::from_terms(nodes, preds).map_err(|source| {
            StorageError::Dictionary {
                path: dir.to_path_buf(),
                source,
            }
        })?;

        let stats_path = dir.join(STATS);
        let stats = read_stats(&stats_path)?;
        let mut matrices = Vec::with_capacity(stats.len());
        for &(pid, stat) in &stats {
            if pid.0 == 0 || pid.0 > meta.predicates {
                return Err(corrupt(
                    &stats_path,
                    format!("predicate id {pid} out of range"),
                ));
            }
            let so_path = pair_file(dir, pid, "so");
            let so = read_pairs(&so_path, stat.cardinality, meta.nodes)?;
            let os = read_pairs(&pair_file(dir, pid, "os"), stat.cardinality, meta.nodes)?;
            let m = PredicateMatrix::from_sorted(pid, so, os).map_err(|d| corrupt(&so_path, d))?;
            if PredicateStat::from(&m) != stat {
                return Err(corrupt(
                    &stats_path,
                    format!("statistics for predicate {pid} do not match its pairs"),
                ));
            }
            matrices.push(m);
        }
        let store = Store::from_matrices(dict, matrices);
        if store.triple_count() != meta.triples {
            return Err(corrupt(
                &dir.join(META),
                format!(
                    "meta declares {} triples, pair files hold {}",
                    meta.triples,
                    store.triple_count()
                ),
            ));
        }
        Ok(store)
    }
}

fn corrupt(path: &Path, detail: impl Into<String>) -> StorageError {
    StorageError::Corrupt {
        path: path.to_path_buf(),
        detail: detail.into(),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), StorageError> {
    fs::write(path, bytes).map_err(|e| StorageError::io(path, e))
}

fn write_terms_file(path: &Path, terms: &[String]) -> Result<(), StorageError> {
    let file = File::create(path).map_err(|e| StorageError::io(path, e))?;
    write_terms(BufWriter::new(file), terms).map_err(|e| StorageError::io(path, e))
}

fn read_terms_file(path: &Path) -> Result<Vec<String>, StorageError> {
    let file = File::open(path).map_err(|e| StorageError::io(path, e))?;
    read_terms(BufReader::new(file))
        .map_err(|e| StorageError::io(path, e))?
        .map_err(|source| StorageError::Dictionary {
            path: path.to_path_buf(),
            source,
        })
}

struct Meta {
    triples: u64,
    predicates: u64,
    nodes: u64,
}

impl Meta {
    fn read(path: &Path) -> Result<Meta, StorageError> {
        let text = fs::read_to_string(path).map_err(|e| StorageError::io(path, e))?;
        let mut lines = text.lines();
        let magic = match lines.next() {
            Some(m) => m,
            None => {
                return Err(StorageError::Truncated {
                    path: path.to_path_buf(),
                    detail: "empty meta file".into(),
                })
            }
        };
        if magic != MAGIC {
            return Err(if magic.starts_with("GSMAT") {
                StorageError::VersionMismatch {
                    path: path.to_path_buf(),
                    found: magic.to_owned(),
                    expected: MAGIC,
                }
            } else {
                StorageError::BadMagic {
                    path: path.to_path_buf(),
                    found: magic.chars().take(32).collect(),
                }
            });
        }
        let mut field = |name: &str| -> Result<u64, StorageError> {
            let line = lines.next().ok_or_else(|| StorageError::Truncated {
                path: path.to_path_buf(),
                detail: format!("missing {name} count"),
            })?;
            line.strip_prefix(name)
                .and_then(|v| v.strip_prefix('\t'))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| {
                    corrupt(path, format!("expected '{name}<TAB><count>', got {line:?}"))
                })
        };
        Ok(Meta {
            triples: field("triples")?,
            predicates: field("predicates")?,
            nodes: field("nodes")?,
        })
    }
}

fn read_stats(path: &Path) -> Result<Vec<(PredicateId, PredicateStat)>, StorageError> {
    let text = fs::read_to_string(path).map_err(|e| StorageError::io(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(STATS_HEADER) {
        return Err(corrupt(path, "missing header"));
    }
    let mut rows: Vec<(PredicateId, PredicateStat)> = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Option<Vec<u64>> = line.split('\t').map(|f| f.parse().ok()).collect();
        let row = match fields.as_deref() {
            Some(&[pid, cardinality, distinct_subjects, distinct_objects]) => (
                PredicateId(pid),
                PredicateStat {
                    cardinality,
                    distinct_subjects,
                    distinct_objects,
                },
            ),
            _ => return Err(corrupt(path, format!("malformed row {}", i + 2))),
        };
        if rows.last().is_some_and(|(prev, _)| *prev >= row.0) {
            return Err(corrupt(path, "predicate ids not ascending"));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn read_pairs(path: &Path, expected: u64, nodes: u64) -> Result<Vec<[NodeId; 2]>, StorageError> {
    let bytes = fs::read(path).map_err(|e| StorageError::io(path, e))?;
    let truncated = |detail: String| StorageError::Truncated {
        path: path.to_path_buf(),
        detail,
    };
    if bytes.len() % 16 != 0 {
        return Err(truncated(format!(
            "{} bytes is not a whole number of pairs",
            bytes.len()
        )));
    }
    let count = (bytes.len() / 16) as u64;
    if count < expected {
        return Err(truncated(format!("{count} pairs, expected {expected}")));
    }
    if count > expected {
        return Err(corrupt(path, format!("{count} pairs, expected {expected}")));
    }
    let pairs: Vec<[NodeId; 2]> = bytes
        .chunks_exact(16)
        .map(|c| {
            let a = u64::from_le_bytes(c[..8].try_into().unwrap());
            let b = u64::from_le_bytes(c[8..].try_into().unwrap());
            [a, b]
        })
        .collect();
    if let Some(p) = pairs
        .iter()
        .find(|p| p.iter().any(|&id| id == 0 || id > nodes))
    {
        return Err(corrupt(
            path,
            format!("pair {p:?} has an id outside 1..={nodes}"),
        ));
    }
    Ok(pairs)
}
