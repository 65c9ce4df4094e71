//! Term dictionaries: dense, 1-based integer ids for nodes (subjects and
//! objects share one id space) and for predicates.
//!
//! Ids are handed out in first-occurrence order, so encoding the same
//! triple stream twice yields the same ids.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead, Write};

use crate::error::DictionaryError;

/// Id of a subject or object term. Valid ids start at 1.
pub type NodeId = u64;

/// Id of a predicate term. Predicates live in their own id space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredicateId(pub u64);

impl fmt::Display for PredicateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Namespace {
    Node,
    Predicate,
}

impl fmt::Display for Namespace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Namespace::Node => "node",
            Namespace::Predicate => "predicate",
        })
    }
}

/// One bijection between strings and dense ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Interner {
    terms: Vec<String>,
    index: HashMap<String, u64>,
}

impl Interner {
    fn intern(&mut self, term: &str) -> u64 {
        if let Some(&id) = self.index.get(term) {
            return id;
        }
        self.terms.push(term.to_owned());
        let id = self.terms.len() as u64;
        self.index.insert(term.to_owned(), id);
        id
    }

    fn lookup(&self, term: &str) -> Option<u64> {
        self.index.get(term).copied()
    }

    fn resolve(&self, id: u64, namespace: Namespace) -> Result<&str, DictionaryError> {
        id.checked_sub(1)
            .and_then(|i| self.terms.get(i as usize))
            .map(String::as_str)
            .ok_or(DictionaryError::OutOfRange {
                namespace,
                id,
                len: self.terms.len(),
            })
    }

    fn from_terms(terms: Vec<String>, namespace: Namespace) -> Result<Self, DictionaryError> {
        let mut index = HashMap::with_capacity(terms.len());
        for (i, term) in terms.iter().enumerate() {
            if index.insert(term.clone(), i as u64 + 1).is_some() {
                return Err(DictionaryError::DuplicateTerm {
                    namespace,
                    term: term.clone(),
                });
            }
        }
        Ok(Interner { terms, index })
    }
}

/// The node and predicate dictionaries of a store.
///
/// Single writer while a store is being built; read-only afterwards.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TermDictionary {
    nodes: Interner,
    preds: Interner,
}

impl TermDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds a dictionary from term lists where position `i` holds the
    /// term with id `i + 1`.
    pub fn from_terms(
        node_terms: Vec<String>,
        pred_terms: Vec<String>,
    ) -> Result<Self, DictionaryError> {
        Ok(TermDictionary {
            nodes: Interner::from_terms(node_terms, Namespace::Node)?,
            preds: Interner::from_terms(pred_terms, Namespace::Predicate)?,
        })
    }

    pub fn encode_node(&mut self, term: &str) -> NodeId {
        self.nodes.intern(term)
    }

    pub fn encode_predicate(&mut self, term: &str) -> PredicateId {
        PredicateId(self.preds.intern(term))
    }

    pub fn node_id(&self, term: &str) -> Option<NodeId> {
        self.nodes.lookup(term)
    }

    pub fn predicate_id(&self, term: &str) -> Option<PredicateId> {
        self.preds.lookup(term).map(PredicateId)
    }

    pub fn decode_node(&self, id: NodeId) -> Result<&str, DictionaryError> {
        self.nodes.resolve(id, Namespace::Node)
    }

    pub fn decode_predicate(&self, id: PredicateId) -> Result<&str, DictionaryError> {
        self.preds.resolve(id.0, Namespace::Predicate)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.terms.len()
    }

    pub fn predicate_count(&self) -> usize {
        self.preds.terms.len()
    }

    pub fn node_terms(&self) -> &[String] {
        &self.nodes.terms
    }

    pub fn predicate_terms(&self) -> &[String] {
        &self.preds.terms
    }
}

/// Escapes a term so that it fits on one line: backslash, newline,
/// carriage return and tab become `\\`, `\n`, `\r`, `\t`.
pub fn escape_term(term: &str) -> Cow<'_, str> {
    if !term.contains(['\\', '\n', '\r', '\t']) {
        return Cow::Borrowed(term);
    }
    let mut out = String::with_capacity(term.len() + 8);
    for c in term.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    Cow::Owned(out)
}

/// Inverse of [`escape_term`]. Returns `None` on an unknown escape.
pub fn unescape_term(line: &str) -> Option<Cow<'_, str>> {
    if !line.contains('\\') {
        return Some(Cow::Borrowed(line));
    }
    let mut out = String::with_capacity(line.len());
    let mut chars = line.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next()? {
            '\\' => out.push('\\'),
            'n' => out.push('\n'),
            'r' => out.push('\r'),
            't' => out.push('\t'),
            _ => return None,
        }
    }
    Some(Cow::Owned(out))
}

/// Writes one escaped term per line.
pub fn write_terms<W: Write>(mut out: W, terms: &[String]) -> io::Result<()> {
    for term in terms {
        out.write_all(escape_term(term).as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Reads a term file written by [`write_terms`].
pub fn read_terms<R: BufRead>(input: R) -> io::Result<Result<Vec<String>, DictionaryError>> {
    let mut terms = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        match unescape_term(&line) {
            Some(term) => terms.push(term.into_owned()),
            None => return Ok(Err(DictionaryError::BadEscape { line: i + 1 })),
        }
    }
    Ok(Ok(terms))
}
