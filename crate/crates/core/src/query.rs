//! Query graphs: basic graph patterns as labelled edges between variable
//! or constant endpoints, and their dictionary-encoded form.

use std::fmt;

use crate::dictionary::{NodeId, PredicateId, TermDictionary};
use crate::parser::term_to_ntriples;

/// An endpoint of a triple pattern. Variable names are stored without `?`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum QueryTerm {
    Var(String),
    Const(String),
}

impl QueryTerm {
    pub fn var(&self) -> Option<&str> {
        match self {
            QueryTerm::Var(v) => Some(v),
            QueryTerm::Const(_) => None,
        }
    }
}

impl fmt::Display for QueryTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryTerm::Var(v) => write!(f, "?{v}"),
            QueryTerm::Const(c) => f.write_str(&term_to_ntriples(c)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: QueryTerm,
    /// Predicates are always constants.
    pub predicate: String,
    pub object: QueryTerm,
    /// 1-based position in the query text.
    pub ordinal: usize,
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}",
            self.subject,
            term_to_ntriples(&self.predicate),
            self.object
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Projection {
    All,
    Vars(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryGraph {
    pub patterns: Vec<TriplePattern>,
    pub projection: Projection,
    pub distinct: bool,
    /// Distinct variable names in order of first occurrence.
    pub variables: Vec<String>,
}

impl QueryGraph {
    pub fn new(patterns: Vec<TriplePattern>, projection: Projection, distinct: bool) -> Self {
        let mut variables: Vec<String> = Vec::new();
        for p in &patterns {
            for v in [p.subject.var(), p.object.var()].into_iter().flatten() {
                if !variables.iter().any(|x| x == v) {
                    variables.push(v.to_owned());
                }
            }
        }
        QueryGraph {
            patterns,
            projection,
            distinct,
            variables,
        }
    }

    /// The variables a result row carries, in output order.
    pub fn projected(&self) -> &[String] {
        match &self.projection {
            Projection::All => &self.variables,
            Projection::Vars(vars) => vars,
        }
    }
}

/// Serializes back to the accepted SPARQL subset with full IRIs.
impl fmt::Display for QueryGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECT ")?;
        if self.distinct {
            f.write_str("DISTINCT ")?;
        }
        match &self.projection {
            Projection::All => f.write_str("*")?,
            Projection::Vars(vars) => {
                for (i, v) in vars.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "?{v}")?;
                }
            }
        }
        f.write_str(" WHERE {\n")?;
        for p in &self.patterns {
            writeln!(f, "  {p} .")?;
        }
        f.write_str("}\n")
    }
}

/// A pattern endpoint after dictionary lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slot {
    Var(String),
    Node(NodeId),
    /// A constant the dictionary has never seen: the pattern cannot match.
    Missing,
}

impl Slot {
    pub fn var(&self) -> Option<&str> {
        match self {
            Slot::Var(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundPattern {
    pub subject: Slot,
    /// `None` when the predicate is not in the dictionary.
    pub predicate: Option<PredicateId>,
    pub object: Slot,
    pub source: TriplePattern,
}

impl BoundPattern {
    pub fn ordinal(&self) -> usize {
        self.source.ordinal
    }

    /// True when some constant of the pattern is unknown to the store.
    pub fn is_unsatisfiable(&self) -> bool {
        self.predicate.is_none() || self.subject == Slot::Missing || self.object == Slot::Missing
    }

    /// Distinct variables in (subject, object) order.
    pub fn variables(&self) -> Vec<&str> {
        let mut vars = Vec::with_capacity(2);
        for v in [self.subject.var(), self.object.var()]
            .into_iter()
            .flatten()
        {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        vars
    }

    /// Endpoint keys used for connectivity: variables and constants both
    /// count as graph nodes.
    pub(crate) fn endpoints(&self) -> [&QueryTerm; 2] {
        [&self.source.subject, &self.source.object]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundQuery {
    pub patterns: Vec<BoundPattern>,
    pub projection: Vec<String>,
    pub distinct: bool,
}

impl BoundQuery {
    /// True when some pattern references an unknown constant, in which case
    /// the whole conjunction is empty.
    pub fn is_unsatisfiable(&self) -> bool {
        self.patterns.iter().any(BoundPattern::is_unsatisfiable)
    }
}

/// Replaces constants by dictionary ids. Unknown constants are not an
/// error; they mark their pattern (and so the query) as empty.
pub fn bind_constants(graph: &QueryGraph, dict: &TermDictionary) -> BoundQuery {
    let slot = |t: &QueryTerm| match t {
        QueryTerm::Var(v) => Slot::Var(v.clone()),
        QueryTerm::Const(c) => dict.node_id(c).map_or(Slot::Missing, Slot::Node),
    };
    let patterns = graph
        .patterns
        .iter()
        .map(|p| BoundPattern {
            subject: slot(&p.subject),
            predicate: dict.predicate_id(&p.predicate),
            object: slot(&p.object),
            source: p.clone(),
        })
        .collect();
    BoundQuery {
        patterns,
        projection: graph.projected().to_vec(),
        distinct: graph.distinct,
    }
}
