//! Text front ends: N-Triples data and the SPARQL basic-graph-pattern subset.

mod lexer;
mod ntriples;
mod sparql;

pub use lexer::term_to_ntriples;
pub use ntriples::{parse_ntriples, NTriplesReader, RawTriple, ReadError};
pub use sparql::parse_query;
