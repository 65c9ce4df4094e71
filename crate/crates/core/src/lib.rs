//! An embeddable RDF engine that stores each predicate as a sparse boolean
//! matrix and answers SPARQL basic graph patterns with statistics-ordered
//! sparse-matrix joins.
//!
//! ```
//! use gsmat::{parse_query, Engine, ExecMode, Store};
//!
//! let data = "<A> <follows> <B> .\n<B> <follows> <C> .\n";
//! let store = Store::from_ntriples(data.as_bytes()).unwrap();
//! let query = parse_query("SELECT ?x ?z WHERE { ?x <follows> ?y . ?y <follows> ?z }").unwrap();
//! let result = Engine::new(&store).run(&query, ExecMode::Sequential).unwrap();
//! assert_eq!(result.decoded_rows(store.dictionary()).unwrap(), vec![vec!["A", "C"]]);
//! ```

pub mod bench;
pub mod dictionary;
pub mod error;
pub mod executor;
pub mod gen;
pub mod parser;
pub mod planner;
pub mod query;
pub mod storage;

pub use dictionary::{NodeId, PredicateId, TermDictionary};
pub use error::{Error, Result};
pub use executor::{BindingTable, Engine, ExecMode, ExecutionReport, QueryResult};
pub use parser::{parse_ntriples, parse_query};
pub use planner::{plan, Plan};
pub use query::{bind_constants, BoundQuery, QueryGraph, TriplePattern};
pub use storage::{EncodedTriple, PredicateMatrix, Store, StoreBuilder};
