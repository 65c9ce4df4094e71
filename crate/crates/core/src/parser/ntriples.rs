//! Line-oriented N-Triples reader.

use std::io::BufRead;

use super::lexer::{literal, Cursor};
use crate::error::ParseError;

/// A parsed statement in canonical term form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RawTriple {
    pub subject: String,
    pub predicate: String,
    pub object: String,
}

/// Parses one N-Triples line. Blank and comment-only lines yield `None`.
pub fn parse_ntriples(line: &str, line_no: usize) -> Result<Option<RawTriple>, ParseError> {
    let mut cur = Cursor::new(line.trim_end_matches(['\n', '\r']), line_no);
    cur.skip_trivia();
    if cur.at_end() {
        return Ok(None);
    }
    let subject = match cur.peek() {
        Some('<') => cur.iri()?,
        Some('_') => cur.blank()?,
        _ => return Err(cur.error("subject must be an IRI or blank node")),
    };
    cur.skip_trivia();
    if cur.peek() != Some('<') {
        return Err(cur.error("predicate must be an IRI"));
    }
    let predicate = cur.iri()?;
    cur.skip_trivia();
    let object = match cur.peek() {
        Some('<') => cur.iri()?,
        Some('_') => cur.blank()?,
        Some('"') => {
            let lexical = cur.quoted()?;
            let lang = cur.lang_tag()?;
            let datatype = if lang.is_none() && cur.rest().starts_with("^^") {
                cur.bump();
                cur.bump();
                Some(cur.iri()?)
            } else {
                None
            };
            literal(&lexical, lang, datatype.as_deref())
        }
        None => return Err(cur.error("expected object, found end of line")),
        _ => return Err(cur.error("object must be an IRI, blank node or literal")),
    };
    cur.skip_trivia();
    if !cur.eat('.') {
        return Err(cur.error("expected '.' after object"));
    }
    cur.skip_trivia();
    if !cur.at_end() {
        return Err(cur.error("unexpected text after '.'"));
    }
    Ok(Some(RawTriple {
        subject,
        predicate,
        object,
    }))
}

/// Iterates the statements of an N-Triples document, tagging each with its
/// 1-based line number.
pub struct NTriplesReader<R> {
    input: R,
    line_no: usize,
    buf: String,
}

impl<R: BufRead> NTriplesReader<R> {
    pub fn new(input: R) -> Self {
        NTriplesReader {
            input,
            line_no: 0,
            buf: String::new(),
        }
    }
}

#[derive(Debug)]
pub enum ReadError {
    Io(std::io::Error),
    Parse(ParseError),
}

impl<R: BufRead> Iterator for NTriplesReader<R> {
    type Item = Result<RawTriple, ReadError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.input.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(ReadError::Io(e))),
            }
            self.line_no += 1;
            match parse_ntriples(&self.buf, self.line_no) {
                Ok(Some(t)) => return Some(Ok(t)),
                Ok(None) => continue,
                Err(e) => return Some(Err(ReadError::Parse(e))),
            }
        }
    }
}
