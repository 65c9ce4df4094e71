//! Parser for the SPARQL subset the engine evaluates:
//!
//! ```text
//! query   := ("PREFIX" pname ":" <iri>)* "SELECT" "DISTINCT"? (var+ | "*")
//!            "WHERE"? "{" triples "}"
//! triples := subject predicate object ("," object)* (";" predicate object ...)* "."?
//! ```
//!
//! Predicates must be constants. Everything beyond a basic graph pattern
//! (OPTIONAL, UNION, FILTER, solution modifiers, ...) is rejected as
//! unsupported rather than silently ignored.

use std::collections::HashMap;

use super::lexer::{is_name_char, literal, Cursor, RDF_TYPE, XSD};
use crate::error::ParseError;
use crate::query::{Projection, QueryGraph, QueryTerm, TriplePattern};

const GROUP_KEYWORDS: &[&str] = &[
    "OPTIONAL", "UNION", "FILTER", "GRAPH", "MINUS", "BIND", "VALUES", "SERVICE",
];
const MODIFIER_KEYWORDS: &[&str] = &["LIMIT", "OFFSET", "ORDER", "GROUP", "HAVING"];

pub fn parse_query(text: &str) -> Result<QueryGraph, ParseError> {
    let mut p = Parser {
        cur: Cursor::new(text, 1),
        prefixes: HashMap::new(),
    };
    p.query()
}

struct Parser<'a> {
    cur: Cursor<'a>,
    prefixes: HashMap<String, String>,
}

impl<'a> Parser<'a> {
    fn unsupported(&self, feature: impl Into<String>) -> ParseError {
        ParseError::Unsupported {
            line: self.cur.line(),
            feature: feature.into(),
        }
    }

    /// Peeks an alphabetic keyword without consuming it.
    fn peek_word(&self) -> &'a str {
        let rest = self.cur.rest();
        let end = rest
            .find(|c: char| !c.is_ascii_alphabetic())
            .unwrap_or(rest.len());
        &rest[..end]
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.cur.skip_trivia();
        let word = self.peek_word();
        let boundary =
            !self.cur.rest()[word.len()..].starts_with(|c: char| is_name_char(c) || c == ':');
        if word.eq_ignore_ascii_case(kw) && boundary {
            for _ in 0..word.len() {
                self.cur.bump();
            }
            true
        } else {
            false
        }
    }

    fn query(&mut self) -> Result<QueryGraph, ParseError> {
        loop {
            if self.keyword("PREFIX") {
                self.prefix_decl()?;
            } else if self.keyword("BASE") {
                return Err(self.unsupported("BASE declarations"));
            } else {
                break;
            }
        }
        if !self.keyword("SELECT") {
            let word = self.peek_word().to_ascii_uppercase();
            if matches!(word.as_str(), "ASK" | "CONSTRUCT" | "DESCRIBE") {
                return Err(self.unsupported(format!("{word} queries")));
            }
            return Err(self.cur.error("expected SELECT"));
        }
        let distinct = self.keyword("DISTINCT");
        if self.keyword("REDUCED") {
            return Err(self.unsupported("REDUCED"));
        }
        let projection = self.projection()?;
        self.keyword("WHERE");
        self.cur.skip_trivia();
        if !self.cur.eat('{') {
            return Err(self.cur.error("expected '{'"));
        }
        let patterns = self.triples()?;
        self.cur.skip_trivia();
        if !self.cur.at_end() {
            let word = self.peek_word().to_ascii_uppercase();
            if MODIFIER_KEYWORDS.contains(&word.as_str()) {
                return Err(self.unsupported(format!("{word} clause")));
            }
            return Err(self.cur.error("unexpected text after '}'"));
        }
        let graph = QueryGraph::new(patterns, projection, distinct);
        if let Projection::Vars(vars) = &graph.projection {
            if let Some(v) = vars.iter().find(|v| !graph.variables.contains(v)) {
                return Err(ParseError::UnboundProjection(v.clone()));
            }
        }
        Ok(graph)
    }

    fn prefix_decl(&mut self) -> Result<(), ParseError> {
        self.cur.skip_trivia();
        let name = self.cur.take_while(|c| is_name_char(c) && c != '.');
        if !self.cur.eat(':') {
            return Err(self.cur.error("expected ':' in PREFIX declaration"));
        }
        self.cur.skip_trivia();
        let iri = self.cur.iri()?;
        self.prefixes.insert(name.to_owned(), iri);
        Ok(())
    }

    fn projection(&mut self) -> Result<Projection, ParseError> {
        self.cur.skip_trivia();
        if self.cur.eat('*') {
            return Ok(Projection::All);
        }
        let mut vars = Vec::new();
        loop {
            self.cur.skip_trivia();
            match self.cur.peek() {
                Some('?' | '$') => {
                    let v = self.variable()?;
                    if !vars.contains(&v) {
                        vars.push(v);
                    }
                }
                Some('(') => return Err(self.unsupported("projection expressions")),
                _ => break,
            }
        }
        if vars.is_empty() {
            return Err(self.cur.error("expected '*' or variables after SELECT"));
        }
        Ok(Projection::Vars(vars))
    }

    fn variable(&mut self) -> Result<String, ParseError> {
        self.cur.bump();
        let name = self.cur.take_while(|c| c.is_alphanumeric() || c == '_');
        if name.is_empty() {
            return Err(self.cur.error("empty variable name"));
        }
        Ok(name.to_owned())
    }

    fn triples(&mut self) -> Result<Vec<TriplePattern>, ParseError> {
        let mut patterns: Vec<TriplePattern> = Vec::new();
        loop {
            self.cur.skip_trivia();
            match self.cur.peek() {
                None => return Err(self.cur.error("unterminated group: expected '}'")),
                Some('}') => {
                    self.cur.bump();
                    break;
                }
                Some('{') => return Err(self.unsupported("nested group patterns")),
                _ => {}
            }
            let word = self.peek_word().to_ascii_uppercase();
            if GROUP_KEYWORDS.contains(&word.as_str()) {
                return Err(self.unsupported(word));
            }
            let subject = self.term(false)?;
            loop {
                let predicate = match self.term(true)? {
                    QueryTerm::Const(c) => c,
                    QueryTerm::Var(_) => {
                        return Err(self.unsupported("variable in predicate position"))
                    }
                };
                loop {
                    let object = self.term(false)?;
                    patterns.push(TriplePattern {
                        subject: subject.clone(),
                        predicate: predicate.clone(),
                        object,
                        ordinal: patterns.len() + 1,
                    });
                    self.cur.skip_trivia();
                    if !self.cur.eat(',') {
                        break;
                    }
                }
                self.cur.skip_trivia();
                if !self.cur.eat(';') {
                    break;
                }
                self.cur.skip_trivia();
                // A trailing ';' before '.' or '}' is allowed.
                if matches!(self.cur.peek(), Some('.' | '}')) {
                    break;
                }
            }
            self.cur.skip_trivia();
            if !self.cur.eat('.') && self.cur.peek() != Some('}') {
                return Err(self.cur.error("expected '.' or '}' after triple pattern"));
            }
        }
        if patterns.is_empty() {
            return Err(self.cur.error("empty WHERE clause"));
        }
        Ok(patterns)
    }

    fn term(&mut self, predicate_position: bool) -> Result<QueryTerm, ParseError> {
        self.cur.skip_trivia();
        let c = match self.cur.peek() {
            Some(c) => c,
            None => return Err(self.cur.error("unexpected end of query")),
        };
        let term = match c {
            '?' | '$' => return Ok(QueryTerm::Var(self.variable()?)),
            '<' => self.cur.iri()?,
            '_' if self.cur.rest().starts_with("_:") => self.cur.blank()?,
            '"' | '\'' => self.literal()?,
            '0'..='9' | '+' | '-' => self.numeric()?,
            '[' | '(' => return Err(self.unsupported("anonymous nodes and collections")),
            _ => {
                let word = self.peek_word();
                let after = &self.cur.rest()[word.len()..];
                let bare = !after.starts_with(|c: char| is_name_char(c) || c == ':');
                if bare && word == "a" && predicate_position {
                    self.cur.bump();
                    RDF_TYPE.to_owned()
                } else if bare && (word == "true" || word == "false") {
                    let w = word.to_owned();
                    for _ in 0..w.len() {
                        self.cur.bump();
                    }
                    literal(&w, None, Some(&format!("{XSD}boolean")))
                } else {
                    self.prefixed_name()?
                }
            }
        };
        Ok(QueryTerm::Const(term))
    }

    fn prefixed_name(&mut self) -> Result<String, ParseError> {
        let prefix = self.cur.take_while(|c| is_name_char(c) && c != '.');
        if !self.cur.eat(':') {
            return Err(self.cur.error(format!("unexpected token {prefix:?}")));
        }
        let base = self
            .prefixes
            .get(prefix)
            .ok_or_else(|| ParseError::UnknownPrefix {
                line: self.cur.line(),
                prefix: prefix.to_owned(),
            })?
            .clone();
        let local = self
            .cur
            .rest()
            .chars()
            .take_while(|&c| is_name_char(c) || c == ':' || c == '%')
            .collect::<String>();
        let local = local.trim_end_matches('.');
        for _ in 0..local.chars().count() {
            self.cur.bump();
        }
        Ok(format!("{base}{local}"))
    }

    fn literal(&mut self) -> Result<String, ParseError> {
        let lexical = self.cur.quoted()?;
        let lang = self.cur.lang_tag()?;
        if lang.is_some() {
            return Ok(literal(&lexical, lang, None));
        }
        if self.cur.rest().starts_with("^^") {
            self.cur.bump();
            self.cur.bump();
            let datatype = if self.cur.peek() == Some('<') {
                self.cur.iri()?
            } else {
                self.prefixed_name()?
            };
            return Ok(literal(&lexical, None, Some(&datatype)));
        }
        Ok(literal(&lexical, None, None))
    }

    fn numeric(&mut self) -> Result<String, ParseError> {
        let rest = self.cur.rest();
        let sign = usize::from(rest.starts_with(['+', '-']));
        let digits = rest[sign..]
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(rest.len() - sign);
        let mut len = sign + digits;
        let mut datatype = "integer";
        let frac = &rest[len..];
        if frac.starts_with('.') && frac[1..].starts_with(|c: char| c.is_ascii_digit()) {
            let frac_digits = frac[1..]
                .find(|c: char| !c.is_ascii_digit())
                .unwrap_or(frac.len() - 1);
            len += 1 + frac_digits;
            datatype = "decimal";
        }
        if len == sign {
            return Err(self.cur.error("malformed number"));
        }
        let text = rest[..len].to_owned();
        for _ in 0..len {
            self.cur.bump();
        }
        Ok(literal(&text, None, Some(&format!("{XSD}{datatype}"))))
    }
}
