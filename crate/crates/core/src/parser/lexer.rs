//! Character-level scanner shared by the N-Triples and SPARQL parsers.
//!
//! Terms come out in a canonical string form used as the dictionary key:
//! IRIs without angle brackets, blank nodes as `_:label`, literals as
//! `"lexical"` followed by `@lang` or `^^<datatype>`. The lexical part of a
//! literal is stored unescaped.

use crate::error::ParseError;

pub(crate) const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub(crate) const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str, first_line: usize) -> Self {
        Cursor {
            src,
            pos: 0,
            line: first_line,
        }
    }

    pub fn line(&self) -> usize {
        self.line
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
        }
        Some(c)
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::syntax(self.line, message)
    }

    /// Skips whitespace and `#` comments.
    pub fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    /// Consumes characters while `pred` holds and returns them.
    pub fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            self.bump();
        }
        &self.src[start..self.pos]
    }

    /// Reads `<...>` and returns the unescaped IRI.
    pub fn iri(&mut self) -> Result<String, ParseError> {
        if !self.eat('<') {
            return Err(self.error("expected '<'"));
        }
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error("unterminated IRI")),
                Some('>') => return Ok(out),
                Some('\\') => out.push(self.unicode_escape()?),
                Some(c) if c.is_whitespace() || c == '<' || c == '"' => {
                    return Err(self.error(format!("invalid character {c:?} in IRI")))
                }
                Some(c) => out.push(c),
            }
        }
    }

    /// Reads a `\uXXXX` or `\UXXXXXXXX` escape; the backslash is consumed.
    fn unicode_escape(&mut self) -> Result<char, ParseError> {
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error("invalid escape in IRI")),
        };
        self.hex_char(width)
    }

    fn hex_char(&mut self, width: usize) -> Result<char, ParseError> {
        let rest = self.rest();
        let digits = rest
            .get(..width)
            .filter(|d| d.chars().all(|c| c.is_ascii_hexdigit()))
            .ok_or_else(|| self.error("malformed unicode escape"))?;
        let code = u32::from_str_radix(digits, 16).map_err(|_| self.error("bad hex escape"))?;
        let c = char::from_u32(code).ok_or_else(|| self.error("escape is not a scalar value"))?;
        self.pos += width;
        Ok(c)
    }

    /// Reads `_:label`.
    pub fn blank(&mut self) -> Result<String, ParseError> {
        if !self.rest().starts_with("_:") {
            return Err(self.error("expected blank node"));
        }
        self.pos += 2;
        let label = self.take_while(is_name_char);
        let trimmed = label.trim_end_matches('.');
        // Trailing dots terminate the statement; give them back.
        self.pos -= label.len() - trimmed.len();
        if trimmed.is_empty() {
            return Err(self.error("empty blank node label"));
        }
        Ok(format!("_:{trimmed}"))
    }

    /// Reads a quoted string and returns its unescaped contents.
    pub fn quoted(&mut self) -> Result<String, ParseError> {
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) => q,
            _ => return Err(self.error("expected string")),
        };
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None | Some('\n') | Some('\r') => return Err(self.error("unterminated literal")),
                Some(c) if c == quote => return Ok(out),
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_char(4)?,
                        Some('U') => self.hex_char(8)?,
                        _ => return Err(self.error("invalid escape in literal")),
                    };
                    out.push(c);
                }
                Some(c) => out.push(c),
            }
        }
    }

    /// Reads `@lang` after a literal, if present.
    pub fn lang_tag(&mut self) -> Result<Option<&'a str>, ParseError> {
        if !self.eat('@') {
            return Ok(None);
        }
        let tag = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
        if tag.is_empty() || !tag.starts_with(|c: char| c.is_ascii_alphabetic()) {
            return Err(self.error("malformed language tag"));
        }
        Ok(Some(tag))
    }
}

pub(crate) fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '\u{b7}')
}

/// Canonical string for a literal.
pub(crate) fn literal(lexical: &str, lang: Option<&str>, datatype: Option<&str>) -> String {
    match (lang, datatype) {
        (Some(lang), _) => format!("\"{lexical}\"@{lang}"),
        (None, Some(dt)) => format!("\"{lexical}\"^^<{dt}>"),
        (None, None) => format!("\"{lexical}\""),
    }
}

/// Renders a canonical term back into N-Triples / SPARQL syntax.
pub fn term_to_ntriples(term: &str) -> String {
    if term.starts_with("_:") {
        return term.to_owned();
    }
    if let Some(body) = term.strip_prefix('"') {
        // The closing quote is the last one: suffixes never contain quotes.
        if let Some(end) = body.rfind('"') {
            let (lexical, suffix) = (&body[..end], &body[end + 1..]);
            let mut out = String::with_capacity(term.len() + 4);
            out.push('"');
            for c in lexical.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\r' => out.push_str("\\r"),
                    '\t' => out.push_str("\\t"),
                    c => out.push(c),
                }
            }
            out.push('"');
            out.push_str(suffix);
            return out;
        }
    }
    let mut out = String::with_capacity(term.len() + 2);
    out.push('<');
    for c in term.chars() {
        match c {
            '>' | '<' | '"' | '\\' | ' ' | '\t' | '\n' | '\r' => {
                out.push_str(&format!("\\u{:04X}", c as u32))
            }
            c => out.push(c),
        }
    }
    out.push('>');
    out
}
