//! A Turtle subset: parser, canonical serializer, merger and constraint
//! extraction.
//!
//! Supported: `@prefix`/`PREFIX`, prefixed names, absolute IRIs, string
//! literals (short and long, with escapes, language tags and datatypes),
//! numeric and boolean shorthands, the `a` keyword, `;` and `,` lists and
//! `#` comments. Blank nodes, collections and base IRIs are rejected.
//!
//! Triples are stored fully expanded, so two graphs compare by content no
//! matter which prefixes they were written with.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

pub mod vocab {
    pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
    pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

    pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const RDF_PROPERTY: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Property";
    pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
    pub const RDFS_CLASS: &str = "http://www.w3.org/2000/01/rdf-schema#Class";
    pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
    pub const RDFS_COMMENT: &str = "http://www.w3.org/2000/01/rdf-schema#comment";
    pub const OWL_CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
    pub const OWL_OBJECT_PROPERTY: &str = "http://www.w3.org/2002/07/owl#ObjectProperty";
    pub const OWL_DATATYPE_PROPERTY: &str = "http://www.w3.org/2002/07/owl#DatatypeProperty";
    pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const XSD_BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub value: String,
    /// `None` for plain strings (`xsd:string`) and language-tagged strings.
    pub datatype: Option<String>,
    /// Lowercased language tag.
    pub lang: Option<String>,
}

impl Literal {
    pub fn plain(value: impl Into<String>) -> Self {
        Literal {
            value: value.into(),
            datatype: None,
            lang: None,
        }
    }

    pub fn typed(value: impl Into<String>, datatype: impl Into<String>) -> Self {
        let datatype = datatype.into();
        let datatype = if datatype == vocab::XSD_STRING {
            None
        } else {
            Some(datatype)
        };
        Literal {
            value: value.into(),
            datatype,
            lang: None,
        }
    }

    pub fn lang(value: impl Into<String>, lang: &str) -> Self {
        Literal {
            value: value.into(),
            datatype: None,
            lang: Some(lang.to_ascii_lowercase()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Iri(String),
    Literal(Literal),
}

impl Term {
    pub fn iri(s: impl Into<String>) -> Self {
        Term::Iri(s.into())
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(s) => Some(s),
            Term::Literal(_) => None,
        }
    }
}

/// A triple with an IRI subject and predicate. All IRIs are absolute.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<String>, predicate: impl Into<String>, object: Term) -> Self {
        Triple {
            subject: subject.into(),
            predicate: predicate.into(),
            object,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OntologyGraph {
    pub prefixes: BTreeMap<String, String>,
    pub triples: BTreeSet<Triple>,
}

impl OntologyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    /// Triples grouped by subject, in subject order.
    pub fn subject_groups(&self) -> BTreeMap<&str, Vec<&Triple>> {
        let mut groups: BTreeMap<&str, Vec<&Triple>> = BTreeMap::new();
        for t in &self.triples {
            groups.entry(t.subject.as_str()).or_default().push(t);
        }
        groups
    }

    /// Drops prefix declarations the serializer would not use.
    pub fn retain_used_prefixes(&mut self) {
        let mut used = BTreeSet::new();
        for t in &self.triples {
            let mut iris = alloc::vec![t.subject.as_str()];
            if t.predicate != vocab::RDF_TYPE {
                iris.push(&t.predicate);
            }
            match &t.object {
                Term::Iri(o) => iris.push(o),
                Term::Literal(l) => {
                    if let Some(dt) = &l.datatype {
                        iris.push(dt);
                    }
                }
            }
            for iri in iris {
                if let Some((p, _)) = best_prefix(&self.prefixes, iri) {
                    used.insert(p.to_string());
                }
            }
        }
        self.prefixes.retain(|p, _| used.contains(p));
    }
}

/// Substring after the last `#` or `/`.
pub fn local_name(iri: &str) -> &str {
    match iri.rfind(['#', '/']) {
        Some(i) => &iri[i + 1..],
        None => iri,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct TurtleError {
    /// 1-based.
    pub line: usize,
    /// 1-based, counted in characters.
    pub column: usize,
    pub message: String,
}

pub fn parse_turtle(text: &str) -> Result<OntologyGraph, TurtleError> {
    Parser::new(text).document()
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    graph: OntologyGraph,
}

fn is_pn_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '%' | '\u{00B7}')
}

const LOCAL_ESCAPABLE: &str = "_~.-!$&'()*+,;=/?#@%";

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
            graph: OntologyGraph::new(),
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, TurtleError> {
        Err(TurtleError {
            line: self.line,
            column: self.column,
            message: message.into(),
        })
    }

    /// Error located at the last character of the input when we ran off the end.
    fn eof_err<T>(&self, message: &str) -> Result<T, TurtleError> {
        let (mut line, mut column) = (1, 1);
        for &c in &self.chars[..self.chars.len().saturating_sub(1)] {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        Err(TurtleError {
            line,
            column,
            message: format!("unexpected end of input: {message}"),
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars()
            .enumerate()
            .all(|(i, c)| self.peek_at(i) == Some(c))
    }

    fn starts_with_keyword_ci(&self, kw: &str) -> bool {
        let n = kw.chars().count();
        kw.chars()
            .enumerate()
            .all(|(i, c)| self.peek_at(i).is_some_and(|p| p.eq_ignore_ascii_case(&c)))
            && self
                .peek_at(n)
                .is_some_and(|c| c.is_whitespace() || c == '<')
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, c: char, what: &str) -> Result<(), TurtleError> {
        self.skip_ws();
        match self.peek() {
            Some(p) if p == c => {
                self.bump();
                Ok(())
            }
            Some(p) => self.err(format!("expected {what}, found `{p}`")),
            None => self.eof_err(&format!("expected {what}")),
        }
    }

    fn document(mut self) -> Result<OntologyGraph, TurtleError> {
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                return Ok(self.graph);
            }
            if self.starts_with("@prefix") {
                for _ in 0..7 {
                    self.bump();
                }
                self.prefix_body()?;
                self.expect('.', "`.` after @prefix")?;
            } else if self.starts_with_keyword_ci("PREFIX") {
                for _ in 0..6 {
                    self.bump();
                }
                self.prefix_body()?;
            } else if self.starts_with("@base") || self.starts_with_keyword_ci("BASE") {
                return self.err("base IRIs are not supported");
            } else {
                self.triples()?;
                self.expect('.', "`.` at end of statement")?;
            }
        }
    }

    fn prefix_body(&mut self) -> Result<(), TurtleError> {
        self.skip_ws();
        let mut prefix = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if !(c.is_alphanumeric() || matches!(c, '_' | '-' | '.')) {
                return self.err(format!("invalid character `{c}` in prefix name"));
            }
            prefix.push(c);
            self.bump();
        }
        if self.peek().is_none() {
            return self.eof_err("expected `:` in prefix declaration");
        }
        if prefix.ends_with('.') || prefix.starts_with(|c: char| !c.is_alphabetic()) {
            return self.err(format!("invalid prefix name `{prefix}`"));
        }
        self.bump();
        self.skip_ws();
        if self.peek() != Some('<') {
            return self.err("expected `<namespace>` in prefix declaration");
        }
        let ns = self.iriref()?;
        self.graph.prefixes.insert(prefix, ns);
        Ok(())
    }

    fn triples(&mut self) -> Result<(), TurtleError> {
        self.skip_ws();
        let subject = match self.peek() {
            Some('[') | Some('(') => {
                return self.err("blank nodes and collections are not supported")
            }
            Some('_') if self.peek_at(1) == Some(':') => {
                return self.err("blank nodes are not supported")
            }
            Some('"') | Some('\'') => return self.err("a literal cannot be a subject"),
            Some(_) => self.iri("subject")?,
            None => return self.eof_err("expected subject"),
        };
        loop {
            self.skip_ws();
            let predicate = self.verb()?;
            loop {
                let object = self.object()?;
                self.graph.triples.insert(Triple {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                self.skip_ws();
                if self.peek() == Some(',') {
                    self.bump();
                } else {
                    break;
                }
            }
            self.skip_ws();
            if self.peek() != Some(';') {
                return Ok(());
            }
            while self.peek() == Some(';') {
                self.bump();
                self.skip_ws();
            }
            if self.peek() == Some('.') || self.peek().is_none() {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<String, TurtleError> {
        if self.peek() == Some('a')
            && self
                .peek_at(1)
                .is_none_or(|c| c.is_whitespace() || c == '<' || c == '"')
        {
            self.bump();
            return Ok(vocab::RDF_TYPE.to_string());
        }
        match self.peek() {
            None => self.eof_err("expected predicate"),
            Some('"') | Some('\'') => self.err("a literal cannot be a predicate"),
            Some(_) => self.iri("predicate"),
        }
    }

    fn object(&mut self) -> Result<Term, TurtleError> {
        self.skip_ws();
        match self.peek() {
            None => self.eof_err("expected object"),
            Some('[') | Some('(') => self.err("blank nodes and collections are not supported"),
            Some('_') if self.peek_at(1) == Some(':') => self.err("blank nodes are not supported"),
            Some('"') | Some('\'') => self.literal().map(Term::Literal),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => {
                self.numeric().map(Term::Literal)
            }
            Some('.') if self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) => {
                self.numeric().map(Term::Literal)
            }
            Some(_) => {
                for kw in ["true", "false"] {
                    let n = kw.len();
                    if self.starts_with(kw)
                        && self.peek_at(n).is_none_or(|c| !is_pn_char(c) || c == '.')
                    {
                        for _ in 0..n {
                            self.bump();
                        }
                        return Ok(Term::Literal(Literal::typed(kw, vocab::XSD_BOOLEAN)));
                    }
                }
                self.iri("object").map(Term::Iri)
            }
        }
    }

    fn iri(&mut self, role: &str) -> Result<String, TurtleError> {
        if self.peek() == Some('<') {
            self.iriref()
        } else {
            self.prefixed_name(role)
        }
    }

    fn iriref(&mut self) -> Result<String, TurtleError> {
        let (line, column) = (self.line, self.column);
        self.bump();
        let mut iri = String::new();
        loop {
            match self.bump() {
                None => return self.eof_err("unterminated IRI"),
                Some('>') => break,
                Some('\\') => {
                    let c = self.unicode_escape()?;
                    iri.push(c);
                }
                Some(c)
                    if c.is_whitespace()
                        || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') =>
                {
                    return self.err(format!("invalid character `{}` in IRI", c.escape_debug()));
                }
                Some(c) => iri.push(c),
            }
        }
        if !has_scheme(&iri) {
            return Err(TurtleError {
                line,
                column,
                message: format!("relative IRI <{iri}> is not supported"),
            });
        }
        Ok(iri)
    }

    fn unicode_escape(&mut self) -> Result<char, TurtleError> {
        let digits = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return self.err("invalid escape in IRI"),
        };
        self.hex_char(digits)
    }

    fn hex_char(&mut self, digits: usize) -> Result<char, TurtleError> {
        let mut v: u32 = 0;
        for _ in 0..digits {
            match self.bump().and_then(|c| c.to_digit(16)) {
                Some(d) => v = v * 16 + d,
                None => return self.err("invalid hexadecimal escape"),
            }
        }
        match char::from_u32(v) {
            Some(c) => Ok(c),
            None => self.err("escape does not encode a valid character"),
        }
    }

    fn prefixed_name(&mut self, role: &str) -> Result<String, TurtleError> {
        let (line, column) = (self.line, self.column);
        let start = self.pos;
        let mut raw = String::new();
        loop {
            match self.peek() {
                Some('\\') => match self.peek_at(1) {
                    Some(e) if LOCAL_ESCAPABLE.contains(e) => {
                        raw.push('\\');
                        raw.push(e);
                        self.bump();
                        self.bump();
                    }
                    _ => {
                        self.bump();
                        return self.err("invalid escape in prefixed name");
                    }
                },
                Some(c) if is_pn_char(c) => {
                    raw.push(c);
                    self.bump();
                }
                _ => break,
            }
        }
        // A trailing `.` terminates the statement rather than the name.
        while raw.ends_with('.') && !raw.ends_with("\\.") {
            raw.pop();
            self.pos -= 1;
            self.column -= 1;
        }
        if self.pos == start {
            return match self.peek() {
                Some(c) => self.err(format!("expected {role}, found `{}`", c.escape_debug())),
                None => self.eof_err(&format!("expected {role}")),
            };
        }
        let located = |message: String| TurtleError {
            line,
            column,
            message,
        };
        let Some(colon) = raw.find(':') else {
            return Err(located(format!("expected {role}, found `{raw}`")));
        };
        let (prefix, local) = (&raw[..colon], &raw[colon + 1..]);
        let Some(ns) = self.graph.prefixes.get(prefix) else {
            return Err(located(format!("undeclared prefix `{prefix}:`")));
        };
        if local.starts_with(['-', '.']) {
            return Err(located(format!("invalid local name `{local}`")));
        }
        let mut iri = ns.clone();
        let mut chars = local.chars();
        while let Some(c) = chars.next() {
            if c == '\\' {
                if let Some(e) = chars.next() {
                    iri.push(e);
                }
            } else {
                iri.push(c);
            }
        }
        Ok(iri)
    }

    fn literal(&mut self) -> Result<Literal, TurtleError> {
        let quote = self.peek().unwrap_or('"');
        let long = self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote);
        let value = if long {
            self.long_string(quote)?
        } else {
            self.short_string(quote)?
        };
        match self.peek() {
            Some('@') => {
                self.bump();
                let mut tag = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '-' {
                        tag.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                let well_formed = tag.split('-').enumerate().all(|(i, part)| {
                    !part.is_empty() && (i > 0 || part.chars().all(|c| c.is_ascii_alphabetic()))
                });
                if !well_formed {
                    return self.err(format!("invalid language tag `@{tag}`"));
                }
                Ok(Literal::lang(value, &tag))
            }
            Some('^') => {
                self.bump();
                if self.peek() != Some('^') {
                    return self.err("expected `^^` before datatype");
                }
                self.bump();
                let dt = self.iri("datatype IRI")?;
                Ok(Literal::typed(value, dt))
            }
            _ => Ok(Literal::plain(value)),
        }
    }

    fn string_escape(&mut self, out: &mut String) -> Result<(), TurtleError> {
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
            Some(c) => return self.err(format!("invalid string escape `\\{}`", c.escape_debug())),
            None => return self.eof_err("unterminated string"),
        };
        out.push(c);
        Ok(())
    }

    fn short_string(&mut self, quote: char) -> Result<String, TurtleError> {
        self.bump();
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return self.eof_err("unterminated string"),
                Some('\n') | Some('\r') => return self.err("newline in single-line string"),
                Some(c) if c == quote => {
                    self.bump();
                    return Ok(out);
                }
                Some('\\') => {
                    self.bump();
                    self.string_escape(&mut out)?;
                }
                Some(c) => {
                    out.push(c);
                    self.bump();
                }
            }
        }
    }

    fn long_string(&mut self, quote: char) -> Result<String, TurtleError> {
        for _ in 0..3 {
            self.bump();
        }
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return self.eof_err("unterminated long string"),
                Some(c)
                    if c == quote
                        && self.peek_at(1) == Some(quote)
                        && self.peek_at(2) == Some(quote) =>
                {
                    // Up to two quotes may precede the closing delimiter.
                    let mut run = 0;
                    while self.peek_at(run) == Some(quote) {
                        run += 1;
                    }
                    for _ in 0..run - 3 {
                        out.push(quote);
                        self.bump();
                    }
                    if run > 5 {
                        return self.err("too many quotes at end of long string");
                    }
                    for _ in 0..3 {
                        self.bump();
                    }
                    return Ok(out);
                }
                Some('\\') => {
                    self.bump();
                    self.string_escape(&mut out)?;
                }
                Some(c) => {
                    out.push(c);
                    self.bump();
                }
            }
        }
    }

    fn numeric(&mut self) -> Result<Literal, TurtleError> {
        let mut lex = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            lex.push(c);
            self.bump();
        }
        let mut int_digits = 0;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            lex.push(c);
            self.bump();
            int_digits += 1;
        }
        let mut frac_digits = 0;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            lex.push('.');
            self.bump();
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                lex.push(c);
                self.bump();
                frac_digits += 1;
            }
        }
        if int_digits + frac_digits == 0 {
            return self.err("expected a number");
        }
        let mut exponent = false;
        if let Some(e @ ('e' | 'E')) = self.peek() {
            lex.push(e);
            self.bump();
            if let Some(s @ ('+' | '-')) = self.peek() {
                lex.push(s);
                self.bump();
            }
            let mut exp_digits = 0;
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                lex.push(c);
                self.bump();
                exp_digits += 1;
            }
            if exp_digits == 0 {
                return self.err("missing exponent digits");
            }
            exponent = true;
        }
        if self
            .peek()
            .is_some_and(|c| c.is_alphabetic() || c == '_' || c == ':')
        {
            return self.err("malformed number");
        }
        let dt = if exponent {
            vocab::XSD_DOUBLE
        } else if frac_digits > 0 || lex.contains('.') {
            vocab::XSD_DECIMAL
        } else {
            vocab::XSD_INTEGER
        };
        Ok(Literal::typed(lex, dt))
    }
}

fn has_scheme(iri: &str) -> bool {
    let Some(colon) = iri.find(':') else {
        return false;
    };
    let scheme = &iri[..colon];
    let mut chars = scheme.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

fn is_simple_local(local: &str) -> bool {
    let mut chars = local.chars();
    let Some(first) = chars.next() else {
        return true;
    };
    (first.is_ascii_alphanumeric() || first == '_')
        && local
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        && !local.ends_with('.')
}

/// Longest declared namespace that abbreviates `iri` to a valid prefixed
/// name; ties go to the smaller prefix.
fn best_prefix<'a>(
    prefixes: &'a BTreeMap<String, String>,
    iri: &str,
) -> Option<(&'a str, &'a str)> {
    let mut best: Option<(&str, &str)> = None;
    for (p, ns) in prefixes {
        if let Some(local) = iri.strip_prefix(ns.as_str()) {
            if is_simple_local(local) && best.is_none_or(|(_, b)| ns.len() > b.len()) {
                best = Some((p, ns));
            }
        }
    }
    best
}

fn write_iri(out: &mut String, prefixes: &BTreeMap<String, String>, iri: &str) {
    if let Some((p, ns)) = best_prefix(prefixes, iri) {
        out.push_str(p);
        out.push(':');
        out.push_str(&iri[ns.len()..]);
        return;
    }
    out.push('<');
    for c in iri.chars() {
        if c.is_whitespace()
            || c.is_control()
            || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
        {
            out.push_str(&format!("\\u{:04X}", c as u32));
        } else {
            out.push(c);
        }
    }
    out.push('>');
}

fn write_literal(out: &mut String, prefixes: &BTreeMap<String, String>, lit: &Literal) {
    out.push('"');
    for c in lit.value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    if let Some(lang) = &lit.lang {
        out.push('@');
        out.push_str(lang);
    } else if let Some(dt) = &lit.datatype {
        out.push_str("^^");
        write_iri(out, prefixes, dt);
    }
}

/// Canonical Turtle: prefixes sorted by name, then one block per subject
/// with `a` first and the other predicate/object pairs in triple order.
/// Byte-stable for a given graph.
pub fn serialize_turtle(g: &OntologyGraph) -> String {
    let mut out = String::new();
    for (p, ns) in &g.prefixes {
        out.push_str("@prefix ");
        out.push_str(p);
        out.push_str(": ");
        write_iri(&mut out, &BTreeMap::new(), ns);
        out.push_str(" .\n");
    }
    for (i, (subject, triples)) in g.subject_groups().into_iter().enumerate() {
        if i > 0 || !g.prefixes.is_empty() {
            out.push('\n');
        }
        write_iri(&mut out, &g.prefixes, subject);
        let (mut triples, rest): (Vec<&Triple>, Vec<&Triple>) = triples
            .into_iter()
            .partition(|t| t.predicate == vocab::RDF_TYPE);
        triples.extend(rest);
        for (j, t) in triples.iter().enumerate() {
            out.push_str(if j == 0 { " " } else { " ;\n    " });
            if t.predicate == vocab::RDF_TYPE {
                out.push('a');
            } else {
                write_iri(&mut out, &g.prefixes, &t.predicate);
            }
            out.push(' ');
            match &t.object {
                Term::Iri(iri) => write_iri(&mut out, &g.prefixes, iri),
                Term::Literal(l) => write_literal(&mut out, &g.prefixes, l),
            }
        }
        out.push_str(" .\n");
    }
    out
}

/// Set union of the expanded triples. Prefixes of `b` are added unless the
/// namespace is already declared; a prefix name already bound to another
/// namespace gets a numeric suffix.
pub fn merge_ontologies(a: &OntologyGraph, b: &OntologyGraph) -> OntologyGraph {
    let mut merged = a.clone();
    for (p, ns) in &b.prefixes {
        if merged.prefixes.values().any(|v| v == ns) {
            continue;
        }
        let name = if merged.prefixes.contains_key(p) {
            (1..)
                .map(|n| format!("{p}{n}"))
                .find(|candidate| !merged.prefixes.contains_key(candidate))
                .unwrap_or_default()
        } else {
            p.clone()
        };
        merged.prefixes.insert(name, ns.clone());
    }
    merged.triples.extend(b.triples.iter().cloned());
    merged
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub allowed_classes: BTreeSet<String>,
    pub allowed_relations: BTreeSet<String>,
}

impl ConstraintSet {
    pub fn is_empty(&self) -> bool {
        self.allowed_classes.is_empty() && self.allowed_relations.is_empty()
    }

    pub fn allows_class(&self, class: &str) -> bool {
        self.allowed_classes.contains(class)
    }

    pub fn allows_relation(&self, relation: &str) -> bool {
        self.allowed_relations.contains(relation)
    }
}

const CLASS_TYPES: [&str; 2] = [vocab::OWL_CLASS, vocab::RDFS_CLASS];
const RELATION_TYPES: [&str; 3] = [
    vocab::OWL_OBJECT_PROPERTY,
    vocab::OWL_DATATYPE_PROPERTY,
    vocab::RDF_PROPERTY,
];

/// Local names of everything declared as a class or as a property.
pub fn extract_constraints(g: &OntologyGraph) -> ConstraintSet {
    let mut set = ConstraintSet::default();
    for t in g.triples.iter().filter(|t| t.predicate == vocab::RDF_TYPE) {
        let Term::Iri(ty) = &t.object else { continue };
        let name = local_name(&t.subject);
        if name.is_empty() {
            continue;
        }
        if CLASS_TYPES.contains(&ty.as_str()) {
            set.allowed_classes.insert(name.to_string());
        } else if RELATION_TYPES.contains(&ty.as_str()) {
            set.allowed_relations.insert(name.to_string());
        }
    }
    set
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        match self {
            Term::Iri(iri) => write_iri(&mut s, &BTreeMap::new(), iri),
            Term::Literal(l) => write_literal(&mut s, &BTreeMap::new(), l),
        }
        f.write_str(&s)
    }
}
