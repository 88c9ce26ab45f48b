//! Recursive-descent reader for the Turtle subset used by ontology exports.
//!
//! Supported: `@prefix`/`@base` (and the SPARQL-style `PREFIX`/`BASE`), IRIs,
//! prefixed names, `a`, string/numeric/boolean literals with language tags
//! and datatypes, predicate lists, object lists, `[ ... ]` property lists and
//! `_:label` blank nodes. Collections and quoted triples are rejected.

use std::collections::HashMap;

use super::vocab;
use super::{BlankId, Graph, Iri, Literal, RdfError, Subject, Term, Triple};
use crate::Warning;

#[derive(Debug, Clone)]
pub struct ParsedTurtle {
    pub graph: Graph,
    pub warnings: Vec<Warning>,
}

/// Parses a Turtle document, logging any warnings.
pub fn parse_turtle(text: &str) -> Result<Graph, RdfError> {
    let parsed = parse_turtle_with_warnings(text)?;
    for w in &parsed.warnings {
        log::warn!("{w}");
    }
    Ok(parsed.graph)
}

pub fn parse_turtle_with_warnings(text: &str) -> Result<ParsedTurtle, RdfError> {
    let mut parser = Parser {
        src: text,
        pos: 0,
        base: None,
        namespaces: HashMap::new(),
        blank_labels: HashMap::new(),
        next_blank: 0,
        graph: Graph::new(),
        warnings: Vec::new(),
    };
    parser.document()?;
    Ok(ParsedTurtle {
        graph: parser.graph,
        warnings: parser.warnings,
    })
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    base: Option<String>,
    namespaces: HashMap<String, String>,
    blank_labels: HashMap<String, BlankId>,
    next_blank: u32,
    graph: Graph,
    warnings: Vec<Warning>,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_nth(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn line_col(&self, offset: usize) -> (usize, usize) {
        let before = &self.src[..offset];
        let line = before.matches('\n').count() + 1;
        let col_start = before.rfind('\n').map_or(0, |i| i + 1);
        (line, before[col_start..].chars().count() + 1)
    }

    fn error_at(&self, offset: usize, message: impl Into<String>) -> RdfError {
        let (line, column) = self.line_col(offset);
        RdfError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> RdfError {
        self.error_at(self.pos, message)
    }

    fn unsupported(&self, construct: &'static str) -> RdfError {
        let (line, column) = self.line_col(self.pos);
        RdfError::UnsupportedConstruct {
            line,
            column,
            construct,
        }
    }

    fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
    }

    fn expect(&mut self, c: char) -> Result<(), RdfError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn keyword_ahead(&self, kw: &str) -> bool {
        let rest = self.rest().as_bytes();
        rest.len() >= kw.len()
            && rest[..kw.len()].eq_ignore_ascii_case(kw.as_bytes())
            && self.rest()[kw.len()..]
                .chars()
                .next()
                .is_none_or(|c| c.is_whitespace() || c == '<' || c == '#')
    }

    fn document(&mut self) -> Result<(), RdfError> {
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                return Ok(());
            }
            if self.rest().starts_with("@prefix") {
                self.pos += "@prefix".len();
                self.prefix_directive()?;
                self.expect('.')?;
            } else if self.rest().starts_with("@base") {
                self.pos += "@base".len();
                self.base_directive()?;
                self.expect('.')?;
            } else if self.keyword_ahead("PREFIX") {
                self.pos += "PREFIX".len();
                self.prefix_directive()?;
            } else if self.keyword_ahead("BASE") {
                self.pos += "BASE".len();
                self.base_directive()?;
            } else if self.peek() == Some('@') {
                return Err(self.error("unknown directive"));
            } else {
                self.triples()?;
                self.expect('.')?;
            }
        }
    }

    fn prefix_directive(&mut self) -> Result<(), RdfError> {
        self.skip_ws();
        let start = self.pos;
        let prefix = self.pn_prefix();
        if self.peek() != Some(':') {
            return Err(self.error_at(start, "expected prefix name followed by ':'"));
        }
        self.bump();
        self.skip_ws();
        let ns = self.iriref()?;
        if let Some(old) = self.namespaces.insert(prefix.clone(), ns.as_str().to_string()) {
            if old != ns.as_str() {
                self.warnings.push(Warning::new(
                    "prefix-redeclared",
                    format!("prefix {prefix:?} redeclared: <{old}> replaced by <{ns}>"),
                ));
            }
        }
        if super::is_valid_prefix(&prefix) {
            self.graph.prefixes_mut().insert(&prefix, ns)?;
        } else {
            self.warnings.push(Warning::new(
                "prefix-not-recorded",
                format!("prefix {prefix:?} is usable in this document but not kept in the prefix map"),
            ));
        }
        Ok(())
    }

    fn base_directive(&mut self) -> Result<(), RdfError> {
        self.skip_ws();
        let iri = self.iriref()?;
        self.base = Some(iri.into_string());
        Ok(())
    }

    fn triples(&mut self) -> Result<(), RdfError> {
        self.skip_ws();
        match self.peek() {
            Some('[') => {
                let subject = self.blank_property_list()?;
                self.skip_ws();
                if self.peek() != Some('.') {
                    self.predicate_object_list(&Subject::Blank(subject))?;
                }
                Ok(())
            }
            _ => {
                let subject = self.subject()?;
                self.predicate_object_list(&subject)
            }
        }
    }

    fn subject(&mut self) -> Result<Subject, RdfError> {
        self.skip_ws();
        match self.peek() {
            Some('<') if self.peek_nth(1) == Some('<') => Err(self.unsupported("quoted triple")),
            Some('<') => Ok(Subject::Iri(self.iriref()?)),
            Some('(') => Err(self.unsupported("collection")),
            Some('_') if self.peek_nth(1) == Some(':') => Ok(Subject::Blank(self.blank_label()?)),
            Some('"') | Some('\'') => Err(self.error("literal cannot be a subject")),
            Some(_) => Ok(Subject::Iri(self.prefixed_name()?)),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn predicate_object_list(&mut self, subject: &Subject) -> Result<(), RdfError> {
        loop {
            let predicate = self.verb()?;
            self.object_list(subject, &predicate)?;
            self.skip_ws();
            if self.peek() != Some(';') {
                return Ok(());
            }
            while self.peek() == Some(';') {
                self.bump();
                self.skip_ws();
            }
            if matches!(self.peek(), Some('.') | Some(']') | None) {
                return Ok(());
            }
        }
    }

    fn object_list(&mut self, subject: &Subject, predicate: &Iri) -> Result<(), RdfError> {
        loop {
            let object = self.object()?;
            self.graph.insert(Triple {
                subject: subject.clone(),
                predicate: predicate.clone(),
                object,
            });
            self.skip_ws();
            if self.peek() == Some(',') {
                self.bump();
            } else {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<Iri, RdfError> {
        self.skip_ws();
        if self.peek() == Some('a') && !self.peek_nth(1).is_some_and(|c| is_pn_char(c) || c == ':') {
            self.bump();
            return Ok(super::iri(vocab::RDF_TYPE));
        }
        match self.peek() {
            Some('<') => self.iriref(),
            Some('[') | Some('_') | Some('"') | Some('\'') | Some('(') => {
                Err(self.error("predicate must be an IRI"))
            }
            Some(_) => self.prefixed_name(),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn object(&mut self) -> Result<Term, RdfError> {
        self.skip_ws();
        match self.peek() {
            Some('<') if self.peek_nth(1) == Some('<') => Err(self.unsupported("quoted triple")),
            Some('<') => Ok(Term::Iri(self.iriref()?)),
            Some('(') => Err(self.unsupported("collection")),
            Some('[') => Ok(Term::Blank(self.blank_property_list()?)),
            Some('_') if self.peek_nth(1) == Some(':') => Ok(Term::Blank(self.blank_label()?)),
            Some('"') | Some('\'') => Ok(Term::Literal(self.rdf_literal()?)),
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-' | '.') => {
                Ok(Term::Literal(self.numeric_literal()?))
            }
            Some(_) => {
                for kw in ["true", "false"] {
                    if self.rest().starts_with(kw)
                        && !self.rest()[kw.len()..]
                            .chars()
                            .next()
                            .is_some_and(|c| is_pn_char(c) || c == ':')
                    {
                        self.pos += kw.len();
                        return Ok(Term::Literal(Literal::typed(kw, super::iri(vocab::XSD_BOOLEAN))));
                    }
                }
                Ok(Term::Iri(self.prefixed_name()?))
            }
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn new_blank(&mut self) -> BlankId {
        let id = BlankId(self.next_blank);
        self.next_blank += 1;
        id
    }

    fn blank_label(&mut self) -> Result<BlankId, RdfError> {
        let start = self.pos;
        self.pos += 2; // "_:"
        let label_start = self.pos;
        while let Some(c) = self.peek() {
            if is_pn_char(c) || c == '.' {
                self.bump();
            } else {
                break;
            }
        }
        while self.src[label_start..self.pos].ends_with('.') {
            self.pos -= 1;
        }
        let label = &self.src[label_start..self.pos];
        if label.is_empty() {
            return Err(self.error_at(start, "empty blank node label"));
        }
        if let Some(id) = self.blank_labels.get(label) {
            return Ok(*id);
        }
        let id = self.new_blank();
        self.blank_labels.insert(label.to_string(), id);
        Ok(id)
    }

    fn blank_property_list(&mut self) -> Result<BlankId, RdfError> {
        self.bump(); // '['
        let id = self.new_blank();
        self.skip_ws();
        if self.peek() == Some(']') {
            self.bump();
            return Ok(id);
        }
        self.predicate_object_list(&Subject::Blank(id))?;
        self.expect(']')?;
        Ok(id)
    }

    fn iriref(&mut self) -> Result<Iri, RdfError> {
        let start = self.pos;
        if self.peek() != Some('<') {
            return Err(self.error("expected IRI"));
        }
        self.bump();
        let mut value = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some('\\') => {
                    let c = self.unicode_escape()?;
                    value.push(c);
                }
                Some(c) if c.is_whitespace() || c == '<' || c == '"' => {
                    return Err(self.error_at(start, "invalid character in IRI"));
                }
                Some(c) => value.push(c),
                None => return Err(self.error_at(start, "unterminated IRI")),
            }
        }
        let resolved = self.resolve(&value).ok_or_else(|| {
            self.error_at(start, format!("relative IRI <{value}> without a usable base"))
        })?;
        Iri::new(resolved).map_err(|e| self.error_at(start, e.to_string()))
    }

    fn resolve(&self, value: &str) -> Option<String> {
        if has_scheme(value) {
            return Some(value.to_string());
        }
        let base = self.base.as_deref()?;
        Some(resolve_relative(base, value))
    }

    fn unicode_escape(&mut self) -> Result<char, RdfError> {
        let start = self.pos - 1;
        let len = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error_at(start, "invalid escape")),
        };
        let hex: String = (0..len).filter_map(|_| self.bump()).collect();
        u32::from_str_radix(&hex, 16)
            .ok()
            .filter(|_| hex.len() == len)
            .and_then(char::from_u32)
            .ok_or_else(|| self.error_at(start, "invalid unicode escape"))
    }

    fn pn_prefix(&mut self) -> String {
        let start = self.pos;
        if self.peek().is_some_and(|c| c.is_alphabetic()) {
            while let Some(c) = self.peek() {
                if is_pn_char(c) || c == '.' {
                    self.bump();
                } else {
                    break;
                }
            }
            while self.src[start..self.pos].ends_with('.') {
                self.pos -= 1;
            }
        }
        self.src[start..self.pos].to_string()
    }

    fn prefixed_name(&mut self) -> Result<Iri, RdfError> {
        let start = self.pos;
        let prefix = self.pn_prefix();
        if self.peek() != Some(':') {
            return Err(self.error_at(start, "expected IRI, prefixed name, blank node or literal"));
        }
        self.bump();
        let mut local = String::new();
        loop {
            match self.peek() {
                Some('\\') => {
                    let esc_at = self.pos;
                    self.bump();
                    match self.bump() {
                        Some(c) if "_~.-!$&'()*+,;=/?#@%".contains(c) => local.push(c),
                        _ => return Err(self.error_at(esc_at, "invalid local name escape")),
                    }
                }
                Some('%') => {
                    let esc_at = self.pos;
                    self.bump();
                    let (h1, h2) = (self.bump(), self.bump());
                    match (h1, h2) {
                        (Some(a), Some(b)) if a.is_ascii_hexdigit() && b.is_ascii_hexdigit() => {
                            local.push('%');
                            local.push(a);
                            local.push(b);
                        }
                        _ => return Err(self.error_at(esc_at, "invalid percent escape")),
                    }
                }
                Some(c) if is_pn_char(c) || c == ':' || c == '.' => {
                    self.bump();
                    local.push(c);
                }
                _ => break,
            }
        }
        while local.ends_with('.') {
            local.pop();
            self.pos -= 1;
        }
        let ns = self
            .namespaces
            .get(&prefix)
            .ok_or_else(|| self.error_at(start, format!("undeclared prefix {prefix:?}")))?;
        Iri::new(format!("{ns}{local}")).map_err(|e| self.error_at(start, e.to_string()))
    }

    fn rdf_literal(&mut self) -> Result<Literal, RdfError> {
        let lexical = self.string()?;
        match self.peek() {
            Some('@') => {
                let at = self.pos;
                self.bump();
                let tag_start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '-') {
                    self.bump();
                }
                let tag = &self.src[tag_start..self.pos];
                Literal::lang(lexical, tag).map_err(|e| self.error_at(at, e.to_string()))
            }
            Some('^') if self.peek_nth(1) == Some('^') => {
                self.pos += 2;
                let dt = match self.peek() {
                    Some('<') => self.iriref()?,
                    _ => self.prefixed_name()?,
                };
                Ok(Literal::typed(lexical, dt))
            }
            _ => Ok(Literal::plain(lexical)),
        }
    }

    fn string(&mut self) -> Result<String, RdfError> {
        let start = self.pos;
        let quote = self.bump().expect("caller checked quote");
        let long = self.peek() == Some(quote) && self.peek_nth(1) == Some(quote);
        if long {
            self.pos += 2 * quote.len_utf8();
        } else if self.peek() == Some(quote) {
            self.bump();
            return Ok(String::new());
        }
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error_at(start, "unterminated string")),
                Some(c) if c == quote => {
                    if !long {
                        return Ok(out);
                    }
                    if self.peek() == Some(quote) && self.peek_nth(1) == Some(quote) {
                        self.pos += 2 * quote.len_utf8();
                        // a closing run may be longer than three quotes
                        while self.peek() == Some(quote) {
                            out.push(quote);
                            self.bump();
                        }
                        return Ok(out);
                    }
                    out.push(c);
                }
                Some('\\') => {
                    let esc_at = self.pos - 1;
                    let c = match self.peek() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') | Some('U') => {
                            out.push(self.unicode_escape()?);
                            continue;
                        }
                        _ => return Err(self.error_at(esc_at, "invalid string escape")),
                    };
                    self.bump();
                    out.push(c);
                }
                Some(c) if !long && (c == '\n' || c == '\r') => {
                    return Err(self.error_at(self.pos - 1, "newline in short string"));
                }
                Some(c) => out.push(c),
            }
        }
    }

    fn numeric_literal(&mut self) -> Result<Literal, RdfError> {
        let start = self.pos;
        if matches!(self.peek(), Some('+') | Some('-')) {
            self.bump();
        }
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.peek().is_some_and(|c| c.is_ascii_digit()) {
                p.bump();
            }
            p.pos - s
        };
        let int_digits = digits(self);
        let mut datatype = vocab::XSD_INTEGER;
        if self.peek() == Some('.') && self.peek_nth(1).is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            digits(self);
            datatype = vocab::XSD_DECIMAL;
        } else if int_digits == 0 {
            return Err(self.error_at(start, "malformed number"));
        }
        if matches!(self.peek(), Some('e') | Some('E')) {
            self.bump();
            if matches!(self.peek(), Some('+') | Some('-')) {
                self.bump();
            }
            if digits(self) == 0 {
                return Err(self.error_at(start, "malformed exponent"));
            }
            datatype = vocab::XSD_DOUBLE;
        }
        Ok(Literal::typed(&self.src[start..self.pos], super::iri(datatype)))
    }
}

fn is_pn_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '\u{b7}'
}

fn has_scheme(value: &str) -> bool {
    match value.find(':') {
        Some(idx) => {
            let scheme = &value[..idx];
            !scheme.is_empty()
                && scheme.starts_with(|c: char| c.is_ascii_alphabetic())
                && scheme
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        }
        None => false,
    }
}

fn resolve_relative(base: &str, rel: &str) -> String {
    if rel.is_empty() {
        return base.split('#').next().unwrap_or(base).to_string();
    }
    if rel.starts_with('#') {
        return format!("{}{}", base.split('#').next().unwrap_or(base), rel);
    }
    let scheme_end = base.find("://").map(|i| i + 3);
    if let Some(stripped) = rel.strip_prefix("//") {
        let scheme = &base[..scheme_end.unwrap_or(0)];
        return format!("{scheme}{stripped}");
    }
    if rel.starts_with('/') {
        let authority_end = scheme_end
            .and_then(|s| base[s..].find('/').map(|i| s + i))
            .unwrap_or(base.len());
        return format!("{}{}", &base[..authority_end], rel);
    }
    let without_query = base.split(['?', '#']).next().unwrap_or(base);
    let dir_end = without_query.rfind('/').map_or(without_query.len(), |i| i + 1);
    let dir_end = dir_end.max(scheme_end.unwrap_or(0));
    format!("{}{}", &without_query[..dir_end], rel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::iri;

    fn parse(s: &str) -> Graph {
        parse_turtle(s).unwrap()
    }

    #[test]
    fn empty_document() {
        let g = parse("");
        assert!(g.is_empty());
        assert!(g.prefixes().is_empty());
    }

    #[test]
    fn single_type_triple() {
        let g = parse("@prefix ex: <http://example.org/> . ex:A a ex:B .");
        assert_eq!(g.len(), 1);
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject, Subject::Iri(iri("http://example.org/A")));
        assert_eq!(t.predicate, iri(vocab::RDF_TYPE));
        assert_eq!(t.object, Term::Iri(iri("http://example.org/B")));
        assert_eq!(g.prefixes().get("ex"), Some(&iri("http://example.org/")));
    }

    #[test]
    fn collection_rejected_at_paren() {
        let err = parse_turtle("@prefix ex: <http://example.org/> .\nex:A ex:p (ex:B) .").unwrap_err();
        assert_eq!(
            err,
            RdfError::UnsupportedConstruct {
                line: 2,
                column: 11,
                construct: "collection"
            }
        );
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_turtle("@prefix ex: <http://example.org/> .\nex:A ex:p ex:B\n").unwrap_err();
        match err {
            RdfError::Syntax { line, column, .. } => assert_eq!((line, column), (3, 1)),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_turtle("zz:A a zz:B .").unwrap_err();
        assert!(matches!(err, RdfError::Syntax { line: 1, column: 1, .. }));
    }

    #[test]
    fn lists_literals_and_blank_nodes() {
        let g = parse(
            r#"@prefix ex: <http://example.org/> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
ex:A ex:p "x"@en, "y"^^xsd:string, 42, -1.5, 2e3, true ;
     ex:q [ ex:r ex:C ; ex:s _:n ] ;
     ex:t """multi
line""" .
_:n ex:u 'single' .
"#,
        );
        assert_eq!(g.len(), 11);
        let a = Subject::Iri(iri("http://example.org/A"));
        let objs: Vec<_> = g.objects(&a, "http://example.org/p").cloned().collect();
        assert_eq!(objs.len(), 6);
        assert!(objs.contains(&Term::Literal(Literal::lang("x", "en").unwrap())));
        assert!(objs.contains(&Term::Literal(Literal::typed("42", iri(vocab::XSD_INTEGER)))));
        assert!(objs.contains(&Term::Literal(Literal::typed("-1.5", iri(vocab::XSD_DECIMAL)))));
        assert!(objs.contains(&Term::Literal(Literal::typed("2e3", iri(vocab::XSD_DOUBLE)))));
        // "[" is seen before "_:n", so it is b0 and _:n is b1
        let b0 = Subject::Blank(BlankId(0));
        let inner: Vec<_> = g.outgoing(&b0).collect();
        assert_eq!(inner.len(), 2);
        assert!(g
            .objects(&Subject::Blank(BlankId(1)), "http://example.org/u")
            .any(|o| o == &Term::Literal(Literal::plain("single"))));
    }

    #[test]
    fn integer_before_statement_dot() {
        let g = parse("@prefix ex: <http://example.org/> . ex:A ex:p 5.");
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn base_resolution() {
        let g = parse("@base <http://example.org/dir/doc> . <A> <#p> </root> .");
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject, Subject::Iri(iri("http://example.org/dir/A")));
        assert_eq!(t.predicate, iri("http://example.org/dir/doc#p"));
        assert_eq!(t.object, Term::Iri(iri("http://example.org/root")));
        assert!(parse_turtle("<A> <B> <C> .").is_err());
    }

    #[test]
    fn prefix_redeclaration_last_wins() {
        let parsed = parse_turtle_with_warnings(
            "@prefix ex: <http://a.org/> . @prefix ex: <http://b.org/> . ex:X a ex:Y .",
        )
        .unwrap();
        assert_eq!(parsed.warnings.len(), 1);
        assert_eq!(parsed.graph.prefixes().get("ex"), Some(&iri("http://b.org/")));
        assert!(parsed
            .graph
            .contains(&Triple::new(iri("http://b.org/X"), iri(vocab::RDF_TYPE), iri("http://b.org/Y"))));
    }

    #[test]
    fn empty_prefix_usable_but_not_recorded() {
        let parsed = parse_turtle_with_warnings("@prefix : <http://e.org/> . :A a :B .").unwrap();
        assert_eq!(parsed.graph.len(), 1);
        assert!(parsed.graph.prefixes().is_empty());
    }

    #[test]
    fn sparql_style_directives_and_comments() {
        let g = parse("PREFIX ex: <http://example.org/> # comment\nex:A a ex:B . # trailing");
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn local_names_with_colons_and_escapes() {
        let g = parse("@prefix obo: <http://purl.obolibrary.org/obo/> . obo:CHEBI:1 a obo:x\\.y .");
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject, Subject::Iri(iri("http://purl.obolibrary.org/obo/CHEBI:1")));
        assert_eq!(t.object, Term::Iri(iri("http://purl.obolibrary.org/obo/x.y")));
    }

    #[test]
    fn string_escapes() {
        let g = parse(r#"@prefix ex: <http://example.org/> . ex:A ex:p "a\"b\\c\né" ."#);
        let lit = g.iter().next().unwrap().object.as_literal().unwrap().clone();
        assert_eq!(lit.lexical(), "a\"b\\c\né");
    }

    #[test]
    fn non_ascii_names_near_keywords() {
        let g = parse("@prefix : <http://example.org/> . :é :p :B .");
        assert_eq!(g.len(), 1);
    }
}
