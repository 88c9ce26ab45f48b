//! Canonical Turtle writer.
//!
//! Output order: prefixes by name, IRI subjects by expanded IRI, then blank
//! subjects; predicates and objects sorted within each subject. Blank nodes
//! used exactly once as an object are written inline as `[ ... ]`. Labels of
//! the remaining blank nodes are renumbered in order of first appearance, so
//! re-reading the output and writing it again yields the same bytes.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write;

use super::vocab;
use super::{BlankId, CurieMap, Graph, Iri, Literal, Subject, Term};

pub fn serialize_turtle(g: &Graph) -> String {
    let mut out = String::new();
    for (prefix, ns) in g.prefixes().iter() {
        let _ = writeln!(out, "@prefix {prefix}: <{ns}> .");
    }
    if g.is_empty() {
        return out;
    }
    if !g.prefixes().is_empty() {
        out.push('\n');
    }
    Writer::new(g).write(&mut out);
    out
}

type PredicateMap<'a> = BTreeMap<&'a Iri, Vec<&'a Term>>;

struct Writer<'a> {
    prefixes: &'a CurieMap,
    by_subject: BTreeMap<&'a Subject, PredicateMap<'a>>,
    object_refs: HashMap<BlankId, usize>,
    numbering: HashMap<BlankId, u32>,
    emitted: HashSet<BlankId>,
}

impl<'a> Writer<'a> {
    fn new(g: &'a Graph) -> Self {
        let mut by_subject: BTreeMap<&Subject, PredicateMap> = BTreeMap::new();
        let mut object_refs = HashMap::new();
        for t in g.iter() {
            by_subject
                .entry(&t.subject)
                .or_default()
                .entry(&t.predicate)
                .or_default()
                .push(&t.object);
            if let Term::Blank(b) = t.object {
                *object_refs.entry(b).or_insert(0) += 1;
            }
        }
        Self {
            prefixes: g.prefixes(),
            by_subject,
            object_refs,
            numbering: HashMap::new(),
            emitted: HashSet::new(),
        }
    }

    fn number(&mut self, b: BlankId) -> u32 {
        let next = self.numbering.len() as u32;
        *self.numbering.entry(b).or_insert(next)
    }

    fn inlinable(&self, b: BlankId) -> bool {
        self.object_refs.get(&b).copied() == Some(1) && !self.emitted.contains(&b)
    }

    fn write(mut self, out: &mut String) {
        let iri_subjects: Vec<&Subject> = self
            .by_subject
            .keys()
            .copied()
            .filter(|s| matches!(s, Subject::Iri(_)))
            .collect();
        let mut first = true;
        for s in iri_subjects {
            if !first {
                out.push('\n');
            }
            first = false;
            let Subject::Iri(iri) = s else { unreachable!() };
            out.push_str(&self.iri(iri));
            self.write_block(s, out);
        }

        // Remaining blank subjects: already-numbered ones in number order,
        // then unreferenced ones by their original label.
        let blank_subjects: Vec<BlankId> = self
            .by_subject
            .keys()
            .filter_map(|s| match s {
                Subject::Blank(b) => Some(*b),
                Subject::Iri(_) => None,
            })
            .collect();
        loop {
            let pending = blank_subjects.iter().copied().filter(|b| !self.emitted.contains(b));
            let next = pending.min_by_key(|b| match self.numbering.get(b) {
                Some(n) => (0, *n, b.0),
                None => (1, 0, b.0),
            });
            let Some(b) = next else { break };
            if !first {
                out.push('\n');
            }
            first = false;
            self.emitted.insert(b);
            let n = self.number(b);
            let _ = write!(out, "_:b{n}");
            self.write_block(&Subject::Blank(b), out);
        }
    }

    fn write_block(&mut self, s: &Subject, out: &mut String) {
        let preds = self.by_subject.get(s).cloned().unwrap_or_default();
        let count = preds.len();
        for (i, (p, objects)) in preds.into_iter().enumerate() {
            out.push_str(if i == 0 { " " } else { "    " });
            self.write_predicate_objects(p, objects, out);
            out.push_str(if i + 1 == count { " .\n" } else { " ;\n" });
        }
    }

    fn write_predicate_objects(&mut self, p: &Iri, mut objects: Vec<&'a Term>, out: &mut String) {
        if p.as_str() == vocab::RDF_TYPE {
            out.push('a');
        } else {
            out.push_str(&self.iri(p));
        }
        out.push(' ');
        objects.sort_by(|a, b| self.object_order(a, b));
        for (i, o) in objects.into_iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            self.write_object(o, out);
        }
    }

    fn object_order(&self, a: &Term, b: &Term) -> Ordering {
        let key = |b: &BlankId| match self.numbering.get(b) {
            Some(n) => (0, *n, b.0),
            None => (1, 0, b.0),
        };
        match (a, b) {
            (Term::Blank(x), Term::Blank(y)) => key(x).cmp(&key(y)),
            _ => a.cmp(b),
        }
    }

    fn write_object(&mut self, o: &Term, out: &mut String) {
        match o {
            Term::Iri(i) => out.push_str(&self.iri(i)),
            Term::Literal(l) => out.push_str(&self.literal(l)),
            Term::Blank(b) => {
                if self.inlinable(*b) {
                    self.emitted.insert(*b);
                    self.number(*b);
                    let preds = self.by_subject.get(&Subject::Blank(*b)).cloned().unwrap_or_default();
                    if preds.is_empty() {
                        out.push_str("[]");
                        return;
                    }
                    out.push_str("[ ");
                    let count = preds.len();
                    for (i, (p, objects)) in preds.into_iter().enumerate() {
                        self.write_predicate_objects(p, objects, out);
                        out.push_str(if i + 1 == count { " ]" } else { " ; " });
                    }
                } else {
                    let n = self.number(*b);
                    let _ = write!(out, "_:b{n}");
                }
            }
        }
    }

    fn iri(&self, iri: &Iri) -> String {
        if let Some(curie) = self.prefixes.compress(iri) {
            let local = &curie[curie.find(':').expect("curie has colon") + 1..];
            if is_safe_local(local) {
                return curie;
            }
        }
        format!("<{}>", iri.as_str())
    }

    fn literal(&self, l: &Literal) -> String {
        let mut s = String::with_capacity(l.lexical().len() + 2);
        s.push('"');
        for c in l.lexical().chars() {
            match c {
                '"' => s.push_str("\\\""),
                '\\' => s.push_str("\\\\"),
                '\n' => s.push_str("\\n"),
                '\r' => s.push_str("\\r"),
                '\t' => s.push_str("\\t"),
                c if c.is_control() => {
                    let _ = write!(s, "\\u{:04X}", c as u32);
                }
                c => s.push(c),
            }
        }
        s.push('"');
        if let Some(lang) = l.language() {
            s.push('@');
            s.push_str(lang);
        } else if let Some(dt) = l.datatype() {
            s.push_str("^^");
            s.push_str(&self.iri(dt));
        }
        s
    }
}

/// Local parts the reader accepts verbatim without escapes.
fn is_safe_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => return true,
        Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == ':' => {}
        Some(_) => return false,
    }
    local.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | ':')) && !local.ends_with('.')
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{iri, parse_turtle};

    #[test]
    fn empty_graph_has_no_statements() {
        assert_eq!(serialize_turtle(&Graph::new()), "");
        let g = parse_turtle("@prefix ex: <http://example.org/> .").unwrap();
        assert_eq!(serialize_turtle(&g), "@prefix ex: <http://example.org/> .\n");
    }

    #[test]
    fn single_statement_uses_a() {
        let g = parse_turtle("@prefix ex: <http://example.org/> . ex:A a ex:B .").unwrap();
        assert_eq!(
            serialize_turtle(&g),
            "@prefix ex: <http://example.org/> .\n\nex:A a ex:B .\n"
        );
    }

    #[test]
    fn restriction_written_inline() {
        let src = "@prefix ex: <http://example.org/> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
ex:Q rdfs:subClassOf ex:C, [ a owl:Restriction ; owl:onProperty ex:has_role ; owl:someValuesFrom ex:R ] .";
        let text = serialize_turtle(&parse_turtle(src).unwrap());
        assert!(text.contains(
            "ex:Q rdfs:subClassOf ex:C, [ a owl:Restriction ; owl:onProperty ex:has_role ; owl:someValuesFrom ex:R ] ."
        ));
    }

    #[test]
    fn unsafe_local_names_fall_back_to_iri() {
        let mut g = Graph::new();
        g.prefixes_mut().insert("ex", iri("http://example.org/")).unwrap();
        g.insert(crate::rdf::Triple::new(
            iri("http://example.org/a,b"),
            iri("http://example.org/p"),
            iri("http://example.org/-x"),
        ));
        let text = serialize_turtle(&g);
        assert!(text.contains("<http://example.org/a,b> ex:p <http://example.org/-x> ."));
        assert_eq!(parse_turtle(&text).unwrap().triples(), g.triples());
    }

    #[test]
    fn shared_and_cyclic_blank_nodes_are_idempotent() {
        let src = "@prefix ex: <http://example.org/> .
ex:A ex:p _:x, _:y . ex:B ex:p _:x .
_:y ex:q _:z . _:z ex:q _:y .
_:w ex:r ex:A .";
        let once = serialize_turtle(&parse_turtle(src).unwrap());
        let twice = serialize_turtle(&parse_turtle(&once).unwrap());
        assert_eq!(once, twice);
        assert_eq!(parse_turtle(&once).unwrap().len(), 6);
    }

    #[test]
    fn literal_escaping_round_trips() {
        let mut g = Graph::new();
        g.insert(crate::rdf::Triple::new(
            iri("http://example.org/A"),
            iri("http://example.org/p"),
            Literal::plain("tab\there \"q\" \\ \u{1} end"),
        ));
        let text = serialize_turtle(&g);
        assert_eq!(parse_turtle(&text).unwrap().triples(), g.triples());
    }
}
