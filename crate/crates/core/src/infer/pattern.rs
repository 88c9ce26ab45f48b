use std::collections::{BTreeMap, BTreeSet};

use crate::rdf::{CurieMap, Iri};

use super::{InferError, InferredGraph, EQUIV, REL_BASE};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Class { var: String, class: Iri },
    Edge { subject: String, property: Iri, object: String },
}

/// Conjunction of class and edge atoms over variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    atoms: Vec<Atom>,
}

/// Variable name (without `?`) to bound IRI.
pub type Bindings = BTreeMap<String, Iri>;

impl Pattern {
    pub fn new(atoms: Vec<Atom>) -> Result<Self, InferError> {
        if atoms.is_empty() {
            return Err(InferError::MalformedPattern("pattern has no atoms".into()));
        }
        let mut edge_vars = BTreeSet::new();
        let mut all_vars = BTreeSet::new();
        for a in &atoms {
            match a {
                Atom::Class { var, .. } => {
                    all_vars.insert(var.as_str());
                }
                Atom::Edge { subject, object, .. } => {
                    edge_vars.extend([subject.as_str(), object.as_str()]);
                    all_vars.extend([subject.as_str(), object.as_str()]);
                }
            }
        }
        if all_vars.len() > 1 {
            if let Some(v) = all_vars.iter().find(|v| !edge_vars.contains(*v)) {
                return Err(InferError::MalformedPattern(format!(
                    "?{v} appears only in class atoms but is not the sole variable"
                )));
            }
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn vars(&self) -> BTreeSet<&str> {
        self.atoms
            .iter()
            .flat_map(|a| match a {
                Atom::Class { var, .. } => vec![var.as_str()],
                Atom::Edge { subject, object, .. } => vec![subject.as_str(), object.as_str()],
            })
            .collect()
    }
}

fn parse_var(tok: &str, line: usize) -> Result<String, InferError> {
    match tok.strip_prefix('?') {
        Some(v) if !v.is_empty() && v.chars().all(|c| c.is_alphanumeric() || c == '_') => Ok(v.to_string()),
        _ => Err(InferError::MalformedPattern(format!("line {line}: expected a ?variable, got {tok:?}"))),
    }
}

/// One atom per line: `class ?v <term>` or `edge ?v <term> ?w`; `#` comments.
pub fn parse_pattern(text: &str, prefixes: &CurieMap) -> Result<Pattern, InferError> {
    let mut atoms = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let toks: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        let term = |t: &str| {
            prefixes
                .resolve(t)
                .map_err(|e| InferError::MalformedPattern(format!("line {line}: {e}")))
        };
        match toks.as_slice() {
            [] => {}
            ["class", v, c] => atoms.push(Atom::Class {
                var: parse_var(v, line)?,
                class: term(c)?,
            }),
            ["edge", s, p, o] => atoms.push(Atom::Edge {
                subject: parse_var(s, line)?,
                property: term(p)?,
                object: parse_var(o, line)?,
            }),
            _ => {
                return Err(InferError::MalformedPattern(format!(
                    "line {line}: expected `class ?v C` or `edge ?v p ?w`"
                )))
            }
        }
    }
    Pattern::new(atoms)
}

/// Drops a `#` comment; a `#` inside `<...>` belongs to the IRI.
fn strip_comment(line: &str) -> &str {
    let mut in_iri = false;
    for (i, c) in line.char_indices() {
        match c {
            '<' => in_iri = true,
            '>' => in_iri = false,
            '#' if !in_iri => return &line[..i],
            _ => {}
        }
    }
    line
}

struct Query<'a> {
    ig: &'a InferredGraph,
    vars: Vec<&'a str>,
    /// (var index, class node or None when the class is unknown)
    classes: Vec<(usize, Option<u32>)>,
    /// (subject var, relation kind or None when unknown, object var)
    edges: Vec<(usize, Option<u32>, usize)>,
}

impl<'a> Query<'a> {
    fn new(ig: &'a InferredGraph, p: &'a Pattern) -> Self {
        let vars: Vec<&str> = p.vars().into_iter().collect();
        let idx = |v: &str| vars.iter().position(|x| *x == v).expect("collected var");
        let mut classes = Vec::new();
        let mut edges = Vec::new();
        for a in p.atoms() {
            match a {
                Atom::Class { var, class } => classes.push((idx(var), ig.node(class))),
                Atom::Edge { subject, property, object } => edges.push((
                    idx(subject),
                    ig.predicate_ids.get(property).map(|k| REL_BASE + k),
                    idx(object),
                )),
            }
        }
        Self { ig, vars, classes, edges }
    }

    fn class_ok(&self, var: usize, value: u32) -> bool {
        self.classes
            .iter()
            .filter(|(v, _)| *v == var)
            .all(|(_, c)| c.is_some_and(|c| self.ig.is_a(value, c)))
    }

    fn bind(&self, binding: &mut [Option<u32>], var: usize, value: u32) -> Option<bool> {
        match binding[var] {
            Some(existing) => Some(existing == value),
            None if self.class_ok(var, value) => {
                binding[var] = Some(value);
                None
            }
            None => Some(false),
        }
    }

    fn solve(&self, binding: &mut Vec<Option<u32>>, done: &mut Vec<bool>, out: &mut Vec<Vec<u32>>) {
        let next = (0..self.edges.len())
            .filter(|i| !done[*i])
            .max_by_key(|i| {
                let (s, _, o) = self.edges[*i];
                (binding[s].is_some() as u8 + binding[o].is_some() as u8, std::cmp::Reverse(*i))
            });
        let Some(i) = next else {
            if let Some(full) = binding.iter().copied().collect::<Option<Vec<u32>>>() {
                out.push(full);
            }
            return;
        };
        let (sv, kind, ov) = self.edges[i];
        let Some(kind) = kind else { return };
        let candidates: Vec<(u32, u32)> = match (binding[sv], binding[ov]) {
            (Some(s), _) => self.ig.rel_out[s as usize]
                .iter()
                .filter(|(p, _)| *p == kind)
                .map(|(_, o)| (s, *o))
                .collect(),
            (None, Some(o)) => self.ig.rel_in[o as usize]
                .iter()
                .filter(|(p, _)| *p == kind)
                .map(|(_, s)| (*s, o))
                .collect(),
            (None, None) => self
                .ig
                .rel_out
                .iter()
                .enumerate()
                .flat_map(|(s, outs)| {
                    outs.iter().filter(|(p, _)| *p == kind).map(move |(_, o)| (s as u32, *o))
                })
                .collect(),
        };
        done[i] = true;
        for (s, o) in candidates {
            let saved = binding.clone();
            let ok_s = self.bind(binding, sv, s).unwrap_or(true);
            let ok_o = ok_s && self.bind(binding, ov, o).unwrap_or(true);
            if ok_s && ok_o {
                self.solve(binding, done, out);
            }
            *binding = saved;
        }
        done[i] = false;
    }

    fn run(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        if self.edges.is_empty() {
            // a single class-only variable ranges over every known node
            for n in 0..self.ig.nodes.len() as u32 {
                if self.class_ok(0, n) {
                    out.push(vec![n]);
                }
            }
        } else {
            let mut binding = vec![None; self.vars.len()];
            let mut done = vec![false; self.edges.len()];
            self.solve(&mut binding, &mut done, &mut out);
        }
        out.sort();
        out.dedup();
        out
    }

    fn to_bindings(&self, row: &[u32]) -> Bindings {
        self.vars
            .iter()
            .zip(row)
            .map(|(v, n)| (v.to_string(), self.ig.nodes[*n as usize].clone()))
            .collect()
    }

    /// Edge atoms satisfied by an asserted relation whose subject is the
    /// bound subject or one of its superclasses, without object rewriting.
    fn direct_edges(&self, row: &[u32]) -> usize {
        self.edges
            .iter()
            .filter(|(sv, kind, ov)| {
                let (a, b) = (row[*sv], row[*ov]);
                self.ig.rel_in[b as usize].iter().any(|(p, x)| {
                    Some(*p) == *kind
                        && self.ig.is_base_rel((*x, *p, b))
                        && self.ig.is_a(a, *x)
                })
            })
            .count()
    }

    fn equivalence_key(&self, row: &[u32]) -> Vec<&'a Iri> {
        row.iter()
            .map(|n| {
                self.ig
                    .equivalents(*n)
                    .map(|e| &self.ig.nodes[e as usize])
                    .min()
                    .expect("non-empty")
            })
            .collect()
    }
}

impl InferredGraph {
    /// Every binding satisfying the pattern over base and derived edges,
    /// sorted and deduplicated.
    pub fn match_all(&self, p: &Pattern) -> Vec<Bindings> {
        let q = Query::new(self, p);
        let mut rows: Vec<Bindings> = q.run().iter().map(|r| q.to_bindings(r)).collect();
        rows.sort();
        rows
    }

    /// Like [`match_all`](Self::match_all), but bindings that differ only by
    /// `owl:equivalentClass` collapse to one answer: the binding with the
    /// most edge atoms satisfied by asserted relations, then the smallest.
    pub fn match_pattern(&self, p: &Pattern) -> Vec<Bindings> {
        let q = Query::new(self, p);
        let mut best: BTreeMap<Vec<&Iri>, (usize, Bindings)> = BTreeMap::new();
        for row in q.run() {
            let score = q.direct_edges(&row);
            let b = q.to_bindings(&row);
            let key = q.equivalence_key(&row);
            match best.get(&key) {
                Some((s, existing)) if *s > score || (*s == score && *existing <= b) => {}
                _ => {
                    best.insert(key, (score, b));
                }
            }
        }
        let mut rows: Vec<Bindings> = best.into_values().map(|(_, b)| b).collect();
        rows.sort();
        rows
    }

    /// True when `a` and `b` are the same node or asserted/entailed equivalents.
    pub fn equivalent(&self, a: &Iri, b: &Iri) -> bool {
        match (self.node(a), self.node(b)) {
            (Some(x), Some(y)) => x == y || self.origin.contains_key(&(x, EQUIV, y)),
            _ => a == b,
        }
    }
}

/// Serializes bindings as a JSON array of objects with sorted keys.
pub fn bindings_to_json(rows: &[Bindings]) -> String {
    serde_json::to_string_pretty(rows).expect("bindings serialize")
}

#[cfg(test)]
mod tests {
    use super::super::materialize;
    use super::*;
    use crate::rdf::{iri, parse_turtle};

    const F2: &str = include_str!("../../../../fixtures/fig1.ttl");
    const FIG1_PATTERN: &str = include_str!("../../../../fixtures/fig1.pattern");

    #[test]
    fn fig1_query_single_answer() {
        let ig = materialize(&parse_turtle(F2).unwrap());
        let p = parse_pattern(FIG1_PATTERN, ig.base().prefixes()).unwrap();
        let rows = ig.match_pattern(&p);
        let px = ig.base().prefixes();
        let expected: Bindings = [
            ("e", px.expand("nn:ExperimentX").unwrap()),
            ("c", px.expand("nn:CompoundY").unwrap()),
            ("r", px.expand("chebi:AntiObesityAgent").unwrap()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        assert_eq!(rows, vec![expected.clone()]);
        // every raw answer is equivalent to the collapsed one
        let raw = ig.match_all(&p);
        assert!(raw.contains(&expected));
        for r in &raw {
            assert!(r.iter().all(|(k, v)| ig.equivalent(v, &expected[k])));
        }
    }

    #[test]
    fn pattern_errors() {
        let p = CurieMap::new();
        assert!(matches!(parse_pattern("", &p), Err(InferError::MalformedPattern(_))));
        assert!(matches!(parse_pattern("# only comment\n", &p), Err(InferError::MalformedPattern(_))));
        assert!(parse_pattern("class ?x <http://x.org/C>\nclass ?y <http://x.org/C>\n", &p).is_err());
        assert!(parse_pattern("edge ?x <http://x.org/p>\n", &p).is_err());
        assert!(parse_pattern("class ?x <http://x.org/C#frag> # note\n", &p).is_ok());
    }

    #[test]
    fn absent_class_matches_nothing() {
        let ig = materialize(&parse_turtle(F2).unwrap());
        let p = parse_pattern("class ?x <http://nowhere.example/Nope>\n", &CurieMap::new()).unwrap();
        assert!(ig.match_pattern(&p).is_empty());
    }

    #[test]
    fn sole_class_variable_lists_subclasses() {
        let g = parse_turtle(
            "<http://x.org/A> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <http://x.org/B> .",
        )
        .unwrap();
        let ig = materialize(&g);
        let p = parse_pattern("class ?x <http://x.org/B>\n", &CurieMap::new()).unwrap();
        let rows = ig.match_all(&p);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0]["x"], iri("http://x.org/A"));
    }
}
