//! Forward-chaining materialization over class-level edges.

mod pattern;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::owl::read_restriction;
use crate::rdf::{iri, vocab, Graph, Iri, Subject, Term, Triple};

pub use pattern::{bindings_to_json, parse_pattern, Atom, Bindings, Pattern};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InferError {
    #[error("malformed pattern: {0}")]
    MalformedPattern(String),
    #[error("not entailed: {0}")]
    NotEntailed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    /// sub-transitivity
    R1,
    /// equiv-symmetry
    R2,
    /// equiv-transitivity
    R3,
    /// equiv-to-sub
    R4,
    /// rel-inheritance along sub
    R5,
    /// rel object rewriting along equiv
    R6,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

const SUB: u32 = 0;
const EQUIV: u32 = 1;
const REL_BASE: u32 = 2;

/// (subject, kind, object); kinds at or above `REL_BASE` are relation predicates.
type Edge = (u32, u32, u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseSource {
    /// An asserted triple.
    Explicit,
    /// A someValuesFrom restriction read as a relation edge.
    Restriction,
}

#[derive(Debug, Clone, Copy)]
enum Origin {
    Base(BaseSource),
    Derived(Rule, Edge, Option<Edge>),
}

/// Derivation of an entailed triple down to base triples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Explanation {
    Base {
        triple: [String; 3],
        source: BaseSource,
    },
    Derived {
        triple: [String; 3],
        rule: Rule,
        premises: Vec<Explanation>,
    },
}

impl Explanation {
    pub fn rules(&self) -> BTreeSet<Rule> {
        let mut out = BTreeSet::new();
        self.collect_rules(&mut out);
        out
    }

    fn collect_rules(&self, out: &mut BTreeSet<Rule>) {
        if let Explanation::Derived { rule, premises, .. } = self {
            out.insert(*rule);
            premises.iter().for_each(|p| p.collect_rules(out));
        }
    }
}

fn triple_strings(t: &Triple) -> [String; 3] {
    let s = match &t.subject {
        Subject::Iri(i) => i.to_string(),
        Subject::Blank(b) => format!("_:{b}"),
    };
    let o = match &t.object {
        Term::Iri(i) => i.to_string(),
        Term::Blank(b) => format!("_:{b}"),
        Term::Literal(l) => format!("{:?}", l.lexical()),
    };
    [s, t.predicate.to_string(), o]
}

/// Base graph plus rule-derived triples kept apart from it.
#[derive(Debug, Clone)]
pub struct InferredGraph {
    base: Graph,
    nodes: Vec<Iri>,
    node_ids: HashMap<Iri, u32>,
    predicates: Vec<Iri>,
    predicate_ids: HashMap<Iri, u32>,
    origin: HashMap<Edge, Origin>,
    sub_out: Vec<Vec<u32>>,
    equiv_out: Vec<Vec<u32>>,
    rel_out: Vec<Vec<(u32, u32)>>,
    rel_in: Vec<Vec<(u32, u32)>>,
}

impl InferredGraph {
    pub fn base(&self) -> &Graph {
        &self.base
    }

    fn edge_triple(&self, (s, k, o): Edge) -> Triple {
        let p = match k {
            SUB => iri(vocab::RDFS_SUBCLASS_OF),
            EQUIV => iri(vocab::OWL_EQUIVALENT_CLASS),
            _ => self.predicates[(k - REL_BASE) as usize].clone(),
        };
        Triple::new(self.nodes[s as usize].clone(), p, self.nodes[o as usize].clone())
    }

    fn derived_edges(&self) -> impl Iterator<Item = (&Edge, Rule)> {
        self.origin.iter().filter_map(|(e, o)| match o {
            Origin::Derived(r, ..) => Some((e, *r)),
            Origin::Base(_) => None,
        })
    }

    /// Derived triples with the rule that first produced each.
    pub fn derived(&self) -> BTreeMap<Triple, Rule> {
        self.derived_edges().map(|(e, r)| (self.edge_triple(*e), r)).collect()
    }

    pub fn derived_len(&self) -> usize {
        self.derived_edges().count()
    }

    /// Base triples, plus derived ones when `include_inferred`.
    pub fn to_graph(&self, include_inferred: bool) -> Graph {
        let mut g = self.base.clone();
        if include_inferred {
            g.extend(self.derived_edges().map(|(e, _)| self.edge_triple(*e)));
        }
        g
    }

    fn node(&self, i: &Iri) -> Option<u32> {
        self.node_ids.get(i).copied()
    }

    fn edge_of(&self, t: &Triple) -> Option<Edge> {
        let s = self.node(t.subject.as_iri()?)?;
        let o = self.node(t.object.as_iri()?)?;
        let k = match t.predicate.as_str() {
            vocab::RDFS_SUBCLASS_OF => SUB,
            vocab::OWL_EQUIVALENT_CLASS => EQUIV,
            _ => REL_BASE + *self.predicate_ids.get(&t.predicate)?,
        };
        let e = (s, k, o);
        self.origin.contains_key(&e).then_some(e)
    }

    /// True when the triple is asserted or entailed.
    pub fn holds(&self, t: &Triple) -> bool {
        self.edge_of(t).is_some() || self.base.contains(t)
    }

    pub fn explain(&self, t: &Triple) -> Result<Explanation, InferError> {
        match self.edge_of(t) {
            Some(e) => Ok(self.explain_edge(e)),
            None if self.base.contains(t) => Ok(Explanation::Base {
                triple: triple_strings(t),
                source: BaseSource::Explicit,
            }),
            None => Err(InferError::NotEntailed(triple_strings(t).join(" "))),
        }
    }

    fn explain_edge(&self, e: Edge) -> Explanation {
        let triple = triple_strings(&self.edge_triple(e));
        match self.origin[&e] {
            Origin::Base(source) => Explanation::Base { triple, source },
            Origin::Derived(rule, a, b) => Explanation::Derived {
                triple,
                rule,
                premises: std::iter::once(a).chain(b).map(|p| self.explain_edge(p)).collect(),
            },
        }
    }

    /// True when `a` is `c` or a subclass of it in the closure.
    fn is_a(&self, a: u32, c: u32) -> bool {
        a == c || self.origin.contains_key(&(a, SUB, c))
    }

    /// `x` together with its equivalents.
    fn equivalents(&self, x: u32) -> impl Iterator<Item = u32> + '_ {
        std::iter::once(x).chain(self.equiv_out[x as usize].iter().copied())
    }

    fn is_base_rel(&self, e: Edge) -> bool {
        matches!(self.origin.get(&e), Some(Origin::Base(_)))
    }
}

struct Reasoner {
    g: InferredGraph,
    sub_in: Vec<Vec<u32>>,
    equiv_in: Vec<Vec<u32>>,
    queue: Vec<Edge>,
    rules: bool,
}

impl Reasoner {
    fn intern(&mut self, i: &Iri) -> u32 {
        if let Some(&id) = self.g.node_ids.get(i) {
            return id;
        }
        let id = self.g.nodes.len() as u32;
        self.g.nodes.push(i.clone());
        self.g.node_ids.insert(i.clone(), id);
        self.g.sub_out.push(Vec::new());
        self.g.equiv_out.push(Vec::new());
        self.g.rel_out.push(Vec::new());
        self.g.rel_in.push(Vec::new());
        self.sub_in.push(Vec::new());
        self.equiv_in.push(Vec::new());
        id
    }

    fn intern_predicate(&mut self, p: &Iri) -> u32 {
        if let Some(&id) = self.g.predicate_ids.get(p) {
            return REL_BASE + id;
        }
        let id = self.g.predicates.len() as u32;
        self.g.predicates.push(p.clone());
        self.g.predicate_ids.insert(p.clone(), id);
        REL_BASE + id
    }

    fn add(&mut self, e: Edge, origin: Origin) {
        if let std::collections::hash_map::Entry::Vacant(v) = self.g.origin.entry(e) {
            v.insert(origin);
            self.queue.push(e);
        }
    }

    fn run(&mut self) {
        while let Some(e) = self.queue.pop() {
            let (a, k, b) = e;
            let (au, bu) = (a as usize, b as usize);
            match k {
                SUB => {
                    self.g.sub_out[au].push(b);
                    self.sub_in[bu].push(a);
                }
                EQUIV => {
                    self.g.equiv_out[au].push(b);
                    self.equiv_in[bu].push(a);
                }
                p => {
                    self.g.rel_out[au].push((p, b));
                    self.g.rel_in[bu].push((p, a));
                }
            }
            if !self.rules {
                continue;
            }
            match k {
                SUB => {
                    for i in 0..self.g.sub_out[bu].len() {
                        let c = self.g.sub_out[bu][i];
                        self.add((a, SUB, c), Origin::Derived(Rule::R1, e, Some((b, SUB, c))));
                    }
                    for i in 0..self.sub_in[au].len() {
                        let x = self.sub_in[au][i];
                        self.add((x, SUB, b), Origin::Derived(Rule::R1, (x, SUB, a), Some(e)));
                    }
                    for i in 0..self.g.rel_out[bu].len() {
                        let (p, c) = self.g.rel_out[bu][i];
                        self.add((a, p, c), Origin::Derived(Rule::R5, e, Some((b, p, c))));
                    }
                }
                EQUIV => {
                    self.add((b, EQUIV, a), Origin::Derived(Rule::R2, e, None));
                    for i in 0..self.g.equiv_out[bu].len() {
                        let c = self.g.equiv_out[bu][i];
                        self.add((a, EQUIV, c), Origin::Derived(Rule::R3, e, Some((b, EQUIV, c))));
                    }
                    for i in 0..self.equiv_in[au].len() {
                        let x = self.equiv_in[au][i];
                        self.add((x, EQUIV, b), Origin::Derived(Rule::R3, (x, EQUIV, a), Some(e)));
                    }
                    self.add((a, SUB, b), Origin::Derived(Rule::R4, e, None));
                    for i in 0..self.g.rel_in[au].len() {
                        let (p, x) = self.g.rel_in[au][i];
                        self.add((x, p, b), Origin::Derived(Rule::R6, (x, p, a), Some(e)));
                    }
                }
                p => {
                    for i in 0..self.sub_in[au].len() {
                        let x = self.sub_in[au][i];
                        self.add((x, p, b), Origin::Derived(Rule::R5, (x, SUB, a), Some(e)));
                    }
                    for i in 0..self.g.equiv_out[bu].len() {
                        let c = self.g.equiv_out[bu][i];
                        self.add((a, p, c), Origin::Derived(Rule::R6, e, Some((b, EQUIV, c))));
                    }
                }
            }
        }
    }
}

fn is_structural(p: &Iri) -> bool {
    vocab::STRUCTURAL_NAMESPACES.iter().any(|ns| p.as_str().starts_with(ns))
}

/// Least fixpoint of R1–R6 over the class-level edges of `g`.
pub fn materialize(g: &Graph) -> InferredGraph {
    load(g, true)
}

/// The class-level edges of `g` as asserted, with nothing derived.
pub fn without_inference(g: &Graph) -> InferredGraph {
    load(g, false)
}

fn load(g: &Graph, rules: bool) -> InferredGraph {
    let mut r = Reasoner {
        g: InferredGraph {
            base: g.clone(),
            nodes: Vec::new(),
            node_ids: HashMap::new(),
            predicates: Vec::new(),
            predicate_ids: HashMap::new(),
            origin: HashMap::new(),
            sub_out: Vec::new(),
            equiv_out: Vec::new(),
            rel_out: Vec::new(),
            rel_in: Vec::new(),
        },
        sub_in: Vec::new(),
        equiv_in: Vec::new(),
        queue: Vec::new(),
        rules,
    };

    let annotation_properties: HashSet<&Iri> = g
        .iter()
        .filter(|t| {
            t.predicate.as_str() == vocab::RDF_TYPE
                && t.object.as_iri().is_some_and(|o| o.as_str() == vocab::OWL_ANNOTATION_PROPERTY)
        })
        .filter_map(|t| t.subject.as_iri())
        .collect();

    let explicit = Origin::Base(BaseSource::Explicit);
    for t in g.iter() {
        let Some(s) = t.subject.as_iri() else { continue };
        match (t.predicate.as_str(), &t.object) {
            (vocab::RDF_TYPE, Term::Iri(o)) if o.as_str() == vocab::OWL_CLASS => {
                // declared classes join the node universe even without edges
                r.intern(s);
            }
            (vocab::RDFS_SUBCLASS_OF, Term::Iri(o)) => {
                let e = (r.intern(s), SUB, r.intern(o));
                r.add(e, explicit);
            }
            (vocab::RDFS_SUBCLASS_OF, Term::Blank(b)) => {
                if let Ok((p, c)) = read_restriction(g, *b) {
                    let e = (r.intern(s), r.intern_predicate(&p), r.intern(&c));
                    r.add(e, Origin::Base(BaseSource::Restriction));
                }
            }
            (vocab::OWL_EQUIVALENT_CLASS, Term::Iri(o)) => {
                let e = (r.intern(s), EQUIV, r.intern(o));
                r.add(e, explicit);
            }
            (_, Term::Iri(o)) if !is_structural(&t.predicate) && !annotation_properties.contains(&t.predicate) => {
                let e = (r.intern(s), r.intern_predicate(&t.predicate), r.intern(o));
                r.add(e, explicit);
            }
            _ => {}
        }
    }
    r.run();
    r.g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_turtle;

    const F1: &str = include_str!("../../../../fixtures/toy.ttl");
    const F2: &str = include_str!("../../../../fixtures/fig1.ttl");

    fn ex(l: &str) -> Iri {
        iri(&format!("http://example.org/{l}"))
    }

    fn sub(a: &Iri, b: &Iri) -> Triple {
        Triple::new(a.clone(), iri(vocab::RDFS_SUBCLASS_OF), b.clone())
    }

    #[test]
    fn f1_closure() {
        let ig = materialize(&parse_turtle(F1).unwrap());
        let d = ig.derived();
        assert_eq!(d.get(&sub(&ex("A"), &ex("C"))), Some(&Rule::R1));
        assert!(d.contains_key(&sub(&ex("A2"), &ex("B"))));
        let e = ig.explain(&sub(&ex("A2"), &ex("B"))).unwrap();
        assert_eq!(e.rules(), BTreeSet::from([Rule::R1, Rule::R2, Rule::R4]));
    }

    #[test]
    fn explain_f1() {
        let ig = materialize(&parse_turtle(F1).unwrap());
        let e = ig.explain(&sub(&ex("A"), &ex("C"))).unwrap();
        let Explanation::Derived { rule, premises, .. } = e else { panic!() };
        assert_eq!(rule, Rule::R1);
        let leaves: Vec<[String; 3]> = premises
            .iter()
            .map(|p| match p {
                Explanation::Base { triple, .. } => triple.clone(),
                _ => panic!("expected base premise"),
            })
            .collect();
        assert_eq!(
            leaves,
            vec![triple_strings(&sub(&ex("A"), &ex("B"))), triple_strings(&sub(&ex("B"), &ex("C")))]
        );
        assert!(matches!(
            ig.explain(&sub(&ex("A"), &ex("B"))).unwrap(),
            Explanation::Base { source: BaseSource::Explicit, .. }
        ));
        assert!(matches!(ig.explain(&sub(&ex("C"), &ex("A"))), Err(InferError::NotEntailed(_))));
    }

    #[test]
    fn no_hierarchy_no_derivations() {
        let g = parse_turtle("<http://x.org/a> <http://x.org/p> <http://x.org/b> .").unwrap();
        assert_eq!(materialize(&g).derived_len(), 0);
    }

    #[test]
    fn f2_red_edge() {
        let ig = materialize(&parse_turtle(F2).unwrap());
        let p = ig.base().prefixes().clone();
        let red = Triple::new(
            p.expand("nn:CompoundY").unwrap(),
            p.expand("ro:has_role").unwrap(),
            p.expand("chebi:AntiObesityAgent").unwrap(),
        );
        assert!(ig.derived().contains_key(&red));
        let rules = ig.explain(&red).unwrap().rules();
        assert!(rules.contains(&Rule::R5), "{rules:?}");
    }

    #[test]
    fn rematerialization_adds_nothing() {
        for text in [F1, F2] {
            let ig = materialize(&parse_turtle(text).unwrap());
            let again = materialize(&ig.to_graph(true));
            assert_eq!(again.derived_len(), 0);
        }
    }
}
