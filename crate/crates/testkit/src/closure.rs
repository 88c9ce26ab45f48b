//! Random class graphs and closure oracles for materialization.

use std::collections::BTreeSet;

use obdm_core::infer::{Explanation, InferredGraph, Rule};
use obdm_core::rdf::{vocab, Graph, Iri, Triple};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn node(i: usize) -> Iri {
    Iri::new(format!("http://example.org/N{i}")).unwrap()
}

pub fn rel(i: usize) -> Iri {
    Iri::new(format!("http://example.org/rel{i}")).unwrap()
}

fn sub() -> Iri {
    Iri::new(vocab::RDFS_SUBCLASS_OF).unwrap()
}

fn equiv() -> Iri {
    Iri::new(vocab::OWL_EQUIVALENT_CLASS).unwrap()
}

/// Edges of a random DAG on `n` nodes: a hidden random order, edges only
/// forward in it.
pub fn dag(rng: &mut impl Rng, n: usize) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let density = rng.gen_range(0.5..3.0) / n.max(1) as f64;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density.min(1.0)) {
                edges.push((order[i], order[j]));
            }
        }
    }
    edges
}

/// Class graph with one `owl:Class` declaration per node.
pub fn class_graph(n: usize, subs: &[(usize, usize)], equivs: &[(usize, usize)], rels: &[(usize, usize, usize)]) -> Graph {
    let mut g = Graph::new();
    let ty = Iri::new(vocab::RDF_TYPE).unwrap();
    let class = Iri::new(vocab::OWL_CLASS).unwrap();
    for i in 0..n {
        g.insert(Triple::new(node(i), ty.clone(), class.clone()));
    }
    for &(a, b) in subs {
        g.insert(Triple::new(node(a), sub(), node(b)));
    }
    for &(a, b) in equivs {
        g.insert(Triple::new(node(a), equiv(), node(b)));
    }
    for &(a, p, b) in rels {
        g.insert(Triple::new(node(a), rel(p), node(b)));
    }
    g
}

/// All-pairs reachability over paths of length at least one.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for &(a, b) in edges {
        r[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Expected closure of a mixed class graph under the six rules.
pub struct Expected {
    pub sub: BTreeSet<(usize, usize)>,
    pub equiv: BTreeSet<(usize, usize)>,
    pub rel: BTreeSet<(usize, usize, usize)>,
}

pub fn expected_closure(n: usize, subs: &[(usize, usize)], equivs: &[(usize, usize)], rels: &[(usize, usize, usize)]) -> Expected {
    let sym: Vec<(usize, usize)> = equivs.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
    let eq = floyd_warshall(n, &sym);
    let mut sub_edges = subs.to_vec();
    sub_edges.extend(&sym);
    let su = floyd_warshall(n, &sub_edges);
    let pairs = |m: &Vec<Vec<bool>>| -> BTreeSet<(usize, usize)> {
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| m[i][j]).collect()
    };
    let mut rel = BTreeSet::new();
    for &(x, p, y) in rels {
        for a in 0..n {
            if a != x && !su[a][x] {
                continue;
            }
            for c in 0..n {
                if c == y || eq[y][c] {
                    rel.insert((a, p, c));
                }
            }
        }
    }
    Expected {
        sub: pairs(&su),
        equiv: pairs(&eq),
        rel,
    }
}

/// Sub, equiv and rel edges between numbered nodes that `ig` entails.
pub fn entailed(ig: &InferredGraph, n: usize, n_rels: usize) -> Expected {
    let mut e = Expected {
        sub: BTreeSet::new(),
        equiv: BTreeSet::new(),
        rel: BTreeSet::new(),
    };
    for a in 0..n {
        for b in 0..n {
            if ig.holds(&Triple::new(node(a), sub(), node(b))) {
                e.sub.insert((a, b));
            }
            if ig.holds(&Triple::new(node(a), equiv(), node(b))) {
                e.equiv.insert((a, b));
            }
            for p in 0..n_rels {
                if ig.holds(&Triple::new(node(a), rel(p), node(b))) {
                    e.rel.insert((a, p, b));
                }
            }
        }
    }
    e
}

fn is_sub(t: &[String; 3]) -> bool {
    t[1] == vocab::RDFS_SUBCLASS_OF
}

fn is_equiv(t: &[String; 3]) -> bool {
    t[1] == vocab::OWL_EQUIVALENT_CLASS
}

fn is_rel(t: &[String; 3]) -> bool {
    !is_sub(t) && !is_equiv(t)
}

fn conclusion(e: &Explanation) -> &[String; 3] {
    match e {
        Explanation::Base { triple, .. } | Explanation::Derived { triple, .. } => triple,
    }
}

/// Whether `rule` yields `t` from premises `p` (in either premise order).
fn rule_applies(rule: Rule, p: &[&[String; 3]], t: &[String; 3]) -> bool {
    let two = |f: &dyn Fn(&[String; 3], &[String; 3]) -> bool| {
        p.len() == 2 && (f(p[0], p[1]) || f(p[1], p[0]))
    };
    match rule {
        Rule::R1 => two(&|a, b| is_sub(a) && is_sub(b) && is_sub(t) && a[2] == b[0] && a[0] == t[0] && b[2] == t[2]),
        Rule::R2 => p.len() == 1 && is_equiv(p[0]) && is_equiv(t) && p[0][0] == t[2] && p[0][2] == t[0],
        Rule::R3 => two(&|a, b| is_equiv(a) && is_equiv(b) && is_equiv(t) && a[2] == b[0] && a[0] == t[0] && b[2] == t[2]),
        Rule::R4 => p.len() == 1 && is_equiv(p[0]) && is_sub(t) && p[0][0] == t[0] && p[0][2] == t[2],
        Rule::R5 => two(&|a, b| {
            is_sub(a) && is_rel(b) && b[1] == t[1] && a[2] == b[0] && a[0] == t[0] && b[2] == t[2]
        }),
        Rule::R6 => two(&|a, b| {
            is_rel(a) && is_equiv(b) && a[1] == t[1] && a[2] == b[0] && a[0] == t[0] && b[2] == t[2]
        }),
    }
}

/// Checks every rule step of a derivation tree and that its explicit leaves
/// are base triples.
pub fn check_explanation(e: &Explanation, base: &Graph) -> Result<(), String> {
    match e {
        Explanation::Base { triple, source } => {
            let explicit = base.iter().any(|t| {
                t.subject.as_iri().map(Iri::as_str) == Some(triple[0].as_str())
                    && t.predicate.as_str() == triple[1]
                    && t.object.as_iri().map(Iri::as_str) == Some(triple[2].as_str())
            });
            if explicit || matches!(source, obdm_core::infer::BaseSource::Restriction) {
                Ok(())
            } else {
                Err(format!("leaf {triple:?} is not a base triple"))
            }
        }
        Explanation::Derived { triple, rule, premises } => {
            let concl: Vec<&[String; 3]> = premises.iter().map(conclusion).collect();
            if !rule_applies(*rule, &concl, triple) {
                return Err(format!("{rule} does not yield {triple:?} from {concl:?}"));
            }
            premises.iter().try_for_each(|p| check_explanation(p, base))
        }
    }
}
