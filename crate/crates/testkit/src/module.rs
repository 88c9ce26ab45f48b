//! Random ontologies and oracles for locality-based module extraction.

use std::collections::{BTreeSet, VecDeque};

use obdm_core::assemble::Signature;
use obdm_core::owl::{AnnotationRecord, Axiom, EquivalencePair, OntologyModel, Restriction};
use obdm_core::rdf::Iri;
use rand::Rng;

pub fn class(i: usize) -> Iri {
    Iri::new(format!("http://example.org/C{i}")).unwrap()
}

pub fn property(i: usize) -> Iri {
    Iri::new(format!("http://example.org/p{i}")).unwrap()
}

/// An ontology with at most `max_axioms` logical axioms over `max_axioms / 2 + 3` classes.
pub fn ontology(rng: &mut impl Rng, max_axioms: usize) -> OntologyModel {
    let n_classes = max_axioms / 2 + 3;
    let n_props = 3;
    let mut m = OntologyModel::default();
    for _ in 0..rng.gen_range(0..=max_axioms) {
        let a = class(rng.gen_range(0..n_classes));
        let b = class(rng.gen_range(0..n_classes));
        let axiom = match rng.gen_range(0..10) {
            0..=5 if a != b => Axiom::SubClassOf { sub: a, sup: b },
            6..=7 => Axiom::SomeValuesFrom(Restriction {
                subject: a,
                property: property(rng.gen_range(0..n_props)),
                filler: b,
            }),
            _ => match EquivalencePair::new(a, b) {
                Some(p) => Axiom::EquivalentClasses(p),
                None => continue,
            },
        };
        m.insert_axiom(axiom);
    }
    // a few declared classes without axioms, some labelled
    for i in 0..n_classes {
        if rng.gen_bool(0.2) {
            m.classes.insert(class(i));
        }
        if m.classes.contains(&class(i)) && rng.gen_bool(0.5) {
            m.annotations.insert(
                class(i),
                AnnotationRecord {
                    label: Some(format!("class {i}")),
                    ..AnnotationRecord::default()
                },
            );
        }
    }
    m
}

/// A random signature drawn from the names of `m`, sometimes with a term
/// `m` does not mention.
pub fn signature(rng: &mut impl Rng, m: &OntologyModel) -> Signature {
    let mut sig = Signature::default();
    for c in &m.classes {
        if rng.gen_bool(0.25) {
            sig.classes.insert(c.clone());
        }
    }
    for p in m.properties() {
        if rng.gen_bool(0.2) {
            sig.properties.insert(p.clone());
        }
    }
    if rng.gen_bool(0.1) {
        sig.classes.insert(class(10_000));
    }
    sig
}

pub fn superset(rng: &mut impl Rng, m: &OntologyModel, sig: &Signature) -> Signature {
    let mut more = signature(rng, m);
    more.classes.extend(sig.classes.iter().cloned());
    more.properties.extend(sig.properties.iter().cloned());
    more
}

fn names(a: &Axiom) -> Vec<&Iri> {
    match a {
        Axiom::SubClassOf { sub, sup } => vec![sub, sup],
        Axiom::SomeValuesFrom(r) => vec![&r.subject, &r.property, &r.filler],
        Axiom::EquivalentClasses(p) => vec![p.first(), p.second()],
    }
}

/// ⊥-locality of the three supported axiom forms, written out case by case.
pub fn locally_bottom(a: &Axiom, sigma: &BTreeSet<Iri>) -> bool {
    match a {
        Axiom::SubClassOf { sub, .. } => !sigma.contains(sub),
        Axiom::SomeValuesFrom(r) => !sigma.contains(&r.subject),
        Axiom::EquivalentClasses(p) => !sigma.contains(p.first()) && !sigma.contains(p.second()),
    }
}

fn seed(sig: &Signature) -> BTreeSet<Iri> {
    sig.classes.iter().chain(&sig.properties).cloned().collect()
}

/// Signature of the module: the seed plus every name in its axioms.
pub fn final_signature(module: &OntologyModel, sig: &Signature) -> BTreeSet<Iri> {
    let mut s = seed(sig);
    for a in module.axioms() {
        s.extend(names(&a).into_iter().cloned());
    }
    s
}

/// Module axioms by repeated full passes until nothing changes.
pub fn naive_module(m: &OntologyModel, sig: &Signature) -> BTreeSet<Axiom> {
    let mut sigma = seed(sig);
    let mut module = BTreeSet::new();
    loop {
        let mut changed = false;
        for a in m.axioms() {
            if !module.contains(&a) && !locally_bottom(&a, &sigma) {
                sigma.extend(names(&a).into_iter().cloned());
                module.insert(a);
                changed = true;
            }
        }
        if !changed {
            return module;
        }
    }
}

/// Every axiom left out of the module is ⊥-local for its final signature.
pub fn check_soundness(m: &OntologyModel, module: &OntologyModel, sig: &Signature) -> Result<(), String> {
    let sigma = final_signature(module, sig);
    let kept: BTreeSet<Axiom> = module.axioms().collect();
    for a in m.axioms() {
        if !kept.contains(&a) && !locally_bottom(&a, &sigma) {
            return Err(format!("excluded axiom {a:?} is not local"));
        }
    }
    for a in &kept {
        if !m.axioms().any(|b| &b == a) {
            return Err(format!("module axiom {a:?} is not in the source"));
        }
    }
    Ok(())
}

/// Whether `a` reaches `b` over subclass edges and equivalences (both ways).
pub fn reaches(m: &OntologyModel, a: &Iri, b: &Iri) -> bool {
    let mut seen = BTreeSet::from([a.clone()]);
    let mut queue = VecDeque::from([a.clone()]);
    while let Some(x) = queue.pop_front() {
        if &x == b {
            return true;
        }
        let next = m
            .subclass_edges
            .iter()
            .filter(|(s, _)| *s == x)
            .map(|(_, o)| o.clone())
            .chain(m.equivalence_pairs.iter().filter_map(|p| {
                if p.first() == &x {
                    Some(p.second().clone())
                } else if p.second() == &x {
                    Some(p.first().clone())
                } else {
                    None
                }
            }));
        for y in next.collect::<Vec<_>>() {
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    false
}

pub fn check_reachability(m: &OntologyModel, module: &OntologyModel, sig: &Signature) -> Result<(), String> {
    for a in &sig.classes {
        for b in &sig.classes {
            let (src, md) = (reaches(m, a, b), reaches(module, a, b));
            if src != md {
                return Err(format!("{a} ⇒ {b}: source {src}, module {md}"));
            }
        }
    }
    Ok(())
}
