//! RDF graph isomorphism: equality of triple sets up to blank-node renaming.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use obdm_core::rdf::{BlankId, Graph, Subject, Term, Triple};

fn subject_blank(t: &Triple) -> Option<BlankId> {
    match t.subject {
        Subject::Blank(b) => Some(b),
        Subject::Iri(_) => None,
    }
}

fn blanks(g: &Graph) -> BTreeSet<BlankId> {
    g.iter()
        .flat_map(|t| subject_blank(t).into_iter().chain(t.object.as_blank()))
        .collect()
}

fn ground(g: &Graph) -> BTreeSet<&Triple> {
    g.iter()
        .filter(|t| subject_blank(t).is_none() && t.object.as_blank().is_none())
        .collect()
}

fn term_key(t: &Term, colors: &HashMap<BlankId, usize>) -> String {
    match t {
        Term::Iri(i) => format!("I{i}"),
        Term::Literal(l) => format!("L{l:?}"),
        Term::Blank(b) => format!("B{}", colors[b]),
    }
}

fn subject_key(s: &Subject, colors: &HashMap<BlankId, usize>) -> String {
    match s {
        Subject::Iri(i) => format!("I{i}"),
        Subject::Blank(b) => format!("B{}", colors[b]),
    }
}

/// Refines colors of both graphs jointly so equal colors are comparable.
fn refine(ga: &Graph, gb: &Graph, rounds: usize) -> (HashMap<BlankId, usize>, HashMap<BlankId, usize>) {
    let mut ca: HashMap<BlankId, usize> = blanks(ga).into_iter().map(|b| (b, 0)).collect();
    let mut cb: HashMap<BlankId, usize> = blanks(gb).into_iter().map(|b| (b, 0)).collect();
    for _ in 0..rounds {
        let sig = |g: &Graph, c: &HashMap<BlankId, usize>| {
            let mut s: HashMap<BlankId, Vec<String>> = c.keys().map(|b| (*b, vec![format!("c{}", c[b])])).collect();
            for t in g.iter() {
                if let Subject::Blank(b) = t.subject {
                    s.get_mut(&b).unwrap().push(format!("o{}>{}", t.predicate, term_key(&t.object, c)));
                }
                if let Term::Blank(b) = t.object {
                    s.get_mut(&b).unwrap().push(format!("i{}<{}", t.predicate, subject_key(&t.subject, c)));
                }
            }
            for v in s.values_mut() {
                v.sort();
            }
            s
        };
        let (sa, sb) = (sig(ga, &ca), sig(gb, &cb));
        let palette: BTreeMap<&Vec<String>, usize> = sa
            .values()
            .chain(sb.values())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let na: HashMap<BlankId, usize> = sa.iter().map(|(b, s)| (*b, palette[s])).collect();
        let nb: HashMap<BlankId, usize> = sb.iter().map(|(b, s)| (*b, palette[s])).collect();
        let stable = na.values().collect::<HashSet<_>>().len() == ca.values().collect::<HashSet<_>>().len()
            && nb.values().collect::<HashSet<_>>().len() == cb.values().collect::<HashSet<_>>().len();
        ca = na;
        cb = nb;
        if stable {
            break;
        }
    }
    (ca, cb)
}

fn map_triple(t: &Triple, m: &HashMap<BlankId, BlankId>) -> Option<Triple> {
    let subject = match &t.subject {
        Subject::Blank(b) => Subject::Blank(*m.get(b)?),
        s => s.clone(),
    };
    let object = match &t.object {
        Term::Blank(b) => Term::Blank(*m.get(b)?),
        o => o.clone(),
    };
    Some(Triple::new(subject, t.predicate.clone(), object))
}

pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.len() != b.len() || ground(a) != ground(b) {
        return false;
    }
    let (la, lb) = (blanks(a), blanks(b));
    if la.len() != lb.len() {
        return false;
    }
    let (ca, cb) = refine(a, b, la.len() + 1);
    let mut hist_a: BTreeMap<usize, usize> = BTreeMap::new();
    let mut hist_b: BTreeMap<usize, usize> = BTreeMap::new();
    ca.values().for_each(|c| *hist_a.entry(*c).or_default() += 1);
    cb.values().for_each(|c| *hist_b.entry(*c).or_default() += 1);
    if hist_a != hist_b {
        return false;
    }
    let mut order: Vec<BlankId> = la.into_iter().collect();
    order.sort_by_key(|x| (hist_a[&ca[x]], ca[x]));
    let blank_triples: Vec<&Triple> = a
        .iter()
        .filter(|t| subject_blank(t).is_some() || t.object.as_blank().is_some())
        .collect();
    let mut mapping = HashMap::new();
    let mut used = HashSet::new();
    search(&order, 0, &ca, &cb, &blank_triples, b, &mut mapping, &mut used)
}

#[allow(clippy::too_many_arguments)]
fn search(
    order: &[BlankId],
    i: usize,
    ca: &HashMap<BlankId, usize>,
    cb: &HashMap<BlankId, usize>,
    triples: &[&Triple],
    b: &Graph,
    mapping: &mut HashMap<BlankId, BlankId>,
    used: &mut HashSet<BlankId>,
) -> bool {
    if i == order.len() {
        return true;
    }
    let x = order[i];
    let mut candidates: Vec<BlankId> = cb.iter().filter(|(y, c)| **c == ca[&x] && !used.contains(*y)).map(|(y, _)| *y).collect();
    candidates.sort();
    for y in candidates {
        mapping.insert(x, y);
        used.insert(y);
        let consistent = triples
            .iter()
            .filter(|t| subject_blank(t) == Some(x) || t.object.as_blank() == Some(x))
            .all(|t| map_triple(t, mapping).is_none_or(|m| b.contains(&m)));
        if consistent && search(order, i + 1, ca, cb, triples, b, mapping, used) {
            return true;
        }
        mapping.remove(&x);
        used.remove(&y);
    }
    false
}
