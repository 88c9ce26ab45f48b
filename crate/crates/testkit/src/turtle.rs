//! Random Turtle documents exercising every construct the reader accepts.

use rand::seq::SliceRandom;
use rand::Rng;

const LOCALS: &[&str] = &["A", "B", "c1", "long_name", "x-y", "n.5", "CHEBI:15377", "Z9", "é"];
const ESCAPED_LOCALS: &[&str] = &["a\\.b", "p\\,q", "r%20s", "t\\/u"];
const STRINGS: &[&str] = &["", "alpha", "two words", "tab\tinside", "quote\"mark", "back\\slash", "naïve ☃", "line\nbreak", "'single'"];
const LANGS: &[&str] = &["en", "en-GB", "de", "x-private1"];

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    out: String,
    triples: usize,
    max: usize,
    labels: usize,
    has_base: bool,
    has_empty: bool,
}

impl<R: Rng> Gen<'_, R> {
    fn local(&mut self) -> String {
        if self.rng.gen_bool(0.1) {
            ESCAPED_LOCALS.choose(self.rng).unwrap().to_string()
        } else {
            LOCALS.choose(self.rng).unwrap().to_string()
        }
    }

    fn iri(&mut self) -> String {
        let local = self.local();
        let plain = local.replace(['\\'], "");
        match self.rng.gen_range(0..10) {
            0..=3 => format!("ex:{local}"),
            4 | 5 => format!("ex2:{local}"),
            6 => format!("<http://example.org/full/{}>", plain.replace('%', "%25")),
            7 if self.has_base => format!("<rel/{}>", plain.replace('%', "%25")),
            8 if self.has_empty => format!(":{local}"),
            _ => format!("v:{local}"),
        }
    }

    fn predicate(&mut self) -> String {
        match self.rng.gen_range(0..8) {
            0 => "a".into(),
            1 => "rdfs:label".into(),
            2 => "<http://example.org/full/prop>".into(),
            _ => format!("ex:p{}", self.rng.gen_range(0..4)),
        }
    }

    fn escape(s: &str, quote: char, long: bool) -> String {
        let mut out = String::new();
        for c in s.chars() {
            match c {
                '\\' => out.push_str("\\\\"),
                '\n' if long => out.push('\n'),
                '\n' => out.push_str("\\n"),
                '\t' => out.push_str(if long { "\t" } else { "\\t" }),
                c if c == quote => {
                    out.push('\\');
                    out.push(c);
                }
                '☃' => out.push_str("\\u2603"),
                c => out.push(c),
            }
        }
        out
    }

    fn literal(&mut self) -> String {
        match self.rng.gen_range(0..9) {
            0 => self.rng.gen_range(-50i32..50).to_string(),
            1 => format!("{}.{}", self.rng.gen_range(0..9), self.rng.gen_range(0..99)),
            2 => format!("{}e{}", self.rng.gen_range(1..9), self.rng.gen_range(-3..4)),
            3 => if self.rng.gen_bool(0.5) { "true" } else { "false" }.into(),
            _ => {
                let s = *STRINGS.choose(self.rng).unwrap();
                let (quote, long) = match self.rng.gen_range(0..4) {
                    0 => ('\'', false),
                    1 => ('"', true),
                    _ => ('"', false),
                };
                let body = Self::escape(s, quote, long);
                let q = if long { quote.to_string().repeat(3) } else { quote.to_string() };
                // a long string must not end with its own quote character
                let body = if long && body.ends_with(quote) { format!("{body} ") } else { body };
                let suffix = match self.rng.gen_range(0..5) {
                    0 => format!("@{}", LANGS.choose(self.rng).unwrap()),
                    1 => "^^xsd:string".into(),
                    2 => "^^<http://example.org/dt>".into(),
                    _ => String::new(),
                };
                format!("{q}{body}{q}{suffix}")
            }
        }
    }

    fn blank_label(&mut self) -> String {
        if self.labels == 0 || self.rng.gen_bool(0.3) {
            self.labels += 1;
        }
        format!("_:n{}", self.rng.gen_range(0..self.labels))
    }

    fn room(&self) -> bool {
        self.triples < self.max
    }

    fn object(&mut self, depth: usize) -> String {
        match self.rng.gen_range(0..10) {
            0..=3 => self.iri(),
            4..=6 => self.literal(),
            7 => self.blank_label(),
            8 if depth < 2 && self.room() => {
                let inner = self.predicate_objects(depth + 1, 2);
                format!("[ {inner} ]")
            }
            _ => "[]".into(),
        }
    }

    fn predicate_objects(&mut self, depth: usize, max_preds: usize) -> String {
        let n = self.rng.gen_range(1..=max_preds);
        let mut parts = Vec::new();
        for _ in 0..n {
            if !self.room() && !parts.is_empty() {
                break;
            }
            let p = self.predicate();
            let k = self.rng.gen_range(1..=3);
            let mut objs = Vec::new();
            for _ in 0..k {
                if !self.room() && !objs.is_empty() {
                    break;
                }
                self.triples += 1;
                let o = if p == "a" { self.iri() } else { self.object(depth) };
                objs.push(o);
            }
            parts.push(format!("{p} {}", objs.join(" , ")));
        }
        let sep = if self.rng.gen_bool(0.5) { " ;\n    " } else { "; " };
        let mut s = parts.join(sep);
        if self.rng.gen_bool(0.15) {
            s.push_str(" ;");
        }
        s
    }

    fn statement(&mut self) {
        if self.rng.gen_bool(0.1) {
            self.out.push_str("# a comment with \"quotes\" and <brackets>\n");
        }
        let subject = match self.rng.gen_range(0..10) {
            0..=5 => self.iri(),
            6 | 7 => self.blank_label(),
            _ => {
                let body = self.predicate_objects(1, 2);
                format!("[ {body} ]")
            }
        };
        let rest = if subject.starts_with('[') && self.rng.gen_bool(0.3) {
            String::new()
        } else {
            self.predicate_objects(0, 3)
        };
        self.out.push_str(&format!("{subject} {rest} .\n"));
    }
}

/// A document with at most `max_triples` triples.
pub fn document(rng: &mut impl Rng, max_triples: usize) -> String {
    let mut g = Gen {
        rng,
        out: String::new(),
        triples: 0,
        max: max_triples.max(1),
        labels: 0,
        has_base: false,
        has_empty: false,
    };
    g.out.push_str("@prefix ex: <http://example.org/> .\n");
    g.out.push_str("@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n");
    if g.rng.gen_bool(0.5) {
        g.out.push_str("PREFIX ex2: <http://example.org/other#>\n");
    } else {
        g.out.push_str("@prefix ex2: <http://example.org/other#> .\n");
    }
    g.out.push_str("PREFIX xsd: <http://www.w3.org/2001/XMLSchema#>\n");
    g.out.push_str("@prefix v: <http://example.org/v1/> .\n");
    if g.rng.gen_bool(0.5) {
        g.out.push_str("@base <http://example.org/base/> .\n");
        g.has_base = true;
    }
    if g.rng.gen_bool(0.4) {
        g.out.push_str("@prefix : <http://example.org/empty/> .\n");
        g.has_empty = true;
    }
    // the last statement may add two triples past the target
    let target = g.rng.gen_range(1..=g.max.saturating_sub(2).max(1));
    let redeclare_at = g.rng.gen_range(0..=target);
    while g.triples < target {
        if g.triples >= redeclare_at && !g.out.contains("v2/") {
            g.out.push_str("@prefix v: <http://example.org/v2/> .\n");
        }
        let before = g.triples;
        let max = g.max;
        g.max = target;
        g.statement();
        g.max = max;
        debug_assert!(g.triples > before);
    }
    g.out
}

#[cfg(test)]
mod tests {
    use super::*;
    use obdm_core::rdf::parse_turtle;

    #[test]
    fn generated_documents_parse_within_budget() {
        for seed in 0..200 {
            let text = document(&mut crate::rng(seed), 100);
            let g = parse_turtle(&text).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{text}"));
            assert!(g.len() <= 100, "seed {seed}: {} triples", g.len());
        }
    }
}
