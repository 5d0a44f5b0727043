//! Edge-labeled graph store.
//!
//! Triples are dictionary-encoded into dense [`TermId`]s and indexed twice:
//! `(predicate, subject) -> objects` and `(predicate, object) -> subjects`.
//! Both indexes hold sorted, duplicate-free id lists so that every traversal
//! visits neighbors in a fixed order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

/// Dense dictionary id of an RDF term, assigned in first-seen order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(pub u32);

impl TermId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: TermId,
    pub predicate: TermId,
    pub object: TermId,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LoadError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {position} must be an IRI")]
    NotAnIri { line: usize, position: &'static str },
}

/// Per-predicate counts used by the cost model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LabelCount {
    pub count: u64,
    pub distinct_subjects: u64,
    pub distinct_objects: u64,
}

/// Exact label statistics, keyed by predicate term text.
///
/// The fields are public so that synthetic statistics can be built without a
/// graph; [`compute_stats`] is the only producer that guarantees the
/// `1 <= distinct <= count` relationship.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabelStats {
    pub labels: BTreeMap<String, LabelCount>,
    pub node_count: u64,
}

impl LabelStats {
    pub fn get(&self, label: &str) -> Option<&LabelCount> {
        self.labels.get(label)
    }
}

/// Immutable, fully indexed triple store.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    terms: Vec<String>,
    ids: HashMap<String, TermId>,
    /// Sorted by (predicate, subject, object).
    triples: Vec<Triple>,
    forward: HashMap<(TermId, TermId), Vec<TermId>>,
    backward: HashMap<(TermId, TermId), Vec<TermId>>,
    subjects_of: HashMap<TermId, Vec<TermId>>,
    objects_of: HashMap<TermId, Vec<TermId>>,
    nodes: Vec<TermId>,
    is_node: Vec<bool>,
}

#[derive(Default)]
struct Dictionary {
    terms: Vec<String>,
    ids: HashMap<String, TermId>,
}

impl Dictionary {
    fn intern(&mut self, text: &str) -> TermId {
        if let Some(&id) = self.ids.get(text) {
            return id;
        }
        let id = TermId(self.terms.len() as u32);
        self.terms.push(text.to_owned());
        self.ids.insert(text.to_owned(), id);
        id
    }
}

impl Graph {
    /// Builds a graph from `(subject, predicate, object)` term texts, e.g.
    /// `("<s>", "<p>", "\"lit\"")`. Term texts are stored verbatim.
    pub fn from_terms<'a, I>(triples: I) -> Graph
    where
        I: IntoIterator<Item = (&'a str, &'a str, &'a str)>,
    {
        let mut dict = Dictionary::default();
        let mut encoded = Vec::new();
        for (s, p, o) in triples {
            let subject = dict.intern(s);
            let predicate = dict.intern(p);
            let object = dict.intern(o);
            encoded.push(Triple {
                subject,
                predicate,
                object,
            });
        }
        Graph::build(dict, encoded)
    }

    fn build(dict: Dictionary, mut triples: Vec<Triple>) -> Graph {
        triples.sort_by_key(|t| (t.predicate, t.subject, t.object));
        triples.dedup();

        let mut forward: HashMap<(TermId, TermId), Vec<TermId>> = HashMap::new();
        let mut backward: HashMap<(TermId, TermId), Vec<TermId>> = HashMap::new();
        let mut subjects_of: HashMap<TermId, Vec<TermId>> = HashMap::new();
        let mut objects_of: HashMap<TermId, Vec<TermId>> = HashMap::new();
        let mut is_node = vec![false; dict.terms.len()];

        for t in &triples {
            forward
                .entry((t.predicate, t.subject))
                .or_default()
                .push(t.object);
            backward
                .entry((t.predicate, t.object))
                .or_default()
                .push(t.subject);
            subjects_of.entry(t.predicate).or_default().push(t.subject);
            objects_of.entry(t.predicate).or_default().push(t.object);
            is_node[t.subject.index()] = true;
            is_node[t.object.index()] = true;
        }
        // forward lists are already sorted by construction order
        for list in backward
            .values_mut()
            .chain(subjects_of.values_mut())
            .chain(objects_of.values_mut())
        {
            list.sort_unstable();
            list.dedup();
        }
        let nodes = (0..dict.terms.len() as u32)
            .map(TermId)
            .filter(|id| is_node[id.index()])
            .collect();

        Graph {
            terms: dict.terms,
            ids: dict.ids,
            triples,
            forward,
            backward,
            subjects_of,
            objects_of,
            nodes,
            is_node,
        }
    }

    /// Looks up the id of a term by its exact text (`<iri>` or `"literal"`).
    pub fn intern(&self, text: &str) -> Option<TermId> {
        self.ids.get(text).copied()
    }

    pub fn term(&self, id: TermId) -> &str {
        &self.terms[id.index()]
    }

    pub fn dictionary_len(&self) -> usize {
        self.terms.len()
    }

    pub fn triple_count(&self) -> usize {
        self.triples.len()
    }

    /// Terms occurring in subject or object position, in id order.
    pub fn nodes(&self) -> &[TermId] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_node(&self, id: TermId) -> bool {
        self.is_node.get(id.index()).copied().unwrap_or(false)
    }

    /// Triples sorted by (predicate, subject, object).
    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn out_neighbors(&self, node: TermId, predicate: TermId) -> &[TermId] {
        self.forward
            .get(&(predicate, node))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn in_neighbors(&self, node: TermId, predicate: TermId) -> &[TermId] {
        self.backward
            .get(&(predicate, node))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Distinct subjects of `predicate`, sorted.
    pub fn subjects_of(&self, predicate: TermId) -> &[TermId] {
        self.subjects_of
            .get(&predicate)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Distinct objects of `predicate`, sorted.
    pub fn objects_of(&self, predicate: TermId) -> &[TermId] {
        self.objects_of
            .get(&predicate)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Predicates in use, sorted by id.
    pub fn predicates(&self) -> Vec<TermId> {
        let mut preds: Vec<TermId> = self.subjects_of.keys().copied().collect();
        preds.sort_unstable();
        preds
    }

    /// Writes the triple set back out as N-Triples, sorted by term text.
    pub fn to_ntriples(&self) -> String {
        let mut lines: Vec<String> = self
            .triples
            .iter()
            .map(|t| {
                format!(
                    "{} {} {} .\n",
                    self.term(t.subject),
                    self.term(t.predicate),
                    self.term(t.object)
                )
            })
            .collect();
        lines.sort();
        lines.concat()
    }
}

/// Parses the supported N-Triples subset: IRI subjects and predicates,
/// IRI or literal objects, `#` comments and blank lines.
pub fn load_ntriples(text: &str) -> Result<Graph, LoadError> {
    let mut dict = Dictionary::default();
    let mut triples = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (s, p, o) = parse_line(trimmed, line)?;
        let subject = dict.intern(s);
        let predicate = dict.intern(p);
        let object = dict.intern(o);
        triples.push(Triple {
            subject,
            predicate,
            object,
        });
    }
    Ok(Graph::build(dict, triples))
}

fn syntax(line: usize, message: impl Into<String>) -> LoadError {
    LoadError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_line(text: &str, line: usize) -> Result<(&str, &str, &str), LoadError> {
    let mut rest = text;
    let subject = iri_token(&mut rest, line, "subject")?;
    let predicate = iri_token(&mut rest, line, "predicate")?;
    rest = rest.trim_start();
    let object = if rest.starts_with('<') {
        take_iri(&mut rest, line)?
    } else if rest.starts_with('"') {
        take_literal(&mut rest, line)?
    } else if rest.starts_with("_:") {
        return Err(syntax(line, "blank nodes are not supported"));
    } else {
        return Err(syntax(line, "expected IRI or literal object"));
    };
    rest = rest.trim_start();
    rest = rest
        .strip_prefix('.')
        .ok_or_else(|| syntax(line, "expected '.' after object"))?;
    let tail = rest.trim_start();
    if !(tail.is_empty() || tail.starts_with('#')) {
        return Err(syntax(line, "unexpected content after '.'"));
    }
    Ok((subject, predicate, object))
}

fn iri_token<'a>(
    rest: &mut &'a str,
    line: usize,
    position: &'static str,
) -> Result<&'a str, LoadError> {
    *rest = rest.trim_start();
    if rest.starts_with('"') || rest.starts_with("_:") {
        return Err(LoadError::NotAnIri { line, position });
    }
    if !rest.starts_with('<') {
        return Err(syntax(line, format!("expected IRI {position}")));
    }
    take_iri(rest, line)
}

fn take_iri<'a>(rest: &mut &'a str, line: usize) -> Result<&'a str, LoadError> {
    let s = *rest;
    debug_assert!(s.starts_with('<'));
    for (i, c) in s.char_indices().skip(1) {
        match c {
            '>' => {
                let (tok, tail) = s.split_at(i + 1);
                *rest = tail;
                return Ok(tok);
            }
            '<' | '"' | ' ' | '\t' => {
                return Err(syntax(line, format!("invalid character {c:?} in IRI")))
            }
            _ => {}
        }
    }
    Err(syntax(line, "unterminated IRI"))
}

/// Consumes a quoted literal plus an optional `@lang` or `^^<iri>` suffix and
/// returns the whole token.
fn take_literal<'a>(rest: &mut &'a str, line: usize) -> Result<&'a str, LoadError> {
    let s = *rest;
    let bytes = s.as_bytes();
    let mut i = 1;
    let mut closed = None;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'"' => {
                closed = Some(i);
                break;
            }
            _ => i += 1,
        }
    }
    let close = closed.ok_or_else(|| syntax(line, "unterminated literal"))?;
    let mut end = close + 1;
    let after = &s[end..];
    if let Some(lang) = after.strip_prefix('@') {
        let len = lang
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
            .unwrap_or(lang.len());
        if len == 0 {
            return Err(syntax(line, "empty language tag"));
        }
        end += 1 + len;
    } else if let Some(dt) = after.strip_prefix("^^") {
        let mut dt_rest = dt;
        if !dt_rest.starts_with('<') {
            return Err(syntax(line, "datatype must be an IRI"));
        }
        let iri = take_iri(&mut dt_rest, line)?;
        end += 2 + iri.len();
    }
    let (tok, tail) = s.split_at(end);
    *rest = tail;
    Ok(tok)
}

/// Exact per-predicate statistics.
pub fn compute_stats(g: &Graph) -> LabelStats {
    let mut labels = BTreeMap::new();
    for p in g.predicates() {
        let count = g.triples.iter().filter(|t| t.predicate == p).count() as u64;
        labels.insert(
            g.term(p).to_owned(),
            LabelCount {
                count,
                distinct_subjects: g.subjects_of(p).len() as u64,
                distinct_objects: g.objects_of(p).len() as u64,
            },
        );
    }
    LabelStats {
        labels,
        node_count: g.node_count() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(g: &Graph, names: &[&str]) -> Vec<TermId> {
        names.iter().map(|n| g.intern(n).unwrap()).collect()
    }

    #[test]
    fn single_triple() {
        let g = load_ntriples("<http://e/s> <http://e/p> <http://e/o> .\n").unwrap();
        assert_eq!(g.triple_count(), 1);
        assert_eq!(g.dictionary_len(), 3);
        assert_eq!(g.node_count(), 2);
        assert!(!g.is_node(g.intern("<http://e/p>").unwrap()));
    }

    #[test]
    fn empty_input() {
        let g = load_ntriples("").unwrap();
        assert_eq!(g.triple_count(), 0);
        assert_eq!(g.dictionary_len(), 0);
        assert_eq!(compute_stats(&g), LabelStats::default());
    }

    #[test]
    fn duplicates_collapse() {
        let g = load_ntriples("<s> <p> <o> .\n<s> <p> <o> .\n").unwrap();
        assert_eq!(g.triple_count(), 1);
    }

    #[test]
    fn comments_blanks_and_literals() {
        let text = "# header\n\n<s> <p> \"hello \\\"world\\\"\"@en-GB . # trailing\n\
                    <s> <p> \"5\"^^<http://www.w3.org/2001/XMLSchema#int> .\n";
        let g = load_ntriples(text).unwrap();
        assert_eq!(g.triple_count(), 2);
        assert!(g.intern("\"hello \\\"world\\\"\"@en-GB").is_some());
        assert!(g
            .intern("\"5\"^^<http://www.w3.org/2001/XMLSchema#int>")
            .is_some());
    }

    #[test]
    fn load_errors_carry_line_numbers() {
        let err = load_ntriples("<s> <p> <o> .\n<s> <p> <o>\n").unwrap_err();
        assert!(matches!(err, LoadError::Syntax { line: 2, .. }), "{err:?}");

        let err = load_ntriples("\"lit\" <p> <o> .").unwrap_err();
        assert_eq!(
            err,
            LoadError::NotAnIri {
                line: 1,
                position: "subject"
            }
        );

        let err = load_ntriples("<s> \"lit\" <o> .").unwrap_err();
        assert_eq!(
            err,
            LoadError::NotAnIri {
                line: 1,
                position: "predicate"
            }
        );

        assert!(load_ntriples("<s> <p> _:b0 .").is_err());
        assert!(load_ntriples("<s> <p> <o> . extra").is_err());
        assert!(load_ntriples("<s> <p> \"open .").is_err());
    }

    #[test]
    fn intern_is_stable() {
        let g = load_ntriples("<a> <p> <b> .").unwrap();
        assert_eq!(g.intern("<a>"), g.intern("<a>"));
        assert_eq!(g.intern("<zzz>"), None);
        let a = g.intern("<a>").unwrap();
        assert_eq!(g.term(a), "<a>");
    }

    #[test]
    fn neighbors() {
        let g = Graph::from_terms([("1", "a", "2"), ("1", "a", "3")]);
        let [n1, n2, n3, a] = ids(&g, &["1", "2", "3", "a"])[..] else {
            unreachable!()
        };
        assert_eq!(g.out_neighbors(n1, a), &[n2, n3]);
        assert!(g.out_neighbors(n2, a).is_empty());
        assert_eq!(g.in_neighbors(n2, a), &[n1]);
        assert!(g.in_neighbors(n1, a).is_empty());
        // a label that is never used as a predicate
        assert!(g.out_neighbors(n1, n2).is_empty());
    }

    #[test]
    fn chain_and_star_stats() {
        let g = Graph::from_terms([("x1", "<a>", "x2"), ("x2", "<a>", "x3")]);
        let s = compute_stats(&g);
        assert_eq!(
            s.get("<a>"),
            Some(&LabelCount {
                count: 2,
                distinct_subjects: 2,
                distinct_objects: 2
            })
        );
        assert_eq!(s.node_count, 3);

        let leaves: Vec<String> = (1..=10).map(|i| format!("l{i}")).collect();
        let g = Graph::from_terms(leaves.iter().map(|l| ("c", "<a>", l.as_str())));
        let s = compute_stats(&g);
        assert_eq!(
            s.get("<a>"),
            Some(&LabelCount {
                count: 10,
                distinct_subjects: 1,
                distinct_objects: 10
            })
        );
    }

    #[test]
    fn ntriples_round_trip() {
        let text = "<b> <p> \"x\"@en .\n<a> <p> <b> .\n<a> <q> <a> .\n";
        let g = load_ntriples(text).unwrap();
        let again = load_ntriples(&g.to_ntriples()).unwrap();
        assert_eq!(g.to_ntriples(), again.to_ntriples());
        assert_eq!(again.triple_count(), 3);
    }
}
