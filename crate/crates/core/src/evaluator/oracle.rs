//! Reference evaluator for tests.
//!
//! Builds a Thompson automaton (with ε-moves) straight from the unnormalized
//! expression and runs a breadth-first search of the product
//! `node × state` from every candidate source. It shares no code with the
//! plan machinery: no Glushkov construction, no inverse normalization, no
//! deltas and no views.

use std::collections::{HashSet, VecDeque};

use super::ResultSet;
use crate::graph::{Graph, TermId};
use crate::path::PathExpr;
use crate::planner::Bindings;

#[derive(Clone)]
enum Move {
    Epsilon,
    Step {
        label: Option<TermId>,
        inverse: bool,
    },
}

#[derive(Clone)]
struct Edge {
    from: usize,
    to: usize,
    mv: Move,
}

struct Nfa {
    states: usize,
    edges: Vec<Edge>,
}

impl Nfa {
    fn state(&mut self) -> usize {
        self.states += 1;
        self.states - 1
    }

    fn eps(&mut self, from: usize, to: usize) {
        self.edges.push(Edge {
            from,
            to,
            mv: Move::Epsilon,
        });
    }

    /// Returns `(entry, exit)` of the fragment for `e`.
    fn fragment(&mut self, e: &PathExpr, g: &Graph) -> (usize, usize) {
        match e {
            PathExpr::Label(iri) => {
                let (s, t) = (self.state(), self.state());
                self.edges.push(Edge {
                    from: s,
                    to: t,
                    mv: Move::Step {
                        label: g.intern(iri),
                        inverse: false,
                    },
                });
                (s, t)
            }
            PathExpr::Inverse(inner) => {
                let first = self.edges.len();
                let (s, t) = self.fragment(inner, g);
                for edge in &mut self.edges[first..] {
                    std::mem::swap(&mut edge.from, &mut edge.to);
                    if let Move::Step { inverse, .. } = &mut edge.mv {
                        *inverse = !*inverse;
                    }
                }
                (t, s)
            }
            PathExpr::Seq(l, r) => {
                let (ls, lt) = self.fragment(l, g);
                let (rs, rt) = self.fragment(r, g);
                self.eps(lt, rs);
                (ls, rt)
            }
            PathExpr::Alt(l, r) => {
                let (s, t) = (self.state(), self.state());
                let (ls, lt) = self.fragment(l, g);
                let (rs, rt) = self.fragment(r, g);
                self.eps(s, ls);
                self.eps(s, rs);
                self.eps(lt, t);
                self.eps(rt, t);
                (s, t)
            }
            PathExpr::ZeroOrMore(inner)
            | PathExpr::OneOrMore(inner)
            | PathExpr::ZeroOrOne(inner) => {
                let (s, t) = (self.state(), self.state());
                let (is, it) = self.fragment(inner, g);
                self.eps(s, is);
                self.eps(it, t);
                if !matches!(e, PathExpr::OneOrMore(_)) {
                    self.eps(s, t);
                }
                if !matches!(e, PathExpr::ZeroOrOne(_)) {
                    self.eps(it, is);
                }
                (s, t)
            }
        }
    }
}

/// Ground-truth answer of `e` over `g`. Intended for small graphs.
pub fn oracle_eval(e: &PathExpr, g: &Graph, bindings: &Bindings) -> ResultSet {
    let mut nfa = Nfa {
        states: 0,
        edges: Vec::new(),
    };
    let (start, accept) = nfa.fragment(e, g);
    let mut adjacency: Vec<Vec<Edge>> = vec![Vec::new(); nfa.states];
    for edge in nfa.edges {
        adjacency[edge.from].push(edge);
    }

    let bound = |term: &Option<String>| -> Result<Option<TermId>, ()> {
        match term {
            None => Ok(None),
            Some(text) => match g.intern(text) {
                Some(id) if g.is_node(id) => Ok(Some(id)),
                _ => Err(()),
            },
        }
    };
    let mut out = ResultSet::new();
    let (Ok(source), Ok(target)) = (bound(&bindings.source), bound(&bindings.target)) else {
        return out;
    };
    let sources: Vec<TermId> = match source {
        Some(s) => vec![s],
        None => g.nodes().to_vec(),
    };

    for src in sources {
        let mut seen: HashSet<(TermId, usize)> = HashSet::from([(src, start)]);
        let mut queue = VecDeque::from([(src, start)]);
        while let Some((node, state)) = queue.pop_front() {
            if state == accept && target.is_none_or(|t| t == node) {
                out.insert((src, node));
            }
            for edge in &adjacency[state] {
                let next: Vec<TermId> = match edge.mv {
                    Move::Epsilon => vec![node],
                    Move::Step { label: None, .. } => Vec::new(),
                    Move::Step {
                        label: Some(p),
                        inverse,
                    } => g
                        .triples()
                        .iter()
                        .filter(|t| {
                            t.predicate == p
                                && if inverse {
                                    t.object == node
                                } else {
                                    t.subject == node
                                }
                        })
                        .map(|t| if inverse { t.subject } else { t.object })
                        .collect(),
                };
                for n in next {
                    if seen.insert((n, edge.to)) {
                        queue.push_back((n, edge.to));
                    }
                }
            }
        }
    }
    out
}
