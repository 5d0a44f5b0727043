//! ε-free automata over `(label, direction)` symbols.
//!
//! [`glushkov`] builds the position automaton: state 0 is the start state and
//! state `i` is the `i`-th symbol occurrence (left to right) of the
//! expression, so an expression with `n` leaves yields `n + 1` states.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::path::{normalize_inverses, PathExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Forward => Direction::Inverse,
            Direction::Inverse => Direction::Forward,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "fwd",
            Direction::Inverse => "inv",
        }
    }
}

/// Index of a view inside the plan that declares it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ViewId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolLabel {
    /// Predicate IRI text including angle brackets.
    Iri(String),
    /// Materialized pair relation of a view.
    View(ViewId),
}

impl fmt::Display for SymbolLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolLabel::Iri(iri) => f.write_str(iri),
            SymbolLabel::View(v) => write!(f, "view{}", v.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub label: SymbolLabel,
    pub direction: Direction,
}

impl Symbol {
    pub fn forward(iri: impl Into<String>) -> Symbol {
        Symbol {
            label: SymbolLabel::Iri(iri.into()),
            direction: Direction::Forward,
        }
    }

    pub fn inverse(iri: impl Into<String>) -> Symbol {
        Symbol {
            label: SymbolLabel::Iri(iri.into()),
            direction: Direction::Inverse,
        }
    }

    pub fn flipped(&self) -> Symbol {
        Symbol {
            label: self.label.clone(),
            direction: self.direction.flip(),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.label, self.direction.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: usize,
    pub symbol: Symbol,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    pub num_states: usize,
    pub start: usize,
    pub finals: BTreeSet<usize>,
    /// Sorted by `(from, symbol, to)`.
    pub transitions: Vec<Transition>,
    pub nullable: bool,
}

impl Automaton {
    pub fn is_final(&self, state: usize) -> bool {
        self.finals.contains(&state)
    }

    /// Transitions leaving `state`.
    pub fn outgoing(&self, state: usize) -> &[Transition] {
        let lo = self.transitions.partition_point(|t| t.from < state);
        let hi = self.transitions.partition_point(|t| t.from <= state);
        &self.transitions[lo..hi]
    }

    /// Distinct symbols leaving the start state, sorted.
    pub fn start_symbols(&self) -> Vec<&Symbol> {
        let set: BTreeSet<&Symbol> = self
            .outgoing(self.start)
            .iter()
            .map(|t| &t.symbol)
            .collect();
        set.into_iter().collect()
    }

    fn from_parts(
        num_states: usize,
        start: usize,
        finals: BTreeSet<usize>,
        mut transitions: Vec<Transition>,
    ) -> Automaton {
        transitions.sort();
        transitions.dedup();
        let nullable = finals.contains(&start);
        Automaton {
            num_states,
            start,
            finals,
            transitions,
            nullable,
        }
    }

    /// Drops states that are unreachable from the start or cannot reach a
    /// final state, renumbering the survivors with the start state as 0.
    pub fn trim(&self) -> Automaton {
        let n = self.num_states;
        let mut fwd_adj = vec![Vec::new(); n];
        let mut bwd_adj = vec![Vec::new(); n];
        for t in &self.transitions {
            fwd_adj[t.from].push(t.to);
            bwd_adj[t.to].push(t.from);
        }
        let reachable = flood(n, [self.start], &fwd_adj);
        let coreachable = flood(n, self.finals.iter().copied(), &bwd_adj);

        let mut remap = vec![usize::MAX; n];
        let mut next = 0;
        let order = std::iter::once(self.start).chain((0..n).filter(|&s| s != self.start));
        for s in order {
            if reachable[s] && (coreachable[s] || s == self.start) {
                remap[s] = next;
                next += 1;
            }
        }
        let transitions = self
            .transitions
            .iter()
            .filter(|t| remap[t.from] != usize::MAX && remap[t.to] != usize::MAX)
            .map(|t| Transition {
                from: remap[t.from],
                symbol: t.symbol.clone(),
                to: remap[t.to],
            })
            .collect();
        let finals = self
            .finals
            .iter()
            .filter(|&&f| remap[f] != usize::MAX)
            .map(|&f| remap[f])
            .collect();
        Automaton::from_parts(next, 0, finals, transitions)
    }
}

fn flood(n: usize, roots: impl IntoIterator<Item = usize>, adj: &[Vec<usize>]) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for r in roots {
        if !seen[r] {
            seen[r] = true;
            queue.push_back(r);
        }
    }
    while let Some(s) = queue.pop_front() {
        for &t in &adj[s] {
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    seen
}

/// Regular expression over automaton symbols. Produced from a normalized
/// [`PathExpr`], possibly with one Kleene body replaced by a view symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum SymbolRe {
    Sym(Symbol),
    Seq(Box<SymbolRe>, Box<SymbolRe>),
    Alt(Box<SymbolRe>, Box<SymbolRe>),
    Star(Box<SymbolRe>),
    Plus(Box<SymbolRe>),
    Opt(Box<SymbolRe>),
}

impl SymbolRe {
    /// Converts a normalized expression. When `view` is `Some((pos, id))`,
    /// the body of the Kleene node at pre-order position `pos` becomes the
    /// single symbol `(id, forward)`.
    pub(crate) fn from_expr(e: &PathExpr, view: Option<(usize, ViewId)>) -> SymbolRe {
        let mut counter = 0;
        convert(e, view, &mut counter)
    }

    /// Operands of the top-level sequence chain, left to right.
    pub(crate) fn seq_factors(&self) -> Vec<&SymbolRe> {
        match self {
            SymbolRe::Seq(l, r) => {
                let mut out = l.seq_factors();
                out.extend(r.seq_factors());
                out
            }
            other => vec![other],
        }
    }

    pub(crate) fn seq_of(factors: &[&SymbolRe]) -> SymbolRe {
        let mut iter = factors.iter();
        let first = (*iter.next().expect("non-empty sequence")).clone();
        iter.fold(first, |acc, f| {
            SymbolRe::Seq(Box::new(acc), Box::new((*f).clone()))
        })
    }
}

fn convert(e: &PathExpr, view: Option<(usize, ViewId)>, counter: &mut usize) -> SymbolRe {
    let pos = *counter;
    *counter += 1;
    let view_body = |counter: &mut usize, inner: &PathExpr| {
        // keep pre-order numbering identical to the unsubstituted tree
        *counter += subtree_size(inner);
        Box::new(SymbolRe::Sym(Symbol {
            label: SymbolLabel::View(view.unwrap().1),
            direction: Direction::Forward,
        }))
    };
    let is_view = view.map(|(p, _)| p) == Some(pos);
    match e {
        PathExpr::Label(iri) => SymbolRe::Sym(Symbol::forward(iri.clone())),
        PathExpr::Inverse(inner) => match &**inner {
            PathExpr::Label(iri) => {
                *counter += 1;
                SymbolRe::Sym(Symbol::inverse(iri.clone()))
            }
            _ => panic!("expression must be normalized before compilation"),
        },
        PathExpr::Seq(l, r) => {
            let l = convert(l, view, counter);
            let r = convert(r, view, counter);
            SymbolRe::Seq(Box::new(l), Box::new(r))
        }
        PathExpr::Alt(l, r) => {
            let l = convert(l, view, counter);
            let r = convert(r, view, counter);
            SymbolRe::Alt(Box::new(l), Box::new(r))
        }
        PathExpr::ZeroOrMore(inner) if is_view => SymbolRe::Star(view_body(counter, inner)),
        PathExpr::OneOrMore(inner) if is_view => SymbolRe::Plus(view_body(counter, inner)),
        PathExpr::ZeroOrMore(inner) => SymbolRe::Star(Box::new(convert(inner, view, counter))),
        PathExpr::OneOrMore(inner) => SymbolRe::Plus(Box::new(convert(inner, view, counter))),
        PathExpr::ZeroOrOne(inner) => SymbolRe::Opt(Box::new(convert(inner, view, counter))),
    }
}

pub(crate) fn subtree_size(e: &PathExpr) -> usize {
    match e {
        PathExpr::Label(_) => 1,
        PathExpr::Inverse(i)
        | PathExpr::ZeroOrMore(i)
        | PathExpr::OneOrMore(i)
        | PathExpr::ZeroOrOne(i) => 1 + subtree_size(i),
        PathExpr::Seq(l, r) | PathExpr::Alt(l, r) => 1 + subtree_size(l) + subtree_size(r),
    }
}

struct Positions {
    symbols: Vec<Symbol>,
    follow: Vec<BTreeSet<usize>>,
}

struct Summary {
    nullable: bool,
    first: BTreeSet<usize>,
    last: BTreeSet<usize>,
}

impl Positions {
    fn visit(&mut self, re: &SymbolRe) -> Summary {
        match re {
            SymbolRe::Sym(sym) => {
                self.symbols.push(sym.clone());
                self.follow.push(BTreeSet::new());
                let p = self.symbols.len(); // positions are 1-based
                Summary {
                    nullable: false,
                    first: [p].into(),
                    last: [p].into(),
                }
            }
            SymbolRe::Seq(l, r) => {
                let l = self.visit(l);
                let r = self.visit(r);
                for &p in &l.last {
                    self.follow[p - 1].extend(r.first.iter().copied());
                }
                let mut first = l.first;
                if l.nullable {
                    first.extend(r.first.iter().copied());
                }
                let mut last = r.last;
                if r.nullable {
                    last.extend(l.last);
                }
                Summary {
                    nullable: l.nullable && r.nullable,
                    first,
                    last,
                }
            }
            SymbolRe::Alt(l, r) => {
                let l = self.visit(l);
                let r = self.visit(r);
                Summary {
                    nullable: l.nullable || r.nullable,
                    first: l.first.union(&r.first).copied().collect(),
                    last: l.last.union(&r.last).copied().collect(),
                }
            }
            SymbolRe::Star(inner) | SymbolRe::Plus(inner) => {
                let s = self.visit(inner);
                for &p in &s.last {
                    self.follow[p - 1].extend(s.first.iter().copied());
                }
                Summary {
                    nullable: s.nullable || matches!(re, SymbolRe::Star(_)),
                    ..s
                }
            }
            SymbolRe::Opt(inner) => Summary {
                nullable: true,
                ..self.visit(inner)
            },
        }
    }
}

pub(crate) fn glushkov(re: &SymbolRe) -> Automaton {
    let mut pos = Positions {
        symbols: Vec::new(),
        follow: Vec::new(),
    };
    let root = pos.visit(re);
    let mut transitions = Vec::new();
    for &q in &root.first {
        transitions.push(Transition {
            from: 0,
            symbol: pos.symbols[q - 1].clone(),
            to: q,
        });
    }
    for (i, follow) in pos.follow.iter().enumerate() {
        for &q in follow {
            transitions.push(Transition {
                from: i + 1,
                symbol: pos.symbols[q - 1].clone(),
                to: q,
            });
        }
    }
    let mut finals = root.last;
    if root.nullable {
        finals.insert(0);
    }
    Automaton::from_parts(pos.symbols.len() + 1, 0, finals, transitions)
}

/// Position automaton of `e`. Un-normalized input is normalized first.
pub fn compile_automaton(e: &PathExpr) -> Automaton {
    let normalized;
    let e = if e.is_normalized() {
        e
    } else {
        normalized = normalize_inverses(e);
        &normalized
    };
    glushkov(&SymbolRe::from_expr(e, None))
}

/// Automaton for the reversed language with every direction flipped: it reads
/// a path from its target end back to its source.
///
/// Transitions are reversed; a fresh start state receives a copy of every
/// transition that entered an original final state, and the original start
/// becomes the final state. The result is trimmed.
pub fn reverse_automaton(a: &Automaton) -> Automaton {
    let fresh = a.num_states;
    let mut transitions = Vec::with_capacity(a.transitions.len() * 2);
    for t in &a.transitions {
        let flipped = t.symbol.flipped();
        transitions.push(Transition {
            from: t.to,
            symbol: flipped.clone(),
            to: t.from,
        });
        if a.is_final(t.to) {
            transitions.push(Transition {
                from: fresh,
                symbol: flipped,
                to: t.from,
            });
        }
    }
    let mut finals = BTreeSet::from([a.start]);
    if a.nullable {
        finals.insert(fresh);
    }
    Automaton::from_parts(a.num_states + 1, fresh, finals, transitions).trim()
}
