//! Semi-naive execution of wave plans.
//!
//! Every wavefront keeps a `total` set of `(origin, state, node)` search
//! tuples and a `delta` holding the tuples first derived in the previous
//! round. Only the delta is expanded, and a successor is kept only if it is
//! new to `total`, so each tuple is expanded exactly once and the loop stops
//! once a round derives nothing new.

mod oracle;

pub use oracle::oracle_eval;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::{Graph, TermId};
use crate::planner::{Automaton, Bindings, Direction, PlanKind, SymbolLabel, ViewDef, WavePlan};

pub const DEFAULT_TUPLE_BUDGET: u64 = 50_000_000;

/// Answer pairs `(source, target)`.
pub type ResultSet = BTreeSet<(TermId, TermId)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SearchTuple {
    pub origin: TermId,
    pub state: usize,
    pub node: TermId,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExecStats {
    /// New tuples per round, wavefront after wavefront (views first).
    /// Round 0 of each wavefront is its seed set.
    pub tuples_per_iteration: Vec<u64>,
    pub total_tuples: u64,
    pub iterations: usize,
    pub wall_time: Duration,
    /// Expansions of a tuple that had already been expanded. Zero under
    /// semi-naive evaluation.
    pub duplicate_expansions: u64,
    /// Sum over wavefronts of `origins * states * node_count`.
    pub tuple_bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("tuple budget of {budget} exceeded after {tuples} search tuples")]
    BudgetExceeded { budget: u64, tuples: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    pub tuple_budget: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            tuple_budget: DEFAULT_TUPLE_BUDGET,
        }
    }
}

/// A materialized view relation indexed in both directions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairIndex {
    pub pairs: ResultSet,
    forward: HashMap<TermId, Vec<TermId>>,
    backward: HashMap<TermId, Vec<TermId>>,
    sources: Vec<TermId>,
    targets: Vec<TermId>,
}

impl PairIndex {
    pub fn new(pairs: ResultSet) -> PairIndex {
        let mut forward: HashMap<TermId, Vec<TermId>> = HashMap::new();
        let mut backward: HashMap<TermId, Vec<TermId>> = HashMap::new();
        for &(s, t) in &pairs {
            forward.entry(s).or_default().push(t);
            backward.entry(t).or_default().push(s);
        }
        for list in backward.values_mut() {
            list.sort_unstable();
        }
        let mut sources: Vec<TermId> = forward.keys().copied().collect();
        let mut targets: Vec<TermId> = backward.keys().copied().collect();
        sources.sort_unstable();
        targets.sort_unstable();
        PairIndex {
            pairs,
            forward,
            backward,
            sources,
            targets,
        }
    }

    pub fn successors(&self, node: TermId) -> &[TermId] {
        self.forward.get(&node).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn predecessors(&self, node: TermId) -> &[TermId] {
        self.backward.get(&node).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn sources(&self) -> &[TermId] {
        &self.sources
    }

    pub fn targets(&self) -> &[TermId] {
        &self.targets
    }
}

#[derive(Clone, Copy)]
enum Edges<'a> {
    Graph(TermId),
    View(&'a PairIndex),
    Nothing,
}

/// Resolves automaton symbols against a graph and a plan's materialized views.
#[derive(Clone, Copy)]
struct Resolver<'a> {
    graph: &'a Graph,
    views: &'a [PairIndex],
}

impl<'a> Resolver<'a> {
    fn edges(&self, label: &SymbolLabel) -> Edges<'a> {
        match label {
            SymbolLabel::Iri(iri) => match self.graph.intern(iri) {
                Some(id) => Edges::Graph(id),
                None => Edges::Nothing,
            },
            SymbolLabel::View(v) => self.views.get(v.0).map_or(Edges::Nothing, Edges::View),
        }
    }

    fn step(&self, edges: Edges<'a>, dir: Direction, node: TermId) -> &'a [TermId] {
        match (edges, dir) {
            (Edges::Graph(p), Direction::Forward) => self.graph.out_neighbors(node, p),
            (Edges::Graph(p), Direction::Inverse) => self.graph.in_neighbors(node, p),
            (Edges::View(v), Direction::Forward) => v.successors(node),
            (Edges::View(v), Direction::Inverse) => v.predecessors(node),
            (Edges::Nothing, _) => &[],
        }
    }

    /// Nodes that have at least one outgoing step for the symbol.
    fn step_sources(&self, edges: Edges<'a>, dir: Direction) -> &'a [TermId] {
        match (edges, dir) {
            (Edges::Graph(p), Direction::Forward) => self.graph.subjects_of(p),
            (Edges::Graph(p), Direction::Inverse) => self.graph.objects_of(p),
            (Edges::View(v), Direction::Forward) => v.sources(),
            (Edges::View(v), Direction::Inverse) => v.targets(),
            (Edges::Nothing, _) => &[],
        }
    }
}

/// Resolved endpoint of a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Endpoint {
    Unbound,
    Bound(TermId),
    /// Bound to a term that is not a node of the graph.
    Missing,
}

impl Endpoint {
    fn resolve(g: &Graph, term: Option<&str>) -> Endpoint {
        match term {
            None => Endpoint::Unbound,
            Some(text) => match g.intern(text) {
                Some(id) if g.is_node(id) => Endpoint::Bound(id),
                _ => Endpoint::Missing,
            },
        }
    }

    fn admits(self, node: TermId) -> bool {
        match self {
            Endpoint::Unbound => true,
            Endpoint::Bound(b) => b == node,
            Endpoint::Missing => false,
        }
    }
}

struct Budget {
    used: u64,
    limit: u64,
}

impl Budget {
    fn charge(&mut self, n: u64) -> Result<(), EvalError> {
        self.used += n;
        if self.used > self.limit {
            Err(EvalError::BudgetExceeded {
                budget: self.limit,
                tuples: self.used,
            })
        } else {
            Ok(())
        }
    }
}

fn seed_tuples(resolver: &Resolver<'_>, a: &Automaton, endpoint: Endpoint) -> Vec<SearchTuple> {
    let seed = |t: TermId| SearchTuple {
        origin: t,
        state: a.start,
        node: t,
    };
    match endpoint {
        Endpoint::Bound(b) => vec![seed(b)],
        Endpoint::Missing => Vec::new(),
        Endpoint::Unbound => {
            let mut nodes = BTreeSet::new();
            for sym in a.start_symbols() {
                let edges = resolver.edges(&sym.label);
                nodes.extend(resolver.step_sources(edges, sym.direction).iter().copied());
            }
            nodes.into_iter().map(seed).collect()
        }
    }
}

/// Initial deltas of `p`'s wavefronts, source side first.
///
/// A bound endpoint seeds exactly itself; an unbound endpoint seeds every
/// node with an outgoing step for some start-state symbol. Bindings to
/// terms that are not graph nodes seed nothing. View symbols are not
/// materialized here and contribute no seeds.
pub fn seed_frontier(p: &WavePlan, g: &Graph, bindings: &Bindings) -> Vec<Vec<SearchTuple>> {
    let resolver = Resolver {
        graph: g,
        views: &[],
    };
    let mut out = Vec::new();
    if let Some(a) = &p.left {
        out.push(seed_tuples(
            &resolver,
            a,
            Endpoint::resolve(g, bindings.source.as_deref()),
        ));
    }
    if let Some(a) = &p.right {
        out.push(seed_tuples(
            &resolver,
            a,
            Endpoint::resolve(g, bindings.target.as_deref()),
        ));
    }
    out
}

/// One semi-naive round over graph labels: expands `delta`, inserts unseen
/// successors into `total` and returns them as the next delta.
/// View symbols match nothing here.
pub fn expand_once(
    g: &Graph,
    a: &Automaton,
    delta: &[SearchTuple],
    total: &mut HashSet<SearchTuple>,
) -> Vec<SearchTuple> {
    let resolver = Resolver {
        graph: g,
        views: &[],
    };
    let table = transition_table(&resolver, a);
    expand(&resolver, &table, delta, total)
}

type TransitionTable<'a> = Vec<Vec<(Edges<'a>, Direction, usize)>>;

fn transition_table<'a>(resolver: &Resolver<'a>, a: &Automaton) -> TransitionTable<'a> {
    (0..a.num_states)
        .map(|q| {
            a.outgoing(q)
                .iter()
                .map(|t| (resolver.edges(&t.symbol.label), t.symbol.direction, t.to))
                .collect()
        })
        .collect()
}

fn expand<'a>(
    resolver: &Resolver<'a>,
    table: &TransitionTable<'a>,
    delta: &[SearchTuple],
    total: &mut HashSet<SearchTuple>,
) -> Vec<SearchTuple> {
    let mut next = Vec::new();
    for tuple in delta {
        for &(edges, dir, to) in &table[tuple.state] {
            for &n in resolver.step(edges, dir, tuple.node) {
                let t = SearchTuple {
                    origin: tuple.origin,
                    state: to,
                    node: n,
                };
                if total.insert(t) {
                    next.push(t);
                }
            }
        }
    }
    next.sort_unstable();
    next
}

/// Final tuples of one wavefront, as `(origin, node)`.
struct Wavefront {
    finals: Vec<(TermId, TermId)>,
}

fn run_wavefront(
    resolver: &Resolver<'_>,
    a: &Automaton,
    endpoint: Endpoint,
    budget: &mut Budget,
    stats: &mut ExecStats,
) -> Result<Wavefront, EvalError> {
    let table = transition_table(resolver, a);
    let seeds = seed_tuples(resolver, a, endpoint);
    budget.charge(seeds.len() as u64)?;

    let origins = seeds.len() as u64;
    stats.tuple_bound += origins * a.num_states as u64 * resolver.graph.node_count() as u64;

    let mut total: HashSet<SearchTuple> = seeds.iter().copied().collect();
    let mut expanded = 0u64;
    let mut delta = seeds;
    let mut rounds = Vec::new();
    while !delta.is_empty() {
        rounds.push(delta.len() as u64);
        expanded += delta.len() as u64;
        delta = expand(resolver, &table, &delta, &mut total);
        budget.charge(delta.len() as u64)?;
    }

    stats.total_tuples += total.len() as u64;
    stats.iterations += rounds.len();
    stats.tuples_per_iteration.extend(rounds);
    stats.duplicate_expansions += expanded - total.len() as u64;

    let mut finals: Vec<(TermId, TermId)> = total
        .into_iter()
        .filter(|t| a.is_final(t.state))
        .map(|t| (t.origin, t.node))
        .collect();
    finals.sort_unstable();
    Ok(Wavefront { finals })
}

/// Executes `p` over `g` and returns the answer pairs with execution counts.
pub fn evaluate_plan(
    p: &WavePlan,
    g: &Graph,
    bindings: &Bindings,
    options: &EvalOptions,
) -> Result<(ResultSet, ExecStats), EvalError> {
    let started = Instant::now();
    let mut budget = Budget {
        used: 0,
        limit: options.tuple_budget,
    };
    let mut stats = ExecStats::default();
    let results = run_plan(p, g, bindings, &mut budget, &mut stats)?;
    stats.wall_time = started.elapsed();
    Ok((results, stats))
}

fn run_plan(
    p: &WavePlan,
    g: &Graph,
    bindings: &Bindings,
    budget: &mut Budget,
    stats: &mut ExecStats,
) -> Result<ResultSet, EvalError> {
    let source = Endpoint::resolve(g, bindings.source.as_deref());
    let target = Endpoint::resolve(g, bindings.target.as_deref());
    let mut results = ResultSet::new();
    if source == Endpoint::Missing || target == Endpoint::Missing {
        return Ok(results);
    }

    let mut views = Vec::with_capacity(p.views.len());
    for v in &p.views {
        views.push(materialize(v, g, budget, stats)?);
    }
    let resolver = Resolver {
        graph: g,
        views: &views,
    };

    match p.kind {
        PlanKind::Forward => {
            let a = p
                .left
                .as_ref()
                .expect("forward plan has a source-side automaton");
            let w = run_wavefront(&resolver, a, source, budget, stats)?;
            results.extend(w.finals.into_iter().filter(|&(_, n)| target.admits(n)));
        }
        PlanKind::Backward => {
            let a = p
                .right
                .as_ref()
                .expect("backward plan has a target-side automaton");
            let w = run_wavefront(&resolver, a, target, budget, stats)?;
            results.extend(
                w.finals
                    .into_iter()
                    .map(|(o, n)| (n, o))
                    .filter(|&(s, _)| source.admits(s)),
            );
        }
        PlanKind::Bidirectional { .. } => {
            let la = p
                .left
                .as_ref()
                .expect("bidirectional plan has a source-side automaton");
            let ra = p
                .right
                .as_ref()
                .expect("bidirectional plan has a target-side automaton");
            let left = run_wavefront(&resolver, la, source, budget, stats)?;
            let right = run_wavefront(&resolver, ra, target, budget, stats)?;

            let mut by_node: HashMap<TermId, Vec<TermId>> = HashMap::new();
            for &(o, n) in &right.finals {
                by_node.entry(n).or_default().push(o);
            }
            for &(lo, n) in &left.finals {
                if let Some(ros) = by_node.get(&n) {
                    results.extend(ros.iter().map(|&ro| (lo, ro)));
                }
            }
            // an empty left (or right) half lets any node act as the meeting point
            if la.nullable {
                results.extend(
                    right
                        .finals
                        .iter()
                        .filter(|&&(_, n)| source.admits(n))
                        .map(|&(o, n)| (n, o)),
                );
            }
            if ra.nullable {
                results.extend(
                    left.finals
                        .iter()
                        .copied()
                        .filter(|&(_, n)| target.admits(n)),
                );
            }
        }
    }

    if p.nullable() {
        match (source, target) {
            (Endpoint::Unbound, Endpoint::Unbound) => {
                results.extend(g.nodes().iter().map(|&t| (t, t)));
            }
            (Endpoint::Bound(b), Endpoint::Unbound) | (Endpoint::Unbound, Endpoint::Bound(b)) => {
                results.insert((b, b));
            }
            (Endpoint::Bound(s), Endpoint::Bound(t)) if s == t => {
                results.insert((s, s));
            }
            _ => {}
        }
    }
    Ok(results)
}

fn materialize(
    v: &ViewDef,
    g: &Graph,
    budget: &mut Budget,
    stats: &mut ExecStats,
) -> Result<PairIndex, EvalError> {
    let pairs = run_plan(&v.nested_plan, g, &Bindings::unbound(), budget, stats)?;
    Ok(PairIndex::new(pairs))
}

/// Evaluates the view's nested plan with both endpoints unbound and indexes
/// the resulting pairs. The returned stats are what the consuming plan is
/// charged for the view.
pub fn materialize_view(
    v: &ViewDef,
    g: &Graph,
    options: &EvalOptions,
) -> Result<(PairIndex, ExecStats), EvalError> {
    let started = Instant::now();
    let mut budget = Budget {
        used: 0,
        limit: options.tuple_budget,
    };
    let mut stats = ExecStats::default();
    let index = materialize(v, g, &mut budget, &mut stats)?;
    stats.wall_time = started.elapsed();
    Ok((index, stats))
}

/// Renders answer pairs as term text, sorted by source text then target text.
pub fn render_results(g: &Graph, results: &ResultSet) -> Vec<(String, String)> {
    let mut rows: Vec<(String, String)> = results
        .iter()
        .map(|&(s, t)| (g.term(s).to_owned(), g.term(t).to_owned()))
        .collect();
    rows.sort();
    rows
}
