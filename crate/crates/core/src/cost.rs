//! Cost estimation for wave plans.
//!
//! Cost is measured in search tuples, the same currency as
//! [`ExecStats::total_tuples`](crate::evaluator::ExecStats). Each wavefront is
//! simulated symbolically: expected tuples per automaton state are pushed
//! through the transitions, multiplied by the label fan-out (independence
//! assumption, uniform fan-out per label). Semi-naive deduplication is
//! modelled by capping the cumulative tuples of each state at
//! `seed_estimate * node_count`; a state at its cap produces nothing new.

use std::cmp::Ordering;

use crate::graph::LabelStats;
use crate::planner::{Automaton, Bindings, Direction, PlanKind, Symbol, SymbolLabel, WavePlan};

/// A round whose every state gains fewer expected tuples than this ends the
/// simulation.
pub const NEW_TUPLE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct CostEstimate {
    pub est_total_tuples: f64,
    /// Views first (nested cost, then view size), then each wavefront's
    /// rounds, then the join estimate for bidirectional plans.
    pub per_iteration: Vec<f64>,
    /// Some state hit its saturation cap.
    pub saturated: bool,
    /// Estimated number of answer pairs.
    pub est_output: f64,
}

/// Average out-degree of `label` in the given direction; 0 for labels
/// absent from `stats`.
pub fn label_fanout(stats: &LabelStats, label: &str, direction: Direction) -> f64 {
    let Some(c) = stats.get(label) else {
        return 0.0;
    };
    let distinct = match direction {
        Direction::Forward => c.distinct_subjects,
        Direction::Inverse => c.distinct_objects,
    };
    if c.count == 0 || distinct == 0 {
        0.0
    } else {
        c.count as f64 / distinct as f64
    }
}

/// Label statistics plus the estimated sizes of a plan's views.
pub struct CardinalityModel<'a> {
    stats: &'a LabelStats,
    node_count: f64,
    view_sizes: Vec<f64>,
}

impl<'a> CardinalityModel<'a> {
    pub fn new(stats: &'a LabelStats) -> Self {
        CardinalityModel {
            stats,
            node_count: stats.node_count as f64,
            view_sizes: Vec::new(),
        }
    }

    pub fn with_view_sizes(mut self, sizes: Vec<f64>) -> Self {
        self.view_sizes = sizes;
        self
    }

    pub fn node_count(&self) -> f64 {
        self.node_count
    }

    /// Estimated distinct source nodes of a view: `min(size, node_count)`.
    fn view_distinct(&self, size: f64) -> f64 {
        size.min(self.node_count)
    }

    pub fn fanout(&self, sym: &Symbol) -> f64 {
        match &sym.label {
            SymbolLabel::Iri(iri) => label_fanout(self.stats, iri, sym.direction),
            SymbolLabel::View(v) => {
                let size = self.view_sizes.get(v.0).copied().unwrap_or(0.0);
                size / self.view_distinct(size).max(1.0)
            }
        }
    }

    /// Number of nodes from which `sym` can be taken.
    pub fn step_sources(&self, sym: &Symbol) -> f64 {
        match &sym.label {
            SymbolLabel::Iri(iri) => self.stats.get(iri).map_or(0.0, |c| match sym.direction {
                Direction::Forward => c.distinct_subjects as f64,
                Direction::Inverse => c.distinct_objects as f64,
            }),
            SymbolLabel::View(v) => {
                self.view_distinct(self.view_sizes.get(v.0).copied().unwrap_or(0.0))
            }
        }
    }

    /// Seed estimate of a wavefront: 1 for a bound endpoint, otherwise the
    /// summed step sources of the start symbols, capped at `node_count`.
    pub fn seed_estimate(&self, a: &Automaton, bound: bool) -> f64 {
        if bound {
            return 1.0;
        }
        let sum: f64 = a
            .start_symbols()
            .into_iter()
            .map(|s| self.step_sources(s))
            .sum();
        sum.min(self.node_count)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct WaveEstimate {
    rounds: Vec<f64>,
    total: f64,
    final_tuples: f64,
    saturated: bool,
}

fn simulate(a: &Automaton, model: &CardinalityModel<'_>, bound: bool) -> WaveEstimate {
    let n = a.num_states;
    let seed = model.seed_estimate(a, bound);
    let cap = seed * model.node_count();

    // cum[q]: tuples in state q after r rounds, clipped at the cap. Unclipped
    // this is the running sum of the semi-naive deltas.
    let mut cum = vec![0.0; n];
    cum[a.start] = seed.min(cap);
    let mut sat = vec![false; n];
    let mut rounds = vec![cum[a.start]];
    let mut any_saturated = false;
    if seed > 0.0 && seed >= cap {
        sat[a.start] = true;
        any_saturated = true;
    }

    let fanouts: Vec<f64> = a
        .transitions
        .iter()
        .map(|t| model.fanout(&t.symbol))
        .collect();
    let max_rounds = model.node_count() as usize;
    let mut round = 0;
    while seed > 0.0 && round < max_rounds {
        let mut next = vec![0.0; n];
        next[a.start] = seed;
        for (t, f) in a.transitions.iter().zip(&fanouts) {
            next[t.to] += cum[t.from] * f;
        }
        let mut produced = vec![0.0; n];
        for q in 0..n {
            if next[q] >= cap && cap > 0.0 {
                next[q] = cap;
                if !sat[q] {
                    sat[q] = true;
                    any_saturated = true;
                }
            }
            produced[q] = (next[q] - cum[q]).max(0.0);
            cum[q] = cum[q].max(next[q]);
        }
        rounds.push(produced.iter().sum());
        round += 1;
        if produced.iter().all(|&x| x < NEW_TUPLE_THRESHOLD) || sat.iter().all(|&s| s) {
            break;
        }
    }

    let final_tuples = a.finals.iter().map(|&q| cum[q]).sum();
    WaveEstimate {
        total: rounds.iter().sum(),
        rounds,
        final_tuples,
        saturated: any_saturated,
    }
}

/// Expected search tuples of executing `p`.
pub fn estimate_plan_cost(p: &WavePlan, stats: &LabelStats, bindings: &Bindings) -> CostEstimate {
    let node_count = stats.node_count as f64;
    let mut per_iteration = Vec::new();
    let mut saturated = false;

    let mut view_sizes = Vec::with_capacity(p.views.len());
    for v in &p.views {
        let nested = estimate_plan_cost(&v.nested_plan, stats, &Bindings::unbound());
        let size = nested.est_output.min(node_count * node_count);
        per_iteration.extend(nested.per_iteration);
        per_iteration.push(size);
        saturated |= nested.saturated;
        view_sizes.push(size);
    }
    let model = CardinalityModel::new(stats).with_view_sizes(view_sizes);
    let source_bound = bindings.source.is_some();
    let target_bound = bindings.target.is_some();

    let mut est_output = match p.kind {
        PlanKind::Forward | PlanKind::Backward => {
            let (a, bound) = match p.kind {
                PlanKind::Forward => (p.left.as_ref(), source_bound),
                _ => (p.right.as_ref(), target_bound),
            };
            let w = simulate(a.expect("plan carries its automaton"), &model, bound);
            per_iteration.extend(w.rounds);
            saturated |= w.saturated;
            w.final_tuples
        }
        PlanKind::Bidirectional { .. } => {
            let l = simulate(
                p.left.as_ref().expect("left automaton"),
                &model,
                source_bound,
            );
            let r = simulate(
                p.right.as_ref().expect("right automaton"),
                &model,
                target_bound,
            );
            per_iteration.extend(l.rounds);
            per_iteration.extend(r.rounds);
            saturated |= l.saturated | r.saturated;
            let join = (l.final_tuples * r.final_tuples / node_count.max(1.0))
                .min(node_count * node_count);
            per_iteration.push(join);
            join
        }
    };
    if p.nullable() {
        est_output += if source_bound || target_bound {
            1.0
        } else {
            node_count
        };
    }

    CostEstimate {
        est_total_tuples: per_iteration.iter().sum(),
        per_iteration,
        saturated,
        est_output,
    }
}

/// Cheapest plan by estimate; ties go to the lexicographically least
/// signature.
///
/// # Panics
///
/// If `plans` is empty.
pub fn choose_best_plan<'p>(
    plans: &'p [WavePlan],
    stats: &LabelStats,
    bindings: &Bindings,
) -> (&'p WavePlan, CostEstimate) {
    plans
        .iter()
        .map(|p| (p, estimate_plan_cost(p, stats, bindings)))
        .min_by(|(pa, ea), (pb, eb)| compare(ea, pa, eb, pb))
        .expect("choose_best_plan needs at least one plan")
}

fn compare(ea: &CostEstimate, pa: &WavePlan, eb: &CostEstimate, pb: &WavePlan) -> Ordering {
    ea.est_total_tuples
        .total_cmp(&eb.est_total_tuples)
        .then_with(|| pa.plan_id.cmp(&pb.plan_id))
}
