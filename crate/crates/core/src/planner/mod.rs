//! Plan space for a property-path query.
//!
//! A [`WavePlan`] fixes how the search is driven:
//!
//! * `Forward` runs the position automaton from the source side.
//! * `Backward` runs the reversed automaton from the target side.
//! * `Bidirectional` cuts the top-level sequence `f1/.../fk` after factor `i`
//!   and runs `f1..fi` forward and `f(i+1)..fk` backward, joining the two
//!   wavefronts on their shared frontier node.
//!
//! Each of these may additionally replace the body of one `*`/`+` subtree by
//! a materialized view, which the outer automaton then reads as a single
//! virtual label.

mod automaton;
mod dot;

pub use automaton::{
    compile_automaton, reverse_automaton, Automaton, Direction, Symbol, SymbolLabel, Transition,
    ViewId,
};
pub use dot::plan_to_dot;

use automaton::{glushkov, SymbolRe};

use crate::cost::choose_best_plan;
use crate::graph::LabelStats;
use crate::path::{normalize_inverses, PathExpr};

/// Endpoint bindings of a query, as term text (`<iri>` or `"literal"`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Bindings {
    pub source: Option<String>,
    pub target: Option<String>,
}

impl Bindings {
    pub fn unbound() -> Bindings {
        Bindings::default()
    }

    pub fn source(term: impl Into<String>) -> Bindings {
        Bindings {
            source: Some(term.into()),
            target: None,
        }
    }

    pub fn target(term: impl Into<String>) -> Bindings {
        Bindings {
            source: None,
            target: Some(term.into()),
        }
    }

    pub fn both(source: impl Into<String>, target: impl Into<String>) -> Bindings {
        Bindings {
            source: Some(source.into()),
            target: Some(target.into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanKind {
    Forward,
    Backward,
    /// Split after the `split`-th factor (1-based) of the top-level sequence.
    Bidirectional {
        split: usize,
    },
}

impl PlanKind {
    pub fn name(self) -> &'static str {
        match self {
            PlanKind::Forward => "forward",
            PlanKind::Backward => "backward",
            PlanKind::Bidirectional { .. } => "bidirectional",
        }
    }
}

/// A Kleene body materialized as a pair relation before the outer plan runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewDef {
    pub view_id: ViewId,
    /// Pre-order position of the `*`/`+` node whose body this view replaces.
    pub position: usize,
    /// The replaced body.
    pub sub_expr: PathExpr,
    pub nested_plan: Box<WavePlan>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavePlan {
    pub kind: PlanKind,
    /// Normalized query expression the plan answers.
    pub expr: PathExpr,
    /// Source-side automaton (Forward, Bidirectional).
    pub left: Option<Automaton>,
    /// Target-side automaton over flipped symbols (Backward, Bidirectional).
    pub right: Option<Automaton>,
    pub views: Vec<ViewDef>,
    pub plan_id: String,
}

impl WavePlan {
    /// True when the whole expression accepts the empty path.
    pub fn nullable(&self) -> bool {
        self.expr.nullable()
    }

    pub fn view(&self, id: ViewId) -> &ViewDef {
        &self.views[id.0]
    }

    /// Number of automaton states over all wavefronts of this plan, not
    /// counting nested view plans.
    pub fn state_count(&self) -> usize {
        self.left
            .iter()
            .chain(self.right.iter())
            .map(|a| a.num_states)
            .sum()
    }
}

/// Canonical text for a plan: kind code (`F`, `R`, or `B<split>`), followed by
/// `@v<position>` when a view replaces the Kleene body at that pre-order
/// position.
pub fn plan_signature(p: &WavePlan) -> String {
    signature(p.kind, p.views.first().map(|v| v.position))
}

fn signature(kind: PlanKind, view_position: Option<usize>) -> String {
    let mut s = match kind {
        PlanKind::Forward => "F".to_string(),
        PlanKind::Backward => "R".to_string(),
        PlanKind::Bidirectional { split } => format!("B{split}"),
    };
    if let Some(pos) = view_position {
        s.push_str(&format!("@v{pos}"));
    }
    s
}

/// Pre-order positions of every `*` and `+` node.
pub fn kleene_positions(e: &PathExpr) -> Vec<(usize, &PathExpr)> {
    fn walk<'a>(e: &'a PathExpr, counter: &mut usize, out: &mut Vec<(usize, &'a PathExpr)>) {
        let pos = *counter;
        *counter += 1;
        match e {
            PathExpr::Label(_) => {}
            PathExpr::ZeroOrMore(inner) | PathExpr::OneOrMore(inner) => {
                out.push((pos, inner));
                walk(inner, counter, out);
            }
            PathExpr::Inverse(inner) | PathExpr::ZeroOrOne(inner) => walk(inner, counter, out),
            PathExpr::Seq(l, r) | PathExpr::Alt(l, r) => {
                walk(l, counter, out);
                walk(r, counter, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(e, &mut 0, &mut out);
    out
}

/// Enumerates the plan space of `e` in a fixed order: the plain variants
/// (`F`, `R`, `B1..`) first, then the same variants for each Kleene subtree
/// in pre-order, each with that subtree's body behind a view.
///
/// The nested plan of every view is the cheapest plan of the body under
/// `stats`, evaluated with both endpoints unbound.
pub fn enumerate_plans(e: &PathExpr, stats: &LabelStats, bindings: &Bindings) -> Vec<WavePlan> {
    // bindings only influence cost, never the shape of the plan space
    let _ = bindings;
    let expr = normalize_inverses(e);
    let mut plans = variants(&expr, &SymbolRe::from_expr(&expr, None), None);

    for (position, body) in kleene_positions(&expr) {
        let nested_candidates = enumerate_plans(body, stats, &Bindings::unbound());
        let (nested, _) = choose_best_plan(&nested_candidates, stats, &Bindings::unbound());
        let view = ViewDef {
            view_id: ViewId(0),
            position,
            sub_expr: body.clone(),
            nested_plan: Box::new(nested.clone()),
        };
        let re = SymbolRe::from_expr(&expr, Some((position, ViewId(0))));
        plans.extend(variants(&expr, &re, Some(view)));
    }
    plans
}

fn variants(expr: &PathExpr, re: &SymbolRe, view: Option<ViewDef>) -> Vec<WavePlan> {
    let view_position = view.as_ref().map(|v| v.position);
    let views: Vec<ViewDef> = view.into_iter().collect();
    let make = |kind, left, right| WavePlan {
        kind,
        expr: expr.clone(),
        left,
        right,
        views: views.clone(),
        plan_id: signature(kind, view_position),
    };

    let forward = glushkov(re);
    let backward = reverse_automaton(&forward);
    let mut out = vec![
        make(PlanKind::Forward, Some(forward), None),
        make(PlanKind::Backward, None, Some(backward)),
    ];
    let factors = re.seq_factors();
    for split in 1..factors.len() {
        let left = glushkov(&SymbolRe::seq_of(&factors[..split]));
        let right = reverse_automaton(&glushkov(&SymbolRe::seq_of(&factors[split..])));
        out.push(make(
            PlanKind::Bidirectional { split },
            Some(left),
            Some(right),
        ));
    }
    out
}

/// Looks up a plan by its signature.
pub fn find_plan<'a>(plans: &'a [WavePlan], plan_id: &str) -> Option<&'a WavePlan> {
    plans.iter().find(|p| p.plan_id == plan_id)
}
