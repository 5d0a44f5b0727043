//! Regular path queries over edge-labeled graphs with cost-based plan choice.
//!
//! A property-path expression is parsed ([`path`]), compiled into a family of
//! alternative evaluation plans ([`planner`]), costed from label statistics
//! ([`cost`]) and executed by semi-naive fixpoint iteration ([`evaluator`])
//! over an in-memory triple store ([`graph`]).

pub mod cost;
pub mod evaluator;
pub mod graph;
pub mod path;
pub mod planner;
pub mod random;

pub use cost::{choose_best_plan, estimate_plan_cost, label_fanout, CostEstimate};
pub use evaluator::{
    evaluate_plan, oracle_eval, EvalError, EvalOptions, ExecStats, ResultSet, SearchTuple,
    DEFAULT_TUPLE_BUDGET,
};
pub use graph::{compute_stats, load_ntriples, Graph, LabelStats, LoadError, TermId};
pub use path::{expr_to_string, normalize_inverses, parse_path, ParseError, PathExpr};
pub use planner::{enumerate_plans, plan_signature, plan_to_dot, Bindings, PlanKind, WavePlan};
