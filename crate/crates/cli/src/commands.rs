use std::fmt::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use pathwave_core::evaluator::render_results;
use pathwave_core::planner::find_plan;
use pathwave_core::{
    choose_best_plan, compute_stats, enumerate_plans, estimate_plan_cost, evaluate_plan,
    load_ntriples, parse_path, plan_to_dot, Bindings, EvalError, EvalOptions, Graph, LabelStats,
    LoadError, ParseError, WavePlan,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Load { path: PathBuf, source: LoadError },
    #[error("invalid path expression: {0}")]
    Parse(#[from] ParseError),
    #[error("unknown plan {0:?}; run `explain` to list plan ids")]
    UnknownPlan(String),
    #[error("{0}")]
    Eval(#[from] EvalError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 2,
            CliError::Load { .. } | CliError::Parse(_) | CliError::UnknownPlan(_) => 1,
            CliError::Eval(_) => 3,
        }
    }
}

pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Output {
    fn ok(stdout: String, stderr: String) -> Output {
        Output {
            stdout,
            stderr,
            code: 0,
        }
    }
}

pub struct QueryRequest {
    pub graph_path: PathBuf,
    pub path_expr: String,
    pub source: Option<String>,
    pub target: Option<String>,
    pub plan_override: Option<String>,
    pub tuple_budget: u64,
}

impl QueryRequest {
    fn bindings(&self) -> Bindings {
        Bindings {
            source: self.source.clone(),
            target: self.target.clone(),
        }
    }
}

fn read_graph(path: &Path) -> Result<Graph, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    load_ntriples(&text).map_err(|source| CliError::Load {
        path: path.to_owned(),
        source,
    })
}

pub fn stats(graph_path: &Path) -> Result<Output, CliError> {
    let g = read_graph(graph_path)?;
    let stats = compute_stats(&g);
    let mut out = String::new();
    if !stats.labels.is_empty() {
        out.push_str("label\tcount\tdistinct_subj\tdistinct_obj\n");
    }
    for (label, c) in &stats.labels {
        writeln!(
            out,
            "{label}\t{}\t{}\t{}",
            c.count, c.distinct_subjects, c.distinct_objects
        )
        .unwrap();
    }
    writeln!(
        out,
        "# nodes={} triples={}",
        g.node_count(),
        g.triple_count()
    )
    .unwrap();
    Ok(Output::ok(out, String::new()))
}

struct Prepared {
    graph: Graph,
    stats: LabelStats,
    bindings: Bindings,
    plans: Vec<WavePlan>,
}

fn prepare(req: &QueryRequest) -> Result<Prepared, CliError> {
    let expr = parse_path(&req.path_expr)?;
    let graph = read_graph(&req.graph_path)?;
    let stats = compute_stats(&graph);
    let bindings = req.bindings();
    let plans = enumerate_plans(&expr, &stats, &bindings);
    Ok(Prepared {
        graph,
        stats,
        bindings,
        plans,
    })
}

#[derive(Serialize)]
struct ExplainEntry<'a> {
    plan_id: &'a str,
    kind: &'a str,
    est_total_tuples: f64,
    saturated: bool,
    chosen: bool,
}

pub fn explain(req: &QueryRequest, dot: bool) -> Result<Output, CliError> {
    let prep = prepare(req)?;
    let (best, _) = choose_best_plan(&prep.plans, &prep.stats, &prep.bindings);

    if dot {
        let plan = match &req.plan_override {
            Some(id) => {
                find_plan(&prep.plans, id).ok_or_else(|| CliError::UnknownPlan(id.clone()))?
            }
            None => best,
        };
        return Ok(Output::ok(plan_to_dot(plan), String::new()));
    }

    let mut entries: Vec<ExplainEntry<'_>> = prep
        .plans
        .iter()
        .map(|p| {
            let est = estimate_plan_cost(p, &prep.stats, &prep.bindings);
            ExplainEntry {
                plan_id: &p.plan_id,
                kind: p.kind.name(),
                est_total_tuples: est.est_total_tuples,
                saturated: est.saturated,
                chosen: p.plan_id == best.plan_id,
            }
        })
        .collect();
    entries.sort_by(|a, b| {
        a.est_total_tuples
            .total_cmp(&b.est_total_tuples)
            .then_with(|| a.plan_id.cmp(b.plan_id))
    });
    let mut json = serde_json::to_string_pretty(&entries).expect("explain entries serialize");
    json.push('\n');
    Ok(Output::ok(json, String::new()))
}

pub fn query(req: &QueryRequest, limit: Option<usize>) -> Result<Output, CliError> {
    let prep = prepare(req)?;
    let plan = match &req.plan_override {
        Some(id) => find_plan(&prep.plans, id).ok_or_else(|| CliError::UnknownPlan(id.clone()))?,
        None => choose_best_plan(&prep.plans, &prep.stats, &prep.bindings).0,
    };
    let est = estimate_plan_cost(plan, &prep.stats, &prep.bindings);
    let options = EvalOptions {
        tuple_budget: req.tuple_budget,
    };
    let (results, exec) = evaluate_plan(plan, &prep.graph, &prep.bindings, &options)?;

    let mut out = String::new();
    let rows = render_results(&prep.graph, &results);
    for (s, t) in rows.iter().take(limit.unwrap_or(usize::MAX)) {
        writeln!(out, "{s}\t{t}").unwrap();
    }
    let summary = format!(
        "plan={} est={:.2} actual_tuples={} iterations={} time_ms={:.3}\n",
        plan.plan_id,
        est.est_total_tuples,
        exec.total_tuples,
        exec.iterations,
        exec.wall_time.as_secs_f64() * 1000.0
    );
    Ok(Output::ok(out, summary))
}

/// One line of a bench query file: `expr[\tsource[\ttarget]]`, where an
/// empty or `-` column leaves that endpoint unbound.
fn parse_query_line(line: &str) -> (String, Bindings) {
    let mut cols = line.split('\t');
    let expr = cols.next().unwrap_or("").trim().to_string();
    let endpoint = |c: Option<&str>| {
        c.map(str::trim)
            .filter(|c| !c.is_empty() && *c != "-")
            .map(str::to_string)
    };
    let source = endpoint(cols.next());
    let target = endpoint(cols.next());
    (expr, Bindings { source, target })
}

pub fn bench(
    graph_path: &Path,
    queries_path: &Path,
    repeat: usize,
    tuple_budget: u64,
) -> Result<Output, CliError> {
    let graph = read_graph(graph_path)?;
    let text = std::fs::read_to_string(queries_path).map_err(|source| CliError::Io {
        path: queries_path.to_owned(),
        source,
    })?;
    let stats = compute_stats(&graph);
    let options = EvalOptions { tuple_budget };
    let repeat = repeat.max(1);

    let mut out = String::from("query\tplan\test_tuples\tactual_tuples\tmedian_ms\n");
    let mut err = String::new();
    let mut succeeded = 0;
    let mut last_failure: Option<CliError> = None;

    for line in text.lines() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (expr_text, bindings) = parse_query_line(line);
        let expr = match parse_path(&expr_text) {
            Ok(e) => e,
            Err(e) => {
                writeln!(err, "query {expr_text:?}: {e}").unwrap();
                last_failure = Some(e.into());
                continue;
            }
        };
        let plans = enumerate_plans(&expr, &stats, &bindings);
        let mut plan_ok = false;
        for plan in &plans {
            let est = estimate_plan_cost(plan, &stats, &bindings);
            let mut times = Vec::with_capacity(repeat);
            let mut actual = None;
            let mut failure = None;
            for _ in 0..repeat {
                match evaluate_plan(plan, &graph, &bindings, &options) {
                    Ok((_, exec)) => {
                        times.push(exec.wall_time.as_secs_f64() * 1000.0);
                        actual = Some(exec.total_tuples);
                    }
                    Err(e) => {
                        failure = Some(e);
                        break;
                    }
                }
            }
            match (failure, actual) {
                (Some(e), _) => {
                    writeln!(err, "query {expr_text:?} plan {}: {e}", plan.plan_id).unwrap();
                    last_failure = Some(e.into());
                }
                (None, Some(actual)) => {
                    plan_ok = true;
                    writeln!(
                        out,
                        "{expr_text}\t{}\t{:.2}\t{actual}\t{:.3}",
                        plan.plan_id,
                        est.est_total_tuples,
                        median(&mut times)
                    )
                    .unwrap();
                }
                (None, None) => unreachable!("repeat is at least 1"),
            }
        }
        if plan_ok {
            succeeded += 1;
        }
    }

    // exit non-zero only when every query failed
    let code = match last_failure {
        Some(e) if succeeded == 0 => e.exit_code(),
        _ => 0,
    };
    Ok(Output {
        stdout: out,
        stderr: err,
        code,
    })
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}
