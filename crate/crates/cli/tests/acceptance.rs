//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.
//!
//! Set `UPDATE_GOLDEN=1` to rewrite the CLI golden files instead of comparing.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pathwave_core::random::{
    chain_graph, label, node, random_expr, random_plain_expr, skewed_graph, uniform_graph,
};
use pathwave_core::{
    choose_best_plan, compute_stats, enumerate_plans, estimate_plan_cost, evaluate_plan,
    oracle_eval, Bindings, EvalOptions, ExecStats, Graph, PathExpr, ResultSet, TermId, WavePlan,
};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn random_bindings(rng: &mut ChaCha8Rng, nodes: usize) -> Bindings {
    match rng.gen_range(0..3) {
        0 => Bindings::unbound(),
        1 => Bindings::source(node(rng.gen_range(0..nodes))),
        _ => Bindings::target(node(rng.gen_range(0..nodes))),
    }
}

struct PlanRun {
    plan_id: String,
    results: ResultSet,
    stats: ExecStats,
}

fn run_every_plan(g: &Graph, e: &PathExpr, b: &Bindings) -> (Vec<PlanRun>, String) {
    let stats = compute_stats(g);
    let plans = enumerate_plans(e, &stats, b);
    let (best, _) = choose_best_plan(&plans, &stats, b);
    let runs = plans
        .iter()
        .map(|p| {
            let (results, exec) = evaluate_plan(p, g, b, &EvalOptions::default())
                .unwrap_or_else(|err| panic!("plan {} of {e}: {err}", p.plan_id));
            PlanRun {
                plan_id: p.plan_id.clone(),
                results,
                stats: exec,
            }
        })
        .collect();
    (runs, best.plan_id.clone())
}

fn best_plan_run(g: &Graph, e: &PathExpr, b: &Bindings) -> (ResultSet, ExecStats, f64, WavePlan) {
    let stats = compute_stats(g);
    let plans = enumerate_plans(e, &stats, b);
    let (best, est) = choose_best_plan(&plans, &stats, b);
    let (r, s) = evaluate_plan(best, g, b, &EvalOptions::default()).expect("evaluation");
    (r, s, est.est_total_tuples, best.clone())
}

/// 1. Every enumerated plan agrees with the oracle on random instances.
fn oracle_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0ac1e);
    let mut mismatches = 0;
    let mut plans_checked = 0;
    for _ in 0..200 {
        let nodes = rng.gen_range(2..=30);
        let labels = rng.gen_range(1..=3);
        let triples = rng.gen_range(0..=90);
        let g = uniform_graph(&mut rng, nodes, labels, triples);
        let e = random_expr(&mut rng, 4, labels);
        let b = random_bindings(&mut rng, nodes);
        let want = oracle_eval(&e, &g, &b);
        let (runs, _) = run_every_plan(&g, &e, &b);
        for run in runs {
            plans_checked += 1;
            if run.results != want {
                mismatches += 1;
                eprintln!("  mismatch: {e} plan {} bindings {b:?}", run.plan_id);
            }
        }
    }
    verdict(
        mismatches == 0,
        format!("{plans_checked} plan runs, {mismatches} mismatches"),
    )
}

fn star_then_selective(leaves: usize) -> Graph {
    let leaf_names: Vec<String> = (0..leaves).map(|i| format!("<leaf{i}>")).collect();
    let mut edges: Vec<(&str, &str, &str)> = leaf_names
        .iter()
        .map(|l| ("<hub>", "<a>", l.as_str()))
        .collect();
    edges.push((leaf_names[leaves / 2].as_str(), "<b>", "<end>"));
    Graph::from_terms(edges)
}

/// 2. Worst/best actual cost ratio on the star-then-selective fixture.
fn plan_space_spread() -> Verdict {
    let g = star_then_selective(10_000);
    let e = pathwave_core::parse_path("<a>/<b>").unwrap();
    let (runs, chosen) = run_every_plan(&g, &e, &Bindings::unbound());
    let max = runs.iter().map(|r| r.stats.total_tuples).max().unwrap();
    let min = runs
        .iter()
        .map(|r| r.stats.total_tuples)
        .min()
        .unwrap()
        .max(1);
    let ratio = max as f64 / min as f64;
    let summary: Vec<String> = runs
        .iter()
        .map(|r| format!("{}={}", r.plan_id, r.stats.total_tuples))
        .collect();
    verdict(
        ratio >= 10.0,
        format!(
            "ratio {ratio:.1} (>= 10), chosen {chosen}, {}",
            summary.join(" ")
        ),
    )
}

/// 3. The chosen plan is within 2x of the cheapest actual plan.
fn optimizer_effectiveness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0971);
    let mut good = 0;
    for _ in 0..100 {
        let nodes = rng.gen_range(50..=200);
        let labels = 3;
        let g = skewed_graph(&mut rng, nodes, labels);
        let leaves = rng.gen_range(2..=4);
        let e = random_plain_expr(&mut rng, leaves, labels);
        let b = random_bindings(&mut rng, nodes);
        let (runs, chosen) = run_every_plan(&g, &e, &b);
        let min = runs.iter().map(|r| r.stats.total_tuples).min().unwrap();
        let picked = runs
            .iter()
            .find(|r| r.plan_id == chosen)
            .unwrap()
            .stats
            .total_tuples;
        if picked <= 2 * min {
            good += 1;
        } else {
            eprintln!("  {e} {b:?}: chosen {chosen} = {picked}, best = {min}");
        }
    }
    verdict(good >= 80, format!("{good}/100 within 2x of best (>= 80)"))
}

/// 4. Estimates track actual tuples on uniform graphs and are exact on chains.
fn estimator_calibration() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0xca11b);
    let mut within = 0;
    for _ in 0..100 {
        let nodes = rng.gen_range(100..=300);
        let labels = 3;
        let per_label = rng.gen_range(nodes..=3 * nodes);
        let g = uniform_graph(&mut rng, nodes, labels, per_label * labels);
        let leaves = rng.gen_range(2..=4);
        let e = random_plain_expr(&mut rng, leaves, labels);
        let b = random_bindings(&mut rng, nodes);
        let (_, exec, est, plan) = best_plan_run(&g, &e, &b);
        let actual = exec.total_tuples.max(1) as f64;
        let ratio = est.max(1.0) / actual;
        if (1.0 / 3.0..=3.0).contains(&ratio) {
            within += 1;
        } else {
            eprintln!(
                "  {e} {b:?} plan {}: est {est:.1} actual {actual}",
                plan.plan_id
            );
        }
    }

    let mut exact = true;
    for len in [1, 2, 5, 17, 100] {
        let g = chain_graph(len);
        let stats = compute_stats(&g);
        let e = PathExpr::label(label(0));
        for p in enumerate_plans(&e, &stats, &Bindings::unbound()) {
            let est = estimate_plan_cost(&p, &stats, &Bindings::unbound()).est_total_tuples;
            let (_, exec) =
                evaluate_plan(&p, &g, &Bindings::unbound(), &EvalOptions::default()).unwrap();
            if est != exec.total_tuples as f64 {
                exact = false;
                eprintln!(
                    "  chain {len} plan {}: est {est} actual {}",
                    p.plan_id, exec.total_tuples
                );
            }
        }
    }
    verdict(
        within >= 80 && exact,
        format!("{within}/100 within 3x (>= 80); chain estimates exact: {exact}"),
    )
}

fn cyclic_graph(rng: &mut ChaCha8Rng) -> (Graph, usize) {
    let nodes = rng.gen_range(3..=40);
    let labels = rng.gen_range(1..=3);
    let mut edges: Vec<(String, String, String)> = (0..nodes)
        .map(|i| (node(i), label(0), node((i + 1) % nodes)))
        .collect();
    for _ in 0..rng.gen_range(0..=2 * nodes) {
        let (s, l, o) = (
            rng.gen_range(0..nodes),
            rng.gen_range(0..labels),
            rng.gen_range(0..nodes),
        );
        edges.push((node(s), label(l), node(o)));
    }
    let g = Graph::from_terms(
        edges
            .iter()
            .map(|(s, p, o)| (s.as_str(), p.as_str(), o.as_str())),
    );
    (g, labels)
}

fn random_kleene(rng: &mut ChaCha8Rng, labels: usize) -> PathExpr {
    let body = random_expr(rng, 3, labels);
    let kleene = if rng.gen_bool(0.5) {
        PathExpr::star(body)
    } else {
        PathExpr::plus(body)
    };
    match rng.gen_range(0..3) {
        0 => kleene,
        1 => PathExpr::seq(kleene, random_expr(rng, 2, labels)),
        _ => PathExpr::seq(random_expr(rng, 2, labels), kleene),
    }
}

/// 5. Runs terminate within the tuple bound and never re-expand a tuple.
fn termination_and_semi_naive() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc1c1e);
    let mut violations = 0;
    let mut runs_checked = 0;
    for _ in 0..50 {
        let (g, labels) = cyclic_graph(&mut rng);
        let e = random_kleene(&mut rng, labels);
        let b = random_bindings(&mut rng, g.node_count());
        let (runs, _) = run_every_plan(&g, &e, &b);
        for run in runs {
            runs_checked += 1;
            let s = &run.stats;
            if s.total_tuples > s.tuple_bound || s.duplicate_expansions != 0 {
                violations += 1;
                eprintln!("  {e} plan {}: {s:?}", run.plan_id);
            }
        }
    }
    verdict(
        violations == 0,
        format!("{runs_checked} runs, {violations} violations"),
    )
}

fn closure(pairs: &ResultSet, nodes: &[TermId]) -> ResultSet {
    let mut rel: ResultSet = pairs.clone();
    rel.extend(nodes.iter().map(|&n| (n, n)));
    loop {
        // R := R ∘ R, squaring until stable
        let mut by_source: std::collections::HashMap<TermId, Vec<TermId>> = Default::default();
        for &(s, t) in &rel {
            by_source.entry(s).or_default().push(t);
        }
        let squared: ResultSet = rel
            .iter()
            .flat_map(|&(s, m)| {
                by_source
                    .get(&m)
                    .into_iter()
                    .flatten()
                    .map(move |&t| (s, t))
            })
            .collect();
        let next: ResultSet = rel.union(&squared).copied().collect();
        if next == rel {
            return rel;
        }
        rel = next;
    }
}

/// 6. `^p` is the transpose of `p`; `p*` is the reflexive-transitive closure of `p`.
fn algebraic_laws() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a35);
    let mut inverse_bad = 0;
    let mut kleene_bad = 0;
    for _ in 0..100 {
        let nodes = rng.gen_range(2..=30);
        let labels = rng.gen_range(1..=3);
        let triples = rng.gen_range(0..=90);
        let g = uniform_graph(&mut rng, nodes, labels, triples);
        let p = random_expr(&mut rng, 4, labels);
        let (forward, ..) = best_plan_run(&g, &p, &Bindings::unbound());
        let (inverse, ..) = best_plan_run(&g, &PathExpr::inverse(p.clone()), &Bindings::unbound());
        let transposed: ResultSet = forward.iter().map(|&(s, t)| (t, s)).collect();
        if inverse != transposed {
            inverse_bad += 1;
            eprintln!("  inverse law fails for {p}");
        }
    }
    for _ in 0..100 {
        let nodes = rng.gen_range(2..=30);
        let labels = rng.gen_range(1..=3);
        let triples = rng.gen_range(0..=90);
        let g = uniform_graph(&mut rng, nodes, labels, triples);
        let p = random_expr(&mut rng, 3, labels);
        let (base, ..) = best_plan_run(&g, &p, &Bindings::unbound());
        let (star, ..) = best_plan_run(&g, &PathExpr::star(p.clone()), &Bindings::unbound());
        if star != closure(&base, g.nodes()) {
            kleene_bad += 1;
            eprintln!("  Kleene law fails for {p}");
        }
    }
    verdict(
        inverse_bad == 0 && kleene_bad == 0,
        format!("inverse law violations {inverse_bad}/100, Kleene law violations {kleene_bad}/100"),
    )
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn fixture(name: &str) -> String {
    crate_dir()
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathwave"))
        .args(args)
        .output()
        .expect("run pathwave binary")
}

fn check_golden(name: &str, actual: &[u8], failures: &mut Vec<String>) {
    let path = crate_dir().join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    match std::fs::read(&path) {
        Ok(expected) if expected == actual => {}
        Ok(_) => failures.push(format!("{name} differs from golden")),
        Err(e) => failures.push(format!("{name}: {e}")),
    }
}

fn expect_code(label: &str, out: &Output, code: i32, failures: &mut Vec<String>) {
    if out.status.code() != Some(code) {
        failures.push(format!(
            "{label}: exit {:?}, expected {code}",
            out.status.code()
        ));
    }
}

/// 7. CLI outputs match the golden files; bad inputs exit 1, 2 or 3.
fn cli_golden() -> Verdict {
    let mut failures = Vec::new();
    let (chain, small, empty) = (
        fixture("chain.nt"),
        fixture("small.nt"),
        fixture("empty.nt"),
    );

    let goldens: Vec<(&str, Vec<&str>)> = vec![
        ("stats_chain.tsv", vec!["stats", "--graph", &chain]),
        ("stats_small.tsv", vec!["stats", "--graph", &small]),
        ("stats_empty.tsv", vec!["stats", "--graph", &empty]),
        (
            "explain_small_ab.json",
            vec!["explain", "--graph", &small, "--path", "<a>/<b>"],
        ),
        (
            "explain_small_astar_b_source.json",
            vec![
                "explain", "--graph", &small, "--path", "<a>*/<b>", "--source", "<1>",
            ],
        ),
        (
            "explain_chain_plus.dot",
            vec![
                "explain", "--graph", &chain, "--path", "<a>+", "--format", "dot",
            ],
        ),
        (
            "query_chain_plus.tsv",
            vec!["query", "--graph", &chain, "--path", "<a>+"],
        ),
        (
            "query_small_astar_b.tsv",
            vec!["query", "--graph", &small, "--path", "<a>*/<b>"],
        ),
        (
            "query_small_cycle_limit.tsv",
            vec![
                "query",
                "--graph",
                &small,
                "--path",
                "(<a>|<b>|<c>)+",
                "--limit",
                "7",
            ],
        ),
        (
            "query_small_inverse.tsv",
            vec![
                "query",
                "--graph",
                &small,
                "--path",
                "^<b>/^<a>",
                "--target",
                "<1>",
            ],
        ),
    ];
    for (name, args) in &goldens {
        let out = cli(args);
        expect_code(name, &out, 0, &mut failures);
        check_golden(name, &out.stdout, &mut failures);
    }

    // explain shape: >= 3 plans for <a>/<b>, exactly one chosen, and it is the cheapest
    let out = cli(&["explain", "--graph", &small, "--path", "<a>/<b>"]);
    let entries: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
    let entries = entries.as_array().cloned().unwrap_or_default();
    let chosen: Vec<_> = entries.iter().filter(|e| e["chosen"] == true).collect();
    let min_est = entries
        .iter()
        .filter_map(|e| e["est_total_tuples"].as_f64())
        .fold(f64::INFINITY, f64::min);
    if entries.len() < 3
        || chosen.len() != 1
        || chosen[0]["est_total_tuples"].as_f64() != Some(min_est)
    {
        failures.push(format!(
            "explain shape: {} plans, {} chosen",
            entries.len(),
            chosen.len()
        ));
    }

    // every plan override yields byte-identical rows
    let mut outputs = BTreeSet::new();
    for e in &entries {
        let id = e["plan_id"].as_str().unwrap_or_default();
        let out = cli(&[
            "query", "--graph", &small, "--path", "<a>/<b>", "--plan", id,
        ]);
        expect_code(id, &out, 0, &mut failures);
        outputs.insert(out.stdout);
    }
    if outputs.len() != 1 {
        failures.push(format!(
            "plan overrides disagree: {} distinct outputs",
            outputs.len()
        ));
    }

    let missing = crate_dir().join("tests/fixtures/does-not-exist.nt");
    let missing = missing.to_string_lossy();
    let malformed = fixture("malformed.nt");
    let cases: Vec<(&str, Vec<&str>, i32)> = vec![
        ("malformed graph", vec!["stats", "--graph", &malformed], 1),
        (
            "malformed graph query",
            vec!["query", "--graph", &malformed, "--path", "<a>"],
            1,
        ),
        (
            "bad expression",
            vec!["query", "--graph", &chain, "--path", "<a>/"],
            1,
        ),
        (
            "negated property set",
            vec!["explain", "--graph", &chain, "--path", "!(<a>)"],
            1,
        ),
        (
            "unknown plan",
            vec!["query", "--graph", &chain, "--path", "<a>", "--plan", "Z9"],
            1,
        ),
        ("missing file", vec!["stats", "--graph", &missing], 2),
        (
            "missing file query",
            vec!["query", "--graph", &missing, "--path", "<a>"],
            2,
        ),
        (
            "tuple budget",
            vec![
                "query",
                "--graph",
                &small,
                "--path",
                "(<a>|<b>|<c>)*",
                "--tuple-budget",
                "3",
            ],
            3,
        ),
        (
            "absent source",
            vec![
                "query", "--graph", &chain, "--path", "<a>+", "--source", "<nope>",
            ],
            0,
        ),
    ];
    for (label, args, code) in &cases {
        let out = cli(args);
        expect_code(label, &out, *code, &mut failures);
        if *code != 0 && (out.stderr.is_empty() || !out.stdout.is_empty()) {
            failures.push(format!("{label}: diagnostics must go to stderr only"));
        }
        if *code == 0 && !out.stdout.is_empty() {
            failures.push(format!("{label}: expected zero rows"));
        }
    }

    for f in &failures {
        eprintln!("  {f}");
    }
    verdict(
        failures.is_empty(),
        format!(
            "{} golden files, {} exit-code cases, {} failures",
            goldens.len(),
            cases.len(),
            failures.len()
        ),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    // libtest-style arguments (e.g. --nocapture) are accepted and ignored
    let criteria: [Criterion; 7] = [
        ("1 oracle equivalence", oracle_equivalence),
        ("2 plan-space spread", plan_space_spread),
        ("3 optimizer effectiveness", optimizer_effectiveness),
        ("4 estimator calibration", estimator_calibration),
        (
            "5 termination and semi-naive contracts",
            termination_and_semi_naive,
        ),
        ("6 algebraic laws", algebraic_laws),
        ("7 CLI golden tests", cli_golden),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let started = Instant::now();
        let v = run();
        let status = if v.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {name}: {status} ({}) [{:.2}s]",
            v.detail,
            started.elapsed().as_secs_f64()
        );
        if !v.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", 7 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
