//! Random graphs and expressions for property tests and benchmarks.
//!
//! Node terms are `<n0>`, `<n1>`, ...; label terms are `<l0>`, `<l1>`, ...

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::Graph;
use crate::path::PathExpr;

pub fn node(i: usize) -> String {
    format!("<n{i}>")
}

pub fn label(i: usize) -> String {
    format!("<l{i}>")
}

fn build(edges: &[(usize, usize, usize)]) -> Graph {
    let texts: Vec<(String, String, String)> = edges
        .iter()
        .map(|&(s, l, o)| (node(s), label(l), node(o)))
        .collect();
    Graph::from_terms(
        texts
            .iter()
            .map(|(s, p, o)| (s.as_str(), p.as_str(), o.as_str())),
    )
}

/// Uniform random graph: `triples` draws of (node, label, node); duplicates
/// collapse, so the triple count may come out lower.
pub fn uniform_graph<R: Rng>(rng: &mut R, nodes: usize, labels: usize, triples: usize) -> Graph {
    let edges: Vec<_> = (0..triples)
        .map(|_| {
            (
                rng.gen_range(0..nodes),
                rng.gen_range(0..labels),
                rng.gen_range(0..nodes),
            )
        })
        .collect();
    build(&edges)
}

/// Graph whose labels have very different shapes: each label draws its
/// subjects from a small hub set and its objects from the whole node range,
/// or the reverse, with per-label edge counts spread over an order of
/// magnitude.
pub fn skewed_graph<R: Rng>(rng: &mut R, nodes: usize, labels: usize) -> Graph {
    let mut edges = Vec::new();
    for l in 0..labels {
        let hubs = rng.gen_range(1..=4usize).min(nodes);
        let hub_set: Vec<usize> = (0..nodes)
            .collect::<Vec<_>>()
            .choose_multiple(rng, hubs)
            .copied()
            .collect();
        let count = rng.gen_range(nodes / 10..=nodes * 2).max(1);
        let shape = rng.gen_range(0..3);
        for _ in 0..count {
            let wide = rng.gen_range(0..nodes);
            let narrow = *hub_set.choose(rng).unwrap();
            let (s, o) = match shape {
                0 => (narrow, wide),
                1 => (wide, narrow),
                _ => (wide, rng.gen_range(0..nodes)),
            };
            edges.push((s, l, o));
        }
    }
    build(&edges)
}

/// Chain `n0 -l0-> n1 -l0-> ... -> n(len)`.
pub fn chain_graph(len: usize) -> Graph {
    let edges: Vec<_> = (0..len).map(|i| (i, 0, i + 1)).collect();
    build(&edges)
}

/// Random expression of depth at most `depth` over labels `<l0>..`.
/// Every one of the seven node kinds can appear.
pub fn random_expr<R: Rng>(rng: &mut R, depth: usize, labels: usize) -> PathExpr {
    let leaf = |rng: &mut R| PathExpr::label(label(rng.gen_range(0..labels)));
    if depth <= 1 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 => PathExpr::inverse(random_expr(rng, d, labels)),
        1 => PathExpr::seq(random_expr(rng, d, labels), random_expr(rng, d, labels)),
        2 => PathExpr::alt(random_expr(rng, d, labels), random_expr(rng, d, labels)),
        3 => PathExpr::star(random_expr(rng, d, labels)),
        4 => PathExpr::plus(random_expr(rng, d, labels)),
        _ => PathExpr::opt(random_expr(rng, d, labels)),
    }
}

/// Kleene-free expression with exactly `leaves` labels built from sequence,
/// alternative and inverse.
pub fn random_plain_expr<R: Rng>(rng: &mut R, leaves: usize, labels: usize) -> PathExpr {
    assert!(leaves >= 1);
    if leaves == 1 {
        let l = PathExpr::label(label(rng.gen_range(0..labels)));
        return if rng.gen_bool(0.25) {
            PathExpr::inverse(l)
        } else {
            l
        };
    }
    let left = rng.gen_range(1..leaves);
    let (l, r) = (
        random_plain_expr(rng, left, labels),
        random_plain_expr(rng, leaves - left, labels),
    );
    if rng.gen_bool(0.75) {
        PathExpr::seq(l, r)
    } else {
        PathExpr::alt(l, r)
    }
}

/// Random sequence `a1/a2/.../ak` of plain (possibly inverted) labels.
pub fn random_sequence<R: Rng>(rng: &mut R, leaves: usize, labels: usize) -> PathExpr {
    let mut e = random_plain_expr(rng, 1, labels);
    for _ in 1..leaves {
        e = PathExpr::seq(e, random_plain_expr(rng, 1, labels));
    }
    e
}
