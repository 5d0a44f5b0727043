//! Graphviz rendering of plans.

use std::fmt::Write;

use super::{Automaton, WavePlan};

/// Renders `p` as a DOT digraph: one cluster per wavefront, one nested
/// cluster per view (containing its nested plan), states as nodes and
/// transitions as `label/dir` edges.
pub fn plan_to_dot(p: &WavePlan) -> String {
    let mut out = String::new();
    writeln!(out, "digraph plan {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(
        out,
        "  label={};",
        quote(&format!("{} {}", p.plan_id, p.expr))
    )
    .unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    write_plan(&mut out, p, "p", 1);
    out.push_str("}\n");
    out
}

fn write_plan(out: &mut String, p: &WavePlan, prefix: &str, depth: usize) {
    let pad = "  ".repeat(depth);
    for view in &p.views {
        let vp = format!("{prefix}_v{}", view.view_id.0);
        writeln!(out, "{pad}subgraph cluster_{vp} {{").unwrap();
        writeln!(
            out,
            "{pad}  label={};",
            quote(&format!(
                "view{} = {} via {}",
                view.view_id.0, view.sub_expr, view.nested_plan.plan_id
            ))
        )
        .unwrap();
        writeln!(out, "{pad}  style=dashed;").unwrap();
        write_plan(out, &view.nested_plan, &vp, depth + 1);
        writeln!(out, "{pad}}}").unwrap();
    }
    if let Some(a) = &p.left {
        write_wavefront(out, a, &format!("{prefix}_l"), "source side", depth);
    }
    if let Some(a) = &p.right {
        write_wavefront(out, a, &format!("{prefix}_r"), "target side", depth);
    }
}

fn write_wavefront(out: &mut String, a: &Automaton, prefix: &str, title: &str, depth: usize) {
    let pad = "  ".repeat(depth);
    writeln!(out, "{pad}subgraph cluster_{prefix} {{").unwrap();
    writeln!(out, "{pad}  label={};", quote(title)).unwrap();
    for s in 0..a.num_states {
        let mut attrs = vec![format!("label={}", quote(&format!("q{s}")))];
        if a.is_final(s) {
            attrs.push("shape=doublecircle".into());
        }
        if s == a.start {
            attrs.push("style=bold".into());
        }
        writeln!(out, "{pad}  {prefix}_q{s} [{}];", attrs.join(", ")).unwrap();
    }
    for t in &a.transitions {
        writeln!(
            out,
            "{pad}  {prefix}_q{} -> {prefix}_q{} [label={}];",
            t.from,
            t.to,
            quote(&t.symbol.to_string())
        )
        .unwrap();
    }
    writeln!(out, "{pad}}}").unwrap();
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                q.push('\\');
                q.push(c);
            }
            '\n' => q.push_str("\\n"),
            _ => q.push(c),
        }
    }
    q.push('"');
    q
}
