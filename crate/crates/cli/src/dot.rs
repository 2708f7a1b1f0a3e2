use std::fmt::Write;

use conley_core::FiberGraph;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        if ch == '"' || ch == '\\' {
            out.push('\\');
        }
        out.push(ch);
    }
    out.push('"');
    out
}

/// One node per poset element labelled with its fiber's polynomial, and an
/// edge `q -> p` for every cover `p < q`.
pub fn fiber_graph(graph: &FiberGraph) -> String {
    let mut s = String::from("digraph fibers {\n");
    for (label, poly) in graph.labels.iter().zip(&graph.polynomials) {
        let text = format!("{label}: {}", poly.fiber_label());
        let _ = writeln!(s, "  {} [label={}];", quote(label), quote(&text));
    }
    for &(p, q) in &graph.covers {
        let _ = writeln!(s, "  {} -> {};", quote(&graph.labels[q]), quote(&graph.labels[p]));
    }
    s.push_str("}\n");
    s
}
