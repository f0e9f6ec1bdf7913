//! Graphviz rendering of an automaton's merged-arrow graph.
//!
//! Divergent states are drawn double-circled and convergent states filled
//! grey. The output depends only on the automaton, so identical inputs give
//! byte-identical text.

use std::fmt::Write as _;

use dissipate_core::automaton::Automaton;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn to_dot(a: &Automaton) -> String {
    let divergent = a.divergent_states();
    let convergent = a.convergent_states();
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(a.name()));
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  node [shape=circle];");
    if let Some(q) = a.initial() {
        let _ = writeln!(out, "  \"__start\" [shape=point];");
        let _ = writeln!(out, "  \"__start\" -> {};", quote(a.state_name(q)));
    }
    for q in a.state_ids() {
        let mut attrs = vec![format!(
            "label={}",
            quote(&format!("{}/{}", a.state_name(q), a.output_of(q)))
        )];
        if divergent.contains(&q) {
            attrs.push("shape=doublecircle".into());
        }
        if convergent.contains(&q) {
            attrs.push("style=filled".into());
            attrs.push("fillcolor=lightgrey".into());
        }
        let _ = writeln!(out, "  {} [{}];", quote(a.state_name(q)), attrs.join(", "));
    }
    // Arrows are stored per source in target order; sources are in id order.
    for arrow in a.arrows() {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(a.state_name(arrow.source)),
            quote(a.state_name(arrow.target)),
            quote(&a.label_text(arrow))
        );
    }
    out.push_str("}\n");
    out
}
