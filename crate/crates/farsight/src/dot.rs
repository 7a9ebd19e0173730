//! Graphviz export of dominance graphs.

use std::fmt::Write as _;

use farsight_core::dominance::{DominanceMatrix, Relation};
use farsight_core::Market;

use crate::format::serialize_matching;
use crate::report::relation_word;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One node per matching labeled by its literal; an edge `a -> b` means `a`
/// dominates `b`. Pairs left undecided appear as comments.
pub fn export_dot(market: &Market, graph: &DominanceMatrix, relation: Relation) -> String {
    let style = match relation {
        Relation::Direct => "solid",
        Relation::Indirect => "dashed",
    };
    let mut out = String::new();
    writeln!(out, "digraph dominance {{").unwrap();
    writeln!(out, "  node [shape=box, fontname=monospace];").unwrap();
    for (i, m) in graph.nodes.iter().enumerate() {
        writeln!(out, "  n{i} [label={}];", quote(&serialize_matching(market, m))).unwrap();
    }
    for (a, b) in graph.edges() {
        writeln!(
            out,
            "  n{a} -> n{b} [relation={}, style={style}];",
            relation_word(relation)
        )
        .unwrap();
    }
    for (a, b) in &graph.unknown {
        writeln!(out, "  // undecided: n{a} -> n{b}").unwrap();
    }
    out.push_str("}\n");
    out
}
