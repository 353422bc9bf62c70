//! Graphviz DOT output. Node order follows element order, so output is
//! stable for identical input.

use std::fmt::Write;

use crate::dlat::Decomposition;
use crate::poset::FinitePoset;
use crate::sheafrep::SheafRep;
use crate::ualg::{CongruenceLattice, FiniteAlgebra};

const PALETTE: [&str; 8] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
];

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Hasse diagram, drawn bottom to top.
pub fn poset_dot(p: &FinitePoset) -> String {
    let mut out = String::from("digraph poset {\n  rankdir=BT;\n  node [shape=circle];\n");
    for name in p.names() {
        writeln!(out, "  {};", quote(name)).unwrap();
    }
    for (a, b) in p.covers() {
        writeln!(out, "  {} -> {};", quote(p.name(a)), quote(p.name(b))).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Hasse diagram of `Con A`, nodes labelled by their blocks.
pub fn con_lattice_dot(alg: &FiniteAlgebra, con: &CongruenceLattice) -> String {
    let mut out = String::from("digraph con {\n  rankdir=BT;\n  node [shape=box];\n");
    for (i, c) in con.members().iter().enumerate() {
        writeln!(out, "  c{i} [label={}];", quote(&c.fmt_with(alg))).unwrap();
    }
    for (a, b) in con.covers() {
        writeln!(out, "  c{a} -> c{b};").unwrap();
    }
    out.push_str("}\n");
    out
}

/// Étale space: one cluster per fiber, one node per stalk element. Edges
/// follow each `s_a` along the covers of the base.
pub fn etale_dot(sheaf: &SheafRep) -> String {
    let base = sheaf.base();
    let mut out = String::from("digraph etale {\n  rankdir=BT;\n  node [shape=ellipse];\n");
    for y in 0..base.len() {
        writeln!(out, "  subgraph cluster_{y} {{").unwrap();
        writeln!(out, "    label={};", quote(base.name(y))).unwrap();
        let stalk = sheaf.stalk_algebra(y);
        for (e, name) in stalk.carrier().iter().enumerate() {
            writeln!(out, "    s{y}_{e} [label={}];", quote(name)).unwrap();
        }
        out.push_str("  }\n");
    }
    let mut edges = Vec::new();
    for (y, z) in base.covers() {
        for a in 0..sheaf.algebra().size() {
            let e = (y, sheaf.project(y, a), z, sheaf.project(z, a));
            if !edges.contains(&e) {
                edges.push(e);
            }
        }
    }
    for (y, u, z, v) in edges {
        writeln!(out, "  s{y}_{u} -> s{z}_{v} [color=\"#1f78b4\"];").unwrap();
    }
    out.push_str("}\n");
    out
}

/// `X` with each point filled by the color of its fiber `q⁻¹(y)`.
pub fn decomposition_dot(q: &Decomposition) -> String {
    let (x, y) = (q.source(), q.target());
    let mut out = String::from("digraph decomposition {\n  rankdir=BT;\n  node [shape=circle, style=filled];\n");
    for i in 0..x.len() {
        let t = q.apply(i);
        writeln!(
            out,
            "  {} [fillcolor=\"{}\", xlabel={}];",
            quote(x.name(i)),
            PALETTE[t % PALETTE.len()],
            quote(y.name(t))
        )
        .unwrap();
    }
    for (a, b) in x.covers() {
        writeln!(out, "  {} -> {};", quote(x.name(a)), quote(x.name(b))).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ualg::{chain_lattice, congruence_lattice};

    #[test]
    fn chain_poset() {
        let d = poset_dot(&FinitePoset::chain(2));
        let nodes = d.lines().filter(|l| l.starts_with("  \"") && !l.contains("->")).count();
        assert_eq!(nodes, 2);
        assert_eq!(d.matches("->").count(), 1);
    }

    #[test]
    fn diamond() {
        let c3 = chain_lattice(3);
        let d = con_lattice_dot(&c3, &congruence_lattice(&c3).unwrap());
        assert_eq!(d.matches("[label=").count(), 4);
        assert_eq!(d.matches("->").count(), 4);
    }
}
