//! Random pinned graphs and digraphs for property tests and benchmarks.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{CondensedDigraph, Edge, PinnedGraph, VertexId};

fn pin_name(i: usize) -> String {
    format!("p{i:02}")
}

fn inner_name(i: usize) -> String {
    format!("v{i:02}")
}

fn next_edge_id(graph: &PinnedGraph) -> String {
    let taken: BTreeSet<&str> = graph.edges.iter().map(|e| e.id.as_str()).collect();
    (graph.edges.len()..)
        .map(|i| format!("e{i:02}"))
        .find(|id| !taken.contains(id.as_str()))
        .expect("unbounded range")
}

fn push_edge(graph: &mut PinnedGraph, u: &VertexId, v: &VertexId) {
    let id = next_edge_id(graph);
    graph.edges.push(Edge::new(id, u.clone(), v.clone()));
}

/// Pinned generically isostatic graph grown from `pins` pins by random vertex
/// additions (`d` new bars) and edge splits (remove `u-w`, add a vertex on
/// `u`, `w` and `d - 1` further vertices). Both moves preserve generic
/// isostaticity. Requires `pins >= d`.
pub fn random_isostatic<R: Rng + ?Sized>(d: usize, inner: usize, pins: usize, rng: &mut R) -> PinnedGraph {
    assert!(d >= 1 && pins >= d, "need at least d pins");
    let mut g = PinnedGraph::new(d, Vec::<String>::new(), (0..pins).map(pin_name), vec![]);
    for i in 0..inner {
        let v = VertexId::from(inner_name(i));
        let existing: Vec<VertexId> = g.vertices().cloned().collect();
        let split = !g.edges.is_empty() && existing.len() > d && rng.gen_bool(0.5);
        g.inner.insert(v.clone());
        if split {
            let pos = rng.gen_range(0..g.edges.len());
            let old = g.edges.remove(pos);
            let others: Vec<&VertexId> = existing.iter().filter(|x| **x != old.u && **x != old.v).collect();
            let mut targets = vec![old.u.clone(), old.v.clone()];
            targets.extend(others.choose_multiple(rng, d - 1).map(|x| (*x).clone()));
            for t in &targets {
                push_edge(&mut g, &v, t);
            }
        } else {
            let targets: Vec<VertexId> = existing.choose_multiple(rng, d).cloned().collect();
            for t in &targets {
                push_edge(&mut g, &v, t);
            }
        }
    }
    g
}

/// All inner-inner and inner-pin vertex pairs.
fn candidate_pairs(graph: &PinnedGraph) -> Vec<(VertexId, VertexId)> {
    let inner: Vec<&VertexId> = graph.inner.iter().collect();
    let mut out = Vec::new();
    for (i, a) in inner.iter().enumerate() {
        for b in &inner[i + 1..] {
            out.push(((*a).clone(), (*b).clone()));
        }
        for p in &graph.pinned {
            out.push(((*a).clone(), p.clone()));
        }
    }
    out
}

/// Uniform simple pinned graph with `edges` edges (fewer if not enough pairs).
pub fn random_pinned_graph<R: Rng + ?Sized>(d: usize, inner: usize, pins: usize, edges: usize, rng: &mut R) -> PinnedGraph {
    let mut g = PinnedGraph::new(d, (0..inner).map(inner_name), (0..pins).map(pin_name), vec![]);
    let pairs = candidate_pairs(&g);
    for (u, v) in pairs.choose_multiple(rng, edges.min(pairs.len())) {
        push_edge(&mut g, u, v);
    }
    g
}

/// Moves one random edge to a random unused vertex pair.
pub fn perturb_edge<R: Rng + ?Sized>(graph: &PinnedGraph, rng: &mut R) -> PinnedGraph {
    let mut g = graph.clone();
    if g.edges.is_empty() {
        return g;
    }
    let used: BTreeSet<(VertexId, VertexId)> = g.edges.iter().map(|e| e.endpoint_key()).collect();
    let free: Vec<(VertexId, VertexId)> = candidate_pairs(&g)
        .into_iter()
        .filter(|(a, b)| !used.contains(&Edge::new("", a.clone(), b.clone()).endpoint_key()))
        .collect();
    let Some((a, b)) = free.choose(rng) else {
        return g;
    };
    let pos = rng.gen_range(0..g.edges.len());
    let id = g.edges[pos].id.clone();
    g.edges[pos] = Edge {
        id,
        u: a.clone(),
        v: b.clone(),
    };
    g
}

/// Random digraph on `n` nodes with the last node as a sink named ground.
pub fn random_condensed_digraph<R: Rng + ?Sized>(n: usize, arc_probability: f64, rng: &mut R) -> CondensedDigraph {
    assert!(n >= 1);
    let ground = n - 1;
    let mut arcs = Vec::new();
    for a in 0..ground {
        for b in 0..n {
            if a != b && rng.gen_bool(arc_probability) {
                arcs.push((a, b));
            }
        }
    }
    CondensedDigraph::from_arcs(n, ground, arcs)
}
