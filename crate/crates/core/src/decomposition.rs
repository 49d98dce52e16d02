//! Strongly connected decomposition of the ground-condensed digraph.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CondensedDigraph, EdgeId, Orientation, PinnedGraph, VertexId, GROUND};

/// Node cap for [`brute_force_scc`].
pub const BRUTE_FORCE_SCC_CAP: usize = 12;

/// Iterative Tarjan. Returns the component of every node and the number of
/// components; components are numbered in completion order, so every arc goes
/// from a higher or equal number to a lower or equal one.
pub fn strongly_connected_components(adj: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let n = adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next = 0;
    let mut count = 0;
    // (node, next successor position)
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = adj[v].get(*pos) {
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp[w] = count;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
        }
    }
    (comp, count)
}

/// Mutual-reachability partition from a transitive closure. Test oracle.
pub fn brute_force_scc(digraph: &CondensedDigraph) -> Result<Vec<BTreeSet<usize>>> {
    let n = digraph.node_count();
    if n > BRUTE_FORCE_SCC_CAP {
        return Err(Error::SizeCapExceeded {
            size: n,
            cap: BRUTE_FORCE_SCC_CAP,
        });
    }
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for a in &digraph.arcs {
        reach[a.from][a.to] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let class: BTreeSet<usize> = (0..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
        for &j in &class {
            assigned[j] = true;
        }
        out.push(class);
    }
    Ok(out)
}

/// Partition produced by [`strongly_connected_components`] in the same shape
/// as [`brute_force_scc`]: classes sorted by their smallest node.
pub fn scc_partition(digraph: &CondensedDigraph) -> Vec<BTreeSet<usize>> {
    let (comp, count) = strongly_connected_components(&digraph.successors());
    let mut classes = vec![BTreeSet::new(); count];
    for (v, &c) in comp.iter().enumerate() {
        classes[c].insert(v);
    }
    classes.sort_by_key(|c| *c.iter().next().expect("nonempty class"));
    classes
}

/// One strongly connected component with its outgoing edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendedComponent {
    pub inner_vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<EdgeId>,
}

/// Component `from` depends on component `to` through `multiplicity` edges.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DagEdge {
    pub from: usize,
    pub to: usize,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    /// Sorted by smallest inner vertex id.
    pub components: Vec<ExtendedComponent>,
    /// Deduplicated dependencies between components, sorted.
    pub dag_edges: Vec<DagEdge>,
    /// Number of edges from each component into ground.
    pub ground_edges: Vec<usize>,
    /// Bottom-up topological order: dependencies come first.
    pub linear_order: Vec<usize>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Inner vertex sets, in component order.
    pub fn partition(&self) -> Vec<BTreeSet<VertexId>> {
        self.components.iter().map(|c| c.inner_vertices.clone()).collect()
    }

    pub fn component_of_vertex(&self, v: &VertexId) -> Option<usize> {
        self.components.iter().position(|c| c.inner_vertices.contains(v))
    }

    pub fn component_of_edge(&self, e: &EdgeId) -> Option<usize> {
        self.components.iter().position(|c| c.edges.contains(e))
    }

    /// Components this one depends on.
    pub fn dependencies(&self, c: usize) -> impl Iterator<Item = usize> + '_ {
        self.dag_edges.iter().filter(move |e| e.from == c).map(|e| e.to)
    }

    /// A component resting on ground alone.
    pub fn is_bottom(&self, c: usize) -> bool {
        self.dependencies(c).next().is_none()
    }

    /// Errors unless the components partition the inner vertices and edges of `graph`.
    pub fn check_against(&self, graph: &PinnedGraph) -> Result<()> {
        let mut seen_v = BTreeSet::new();
        let mut seen_e = BTreeSet::new();
        for c in &self.components {
            for v in &c.inner_vertices {
                if !graph.is_inner(v) || !seen_v.insert(v) {
                    return Err(Error::DecompositionMismatch(format!("vertex `{v}`")));
                }
            }
            for e in &c.edges {
                if graph.edge(e).is_none() || !seen_e.insert(e) {
                    return Err(Error::DecompositionMismatch(format!("edge `{e}`")));
                }
            }
        }
        if seen_v.len() != graph.inner.len() || seen_e.len() != graph.edges.len() {
            return Err(Error::DecompositionMismatch(
                "components do not cover the graph".to_owned(),
            ));
        }
        let mut order = self.linear_order.clone();
        order.sort_unstable();
        if order != (0..self.components.len()).collect::<Vec<_>>() {
            return Err(Error::DecompositionMismatch("linear order is not a permutation".to_owned()));
        }
        Ok(())
    }

    /// Whether `order` lists every component after all of its dependencies.
    pub fn is_linear_extension(&self, order: &[usize]) -> bool {
        if order.len() != self.components.len() {
            return false;
        }
        let mut pos = vec![usize::MAX; order.len()];
        for (i, &c) in order.iter().enumerate() {
            if c >= pos.len() || pos[c] != usize::MAX {
                return false;
            }
            pos[c] = i;
        }
        self.dag_edges.iter().all(|e| pos[e.to] < pos[e.from])
    }

    /// Up to `limit` bottom-up linear orders; the first is `linear_order`.
    pub fn linear_extensions(&self, limit: usize) -> Vec<Vec<usize>> {
        let n = self.components.len();
        let mut pending = vec![0usize; n];
        for e in &self.dag_edges {
            pending[e.from] += 1;
        }
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(n);
        let mut used = vec![false; n];
        self.extend_orders(&mut pending, &mut used, &mut current, &mut out, limit);
        out
    }

    fn extend_orders(
        &self,
        pending: &mut [usize],
        used: &mut [bool],
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if current.len() == pending.len() {
            out.push(current.clone());
            return;
        }
        for c in 0..pending.len() {
            if used[c] || pending[c] > 0 {
                continue;
            }
            used[c] = true;
            current.push(c);
            for e in self.dag_edges.iter().filter(|e| e.to == c) {
                pending[e.from] -= 1;
            }
            self.extend_orders(pending, used, current, out, limit);
            for e in self.dag_edges.iter().filter(|e| e.to == c) {
                pending[e.from] += 1;
            }
            current.pop();
            used[c] = false;
            if out.len() >= limit {
                return;
            }
        }
    }

    fn component_label(&self, c: usize) -> String {
        let names: Vec<&str> = self.components[c].inner_vertices.iter().map(VertexId::as_str).collect();
        names.join(", ")
    }

    /// Condensation DAG in Graphviz DOT. With `full`, the oriented graph is
    /// added with one cluster per component.
    pub fn to_dot(&self, full: Option<(&PinnedGraph, &Orientation)>) -> String {
        let mut out = String::from("digraph decomposition {\n  rankdir=BT;\n  node [shape=box];\n");
        let _ = writeln!(out, "  {GROUND} [label=\"{GROUND}\", peripheries=2];");
        for c in 0..self.components.len() {
            let _ = writeln!(out, "  c{c} [label=\"{}\"];", escape(&self.component_label(c)));
        }
        for e in &self.dag_edges {
            let _ = writeln!(out, "  c{} -> c{};", e.from, e.to);
        }
        for (c, &k) in self.ground_edges.iter().enumerate() {
            if k > 0 {
                let _ = writeln!(out, "  c{c} -> {GROUND};");
            }
        }
        if let Some((graph, orientation)) = full {
            out.push_str("  subgraph full {\n    node [shape=circle];\n");
            for (c, comp) in self.components.iter().enumerate() {
                let _ = writeln!(out, "    subgraph cluster_{c} {{\n      label=\"c{c}\";");
                for v in &comp.inner_vertices {
                    let _ = writeln!(out, "      \"v:{}\" [label=\"{}\"];", escape(v.as_str()), escape(v.as_str()));
                }
                out.push_str("    }\n");
            }
            for p in &graph.pinned {
                let _ = writeln!(
                    out,
                    "    \"v:{}\" [label=\"{}\", shape=doublecircle];",
                    escape(p.as_str()),
                    escape(p.as_str())
                );
            }
            for e in &graph.edges {
                if let (Some(t), Some(h)) = (orientation.tail(&e.id), orientation.head(graph, &e.id)) {
                    let _ = writeln!(
                        out,
                        "    \"v:{}\" -> \"v:{}\" [label=\"{}\"];",
                        escape(t.as_str()),
                        escape(h.as_str()),
                        escape(e.id.as_str())
                    );
                }
            }
            out.push_str("  }\n");
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// SCCs of the ground-condensed digraph of a d-directed orientation, with
/// extended components, dependency DAG and a deterministic linear order.
pub fn scc_decompose(graph: &PinnedGraph, orientation: &Orientation) -> Result<Decomposition> {
    let condensed = graph.condense_to_ground(orientation)?;
    for (v, k) in orientation.out_degrees(graph) {
        let expected = if graph.is_inner(&v) { graph.dimension } else { 0 };
        if k != expected {
            return Err(Error::NotDDirected(v));
        }
    }
    let ground = condensed.ground;
    let (comp, _) = strongly_connected_components(&condensed.successors());

    // renumber non-ground SCCs by smallest inner index (= smallest vertex id)
    let mut rank: BTreeMap<usize, usize> = BTreeMap::new();
    for node in 0..ground {
        let next = rank.len();
        rank.entry(comp[node]).or_insert(next);
    }
    let count = rank.len();
    let inner: Vec<&VertexId> = graph.inner.iter().collect();
    let mut components = vec![
        ExtendedComponent {
            inner_vertices: BTreeSet::new(),
            edges: BTreeSet::new(),
        };
        count
    ];
    for node in 0..ground {
        components[rank[&comp[node]]].inner_vertices.insert(inner[node].clone());
    }
    let mut multiplicity: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut ground_edges = vec![0; count];
    for arc in &condensed.arcs {
        let from = rank[&comp[arc.from]];
        if let Some(e) = &arc.edge {
            components[from].edges.insert(e.clone());
        }
        if arc.to == ground {
            ground_edges[from] += 1;
        } else {
            let to = rank[&comp[arc.to]];
            if to != from {
                *multiplicity.entry((from, to)).or_insert(0) += 1;
            }
        }
    }
    let dag_edges: Vec<DagEdge> = multiplicity
        .into_iter()
        .map(|((from, to), multiplicity)| DagEdge { from, to, multiplicity })
        .collect();

    // Kahn, smallest available component first
    let mut pending = vec![0usize; count];
    for e in &dag_edges {
        pending[e.from] += 1;
    }
    let mut heap: BinaryHeap<Reverse<usize>> = (0..count).filter(|&c| pending[c] == 0).map(Reverse).collect();
    let mut linear_order = Vec::with_capacity(count);
    while let Some(Reverse(c)) = heap.pop() {
        linear_order.push(c);
        for e in dag_edges.iter().filter(|e| e.to == c) {
            pending[e.from] -= 1;
            if pending[e.from] == 0 {
                heap.push(Reverse(e.from));
            }
        }
    }
    debug_assert_eq!(linear_order.len(), count, "condensation is acyclic");
    Ok(Decomposition {
        components,
        dag_edges,
        ground_edges,
        linear_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn set(xs: &[&str]) -> BTreeSet<VertexId> {
        xs.iter().map(|&x| x.into()).collect()
    }

    fn orient(pairs: &[(&str, &str)]) -> Orientation {
        Orientation {
            tails: pairs.iter().map(|&(e, t)| (e.into(), t.into())).collect(),
        }
    }

    fn stacked() -> (PinnedGraph, Orientation) {
        let g = PinnedGraph::new(
            2,
            ["v1", "v2"],
            ["p1", "p2", "p3"],
            vec![
                Edge::new("v1p1", "v1", "p1"),
                Edge::new("v1p2", "v1", "p2"),
                Edge::new("v2v1", "v2", "v1"),
                Edge::new("v2p3", "v2", "p3"),
            ],
        );
        let o = orient(&[("v1p1", "v1"), ("v1p2", "v1"), ("v2v1", "v2"), ("v2p3", "v2")]);
        (g, o)
    }

    #[test]
    fn dyad_single_component() {
        let g = PinnedGraph::new(2, ["v"], ["p1", "p2"], vec![Edge::new("e1", "v", "p1"), Edge::new("e2", "v", "p2")]);
        let d = scc_decompose(&g, &orient(&[("e1", "v"), ("e2", "v")])).unwrap();
        assert_eq!(d.partition(), vec![set(&["v"])]);
        assert_eq!(d.components[0].edges.len(), 2);
        assert!(d.dag_edges.is_empty());
        assert_eq!(d.ground_edges, vec![2]);
    }

    #[test]
    fn stacked_dyads_chain() {
        let (g, o) = stacked();
        let d = scc_decompose(&g, &o).unwrap();
        assert_eq!(d.partition(), vec![set(&["v1"]), set(&["v2"])]);
        assert_eq!(
            d.dag_edges,
            vec![DagEdge {
                from: 1,
                to: 0,
                multiplicity: 1
            }]
        );
        assert_eq!(d.linear_order, vec![0, 1]);
        assert!(d.components[1].edges.contains(&EdgeId::from("v2v1")));
        assert!(d.is_bottom(0) && !d.is_bottom(1));
        assert_eq!(d.linear_extensions(10), vec![vec![0, 1]]);

        let condensed = g.condense_to_ground(&o).unwrap();
        let brute = brute_force_scc(&condensed).unwrap();
        assert_eq!(brute.len(), 3);
        assert_eq!(brute, scc_partition(&condensed));
    }

    #[test]
    fn triad_one_component() {
        let g = PinnedGraph::new(
            2,
            ["a", "b", "c"],
            ["p1", "p2", "p3"],
            vec![
                Edge::new("ab", "a", "b"),
                Edge::new("bc", "b", "c"),
                Edge::new("ca", "c", "a"),
                Edge::new("ap1", "a", "p1"),
                Edge::new("bp2", "b", "p2"),
                Edge::new("cp3", "c", "p3"),
            ],
        );
        let o = orient(&[("ab", "a"), ("bc", "b"), ("ca", "c"), ("ap1", "a"), ("bp2", "b"), ("cp3", "c")]);
        let d = scc_decompose(&g, &o).unwrap();
        assert_eq!(d.partition(), vec![set(&["a", "b", "c"])]);
    }

    #[test]
    fn pin_with_out_degree_rejected() {
        let (g, mut o) = stacked();
        o.tails.insert("v2p3".into(), "p3".into());
        assert!(matches!(scc_decompose(&g, &o), Err(Error::NotDDirected(_))));
    }

    #[test]
    fn brute_force_small_cases() {
        let single = CondensedDigraph::from_arcs(1, 0, []);
        assert_eq!(brute_force_scc(&single).unwrap().len(), 1);
        let cycle = CondensedDigraph::from_arcs(4, 3, [(0, 1), (1, 2), (2, 0)]);
        let p = brute_force_scc(&cycle).unwrap();
        assert_eq!(p[0].len(), 3);
        let big = CondensedDigraph::from_arcs(13, 0, []);
        assert!(matches!(brute_force_scc(&big), Err(Error::SizeCapExceeded { .. })));
    }

    #[test]
    fn tarjan_numbers_sinks_first() {
        let adj = vec![vec![1], vec![2], vec![]];
        let (comp, count) = strongly_connected_components(&adj);
        assert_eq!(count, 3);
        assert!(comp[2] < comp[1] && comp[1] < comp[0]);
    }

    #[test]
    fn incomparable_components_two_orders() {
        let d = Decomposition {
            components: vec![
                ExtendedComponent {
                    inner_vertices: set(&["a"]),
                    edges: BTreeSet::new(),
                },
                ExtendedComponent {
                    inner_vertices: set(&["b"]),
                    edges: BTreeSet::new(),
                },
            ],
            dag_edges: vec![],
            ground_edges: vec![2, 2],
            linear_order: vec![0, 1],
        };
        assert_eq!(d.linear_extensions(10), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(d.linear_extensions(1).len(), 1);
    }

    #[test]
    fn dot_shapes() {
        let (g, o) = stacked();
        let d = scc_decompose(&g, &o).unwrap();
        let dot = d.to_dot(None);
        assert!(dot.contains("ground [label=\"ground\", peripheries=2]"));
        assert!(dot.contains("c1 -> c0;"));
        assert!(dot.contains("c0 -> ground;"));
        assert!(!dot.contains("c1 -> ground;") || d.ground_edges[1] > 0);
        let full = d.to_dot(Some((&g, &o)));
        assert!(full.contains("cluster_0") && full.contains("\"v:v2\" -> \"v:v1\""));
    }
}
