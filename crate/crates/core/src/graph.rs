//! Pinned multigraphs `(I, P; E)`: inner vertices, pinned vertices and an edge
//! list where every edge touches at least one inner vertex.
//!
//! Graphs are plain values. Surgeries (`release_pin`, `repin_vertex`,
//! edge/vertex deletion) return new graphs and leave the input untouched.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque vertex label, e.g. `"A"` or `"O3"`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub String);

/// Opaque edge label. Distinguishes parallel edges.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub String);

macro_rules! label_impls {
    ($t:ident) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $t {
            fn from(s: &str) -> Self {
                $t(s.to_owned())
            }
        }

        impl From<String> for $t {
            fn from(s: String) -> Self {
                $t(s)
            }
        }

        impl $t {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }
    };
}

label_impls!(VertexId);
label_impls!(EdgeId);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
}

impl Edge {
    pub fn new(id: impl Into<EdgeId>, u: impl Into<VertexId>, v: impl Into<VertexId>) -> Self {
        Edge {
            id: id.into(),
            u: u.into(),
            v: v.into(),
        }
    }

    pub fn has_endpoint(&self, x: &VertexId) -> bool {
        &self.u == x || &self.v == x
    }

    /// The endpoint that is not `x`. `None` if `x` is not an endpoint.
    pub fn other(&self, x: &VertexId) -> Option<&VertexId> {
        if &self.u == x {
            Some(&self.v)
        } else if &self.v == x {
            Some(&self.u)
        } else {
            None
        }
    }

    /// Endpoints as an unordered key, used to detect parallel edges.
    pub fn endpoint_key(&self) -> (VertexId, VertexId) {
        if self.u <= self.v {
            (self.u.clone(), self.v.clone())
        } else {
            (self.v.clone(), self.u.clone())
        }
    }
}

/// A well-formedness problem found by [`PinnedGraph::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Violation {
    ZeroDimension,
    InnerPinnedOverlap { vertex: VertexId },
    PinPinEdge { edge: EdgeId, u: VertexId, v: VertexId },
    SelfLoop { edge: EdgeId, vertex: VertexId },
    UnknownEndpoint { edge: EdgeId, vertex: VertexId },
    DuplicateEdgeId { edge: EdgeId },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PinnedGraph {
    pub dimension: usize,
    pub inner: BTreeSet<VertexId>,
    pub pinned: BTreeSet<VertexId>,
    pub edges: Vec<Edge>,
}

impl PinnedGraph {
    pub fn new<I, P, V, W>(dimension: usize, inner: I, pinned: P, edges: Vec<Edge>) -> Self
    where
        I: IntoIterator<Item = V>,
        P: IntoIterator<Item = W>,
        V: Into<VertexId>,
        W: Into<VertexId>,
    {
        PinnedGraph {
            dimension,
            inner: inner.into_iter().map(Into::into).collect(),
            pinned: pinned.into_iter().map(Into::into).collect(),
            edges,
        }
    }

    pub fn is_inner(&self, v: &VertexId) -> bool {
        self.inner.contains(v)
    }

    pub fn is_pinned(&self, v: &VertexId) -> bool {
        self.pinned.contains(v)
    }

    pub fn contains_vertex(&self, v: &VertexId) -> bool {
        self.is_inner(v) || self.is_pinned(v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.inner.iter().chain(self.pinned.iter())
    }

    pub fn edge(&self, id: &EdgeId) -> Option<&Edge> {
        self.edges.iter().find(|e| &e.id == id)
    }

    pub fn edge_position(&self, id: &EdgeId) -> Option<usize> {
        self.edges.iter().position(|e| &e.id == id)
    }

    /// Number of edge ends at `v` (parallel edges counted separately).
    pub fn valence(&self, v: &VertexId) -> usize {
        self.edges.iter().filter(|e| e.has_endpoint(v)).count()
    }

    /// Position of each inner vertex in sorted order; this is the column-block
    /// order of the pinned rigidity matrix.
    pub fn inner_index(&self) -> BTreeMap<VertexId, usize> {
        self.inner.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect()
    }

    pub fn has_parallel_edges(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges.iter().any(|e| !seen.insert(e.endpoint_key()))
    }

    /// Every invariant violation. An empty list means the graph is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.dimension == 0 {
            out.push(Violation::ZeroDimension);
        }
        for v in self.inner.intersection(&self.pinned) {
            out.push(Violation::InnerPinnedOverlap { vertex: v.clone() });
        }
        let mut ids = BTreeSet::new();
        for e in &self.edges {
            if !ids.insert(&e.id) {
                out.push(Violation::DuplicateEdgeId { edge: e.id.clone() });
            }
            let mut known = true;
            for x in [&e.u, &e.v] {
                if !self.contains_vertex(x) {
                    known = false;
                    out.push(Violation::UnknownEndpoint {
                        edge: e.id.clone(),
                        vertex: x.clone(),
                    });
                }
            }
            if e.u == e.v {
                out.push(Violation::SelfLoop {
                    edge: e.id.clone(),
                    vertex: e.u.clone(),
                });
            } else if known && self.is_pinned(&e.u) && self.is_pinned(&e.v) {
                out.push(Violation::PinPinEdge {
                    edge: e.id.clone(),
                    u: e.u.clone(),
                    v: e.v.clone(),
                });
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::ValidationFailed(violations))
        }
    }

    /// Deletes edges joining two pinned vertices, returning them.
    pub fn drop_pin_pin_edges(&self) -> (PinnedGraph, Vec<Edge>) {
        let (dropped, kept): (Vec<Edge>, Vec<Edge>) = self
            .edges
            .iter()
            .cloned()
            .partition(|e| self.is_pinned(&e.u) && self.is_pinned(&e.v));
        let mut g = self.clone();
        g.edges = kept;
        (g, dropped)
    }

    /// Replaces every pinned vertex by a single sink `ground`, keeping edge
    /// directions and multiplicities.
    pub fn condense_to_ground(&self, orientation: &Orientation) -> Result<CondensedDigraph> {
        orientation.check_against(self)?;
        let index = self.inner_index();
        let ground = self.inner.len();
        let locate = |x: &VertexId| index.get(x).copied().unwrap_or(ground);
        let arcs = self
            .edges
            .iter()
            .map(|e| {
                let tail = orientation.tail(&e.id).expect("checked above");
                let head = e.other(tail).expect("checked above");
                CondensedArc {
                    from: locate(tail),
                    to: locate(head),
                    edge: Some(e.id.clone()),
                }
            })
            .collect();
        let mut labels: Vec<String> = self.inner.iter().map(|v| v.0.clone()).collect();
        labels.push(GROUND.to_owned());
        Ok(CondensedDigraph {
            labels,
            ground,
            arcs,
        })
    }

    /// Moves `pin` into the inner set and ties it down with one new edge to
    /// each of `d` distinct pinned anchors. Anchors not yet in the graph are
    /// created as new pins.
    pub fn release_pin(&self, pin: &VertexId, anchors: &[VertexId]) -> Result<PinnedGraph> {
        if !self.is_pinned(pin) {
            return Err(Error::UnknownVertex(pin.clone()));
        }
        let distinct: BTreeSet<&VertexId> = anchors.iter().collect();
        if anchors.len() != self.dimension || distinct.len() != anchors.len() {
            return Err(Error::WrongAnchorCount {
                expected: self.dimension,
                got: distinct.len(),
            });
        }
        for a in anchors {
            if a == pin || self.is_inner(a) {
                return Err(Error::BadAnchor(a.clone()));
            }
        }
        let mut g = self.clone();
        g.pinned.remove(pin);
        g.inner.insert(pin.clone());
        let mut ids: BTreeSet<EdgeId> = g.edges.iter().map(|e| e.id.clone()).collect();
        for a in anchors {
            g.pinned.insert(a.clone());
            let id = fresh_edge_id(&mut ids, &format!("{pin}-{a}"));
            g.edges.push(Edge {
                id,
                u: pin.clone(),
                v: a.clone(),
            });
        }
        Ok(g)
    }

    /// Turns inner vertex `v` into a pin. Edges that end up joining two pins are
    /// removed and returned.
    pub fn repin_vertex(&self, v: &VertexId) -> Result<(PinnedGraph, Vec<Edge>)> {
        if !self.is_inner(v) {
            return Err(Error::UnknownVertex(v.clone()));
        }
        let mut g = self.clone();
        g.inner.remove(v);
        g.pinned.insert(v.clone());
        let (g, dropped) = g.drop_pin_pin_edges();
        Ok((g, dropped))
    }

    pub fn without_edge(&self, id: &EdgeId) -> Result<PinnedGraph> {
        let pos = self
            .edge_position(id)
            .ok_or_else(|| Error::UnknownEdge(id.clone()))?;
        let mut g = self.clone();
        g.edges.remove(pos);
        Ok(g)
    }

    /// Deletes inner vertex `v` and all of its edges.
    pub fn without_inner_vertex(&self, v: &VertexId) -> Result<PinnedGraph> {
        if !self.is_inner(v) {
            return Err(Error::UnknownVertex(v.clone()));
        }
        let mut g = self.clone();
        g.inner.remove(v);
        g.edges.retain(|e| !e.has_endpoint(v));
        Ok(g)
    }

    /// The pinned graph seen by one component: `inner` stays inner, every other
    /// endpoint of `edges` becomes a pin.
    pub fn component_graph(&self, inner: &BTreeSet<VertexId>, edges: &BTreeSet<EdgeId>) -> PinnedGraph {
        let kept: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| edges.contains(&e.id))
            .cloned()
            .collect();
        let mut pinned = BTreeSet::new();
        for e in &kept {
            for x in [&e.u, &e.v] {
                if !inner.contains(x) {
                    pinned.insert(x.clone());
                }
            }
        }
        PinnedGraph {
            dimension: self.dimension,
            inner: inner.clone(),
            pinned,
            edges: kept,
        }
    }
}

fn fresh_edge_id(taken: &mut BTreeSet<EdgeId>, base: &str) -> EdgeId {
    let mut candidate = EdgeId(base.to_owned());
    let mut n = 1;
    while taken.contains(&candidate) {
        n += 1;
        candidate = EdgeId(format!("{base}#{n}"));
    }
    taken.insert(candidate.clone());
    candidate
}

/// Label of the condensed ground vertex.
pub const GROUND: &str = "ground";

/// Tail assignment for every edge. The head is the other endpoint.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Orientation {
    pub tails: BTreeMap<EdgeId, VertexId>,
}

impl Orientation {
    pub fn tail(&self, e: &EdgeId) -> Option<&VertexId> {
        self.tails.get(e)
    }

    pub fn head<'g>(&self, graph: &'g PinnedGraph, e: &EdgeId) -> Option<&'g VertexId> {
        let edge = graph.edge(e)?;
        edge.other(self.tails.get(e)?)
    }

    /// Errors unless this orientation covers exactly the edges of `graph` with
    /// tails at endpoints.
    pub fn check_against(&self, graph: &PinnedGraph) -> Result<()> {
        if self.tails.len() != graph.edges.len() {
            return Err(Error::OrientationMismatch(format!(
                "{} tails for {} edges",
                self.tails.len(),
                graph.edges.len()
            )));
        }
        for e in &graph.edges {
            match self.tails.get(&e.id) {
                None => {
                    return Err(Error::OrientationMismatch(format!("edge `{}` has no tail", e.id)))
                }
                Some(t) if !e.has_endpoint(t) => {
                    return Err(Error::OrientationMismatch(format!(
                        "tail `{t}` is not an endpoint of `{}`",
                        e.id
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Out-degree of every vertex of `graph` (zero entries included).
    pub fn out_degrees(&self, graph: &PinnedGraph) -> BTreeMap<VertexId, usize> {
        let mut deg: BTreeMap<VertexId, usize> = graph.vertices().map(|v| (v.clone(), 0)).collect();
        for t in self.tails.values() {
            *deg.entry(t.clone()).or_insert(0) += 1;
        }
        deg
    }

    /// Out-degree `d` at every inner vertex and `0` at every pin.
    pub fn is_d_directed(&self, graph: &PinnedGraph) -> bool {
        self.check_against(graph).is_ok()
            && self.out_degrees(graph).iter().all(|(v, &k)| {
                if graph.is_inner(v) {
                    k == graph.dimension
                } else {
                    k == 0
                }
            })
    }

    /// Flips edge `e` in place.
    pub fn reverse(&mut self, graph: &PinnedGraph, e: &EdgeId) {
        if let (Some(edge), Some(t)) = (graph.edge(e), self.tails.get(e)) {
            let head = edge.other(t).expect("tail is an endpoint").clone();
            self.tails.insert(e.clone(), head);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CondensedArc {
    pub from: usize,
    pub to: usize,
    pub edge: Option<EdgeId>,
}

/// Directed multigraph on the inner vertices plus one `ground` node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CondensedDigraph {
    pub labels: Vec<String>,
    pub ground: usize,
    pub arcs: Vec<CondensedArc>,
}

impl CondensedDigraph {
    /// Builds a digraph directly from arcs on nodes `0..n`; `ground` names one of them.
    pub fn from_arcs(n: usize, ground: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        assert!(ground < n, "ground must be a node");
        CondensedDigraph {
            labels: (0..n)
                .map(|i| if i == ground { GROUND.to_owned() } else { format!("n{i}") })
                .collect(),
            ground,
            arcs: arcs
                .into_iter()
                .map(|(from, to)| CondensedArc { from, to, edge: None })
                .collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for a in &self.arcs {
            adj[a.from].push(a.to);
        }
        adj
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.arcs.iter().filter(|a| a.from == node).count()
    }
}
