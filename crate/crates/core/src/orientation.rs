//! d-directed orientations: generation by augmenting paths, the exhaustive
//! Laplace-term oracle, and cycle-reversal equivalence.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::field::{Field, PrimeField, Rationals, ScalarMode};
use crate::graph::{EdgeId, Orientation, PinnedGraph, VertexId};
use crate::linalg::{determinant, DenseMatrix};
use crate::rigidity::{sample_generic_configuration, Configuration};

/// Largest inner-vertex count accepted by the exhaustive Laplace oracle.
pub const LAPLACE_ORACLE_CAP: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfeasibleReason {
    /// The witness set carries more edges than its out-degree capacity.
    Overloaded,
    /// Fewer than `d|I|` edges: some inner vertex cannot reach out-degree `d`.
    Underfilled,
    /// Parallel edges force a vanishing block determinant.
    ZeroLaplaceTerm,
}

/// No d-directed orientation exists. `witness` is a set of inner vertices
/// whose edge count contradicts the capacity `d|witness|`.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("no d-directed orientation ({reason:?}): {edge_count} edges against capacity {capacity} on {witness:?}")]
pub struct Infeasible {
    pub reason: InfeasibleReason,
    pub witness: BTreeSet<VertexId>,
    pub edge_count: usize,
    pub capacity: usize,
}

/// Edges whose endpoints all lie in `set` or among the pins.
fn edges_spanned_by(graph: &PinnedGraph, set: &BTreeSet<VertexId>) -> usize {
    graph
        .edges
        .iter()
        .filter(|e| {
            [&e.u, &e.v]
                .iter()
                .all(|x| set.contains(*x) || graph.is_pinned(x))
                && (set.contains(&e.u) || set.contains(&e.v))
        })
        .count()
}

/// Out-degree `d` at every inner vertex, `0` at every pin.
///
/// Each edge picks one inner endpoint as its tail, each inner vertex accepts at
/// most `d` edges. Edges are placed in edge-id order; a full endpoint triggers
/// a breadth-first search for an augmenting reassignment chain. When
/// the graph has parallel edges the result is repaired so that no vertex tails
/// two copies of the same bar, which would give a zero block determinant.
pub fn find_d_orientation(graph: &PinnedGraph) -> std::result::Result<Orientation, Infeasible> {
    let d = graph.dimension;
    let mut order: Vec<usize> = (0..graph.edges.len()).collect();
    order.sort_by(|&a, &b| graph.edges[a].id.cmp(&graph.edges[b].id));

    let mut load: BTreeMap<VertexId, usize> = graph.inner.iter().map(|v| (v.clone(), 0)).collect();
    // edges currently tailed at each inner vertex, kept sorted by id
    let mut owned: BTreeMap<VertexId, BTreeSet<EdgeId>> =
        graph.inner.iter().map(|v| (v.clone(), BTreeSet::new())).collect();
    let mut tails: BTreeMap<EdgeId, VertexId> = BTreeMap::new();

    for &ei in &order {
        let e = &graph.edges[ei];
        let mut candidates: Vec<&VertexId> = [&e.u, &e.v].into_iter().filter(|x| graph.is_inner(x)).collect();
        candidates.sort();
        candidates.dedup();

        if let Some(free) = candidates.iter().find(|c| load[**c] < d) {
            let free = (*free).clone();
            *load.get_mut(&free).unwrap() += 1;
            owned.get_mut(&free).unwrap().insert(e.id.clone());
            tails.insert(e.id.clone(), free);
            continue;
        }

        // BFS over full vertices; parent[w] = (edge moved onto w, vertex it came from)
        let mut parent: BTreeMap<VertexId, Option<(EdgeId, VertexId)>> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for c in &candidates {
            parent.insert((*c).clone(), None);
            queue.push_back((*c).clone());
        }
        let mut found = None;
        'bfs: while let Some(x) = queue.pop_front() {
            for f in &owned[&x] {
                let edge = graph.edge(f).expect("owned edge exists");
                let w = edge.other(&x).expect("tail is an endpoint");
                if !graph.is_inner(w) || parent.contains_key(w) {
                    continue;
                }
                parent.insert(w.clone(), Some((f.clone(), x.clone())));
                if load[w] < d {
                    found = Some(w.clone());
                    break 'bfs;
                }
                queue.push_back(w.clone());
            }
        }

        match found {
            Some(mut w) => {
                *load.get_mut(&w).unwrap() += 1;
                while let Some(Some((f, x))) = parent.get(&w).cloned() {
                    owned.get_mut(&x).unwrap().remove(&f);
                    owned.get_mut(&w).unwrap().insert(f.clone());
                    tails.insert(f, w.clone());
                    w = x;
                }
                owned.get_mut(&w).unwrap().insert(e.id.clone());
                tails.insert(e.id.clone(), w);
            }
            None => {
                let witness: BTreeSet<VertexId> = parent.into_keys().collect();
                return Err(Infeasible {
                    reason: InfeasibleReason::Overloaded,
                    edge_count: edges_spanned_by(graph, &witness),
                    capacity: d * witness.len(),
                    witness,
                });
            }
        }
    }

    if graph.edges.len() < d * graph.inner.len() {
        return Err(Infeasible {
            reason: InfeasibleReason::Underfilled,
            witness: graph.inner.clone(),
            edge_count: graph.edges.len(),
            capacity: d * graph.inner.len(),
        });
    }

    let mut orientation = Orientation { tails };
    if graph.has_parallel_edges() {
        repair_parallel_tails(graph, &mut orientation)?;
        let config = sample_generic_configuration(graph, 0, ScalarMode::PrimeField);
        let field = PrimeField::random(&mut crate::rigidity::seeded_rng(0, 0x1a91ace));
        if field.is_zero(&laplace_term(graph, &config, &orientation, &field)) {
            return Err(Infeasible {
                reason: InfeasibleReason::ZeroLaplaceTerm,
                witness: graph.inner.clone(),
                edge_count: graph.edges.len(),
                capacity: d * graph.inner.len(),
            });
        }
    }
    Ok(orientation)
}

/// Moves duplicate parallel tails apart by reversing directed cycles.
fn repair_parallel_tails(graph: &PinnedGraph, o: &mut Orientation) -> std::result::Result<(), Infeasible> {
    for _ in 0..=graph.edges.len() {
        let Some((v, w, e1)) = first_duplicate_tail(graph, o) else {
            return Ok(());
        };
        let stuck = || Infeasible {
            reason: InfeasibleReason::ZeroLaplaceTerm,
            witness: BTreeSet::from([v.clone()]),
            edge_count: graph.valence(&v),
            capacity: graph.dimension,
        };
        if graph.is_pinned(&w) {
            return Err(stuck());
        }
        let path = directed_path(graph, o, &w, &v, Some(&e1), None::<&mut rand_chacha::ChaCha8Rng>).ok_or_else(stuck)?;
        o.reverse(graph, &e1);
        for f in &path {
            o.reverse(graph, f);
        }
    }
    match first_duplicate_tail(graph, o) {
        None => Ok(()),
        Some((v, _, _)) => Err(Infeasible {
            reason: InfeasibleReason::ZeroLaplaceTerm,
            edge_count: graph.valence(&v),
            witness: BTreeSet::from([v]),
            capacity: graph.dimension,
        }),
    }
}

fn first_duplicate_tail(graph: &PinnedGraph, o: &Orientation) -> Option<(VertexId, VertexId, EdgeId)> {
    let mut seen: BTreeMap<(VertexId, VertexId), EdgeId> = BTreeMap::new();
    let mut edges: Vec<_> = graph.edges.iter().collect();
    edges.sort_by(|a, b| a.id.cmp(&b.id));
    for e in edges {
        let t = o.tail(&e.id)?.clone();
        let h = e.other(&t)?.clone();
        if seen.insert((t.clone(), h.clone()), e.id.clone()).is_some() {
            return Some((t, h, e.id.clone()));
        }
    }
    None
}

/// Edge ids of a directed path `from ⇝ to` following tail→head, skipping `avoid`.
/// Neighbours are explored in edge-id order unless a shuffle source is given.
fn directed_path<R: Rng>(
    graph: &PinnedGraph,
    o: &Orientation,
    from: &VertexId,
    to: &VertexId,
    avoid: Option<&EdgeId>,
    rng: Option<&mut R>,
) -> Option<Vec<EdgeId>> {
    let mut out: BTreeMap<&VertexId, Vec<(&EdgeId, &VertexId)>> = BTreeMap::new();
    let mut edges: Vec<_> = graph.edges.iter().collect();
    edges.sort_by(|a, b| a.id.cmp(&b.id));
    for e in edges {
        if Some(&e.id) == avoid {
            continue;
        }
        let t = o.tail(&e.id)?;
        out.entry(t).or_default().push((&e.id, e.other(t)?));
    }
    if let Some(r) = rng {
        for list in out.values_mut() {
            list.shuffle(r);
        }
    }
    let mut parent: BTreeMap<&VertexId, Option<(&EdgeId, &VertexId)>> = BTreeMap::new();
    parent.insert(from, None);
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut path = Vec::new();
            let mut cur = x;
            while let Some(Some((e, prev))) = parent.get(cur) {
                path.push((*e).clone());
                cur = prev;
            }
            path.reverse();
            return Some(path);
        }
        for &(e, y) in out.get(x).map(|v| v.as_slice()).unwrap_or(&[]) {
            if !parent.contains_key(y) {
                parent.insert(y, Some((e, x)));
                queue.push_back(y);
            }
        }
    }
    None
}

/// Product over inner vertices of the `d × d` determinant formed by the rows of
/// the edges that vertex tails, restricted to its own column block.
pub fn laplace_term<F: Field>(
    graph: &PinnedGraph,
    config: &Configuration,
    orientation: &Orientation,
    field: &F,
) -> F::Elem {
    let d = graph.dimension;
    let mut by_tail: BTreeMap<&VertexId, Vec<&VertexId>> = BTreeMap::new();
    for e in &graph.edges {
        if let Some(t) = orientation.tail(&e.id) {
            if let Some(h) = e.other(t) {
                by_tail.entry(t).or_default().push(h);
            }
        }
    }
    let mut acc = field.one();
    for v in &graph.inner {
        let heads = by_tail.get(v).cloned().unwrap_or_default();
        if heads.len() != d {
            return field.zero();
        }
        let pv = config.point(v).expect("configuration covers graph");
        let rows = heads
            .iter()
            .map(|h| {
                let ph = config.point(h).expect("configuration covers graph");
                (0..d).map(|k| field.from_rational(&(&pv[k] - &ph[k]))).collect()
            })
            .collect();
        let block = DenseMatrix::from_rows(rows, d);
        acc = field.mul(&acc, &determinant(field, &block));
        if field.is_zero(&acc) {
            break;
        }
    }
    acc
}

/// Every assignment of exactly `d` incident edges to each inner vertex, as
/// orientations. Exponential; capped at [`LAPLACE_ORACLE_CAP`] inner vertices.
pub fn all_d_directed_orientations(graph: &PinnedGraph) -> Result<Vec<Orientation>> {
    if graph.inner.len() > LAPLACE_ORACLE_CAP {
        return Err(Error::SizeCapExceeded {
            size: graph.inner.len(),
            cap: LAPLACE_ORACLE_CAP,
        });
    }
    let d = graph.dimension;
    let mut out = Vec::new();
    if graph.edges.len() != d * graph.inner.len() {
        return Ok(out);
    }
    let mut load: BTreeMap<&VertexId, usize> = graph.inner.iter().map(|v| (v, 0)).collect();
    let mut tails: Vec<Option<&VertexId>> = vec![None; graph.edges.len()];
    fn rec<'g>(
        graph: &'g PinnedGraph,
        i: usize,
        load: &mut BTreeMap<&'g VertexId, usize>,
        tails: &mut Vec<Option<&'g VertexId>>,
        out: &mut Vec<Orientation>,
    ) {
        if i == graph.edges.len() {
            out.push(Orientation {
                tails: graph
                    .edges
                    .iter()
                    .zip(tails.iter())
                    .map(|(e, t)| (e.id.clone(), t.expect("assigned").clone()))
                    .collect(),
            });
            return;
        }
        let e = &graph.edges[i];
        let mut ends = vec![&e.u, &e.v];
        ends.sort();
        ends.dedup();
        for x in ends {
            if let Some(l) = load.get_mut(x) {
                if *l < graph.dimension {
                    *l += 1;
                    tails[i] = Some(x);
                    rec(graph, i + 1, load, tails, out);
                    tails[i] = None;
                    *load.get_mut(x).unwrap() -= 1;
                }
            }
        }
    }
    rec(graph, 0, &mut load, &mut tails, &mut out);
    Ok(out)
}

/// Orientations corresponding to nonzero terms of the block Laplace expansion
/// of the pinned rigidity matrix at `config`, decided in exact rationals.
pub fn laplace_orientation_oracle(graph: &PinnedGraph, config: &Configuration) -> Result<Vec<Orientation>> {
    config.covers(graph)?;
    Ok(all_d_directed_orientations(graph)?
        .into_iter()
        .filter(|o| !Rationals.is_zero(&laplace_term(graph, config, o, &Rationals)))
        .collect())
}

/// Same out-degree at every vertex.
pub fn is_equivalent(graph: &PinnedGraph, o1: &Orientation, o2: &Orientation) -> Result<bool> {
    for o in [o1, o2] {
        o.check_against(graph)
            .map_err(|e| Error::GraphMismatch(e.to_string()))?;
    }
    Ok(o1.out_degrees(graph) == o2.out_degrees(graph))
}

/// Directed cycles whose successive reversal turns one orientation into another.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleReversalTrace {
    pub cycles: Vec<Vec<EdgeId>>,
}

impl CycleReversalTrace {
    pub fn apply(&self, graph: &PinnedGraph, o: &Orientation) -> Orientation {
        let mut out = o.clone();
        for cycle in &self.cycles {
            for e in cycle {
                out.reverse(graph, e);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }
}

/// Walks only the edges on which `o1` and `o2` disagree (directed as in
/// `o1`). Equal out-degrees make that subgraph balanced, so a walk from any
/// disagreeing edge closes a cycle; it is reversed and the walk repeats.
pub fn cycle_reversal_path(graph: &PinnedGraph, o1: &Orientation, o2: &Orientation) -> Result<CycleReversalTrace> {
    if !is_equivalent(graph, o1, o2)? {
        let (d1, d2) = (o1.out_degrees(graph), o2.out_degrees(graph));
        let v = d1
            .iter()
            .find(|(v, k)| d2.get(*v) != Some(k))
            .map(|(v, _)| v.clone())
            .expect("out-degrees differ somewhere");
        return Err(Error::NotEquivalent(v));
    }
    let mut current = o1.clone();
    let mut trace = CycleReversalTrace::default();
    loop {
        let mut disagree: Vec<&EdgeId> = graph
            .edges
            .iter()
            .map(|e| &e.id)
            .filter(|e| current.tail(e) != o2.tail(e))
            .collect();
        if disagree.is_empty() {
            return Ok(trace);
        }
        disagree.sort();
        let mut out: BTreeMap<VertexId, Vec<&EdgeId>> = BTreeMap::new();
        for e in &disagree {
            out.entry(current.tail(e).unwrap().clone()).or_default().push(e);
        }
        let start = current.tail(disagree[0]).unwrap().clone();
        let mut path_vertices = vec![start.clone()];
        let mut path_edges: Vec<EdgeId> = Vec::new();
        let mut used: BTreeSet<&EdgeId> = BTreeSet::new();
        let mut at = start;
        let cycle = loop {
            let e = *out
                .get(&at)
                .and_then(|list| list.iter().find(|e| !used.contains(**e)))
                .ok_or_else(|| Error::CrossCheck("unbalanced disagreement subgraph".into()))?;
            used.insert(e);
            let next = current.head(graph, e).unwrap().clone();
            path_edges.push(e.clone());
            if let Some(pos) = path_vertices.iter().position(|x| *x == next) {
                break path_edges[pos..].to_vec();
            }
            path_vertices.push(next.clone());
            at = next;
        };
        for e in &cycle {
            current.reverse(graph, e);
        }
        trace.cycles.push(cycle);
    }
}

/// Applies up to `count` reversals of randomly chosen directed cycles. Returns
/// the new orientation and the cycles reversed (fewer if the digraph is acyclic).
pub fn reverse_random_cycles<R: Rng>(
    graph: &PinnedGraph,
    o: &Orientation,
    count: usize,
    rng: &mut R,
) -> (Orientation, CycleReversalTrace) {
    let mut current = o.clone();
    let mut trace = CycleReversalTrace::default();
    for _ in 0..count {
        let mut edges: Vec<&EdgeId> = graph.edges.iter().map(|e| &e.id).collect();
        edges.shuffle(rng);
        let mut done = false;
        for e in edges {
            let t = current.tail(e).unwrap().clone();
            let h = current.head(graph, e).unwrap().clone();
            if let Some(path) = directed_path(graph, &current, &h, &t, Some(e), Some(&mut *rng)) {
                let mut cycle = vec![e.clone()];
                cycle.extend(path);
                for f in &cycle {
                    current.reverse(graph, f);
                }
                trace.cycles.push(cycle);
                done = true;
                break;
            }
        }
        if !done {
            break;
        }
    }
    (current, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use num_rational::BigRational;

    fn dyad2() -> PinnedGraph {
        PinnedGraph::new(2, ["v"], ["p1", "p2"], vec![Edge::new("e1", "v", "p1"), Edge::new("e2", "v", "p2")])
    }

    fn triad2() -> PinnedGraph {
        PinnedGraph::new(
            2,
            ["a", "b", "c"],
            ["p1", "p2", "p3"],
            vec![
                Edge::new("ab", "a", "b"),
                Edge::new("bc", "b", "c"),
                Edge::new("ca", "c", "a"),
                Edge::new("ap", "a", "p1"),
                Edge::new("bp", "b", "p2"),
                Edge::new("cp", "c", "p3"),
            ],
        )
    }

    fn square4() -> PinnedGraph {
        PinnedGraph::new(
            1,
            ["a", "b", "c", "d"],
            Vec::<&str>::new(),
            vec![
                Edge::new("e1", "a", "b"),
                Edge::new("e2", "b", "c"),
                Edge::new("e3", "c", "d"),
                Edge::new("e4", "d", "a"),
            ],
        )
    }

    fn orient(pairs: &[(&str, &str)]) -> Orientation {
        Orientation {
            tails: pairs.iter().map(|(e, t)| (EdgeId::from(*e), VertexId::from(*t))).collect(),
        }
    }

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn dyad_forced_orientation() {
        let o = find_d_orientation(&dyad2()).unwrap();
        assert_eq!(o, orient(&[("e1", "v"), ("e2", "v")]));
        assert!(o.is_d_directed(&dyad2()));
    }

    #[test]
    fn triad_orientation_is_two_directed() {
        let g = triad2();
        let o = find_d_orientation(&g).unwrap();
        assert!(o.is_d_directed(&g));
        assert_eq!(find_d_orientation(&g).unwrap(), o, "deterministic");
    }

    #[test]
    fn overfull_graph_is_infeasible_on_all_inner() {
        let mut g = dyad2();
        g.pinned.insert("p3".into());
        g.edges.push(Edge::new("e3", "v", "p3"));
        let err = find_d_orientation(&g).unwrap_err();
        assert_eq!(err.reason, InfeasibleReason::Overloaded);
        assert_eq!(err.witness, g.inner);
        assert!(err.edge_count > err.capacity);
    }

    #[test]
    fn overload_witness_is_local() {
        // v overloaded with three pin edges; w is fine on its own.
        let g = PinnedGraph::new(
            2,
            ["v", "w"],
            ["p1", "p2", "p3", "p4"],
            vec![
                Edge::new("a", "v", "p1"),
                Edge::new("b", "v", "p2"),
                Edge::new("c", "v", "p3"),
                Edge::new("d", "w", "p4"),
            ],
        );
        let err = find_d_orientation(&g).unwrap_err();
        assert_eq!(err.witness, BTreeSet::from(["v".into()]));
        assert_eq!((err.edge_count, err.capacity), (3, 2));
    }

    #[test]
    fn underfilled_graph_is_infeasible() {
        let g = dyad2().without_edge(&"e2".into()).unwrap();
        assert_eq!(find_d_orientation(&g).unwrap_err().reason, InfeasibleReason::Underfilled);
    }

    #[test]
    fn augmenting_path_reassigns() {
        // a-b edge sorts first and lands on a; a's pin edges must push it to b.
        let g = PinnedGraph::new(
            2,
            ["a", "b"],
            ["p1", "p2", "p3"],
            vec![
                Edge::new("0ab", "a", "b"),
                Edge::new("1a", "a", "p1"),
                Edge::new("2a", "a", "p2"),
                Edge::new("3b", "b", "p3"),
            ],
        );
        let o = find_d_orientation(&g).unwrap();
        assert!(o.is_d_directed(&g));
        assert_eq!(o.tail(&"0ab".into()), Some(&"b".into()));
    }

    #[test]
    fn parallel_inner_edges_get_split() {
        // a=b doubled plus pins; a tailing both copies would give a zero block.
        let g = PinnedGraph::new(
            2,
            ["a", "b"],
            ["p1", "p2"],
            vec![
                Edge::new("e1", "a", "b"),
                Edge::new("e2", "a", "b"),
                Edge::new("e3", "a", "p1"),
                Edge::new("e4", "b", "p2"),
            ],
        );
        let o = find_d_orientation(&g).unwrap();
        assert!(o.is_d_directed(&g));
        assert_ne!(o.tail(&"e1".into()), o.tail(&"e2".into()));
    }

    #[test]
    fn parallel_pin_edges_are_degenerate() {
        let g = PinnedGraph::new(2, ["v"], ["p"], vec![Edge::new("e1", "v", "p"), Edge::new("e2", "v", "p")]);
        assert_eq!(find_d_orientation(&g).unwrap_err().reason, InfeasibleReason::ZeroLaplaceTerm);
    }

    #[test]
    fn oracle_on_dyad() {
        let g = dyad2();
        let config = Configuration::exact(
            2,
            [("v", vec![int(0), int(0)]), ("p1", vec![int(1), int(0)]), ("p2", vec![int(0), int(1)])],
        );
        let found = laplace_orientation_oracle(&g, &config).unwrap();
        assert_eq!(found, vec![orient(&[("e1", "v"), ("e2", "v")])]);
        // det [[-1,0],[0,-1]] = 1; the block term carries it up to sign
        let term = laplace_term(&g, &config, &found[0], &Rationals);
        assert_eq!(term.clone() * term, int(1));
    }

    #[test]
    fn oracle_excludes_parallel_pairing() {
        let g = PinnedGraph::new(2, ["v"], ["p1"], vec![Edge::new("e1", "v", "p1"), Edge::new("e2", "v", "p1")]);
        let config = sample_generic_configuration(&g, 3, ScalarMode::ExactRational);
        assert_eq!(all_d_directed_orientations(&g).unwrap().len(), 1);
        assert!(laplace_orientation_oracle(&g, &config).unwrap().is_empty());
    }

    #[test]
    fn oracle_on_triad_gives_two_directed_orientations() {
        let g = triad2();
        let config = sample_generic_configuration(&g, 11, ScalarMode::ExactRational);
        let found = laplace_orientation_oracle(&g, &config).unwrap();
        // generic simple graph: every 2-out-degree assignment survives
        assert_eq!(found.len(), all_d_directed_orientations(&g).unwrap().len());
        assert!(!found.is_empty());
        let flow = find_d_orientation(&g).unwrap();
        for o in &found {
            assert!(o.is_d_directed(&g));
            assert!(is_equivalent(&g, o, &flow).unwrap());
        }
    }

    #[test]
    fn oracle_cap() {
        let inner: Vec<String> = (0..7).map(|i| format!("v{i}")).collect();
        let g = PinnedGraph::new(1, inner.iter().map(|s| s.as_str()), ["p"], vec![]);
        assert!(matches!(all_d_directed_orientations(&g), Err(Error::SizeCapExceeded { .. })));
    }

    #[test]
    fn equivalence_examples() {
        let g = square4();
        let cw = orient(&[("e1", "a"), ("e2", "b"), ("e3", "c"), ("e4", "d")]);
        let ccw = orient(&[("e1", "b"), ("e2", "c"), ("e3", "d"), ("e4", "a")]);
        assert!(is_equivalent(&g, &cw, &cw).unwrap());
        assert!(is_equivalent(&g, &cw, &ccw).unwrap());
        let trace = cycle_reversal_path(&g, &cw, &ccw).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.cycles[0].len(), 4);
        assert_eq!(trace.apply(&g, &cw), ccw);
        assert!(cycle_reversal_path(&g, &cw, &cw).unwrap().is_empty());

        let d = dyad2();
        let forced = orient(&[("e1", "v"), ("e2", "v")]);
        let other = orient(&[("e1", "p1"), ("e2", "v")]);
        assert!(!is_equivalent(&d, &forced, &other).unwrap());
        assert!(matches!(cycle_reversal_path(&d, &forced, &other), Err(Error::NotEquivalent(_))));
        assert!(matches!(
            is_equivalent(&d, &forced, &orient(&[("e1", "v")])),
            Err(Error::GraphMismatch(_))
        ));
    }

    #[test]
    fn random_reversals_replay() {
        use rand::SeedableRng;
        let g = triad2();
        let o = find_d_orientation(&g).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let (o2, applied) = reverse_random_cycles(&g, &o, 5, &mut rng);
        assert_eq!(applied.apply(&g, &o), o2);
        assert!(is_equivalent(&g, &o, &o2).unwrap());
        let trace = cycle_reversal_path(&g, &o, &o2).unwrap();
        assert_eq!(trace.apply(&g, &o), o2);
        assert!(trace.len() <= g.edges.len());
    }
}
