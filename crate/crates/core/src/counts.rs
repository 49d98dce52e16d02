//! Necessary subgraph counts for pinned isostatic graphs and the exact
//! plane check.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Orientation, PinnedGraph, VertexId};
use crate::orientation::find_d_orientation;

/// Inner-vertex cap for [`subgraph_counts_bruteforce`].
pub const BRUTE_FORCE_COUNTS_CAP: usize = 16;

pub fn top_count(graph: &PinnedGraph) -> bool {
    graph.edges.len() == graph.dimension * graph.inner.len()
}

fn choose2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Dimension of the trivial motions that survive `pins` fixed points and act
/// nontrivially on `inner` further points, all in general position.
pub fn rotational_deficit(d: usize, inner: usize, pins: usize) -> usize {
    choose2((d + 1).saturating_sub(pins)) - choose2((d + 1).saturating_sub(inner + pins))
}

/// Largest edge count a pinned d-independent subgraph on `inner` inner
/// vertices and `pins` pins can carry.
pub fn count_bound(d: usize, inner: usize, pins: usize) -> usize {
    d * inner - rotational_deficit(d, inner, pins)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum CountClause {
    /// At least `d` pins: the bound is `d|I'|`.
    PinsAtLeastD,
    /// `k < d` pins: the bound drops by the surviving rotations.
    FewPins { k: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountViolation {
    pub inner: BTreeSet<VertexId>,
    pub pinned: BTreeSet<VertexId>,
    pub edge_count: usize,
    pub bound: usize,
    #[serde(flatten)]
    pub clause: CountClause,
}

/// Every violated count over all inner subsets `I'`. For each `I'` and pin
/// count `k` the worst subgraph takes all edges inside `I'` plus the edges to
/// the `k` pins most connected to `I'`, so only those are tested.
pub fn subgraph_counts_bruteforce(graph: &PinnedGraph) -> Result<Vec<CountViolation>> {
    let n = graph.inner.len();
    if n > BRUTE_FORCE_COUNTS_CAP {
        return Err(Error::SizeCapExceeded {
            size: n,
            cap: BRUTE_FORCE_COUNTS_CAP,
        });
    }
    let d = graph.dimension;
    let index = graph.inner_index();
    let inner: Vec<&VertexId> = graph.inner.iter().collect();
    let pins: Vec<&VertexId> = graph.pinned.iter().collect();
    let pin_index: BTreeMap<&VertexId, usize> = pins.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    // (mask of inner endpoints, pin endpoint)
    let edges: Vec<(u32, Option<usize>)> = graph
        .edges
        .iter()
        .filter_map(|e| {
            let mut mask = 0u32;
            let mut pin = None;
            for x in [&e.u, &e.v] {
                if let Some(&i) = index.get(x) {
                    mask |= 1 << i;
                } else {
                    pin = pin_index.get(x).copied();
                }
            }
            (mask != 0).then_some((mask, pin))
        })
        .collect();

    let mut violations: Vec<CountViolation> = (1u32..(1u32 << n))
        .into_par_iter()
        .flat_map_iter(|set| {
            let size = set.count_ones() as usize;
            let mut within = 0;
            let mut to_pin = vec![0usize; pins.len()];
            for &(mask, pin) in &edges {
                if mask & !set != 0 {
                    continue;
                }
                match pin {
                    Some(p) => to_pin[p] += 1,
                    None => within += 1,
                }
            }
            let mut ranked: Vec<usize> = (0..pins.len()).filter(|&p| to_pin[p] > 0).collect();
            ranked.sort_by(|&a, &b| to_pin[b].cmp(&to_pin[a]).then(a.cmp(&b)));
            let mut out = Vec::new();
            let mut edge_count = within;
            for k in 0..=ranked.len() {
                if k > 0 {
                    edge_count += to_pin[ranked[k - 1]];
                }
                if edge_count == 0 {
                    continue;
                }
                let bound = count_bound(d, size, k);
                if edge_count > bound {
                    out.push(CountViolation {
                        inner: (0..n).filter(|i| set >> i & 1 == 1).map(|i| inner[i].clone()).collect(),
                        pinned: ranked[..k].iter().map(|&p| pins[p].clone()).collect(),
                        edge_count,
                        bound,
                        clause: if k >= d {
                            CountClause::PinsAtLeastD
                        } else {
                            CountClause::FewPins { k }
                        },
                    });
                }
            }
            out
        })
        .collect();
    violations.sort_by(|a, b| {
        (a.inner.len(), &a.inner, a.pinned.len(), &a.pinned).cmp(&(b.inner.len(), &b.inner, b.pinned.len(), &b.pinned))
    });
    Ok(violations)
}

/// Top count plus no subgraph violation.
pub fn counts_pass(graph: &PinnedGraph) -> Result<bool> {
    Ok(top_count(graph) && subgraph_counts_bruteforce(graph)?.is_empty())
}

/// Exact plane test. The pins are tied into one rigid body by a minimally
/// rigid graph on them (`p1-p2`, then every further pin to `p1` and `p2`);
/// the pinned plane conditions hold exactly when the augmented graph is
/// (2,3)-tight, which a (2,3) pebble game decides.
pub fn pinned_laman_check_2d(graph: &PinnedGraph) -> Result<bool> {
    if graph.dimension != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            got: graph.dimension,
        });
    }
    if !top_count(graph) {
        return Ok(false);
    }
    let vertices: Vec<&VertexId> = graph.vertices().collect();
    let at: BTreeMap<&VertexId, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let pins: Vec<usize> = graph.pinned.iter().map(|p| at[p]).collect();
    let mut game = PebbleGame::new(vertices.len(), 2, 3);
    if pins.len() >= 2 {
        let (a, b) = (pins[0], pins[1]);
        game.insert(a, b);
        for &p in &pins[2..] {
            game.insert(p, a);
            game.insert(p, b);
        }
    }
    for e in &graph.edges {
        if graph.is_pinned(&e.u) && graph.is_pinned(&e.v) {
            continue;
        }
        if !game.insert(at[&e.u], at[&e.v]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The (k, l) pebble game on a multigraph.
struct PebbleGame {
    k: usize,
    l: usize,
    pebbles: Vec<usize>,
    out: Vec<Vec<usize>>,
}

impl PebbleGame {
    fn new(n: usize, k: usize, l: usize) -> Self {
        PebbleGame {
            k,
            l,
            pebbles: vec![k; n],
            out: vec![Vec::new(); n],
        }
    }

    /// Accepts the edge when `u` and `v` can gather `l + 1` pebbles.
    fn insert(&mut self, u: usize, v: usize) -> bool {
        if u == v && self.k < self.l + 1 {
            return false;
        }
        while self.pebbles[u] + self.pebbles[v] < self.l + 1 {
            if !(self.fetch(u, v) || self.fetch(v, u)) {
                return false;
            }
        }
        let tail = if self.pebbles[u] > 0 { u } else { v };
        let head = if tail == u { v } else { u };
        self.pebbles[tail] -= 1;
        self.out[tail].push(head);
        true
    }

    /// Moves one pebble to `to` along a directed path avoiding `locked`.
    fn fetch(&mut self, to: usize, locked: usize) -> bool {
        if self.pebbles[to] >= self.k {
            return false;
        }
        let n = self.pebbles.len();
        let mut prev: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[to] = true;
        seen[locked] = true;
        let mut stack = vec![to];
        while let Some(x) = stack.pop() {
            for i in 0..self.out[x].len() {
                let y = self.out[x][i];
                if seen[y] {
                    continue;
                }
                seen[y] = true;
                prev[y] = Some(x);
                if self.pebbles[y] > 0 {
                    self.pebbles[y] -= 1;
                    self.pebbles[to] += 1;
                    // reverse the path to ... -> y
                    let mut cur = y;
                    while let Some(p) = prev[cur] {
                        let pos = self.out[p].iter().position(|&w| w == cur).expect("path edge");
                        self.out[p].swap_remove(pos);
                        self.out[cur].push(p);
                        cur = p;
                    }
                    return true;
                }
                stack.push(y);
            }
        }
        false
    }
}

/// A d-directed orientation for a graph whose counts pass. Failure to find
/// one after the counts pass is reported as an internal cross-check error.
pub fn counts_imply_orientation(graph: &PinnedGraph) -> Result<Orientation> {
    let pass = if graph.dimension == 2 {
        pinned_laman_check_2d(graph)?
    } else {
        top_count(graph) && {
            let v = subgraph_counts_bruteforce(graph)?;
            if !v.is_empty() {
                return Err(Error::CountsFailed(v.len()));
            }
            true
        }
    };
    if !pass {
        let n = if top_count(graph) {
            subgraph_counts_bruteforce(graph).map(|v| v.len()).unwrap_or(0)
        } else {
            1
        };
        return Err(Error::CountsFailed(n.max(1)));
    }
    find_d_orientation(graph).map_err(|inf| Error::CrossCheck(format!("counts pass but {inf}")))
}
