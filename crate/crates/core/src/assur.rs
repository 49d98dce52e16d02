//! Assur and strongly Assur classification, driver and vertex-removal
//! analysis, and drive-velocity solving up the decomposition.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::{scc_decompose, Decomposition};
use crate::error::{Error, Result};
use crate::field::{Field, PrimeField, Rationals, Reals, ScalarMode};
use crate::graph::{EdgeId, PinnedGraph, VertexId};
use crate::linalg::{mat_vec, nullspace as field_nullspace, rank, solve};
use crate::orientation::find_d_orientation;
use crate::rigidity::{
    block_triangular_verify, build_matrix, generic_rank, is_generically_isostatic, matrix_diagonal_blocks,
    nullspace_float, sample_generic_configuration, seeded_rng, trial_seed, Configuration, MotionVector,
    DEFAULT_TRIALS,
};

/// Inner-vertex cap for the minimal-subgraph route.
pub const MINIMAL_SUBGRAPH_CAP: usize = 10;

/// Block-norm threshold for float moving-set decisions (after unit normalization).
pub const FLOAT_MOTION_THRESHOLD: f64 = 1e-8;

const MOTION_PRIME_STREAM: u64 = 0x6d6f_7665;

/// Answers of the three independent Assur tests. `None` means not evaluated.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteAgreement {
    /// Single strongly connected component of a d-directed orientation.
    pub orientation_scc: Option<bool>,
    /// Matrix has no proper block-triangular form.
    pub matrix_blocks: Option<bool>,
    /// No proper pinned isostatic subgraph.
    pub minimal_subgraph: Option<bool>,
}

impl RouteAgreement {
    pub fn agree(&self) -> bool {
        let answers: BTreeSet<bool> = [self.orientation_scc, self.matrix_blocks, self.minimal_subgraph]
            .into_iter()
            .flatten()
            .collect();
        answers.len() <= 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssurVerdict {
    pub is_isostatic: bool,
    pub is_assur: bool,
    pub is_strongly_assur: bool,
    pub route_agreement: RouteAgreement,
}

/// Component counts from the three routes on one isostatic graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteCounts {
    pub orientation_scc: usize,
    pub matrix_blocks: usize,
    pub minimal_subgraph: Option<usize>,
}

impl RouteCounts {
    pub fn agree(&self) -> bool {
        self.orientation_scc == self.matrix_blocks && self.minimal_subgraph.is_none_or(|m| m == self.orientation_scc)
    }
}

fn decompose(graph: &PinnedGraph) -> Result<Decomposition> {
    let o = find_d_orientation(graph)?;
    scc_decompose(graph, &o)
}

/// Diagonal blocks of the matrix at a generic configuration modulo a random prime.
pub fn matrix_route_blocks(graph: &PinnedGraph, seed: u64) -> Result<Vec<BTreeSet<VertexId>>> {
    let s = trial_seed(seed, 0);
    let config = sample_generic_configuration(graph, s, ScalarMode::PrimeField);
    let prime = PrimeField::random(&mut seeded_rng(s, MOTION_PRIME_STREAM));
    matrix_diagonal_blocks(graph, &config, &prime)
}

/// Edges with an endpoint in `set` and every endpoint in `set ∪ grounded`.
fn edges_onto(graph: &PinnedGraph, set: &BTreeSet<VertexId>, grounded: &BTreeSet<VertexId>) -> BTreeSet<EdgeId> {
    graph
        .edges
        .iter()
        .filter(|e| {
            (set.contains(&e.u) || set.contains(&e.v))
                && [&e.u, &e.v].iter().all(|x| set.contains(*x) || grounded.contains(*x))
        })
        .map(|e| e.id.clone())
        .collect()
}

/// Components found by repeatedly removing a smallest pinned isostatic
/// subgraph and treating its vertices as pins. Brute force over subsets.
pub fn assur_decomposition(graph: &PinnedGraph, seed: u64) -> Result<Vec<BTreeSet<VertexId>>> {
    let n = graph.inner.len();
    if n > MINIMAL_SUBGRAPH_CAP {
        return Err(Error::SizeCapExceeded {
            size: n,
            cap: MINIMAL_SUBGRAPH_CAP,
        });
    }
    let d = graph.dimension;
    let mut remaining: Vec<VertexId> = graph.inner.iter().cloned().collect();
    let mut grounded: BTreeSet<VertexId> = graph.pinned.clone();
    let mut out = Vec::new();
    while !remaining.is_empty() {
        let m = remaining.len();
        let mut masks: Vec<u32> = (1u32..(1u32 << m)).collect();
        masks.sort_by_key(|s| (s.count_ones(), *s));
        let found = masks.into_iter().find_map(|mask| {
            let set: BTreeSet<VertexId> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| remaining[i].clone()).collect();
            let edges = edges_onto(graph, &set, &grounded);
            if edges.len() != d * set.len() {
                return None;
            }
            let sub = graph.component_graph(&set, &edges);
            is_generically_isostatic(&sub, DEFAULT_TRIALS, seed).then_some(set)
        });
        let Some(set) = found else {
            return Err(Error::NotIsostatic);
        };
        remaining.retain(|v| !set.contains(v));
        grounded.extend(set.iter().cloned());
        out.push(set);
    }
    out.sort();
    Ok(out)
}

/// Component counts of all three routes. The graph must be pinned isostatic.
pub fn route_counts(graph: &PinnedGraph, seed: u64) -> Result<RouteCounts> {
    let decomp = decompose(graph)?;
    let blocks = matrix_route_blocks(graph, seed)?;
    let minimal = if graph.inner.len() <= MINIMAL_SUBGRAPH_CAP {
        Some(assur_decomposition(graph, seed)?.len())
    } else {
        None
    };
    Ok(RouteCounts {
        orientation_scc: decomp.len(),
        matrix_blocks: blocks.len(),
        minimal_subgraph: minimal,
    })
}

/// Assur test through all three routes; the strong test is included.
pub fn is_d_assur(graph: &PinnedGraph, seed: u64) -> Result<AssurVerdict> {
    let mut verdict = AssurVerdict {
        is_isostatic: false,
        is_assur: false,
        is_strongly_assur: false,
        route_agreement: RouteAgreement::default(),
    };
    if graph.inner.is_empty() || !is_generically_isostatic(graph, DEFAULT_TRIALS, seed) {
        return Ok(verdict);
    }
    verdict.is_isostatic = true;
    let decomp = decompose(graph)?;
    let scc = decomp.len() == 1;

    let s = trial_seed(seed, 0);
    let config = sample_generic_configuration(graph, s, ScalarMode::PrimeField);
    let prime = PrimeField::random(&mut seeded_rng(s, MOTION_PRIME_STREAM));
    let view = block_triangular_verify(graph, &config, &decomp, &prime)?;
    if !view.is_block_triangular {
        return Err(Error::CrossCheck(format!(
            "orientation components leave nonzero blocks above the diagonal: {:?}",
            view.nonzero_above_diagonal
        )));
    }
    let blocks = matrix_diagonal_blocks(graph, &config, &prime)?;

    verdict.route_agreement = RouteAgreement {
        orientation_scc: Some(scc),
        matrix_blocks: Some(blocks.len() == 1),
        minimal_subgraph: if graph.inner.len() <= MINIMAL_SUBGRAPH_CAP {
            Some(assur_decomposition(graph, seed)?.len() == 1)
        } else {
            None
        },
    };
    verdict.is_assur = scc;
    if scc {
        verdict.is_strongly_assur = strong_test(graph, DEFAULT_TRIALS, seed, ScalarMode::PrimeField)?.0;
    }
    Ok(verdict)
}

/// Inner vertices set in motion, decided over several configurations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotionReport {
    pub moving: BTreeSet<VertexId>,
    pub kernel_dimension: usize,
    pub per_trial: Vec<BTreeSet<VertexId>>,
    pub warnings: Vec<String>,
}

/// Kernel of the pinned rigidity matrix of `graph` at `trials` generic
/// configurations; a vertex moves if its velocity block is nonzero in some
/// kernel vector of some trial.
pub fn motion_analysis(graph: &PinnedGraph, trials: usize, seed: u64, mode: ScalarMode) -> Result<MotionReport> {
    let trials = trials.max(1);
    let mut per_trial = Vec::with_capacity(trials);
    let mut dims = Vec::with_capacity(trials);
    for t in 0..trials as u64 {
        let s = trial_seed(seed, t);
        let config = sample_generic_configuration(graph, s, mode);
        let (dim, moving) = match mode {
            ScalarMode::Float64 => {
                let basis = nullspace_float(graph, &config, crate::field::DEFAULT_TOL)?;
                let moving = graph
                    .inner
                    .iter()
                    .filter(|v| {
                        basis.iter().any(|b| {
                            let u = b.get(v).expect("inner vertex");
                            u.iter().map(|x| x * x).sum::<f64>().sqrt() > FLOAT_MOTION_THRESHOLD
                        })
                    })
                    .cloned()
                    .collect();
                (basis.len(), moving)
            }
            ScalarMode::PrimeField => {
                let prime = PrimeField::random(&mut seeded_rng(s, MOTION_PRIME_STREAM));
                exact_motion(graph, &config, &prime)?
            }
            ScalarMode::ExactRational => exact_motion(graph, &config, &Rationals)?,
        };
        dims.push(dim);
        per_trial.push(moving);
    }
    let mut warnings = Vec::new();
    if per_trial.iter().any(|m| m != &per_trial[0]) {
        warnings.push(format!("moving sets differ across {trials} configurations; reporting their union"));
    }
    let kernel_dimension = *dims.iter().min().expect("at least one trial");
    if dims.iter().any(|&k| k != kernel_dimension) {
        warnings.push(format!("kernel dimensions differ across configurations: {dims:?}"));
    }
    Ok(MotionReport {
        moving: per_trial.iter().flatten().cloned().collect(),
        kernel_dimension,
        per_trial,
        warnings,
    })
}

fn exact_motion<F: Field>(graph: &PinnedGraph, config: &Configuration, field: &F) -> Result<(usize, BTreeSet<VertexId>)> {
    let m = build_matrix(graph, config, field)?;
    let basis = field_nullspace(field, &m.matrix);
    let d = graph.dimension;
    let moving = m
        .col_vertices
        .iter()
        .enumerate()
        .filter(|(i, _)| basis.iter().any(|b| b[i * d..(i + 1) * d].iter().any(|x| !field.is_zero(x))))
        .map(|(_, v)| v.clone())
        .collect();
    Ok((basis.len(), moving))
}

fn require_isostatic(graph: &PinnedGraph, seed: u64) -> Result<()> {
    if is_generically_isostatic(graph, DEFAULT_TRIALS, seed) {
        Ok(())
    } else {
        Err(Error::NotIsostatic)
    }
}

/// Removes `edge` from an isostatic graph and reports which inner vertices move.
pub fn moving_set_on_edge_removal(
    graph: &PinnedGraph,
    edge: &EdgeId,
    trials: usize,
    seed: u64,
    mode: ScalarMode,
) -> Result<MotionReport> {
    let reduced = graph.without_edge(edge)?;
    require_isostatic(graph, seed)?;
    motion_analysis(&reduced, trials, seed, mode)
}

/// Deletes inner vertex `v` and its edges; the kernel has dimension
/// `valence(v) - d` and the report lists which survivors move.
pub fn vertex_removal_moving_set(
    graph: &PinnedGraph,
    v: &VertexId,
    trials: usize,
    seed: u64,
    mode: ScalarMode,
) -> Result<MotionReport> {
    let reduced = graph.without_inner_vertex(v)?;
    require_isostatic(graph, seed)?;
    motion_analysis(&reduced, trials, seed, mode)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriverKind {
    Regular,
    Weak,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriverClass {
    pub edge_id: EdgeId,
    pub moving_set: BTreeSet<VertexId>,
    pub kind: DriverKind,
}

/// Edges grouped by moving set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriverGroup {
    pub moving_set: BTreeSet<VertexId>,
    pub edges: Vec<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriverClassification {
    pub drivers: Vec<DriverClass>,
    /// Distinct moving sets, smallest first.
    pub groups: Vec<DriverGroup>,
    /// Covering pairs `(a, b)` of the inclusion order: group `a`'s moving set
    /// is strictly inside group `b`'s with nothing in between.
    pub inclusion: Vec<(usize, usize)>,
    pub warnings: Vec<String>,
}

impl DriverClassification {
    pub fn all_regular(&self) -> bool {
        self.drivers.iter().all(|d| d.kind == DriverKind::Regular)
    }
}

/// Classifies every edge as a regular or weak driver, concurrently per edge.
pub fn classify_drivers(graph: &PinnedGraph, trials: usize, seed: u64, mode: ScalarMode) -> Result<DriverClassification> {
    require_isostatic(graph, seed)?;
    let reports: Vec<(EdgeId, MotionReport)> = graph
        .edges
        .par_iter()
        .map(|e| {
            let reduced = graph.without_edge(&e.id)?;
            Ok((e.id.clone(), motion_analysis(&reduced, trials, seed, mode)?))
        })
        .collect::<Result<_>>()?;
    let mut warnings = Vec::new();
    let mut drivers = Vec::with_capacity(reports.len());
    for (edge_id, report) in reports {
        for w in report.warnings {
            warnings.push(format!("{edge_id}: {w}"));
        }
        if report.kernel_dimension != 1 {
            warnings.push(format!("{edge_id}: kernel dimension {} after removal", report.kernel_dimension));
        }
        let kind = if report.moving == graph.inner {
            DriverKind::Regular
        } else {
            DriverKind::Weak
        };
        drivers.push(DriverClass {
            edge_id,
            moving_set: report.moving,
            kind,
        });
    }
    let mut by_set: BTreeMap<BTreeSet<VertexId>, Vec<EdgeId>> = BTreeMap::new();
    for d in &drivers {
        by_set.entry(d.moving_set.clone()).or_default().push(d.edge_id.clone());
    }
    let mut groups: Vec<DriverGroup> = by_set
        .into_iter()
        .map(|(moving_set, edges)| DriverGroup { moving_set, edges })
        .collect();
    groups.sort_by(|a, b| (a.moving_set.len(), &a.moving_set).cmp(&(b.moving_set.len(), &b.moving_set)));
    let below = |a: usize, b: usize| a != b && groups[a].moving_set.is_subset(&groups[b].moving_set);
    let mut inclusion = Vec::new();
    for a in 0..groups.len() {
        for b in 0..groups.len() {
            if below(a, b) && !(0..groups.len()).any(|c| below(a, c) && below(c, b)) {
                inclusion.push((a, b));
            }
        }
    }
    Ok(DriverClassification {
        drivers,
        groups,
        inclusion,
        warnings,
    })
}

/// `(strong, first edge whose removal leaves some vertex still)`.
fn strong_test(graph: &PinnedGraph, trials: usize, seed: u64, mode: ScalarMode) -> Result<(bool, Option<EdgeId>)> {
    let d = graph.dimension;
    if graph.inner.len() >= 2 && graph.inner.iter().any(|v| graph.valence(v) < d + 1) {
        return Ok((false, None));
    }
    let failures: Vec<EdgeId> = graph
        .edges
        .par_iter()
        .map(|e| {
            let reduced = graph.without_edge(&e.id)?;
            let report = motion_analysis(&reduced, trials, seed, mode)?;
            Ok((report.moving != graph.inner).then(|| e.id.clone()))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok((failures.is_empty(), failures.into_iter().next()))
}

/// Assur, and removing any edge puts every inner vertex in motion.
pub fn is_strongly_d_assur(graph: &PinnedGraph, seed: u64) -> Result<bool> {
    Ok(is_d_assur(graph, seed)?.is_strongly_assur)
}

/// Prescribed velocities of pinned vertices; unlisted pins stay fixed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec<E> {
    pub velocities: BTreeMap<VertexId, Vec<E>>,
}

impl<E> Default for DriveSpec<E> {
    fn default() -> Self {
        DriveSpec {
            velocities: BTreeMap::new(),
        }
    }
}

fn dot<F: Field>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> F::Elem {
    a.iter().zip(b).fold(field.zero(), |acc, (x, y)| field.add(&acc, &field.mul(x, y)))
}

fn diff<F: Field>(field: &F, a: &[BigRational], b: &[BigRational]) -> Vec<F::Elem> {
    a.iter().zip(b).map(|(x, y)| field.from_rational(&(x - y))).collect()
}

fn norm<F: Field>(field: &F, v: &[F::Elem]) -> f64 {
    v.iter().filter_map(|x| field.magnitude(x)).fold(0.0, |acc: f64, m| acc.hypot(m))
}

/// Solves `R U = D` for a pinned isostatic component whose pins move with
/// the prescribed velocities; row `{i, k}` with `k` pinned carries `(p_i - p_k)·r_k`.
pub fn drive_solve<F: Field>(
    component: &PinnedGraph,
    config: &Configuration,
    drive: &DriveSpec<F::Elem>,
    field: &F,
) -> Result<MotionVector<F::Elem>> {
    let m = build_matrix(component, config, field)?;
    if !m.matrix.is_square() {
        return Err(Error::NotIsostatic);
    }
    let d = component.dimension;
    let rhs: Vec<F::Elem> = component
        .edges
        .iter()
        .map(|e| {
            let (i, k) = if component.is_pinned(&e.v) { (&e.u, &e.v) } else { (&e.v, &e.u) };
            match drive.velocities.get(k) {
                Some(r) if component.is_pinned(k) && component.is_inner(i) => {
                    let pi = config.point(i).expect("covered");
                    let pk = config.point(k).expect("covered");
                    dot(field, &diff::<F>(field, pi, pk), r)
                }
                _ => field.zero(),
            }
        })
        .collect();
    let u = solve(field, &m.matrix, &rhs).ok_or_else(|| {
        Error::SingularConfiguration(format!("rigidity matrix of {{{}}} is singular", join(&component.inner)))
    })?;
    if field.magnitude(&field.one()).is_some() {
        let residual: Vec<F::Elem> = mat_vec(field, &m.matrix, &u)
            .iter()
            .zip(&rhs)
            .map(|(a, b)| field.sub(a, b))
            .collect();
        let scale = norm(field, &rhs).max(f64::MIN_POSITIVE);
        if norm(field, &residual) > 1e-9 * scale {
            return Err(Error::SingularConfiguration("drive residual exceeds tolerance".to_owned()));
        }
    }
    Ok(MotionVector::from_flat(&m.col_vertices, d, &u))
}

fn join(set: &BTreeSet<VertexId>) -> String {
    set.iter().map(VertexId::as_str).collect::<Vec<_>>().join(", ")
}

/// Velocities from propagating a driver up the decomposition, with the
/// monolithic solve used as a cross-check.
#[derive(Clone, Debug, PartialEq)]
pub struct DriveOutcome<E> {
    pub motion: MotionVector<E>,
    pub monolithic: MotionVector<E>,
    /// Largest per-vertex discrepancy relative to the largest velocity
    /// (float mode only; exact mode requires equality).
    pub max_discrepancy: Option<f64>,
}

/// Replaces `driver` by an actuator with length rate `rate`, i.e.
/// `(p_i - p_j)·(U_i - U_j) = rate`, solves its bottom component from the
/// one-dimensional kernel, then each further component in linear order with
/// already solved vertices acting as moving pins.
pub fn drive_propagate<F: Field>(
    graph: &PinnedGraph,
    decomp: &Decomposition,
    config: &Configuration,
    driver: &EdgeId,
    rate: &F::Elem,
    field: &F,
) -> Result<DriveOutcome<F::Elem>> {
    decomp.check_against(graph)?;
    config.covers(graph)?;
    let c0 = decomp
        .component_of_edge(driver)
        .ok_or_else(|| Error::UnknownEdge(driver.clone()))?;
    if !decomp.is_bottom(c0) {
        return Err(Error::NotBottomComponent(driver.clone()));
    }
    let d = graph.dimension;
    let edge = graph.edge(driver).expect("decomposition edge is in graph").clone();
    let zero_vec = || vec![field.zero(); d];
    let mut solved: BTreeMap<VertexId, Vec<F::Elem>> = BTreeMap::new();

    // bottom component: kernel after removing the driver, scaled to the rate
    let comp = &decomp.components[c0];
    let mut edges = comp.edges.clone();
    edges.remove(driver);
    let sub = graph.component_graph(&comp.inner_vertices, &edges);
    let m = build_matrix(&sub, config, field)?;
    let basis = field_nullspace(field, &m.matrix);
    if basis.len() != 1 {
        return Err(Error::SingularConfiguration(format!(
            "kernel of the driven component has dimension {}",
            basis.len()
        )));
    }
    let k = MotionVector::from_flat(&m.col_vertices, d, &basis[0]);
    let vel = |v: &VertexId| k.get(v).map(<[F::Elem]>::to_vec).unwrap_or_else(zero_vec);
    let pu = config.point(&edge.u).expect("covered");
    let pv = config.point(&edge.v).expect("covered");
    let du: Vec<F::Elem> = vel(&edge.u).iter().zip(vel(&edge.v)).map(|(a, b)| field.sub(a, &b)).collect();
    let s = dot(field, &diff::<F>(field, pu, pv), &du);
    if field.is_negligible(&s, norm(field, &basis[0]).max(1.0)) {
        return Err(Error::SingularConfiguration(
            "driver length is stationary along the free motion".to_owned(),
        ));
    }
    let scale = field.div(rate, &s);
    for (v, u) in &k.velocities {
        solved.insert(v.clone(), u.iter().map(|x| field.mul(x, &scale)).collect());
    }

    for &c in &decomp.linear_order {
        if c == c0 {
            continue;
        }
        let comp = &decomp.components[c];
        let sub = graph.component_graph(&comp.inner_vertices, &comp.edges);
        let drive = DriveSpec {
            velocities: sub
                .pinned
                .iter()
                .filter_map(|p| solved.get(p).map(|u| (p.clone(), u.clone())))
                .collect(),
        };
        let u = drive_solve(&sub, config, &drive, field)?;
        solved.extend(u.velocities);
    }
    let motion = MotionVector { velocities: solved };

    // monolithic: full square system with the driver row set to `rate`
    let full = build_matrix(graph, config, field)?;
    let pos = graph.edge_position(driver).expect("edge exists");
    let rhs: Vec<F::Elem> = (0..graph.edges.len())
        .map(|r| if r == pos { rate.clone() } else { field.zero() })
        .collect();
    let u = solve(field, &full.matrix, &rhs)
        .ok_or_else(|| Error::SingularConfiguration("whole-graph rigidity matrix is singular".to_owned()))?;
    let monolithic = MotionVector::from_flat(&full.col_vertices, d, &u);

    let max_discrepancy = if field.magnitude(&field.one()).is_some() {
        let top = monolithic
            .velocities
            .values()
            .map(|u| norm(field, u))
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let worst = graph
            .inner
            .iter()
            .map(|v| {
                let a = motion.get(v).expect("solved");
                let b = monolithic.get(v).expect("solved");
                let dv: Vec<F::Elem> = a.iter().zip(b).map(|(x, y)| field.sub(x, y)).collect();
                norm(field, &dv)
            })
            .fold(0.0, f64::max);
        let rel = worst / top;
        if rel > 1e-9 {
            return Err(Error::CrossCheck(format!(
                "propagated drive differs from the whole-graph solve by {rel:e}"
            )));
        }
        Some(rel)
    } else {
        if motion != monolithic {
            return Err(Error::CrossCheck(
                "propagated drive differs from the whole-graph solve".to_owned(),
            ));
        }
        None
    };
    Ok(DriveOutcome {
        motion,
        monolithic,
        max_discrepancy,
    })
}

/// Exact drive in rationals or float drive, chosen by `mode`.
pub fn drive_propagate_f64(
    graph: &PinnedGraph,
    decomp: &Decomposition,
    config: &Configuration,
    driver: &EdgeId,
    rate: f64,
    tol: f64,
) -> Result<DriveOutcome<f64>> {
    drive_propagate(graph, decomp, config, driver, &rate, &Reals { tol })
}

/// Generic rank deficit `d|I| - rank`.
pub fn rank_deficit(graph: &PinnedGraph, trials: usize, seed: u64) -> usize {
    graph.dimension * graph.inner.len() - generic_rank(graph, trials, seed)
}

/// Rank of the matrix with one edge removed (exact, single prime).
pub fn rank_without_edge(graph: &PinnedGraph, edge: &EdgeId, seed: u64) -> Result<usize> {
    let g = graph.without_edge(edge)?;
    let s = trial_seed(seed, 0);
    let config = sample_generic_configuration(&g, s, ScalarMode::PrimeField);
    let prime = PrimeField::random(&mut seeded_rng(s, MOTION_PRIME_STREAM));
    Ok(rank(&prime, &build_matrix(&g, &config, &prime)?.matrix))
}
