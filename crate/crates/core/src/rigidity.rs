//! The pinned rigidity matrix: one row per edge, `d` columns per inner vertex.
//!
//! Row `{i, j}` (both inner) holds `p_i - p_j` in block `i` and `p_j - p_i` in
//! block `j`; row `{i, k}` with `k` pinned holds `p_i - p_k` in block `i` only.
//! Rank and determinant decisions are exact (prime field by default).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decomposition::{strongly_connected_components, Decomposition};
use crate::error::{Error, Result};
use crate::field::{f64_to_rational, rational_to_f64, rational_to_string, Field, PrimeField, Rationals, ScalarMode};
use crate::graph::{EdgeId, PinnedGraph, VertexId};
use crate::linalg::{determinant, nullspace as field_nullspace, rank, DenseMatrix};

/// Default number of independent configurations for generic-rank decisions.
pub const DEFAULT_TRIALS: usize = 3;

/// Half-width of the integer range for exact-mode sampling.
const SAMPLE_BOUND: i64 = 1 << 31;

pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed of trial `t` derived from a base seed (splitmix64 step).
pub fn trial_seed(seed: u64, t: u64) -> u64 {
    let mut z = seed.wrapping_add(t.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const PRIME_STREAM: u64 = 0x7072_696d_65;

/// Points in `d`-space for the vertices of a graph, stored as exact rationals
/// (float inputs are converted exactly).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub dimension: usize,
    pub mode: ScalarMode,
    points: BTreeMap<VertexId, Vec<BigRational>>,
}

impl Configuration {
    pub fn exact<I, V>(dimension: usize, points: I) -> Self
    where
        I: IntoIterator<Item = (V, Vec<BigRational>)>,
        V: Into<VertexId>,
    {
        Configuration {
            dimension,
            mode: ScalarMode::ExactRational,
            points: points.into_iter().map(|(v, p)| (v.into(), p)).collect(),
        }
    }

    /// From floating-point coordinates. Non-finite values are rejected.
    pub fn from_f64<I, V>(dimension: usize, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = (V, Vec<f64>)>,
        V: Into<VertexId>,
    {
        let mut out = BTreeMap::new();
        for (v, p) in points {
            let v = v.into();
            let q = p
                .iter()
                .map(|&x| f64_to_rational(x).ok_or_else(|| Error::Parse(format!("non-finite coordinate for `{v}`"))))
                .collect::<Result<Vec<_>>>()?;
            out.insert(v, q);
        }
        Ok(Configuration {
            dimension,
            mode: ScalarMode::Float64,
            points: out,
        })
    }

    pub fn with_mode(mut self, mode: ScalarMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn point(&self, v: &VertexId) -> Option<&[BigRational]> {
        self.points.get(v).map(Vec::as_slice)
    }

    pub fn point_f64(&self, v: &VertexId) -> Option<Vec<f64>> {
        self.point(v).map(|p| p.iter().map(rational_to_f64).collect())
    }

    pub fn points(&self) -> &BTreeMap<VertexId, Vec<BigRational>> {
        &self.points
    }

    pub fn set_point(&mut self, v: VertexId, p: Vec<BigRational>) {
        self.points.insert(v, p);
    }

    /// Every vertex of `graph` has a point of the right dimension.
    pub fn covers(&self, graph: &PinnedGraph) -> Result<()> {
        for v in graph.vertices() {
            match self.points.get(v) {
                None => return Err(Error::MissingCoordinates(v.clone())),
                Some(p) if p.len() != graph.dimension => {
                    return Err(Error::CoordinateDimension {
                        vertex: v.clone(),
                        expected: graph.dimension,
                        got: p.len(),
                    })
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Coordinates as `f64`, keyed by vertex label.
    pub fn to_f64_map(&self) -> BTreeMap<VertexId, Vec<f64>> {
        self.points
            .iter()
            .map(|(v, p)| (v.clone(), p.iter().map(rational_to_f64).collect()))
            .collect()
    }
}

/// Independent uniform coordinates for every vertex, deterministic in `seed`.
/// Exact modes draw integers in `[-2^31, 2^31]`; float mode draws from `[-1, 1]`.
pub fn sample_generic_configuration(graph: &PinnedGraph, seed: u64, mode: ScalarMode) -> Configuration {
    let mut rng = seeded_rng(seed, 0);
    let d = graph.dimension;
    let points = graph
        .vertices()
        .map(|v| {
            let p = (0..d)
                .map(|_| match mode {
                    ScalarMode::Float64 => {
                        let x: f64 = rng.gen_range(-1.0..=1.0);
                        f64_to_rational(x).expect("finite sample")
                    }
                    _ => BigRational::from_integer(BigInt::from(rng.gen_range(-SAMPLE_BOUND..=SAMPLE_BOUND))),
                })
                .collect();
            (v.clone(), p)
        })
        .collect();
    Configuration {
        dimension: d,
        mode,
        points,
    }
}

/// Pinned rigidity matrix with its row (edge) and column-block (vertex) labels.
#[derive(Clone, Debug, PartialEq)]
pub struct RigidityMatrix<E> {
    pub dimension: usize,
    pub row_edges: Vec<EdgeId>,
    pub col_vertices: Vec<VertexId>,
    pub matrix: DenseMatrix<E>,
}

impl<E: Clone> RigidityMatrix<E> {
    pub fn shape(&self) -> (usize, usize) {
        (self.matrix.rows(), self.matrix.cols())
    }

    /// Block of `d` columns for the vertex at position `i`.
    pub fn block_columns(&self, i: usize) -> std::ops::Range<usize> {
        i * self.dimension..(i + 1) * self.dimension
    }

    pub fn column_labels(&self) -> Vec<String> {
        let axes = ["x", "y", "z"];
        self.col_vertices
            .iter()
            .flat_map(|v| {
                (0..self.dimension).map(move |k| {
                    if self.dimension <= 3 {
                        format!("{v}.{}", axes[k])
                    } else {
                        format!("{v}.{k}")
                    }
                })
            })
            .collect()
    }

    /// CSV with a header row of column labels and edge ids as row labels.
    pub fn to_csv(&self, fmt: impl Fn(&E) -> String) -> String {
        let mut out = String::from("edge");
        for label in self.column_labels() {
            let _ = write!(out, ",{label}");
        }
        out.push('\n');
        for (r, e) in self.row_edges.iter().enumerate() {
            out.push_str(e.as_str());
            for c in 0..self.matrix.cols() {
                let _ = write!(out, ",{}", fmt(self.matrix.get(r, c)));
            }
            out.push('\n');
        }
        out
    }
}

/// Rows follow graph edge order, column blocks follow sorted inner vertex ids.
pub fn build_matrix<F: Field>(graph: &PinnedGraph, config: &Configuration, field: &F) -> Result<RigidityMatrix<F::Elem>> {
    config.covers(graph)?;
    let d = graph.dimension;
    let index = graph.inner_index();
    let mut m = DenseMatrix::filled(graph.edges.len(), d * graph.inner.len(), field.zero());
    for (r, e) in graph.edges.iter().enumerate() {
        let pu = config.point(&e.u).expect("covered");
        let pv = config.point(&e.v).expect("covered");
        for (a, pa, pb) in [(&e.u, pu, pv), (&e.v, pv, pu)] {
            if let Some(&i) = index.get(a) {
                for k in 0..d {
                    m.set(r, i * d + k, field.from_rational(&(&pa[k] - &pb[k])));
                }
            }
        }
    }
    Ok(RigidityMatrix {
        dimension: d,
        row_edges: graph.edges.iter().map(|e| e.id.clone()).collect(),
        col_vertices: graph.inner.iter().cloned().collect(),
        matrix: m,
    })
}

/// Rank of each trial and the prime it was computed with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankTrial {
    pub seed: u64,
    pub prime: u64,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    pub rows: usize,
    pub columns: usize,
    pub trials: Vec<RankTrial>,
}

impl RankReport {
    pub fn deficit(&self) -> usize {
        self.columns - self.rank
    }
}

fn rank_mod_prime(graph: &PinnedGraph, config: &Configuration, prime: PrimeField) -> usize {
    let m = build_matrix(graph, config, &prime).expect("sampled configuration covers graph");
    rank(&prime, &m.matrix)
}

/// Maximum rank over `trials` random configurations, each reduced modulo a
/// random 62-bit prime. A trial that falls short of the running maximum is
/// retried with a second prime. Every reported rank is achieved by some real
/// configuration, so the result is a certified lower bound on the generic rank.
pub fn generic_rank_report(graph: &PinnedGraph, trials: usize, seed: u64) -> RankReport {
    let trials = trials.max(1);
    let mut out = Vec::with_capacity(trials);
    let mut best = 0;
    for t in 0..trials as u64 {
        let s = trial_seed(seed, t);
        let config = sample_generic_configuration(graph, s, ScalarMode::PrimeField);
        let mut prime_rng = seeded_rng(s, PRIME_STREAM);
        let prime = PrimeField::random(&mut prime_rng);
        let mut r = rank_mod_prime(graph, &config, prime);
        let mut used = prime;
        if t > 0 && r != best {
            let second = PrimeField::random(&mut prime_rng);
            let r2 = rank_mod_prime(graph, &config, second);
            if r2 > r {
                r = r2;
                used = second;
            }
        }
        best = best.max(r);
        out.push(RankTrial {
            seed: s,
            prime: used.modulus(),
            rank: r,
        });
    }
    RankReport {
        rank: best,
        rows: graph.edges.len(),
        columns: graph.dimension * graph.inner.len(),
        trials: out,
    }
}

pub fn generic_rank(graph: &PinnedGraph, trials: usize, seed: u64) -> usize {
    generic_rank_report(graph, trials, seed).rank
}

/// `|E| = d|I|` and full generic rank, decided without building a certificate.
pub fn is_generically_isostatic(graph: &PinnedGraph, trials: usize, seed: u64) -> bool {
    let cols = graph.dimension * graph.inner.len();
    graph.edges.len() == cols && generic_rank(graph, trials, seed) == cols
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsostaticCertificate {
    pub isostatic: bool,
    pub edges: usize,
    pub columns: usize,
    pub rank: usize,
    /// Seed of the integer configuration whose exact determinant is nonzero.
    pub witness_seed: Option<u64>,
    /// Exact determinant at the witness configuration, as `n` or `n/d`.
    pub determinant: Option<String>,
}

/// Pinned d-isostatic test with an exact certificate: the witness
/// configuration (reproducible from `witness_seed`) and its nonzero
/// determinant computed over the rationals.
pub fn is_pinned_isostatic(graph: &PinnedGraph, seed: u64) -> IsostaticCertificate {
    let report = generic_rank_report(graph, DEFAULT_TRIALS, seed);
    let square = report.rows == report.columns;
    let mut cert = IsostaticCertificate {
        isostatic: false,
        edges: report.rows,
        columns: report.columns,
        rank: report.rank,
        witness_seed: None,
        determinant: None,
    };
    if !square || report.rank != report.columns {
        return cert;
    }
    for trial in &report.trials {
        if trial.rank != report.columns {
            continue;
        }
        let config = sample_generic_configuration(graph, trial.seed, ScalarMode::ExactRational);
        let m = build_matrix(graph, &config, &Rationals).expect("sampled configuration covers graph");
        let det = determinant(&Rationals, &m.matrix);
        if !Rationals.is_zero(&det) {
            cert.isostatic = true;
            cert.witness_seed = Some(trial.seed);
            cert.determinant = Some(rational_to_string(&det));
            break;
        }
    }
    cert
}

/// Velocity of each inner vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionVector<E> {
    pub velocities: BTreeMap<VertexId, Vec<E>>,
}

impl<E: Clone> MotionVector<E> {
    pub fn from_flat(vertices: &[VertexId], d: usize, flat: &[E]) -> Self {
        MotionVector {
            velocities: vertices
                .iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), flat[i * d..(i + 1) * d].to_vec()))
                .collect(),
        }
    }

    pub fn flatten(&self, vertices: &[VertexId]) -> Vec<E> {
        vertices.iter().flat_map(|v| self.velocities[v].iter().cloned()).collect()
    }

    pub fn get(&self, v: &VertexId) -> Option<&[E]> {
        self.velocities.get(v).map(Vec::as_slice)
    }
}

/// Exact kernel basis of the pinned rigidity matrix.
pub fn nullspace<F: Field>(graph: &PinnedGraph, config: &Configuration, field: &F) -> Result<Vec<MotionVector<F::Elem>>> {
    let m = build_matrix(graph, config, field)?;
    Ok(field_nullspace(field, &m.matrix)
        .into_iter()
        .map(|v| MotionVector::from_flat(&m.col_vertices, graph.dimension, &v))
        .collect())
}

fn singular_values_and_right_vectors(m: &DenseMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let rows = m.rows().max(m.cols());
    // zero rows keep the kernel and give a full-size right singular basis
    let mut a = DMatrix::<f64>::zeros(rows, m.cols());
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            a[(r, c)] = *m.get(r, c);
        }
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    (svd.singular_values.iter().copied().collect(), vt)
}

/// Float kernel: right singular vectors whose singular value is below
/// `tol · σ_max`. Each basis vector has unit norm.
pub fn nullspace_float(graph: &PinnedGraph, config: &Configuration, tol: f64) -> Result<Vec<MotionVector<f64>>> {
    let m = build_matrix(graph, config, &crate::field::Reals { tol })?;
    if m.matrix.cols() == 0 {
        return Ok(Vec::new());
    }
    let (sv, vt) = singular_values_and_right_vectors(&m.matrix);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let mut out = Vec::new();
    for (k, s) in sv.iter().enumerate() {
        if *s <= tol * smax || smax == 0.0 {
            let v: Vec<f64> = (0..m.matrix.cols()).map(|c| vt[(k, c)]).collect();
            out.push(MotionVector::from_flat(&m.col_vertices, graph.dimension, &v));
        }
    }
    Ok(out)
}

/// Numerical rank by singular values with relative threshold `tol`.
pub fn float_rank(graph: &PinnedGraph, config: &Configuration, tol: f64) -> Result<usize> {
    let m = build_matrix(graph, config, &crate::field::Reals { tol })?;
    if m.matrix.cols() == 0 || m.matrix.rows() == 0 {
        return Ok(0);
    }
    let (sv, _) = singular_values_and_right_vectors(&m.matrix);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    Ok(sv.iter().filter(|&&s| s > tol * smax).count())
}

/// The rigidity matrix permuted into component order, with block boundaries.
#[derive(Clone, Debug)]
pub struct BlockTriangularView<E> {
    pub is_block_triangular: bool,
    pub diagonal_blocks_square: bool,
    /// `(row block, column block)` pairs above the diagonal holding a nonzero.
    pub nonzero_above_diagonal: Vec<(usize, usize)>,
    pub row_blocks: Vec<std::ops::Range<usize>>,
    pub col_blocks: Vec<std::ops::Range<usize>>,
    pub matrix: RigidityMatrix<E>,
}

impl<E: Clone> BlockTriangularView<E> {
    pub fn block_count(&self) -> usize {
        self.row_blocks.len()
    }

    pub fn diagonal_block(&self, b: usize) -> DenseMatrix<E> {
        let rows: Vec<usize> = self.row_blocks[b].clone().collect();
        let cols: Vec<usize> = self.col_blocks[b].clone().collect();
        self.matrix.matrix.submatrix(&rows, &cols)
    }
}

/// Permutes rows by owning component and column blocks by component, both in
/// `decomp.linear_order`, and checks that every block above the diagonal is
/// identically zero and every diagonal block is square (`d|I_c|` rows).
pub fn block_triangular_verify<F: Field>(
    graph: &PinnedGraph,
    config: &Configuration,
    decomp: &Decomposition,
    field: &F,
) -> Result<BlockTriangularView<F::Elem>> {
    decomp.check_against(graph)?;
    let base = build_matrix(graph, config, field)?;
    let d = graph.dimension;
    let col_index = graph.inner_index();

    let mut row_order = Vec::new();
    let mut col_order = Vec::new();
    let mut row_blocks = Vec::new();
    let mut col_blocks = Vec::new();
    for &c in &decomp.linear_order {
        let comp = &decomp.components[c];
        let r0 = row_order.len();
        for (r, e) in graph.edges.iter().enumerate() {
            if comp.edges.contains(&e.id) {
                row_order.push(r);
            }
        }
        row_blocks.push(r0..row_order.len());
        let c0 = col_order.len();
        for v in &comp.inner_vertices {
            let i = col_index[v];
            col_order.extend(i * d..(i + 1) * d);
        }
        col_blocks.push(c0..col_order.len());
    }
    let matrix = base.matrix.permuted(&row_order, &col_order);

    let mut nonzero_above = Vec::new();
    for (bi, rows) in row_blocks.iter().enumerate() {
        for (bj, cols) in col_blocks.iter().enumerate().skip(bi + 1) {
            let any = rows.clone().any(|r| cols.clone().any(|c| !field.is_zero(matrix.get(r, c))));
            if any {
                nonzero_above.push((bi, bj));
            }
        }
    }
    let diagonal_blocks_square = row_blocks.iter().zip(&col_blocks).all(|(r, c)| r.len() == c.len());
    let col_vertices = decomp
        .linear_order
        .iter()
        .flat_map(|&c| decomp.components[c].inner_vertices.iter().cloned())
        .collect();
    Ok(BlockTriangularView {
        is_block_triangular: nonzero_above.is_empty() && diagonal_blocks_square,
        diagonal_blocks_square,
        nonzero_above_diagonal: nonzero_above,
        row_blocks,
        col_blocks,
        matrix: RigidityMatrix {
            dimension: d,
            row_edges: row_order.iter().map(|&r| graph.edges[r].id.clone()).collect(),
            col_vertices,
            matrix,
        },
    })
}

/// Whether `det(view) = ± ∏ det(diagonal blocks)`.
pub fn determinant_factorizes<F: Field>(field: &F, view: &BlockTriangularView<F::Elem>) -> bool {
    if !view.matrix.matrix.is_square() {
        return false;
    }
    let full = determinant(field, &view.matrix.matrix);
    let product = (0..view.block_count()).fold(field.one(), |acc, b| {
        let block = view.diagonal_block(b);
        if block.is_square() {
            field.mul(&acc, &determinant(field, &block))
        } else {
            field.zero()
        }
    });
    full == product || full == field.neg(&product)
}

/// Finest block-triangular form of a square rigidity matrix computed from the
/// matrix alone: a perfect row/column matching on the nonzero pattern, then
/// strongly connected components of the column digraph `c -> c'` whenever the
/// row matched to `c` is nonzero in `c'`. Blocks are reported as vertex sets,
/// bottom blocks first.
pub fn matrix_diagonal_blocks<F: Field>(
    graph: &PinnedGraph,
    config: &Configuration,
    field: &F,
) -> Result<Vec<BTreeSet<VertexId>>> {
    let m = build_matrix(graph, config, field)?;
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::NotIsostatic);
    }
    let nz: Vec<Vec<usize>> = (0..rows)
        .map(|r| (0..cols).filter(|&c| !field.is_zero(m.matrix.get(r, c))).collect())
        .collect();
    let row_of_col = perfect_matching(&nz, cols).ok_or(Error::NotIsostatic)?;
    let adj: Vec<Vec<usize>> = (0..cols).map(|c| nz[row_of_col[c]].clone()).collect();
    let (comp, count) = strongly_connected_components(&adj);
    // Tarjan numbers sink components first, i.e. the blocks that depend on nothing.
    let mut blocks: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); count];
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for c in 0..cols {
        let vi = c / graph.dimension;
        let b = comp[c];
        if let Some(prev) = owner.insert(vi, b) {
            if prev != b {
                return Err(Error::CrossCheck(format!(
                    "columns of `{}` split across matrix blocks",
                    m.col_vertices[vi]
                )));
            }
        }
        blocks[b].insert(m.col_vertices[vi].clone());
    }
    Ok(blocks)
}

/// Kuhn's augmenting-path matching; returns the row matched to each column.
fn perfect_matching(row_cols: &[Vec<usize>], cols: usize) -> Option<Vec<usize>> {
    let mut row_of_col: Vec<Option<usize>> = vec![None; cols];
    fn try_row(r: usize, row_cols: &[Vec<usize>], seen: &mut [bool], row_of_col: &mut [Option<usize>]) -> bool {
        for &c in &row_cols[r] {
            if seen[c] {
                continue;
            }
            seen[c] = true;
            if row_of_col[c].is_none_or(|r2| try_row(r2, row_cols, seen, row_of_col)) {
                row_of_col[c] = Some(r);
                return true;
            }
        }
        false
    }
    for r in 0..row_cols.len() {
        let mut seen = vec![false; cols];
        if !try_row(r, row_cols, &mut seen, &mut row_of_col) {
            return None;
        }
    }
    row_of_col.into_iter().collect()
}
