//! Dense Gaussian elimination over any [`Field`].

use crate::field::Field;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> DenseMatrix<E> {
    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<E>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        DenseMatrix { rows: n, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &E {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: E) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[E] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// New matrix with rows and columns taken in the given orders.
    pub fn permuted(&self, row_order: &[usize], col_order: &[usize]) -> Self {
        let mut data = Vec::with_capacity(row_order.len() * col_order.len());
        for &r in row_order {
            for &c in col_order {
                data.push(self.get(r, c).clone());
            }
        }
        DenseMatrix {
            rows: row_order.len(),
            cols: col_order.len(),
            data,
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        self.permuted(rows, cols)
    }

    pub fn map<T: Clone>(&self, f: impl Fn(&E) -> T) -> DenseMatrix<T> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// Reduced row echelon form plus bookkeeping.
#[derive(Clone, Debug)]
pub struct Echelon<E> {
    pub reduced: DenseMatrix<E>,
    pub pivots: Vec<usize>,
    /// Product of the pivots with the sign of the row permutation. Equals the
    /// determinant when the input is square and of full rank.
    pub det: E,
}

fn scale_of<F: Field>(field: &F, m: &DenseMatrix<F::Elem>) -> f64 {
    m.data
        .iter()
        .filter_map(|x| field.magnitude(x))
        .fold(0.0, f64::max)
}

pub fn echelon<F: Field>(field: &F, m: &DenseMatrix<F::Elem>) -> Echelon<F::Elem> {
    echelon_within(field, m, m.cols(), scale_of(field, m))
}

/// Row reduction choosing pivots only among the first `pivot_cols` columns.
fn echelon_within<F: Field>(
    field: &F,
    m: &DenseMatrix<F::Elem>,
    pivot_cols: usize,
    scale: f64,
) -> Echelon<F::Elem> {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut det = field.one();
    let mut row = 0;
    for col in 0..pivot_cols {
        if row == a.rows {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        for r in row..a.rows {
            let x = a.get(r, col);
            if field.is_negligible(x, scale) {
                continue;
            }
            match field.magnitude(x) {
                None => {
                    best = Some((r, 0.0));
                    break;
                }
                Some(mag) => {
                    if best.is_none_or(|(_, b)| mag > b) {
                        best = Some((r, mag));
                    }
                }
            }
        }
        let Some((p, _)) = best else { continue };
        if p != row {
            a.swap_rows(p, row);
            det = field.neg(&det);
        }
        let pivot = a.get(row, col).clone();
        det = field.mul(&det, &pivot);
        let inv = field.inv(&pivot);
        for c in col..a.cols {
            let v = field.mul(a.get(row, c), &inv);
            a.set(row, c, v);
        }
        for r in 0..a.rows {
            if r == row {
                continue;
            }
            let factor = a.get(r, col).clone();
            if field.is_zero(&factor) {
                continue;
            }
            for c in col..a.cols {
                let v = field.sub(a.get(r, c), &field.mul(&factor, a.get(row, c)));
                a.set(r, c, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    Echelon { reduced: a, pivots, det }
}

pub fn rank<F: Field>(field: &F, m: &DenseMatrix<F::Elem>) -> usize {
    echelon(field, m).pivots.len()
}

/// Determinant of a square matrix.
pub fn determinant<F: Field>(field: &F, m: &DenseMatrix<F::Elem>) -> F::Elem {
    assert!(m.is_square(), "determinant of a non-square matrix");
    if m.rows() == 0 {
        return field.one();
    }
    let e = echelon(field, m);
    if e.pivots.len() < m.rows() {
        field.zero()
    } else {
        e.det
    }
}

/// Basis of `{x : m x = 0}`, one vector per free column.
pub fn nullspace<F: Field>(field: &F, m: &DenseMatrix<F::Elem>) -> Vec<Vec<F::Elem>> {
    let e = echelon(field, m);
    let mut is_pivot = vec![false; m.cols()];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..m.cols()).filter(|&c| !is_pivot[c]) {
        let mut v = vec![field.zero(); m.cols()];
        v[free] = field.one();
        for (r, &pc) in e.pivots.iter().enumerate() {
            v[pc] = field.neg(e.reduced.get(r, free));
        }
        basis.push(v);
    }
    basis
}

/// Unique solution of the square system `m x = b`, or `None` when singular.
pub fn solve<F: Field>(field: &F, m: &DenseMatrix<F::Elem>, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
    assert!(m.is_square() && b.len() == m.rows());
    let n = m.rows();
    let mut aug = DenseMatrix::filled(n, n + 1, field.zero());
    for r in 0..n {
        for c in 0..n {
            aug.set(r, c, m.get(r, c).clone());
        }
        aug.set(r, n, b[r].clone());
    }
    let e = echelon_within(field, &aug, n, scale_of(field, m));
    if e.pivots.len() < n {
        return None;
    }
    Some((0..n).map(|r| e.reduced.get(r, n).clone()).collect())
}

pub fn mat_vec<F: Field>(field: &F, m: &DenseMatrix<F::Elem>, x: &[F::Elem]) -> Vec<F::Elem> {
    assert_eq!(x.len(), m.cols());
    (0..m.rows())
        .map(|r| {
            m.row(r)
                .iter()
                .zip(x)
                .fold(field.zero(), |acc, (a, b)| field.add(&acc, &field.mul(a, b)))
        })
        .collect()
}
