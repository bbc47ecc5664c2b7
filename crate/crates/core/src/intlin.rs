//! Exact integer linear algebra: dense matrices, Hermite and Smith normal
//! forms, integer solutions of linear systems, and lattice membership.

use std::fmt;

use serde::ser::{Serialize, SerializeSeq, Serializer};
use thiserror::Error;

use crate::scalar::{EuclideanInt, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinError {
    #[error("matrix data has {found} entries, expected {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Dense row-major matrix over a ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, LinError> {
        if data.len() != rows * cols {
            return Err(LinError::BadShape {
                rows,
                cols,
                found: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from its rows. `cols` is needed when `rows` is empty.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Result<Self, LinError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinError::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: n, cols, data })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.rows().map(<[T]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn mul(&self, rhs: &Matrix<T>) -> Result<Matrix<T>, LinError> {
        if self.cols != rhs.rows {
            return Err(LinError::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a.clone() * rhs[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + prod;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>, LinError> {
        if v.len() != self.cols {
            return Err(LinError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(self
            .rows()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    /// Entrywise image under a map of scalars.
    pub fn map<S: Ring, F: FnMut(&T) -> S>(&self, f: F) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<S: Ring, E, F: FnMut(&T) -> Result<S, E>>(&self, f: F) -> Result<Matrix<S>, E> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    /// Submatrix on the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix<T> {
        let data = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| self[(i, j)].clone()))
            .collect();
        Matrix {
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    /// Determinant by cofactor expansion. Intended for the 2x2 and 3x3
    /// determinants over polynomial rings; use [`det_bareiss`] for integers.
    pub fn det_cofactor(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        match self.rows {
            0 => T::one(),
            1 => self[(0, 0)].clone(),
            2 => {
                self[(0, 0)].clone() * self[(1, 1)].clone()
                    - self[(0, 1)].clone() * self[(1, 0)].clone()
            }
            n => {
                let rest: Vec<usize> = (1..n).collect();
                let mut total = T::zero();
                for j in 0..n {
                    if self[(0, j)].is_zero() {
                        continue;
                    }
                    let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                    let term = self[(0, j)].clone() * self.select(&rest, &cols).det_cofactor();
                    total = if j % 2 == 0 { total + term } else { total - term };
                }
                total
            }
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Serializes as a JSON array of rows; entries use their `Display` form
/// when they are not plain integers (polynomials render as strings).
impl<T: fmt::Display> Serialize for Matrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<serde_json::Value> = (0..self.cols)
                .map(|j| scalar_to_json(&self.data[i * self.cols + j]))
                .collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

/// Integers that fit in an `i64` become JSON numbers, everything else a string.
pub fn scalar_to_json<T: fmt::Display>(x: &T) -> serde_json::Value {
    let s = x.to_string();
    match s.parse::<i64>() {
        Ok(n) => serde_json::Value::from(n),
        Err(_) => serde_json::Value::from(s),
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_bareiss<T: EuclideanInt>(m: &Matrix<T>) -> T {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let n = m.rows;
    let mut a = m.clone();
    let mut sign = T::one();
    let mut prev = T::one();
    for k in 0..n {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(i) => {
                    a.swap_rows(i, k);
                    sign = -sign;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[(i, j)].clone() * a[(k, k)].clone() - a[(i, k)].clone() * a[(k, j)].clone();
                a[(i, j)] = v / prev.clone();
            }
            a[(i, k)] = T::zero();
        }
        prev = a[(k, k)].clone();
    }
    if n == 0 {
        return T::one();
    }
    sign * a[(n - 1, n - 1)].clone()
}

/// Row-style Hermite normal form `H = U·A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermiteForm<T> {
    pub h: Matrix<T>,
    pub u: Matrix<T>,
    /// Number of nonzero rows of `h`; they come first.
    pub rank: usize,
    /// Pivot column of each nonzero row.
    pub pivots: Vec<usize>,
}

impl<T: EuclideanInt> HermiteForm<T> {
    /// The nonzero rows of `h`, a basis of the row lattice of `A`.
    pub fn basis(&self) -> Vec<Vec<T>> {
        (0..self.rank).map(|i| self.h.row(i).to_vec()).collect()
    }
}

// Row operation [r_a, r_b] <- [[x, y], [p, q]] · [r_a, r_b] applied to `m`.
fn combine_rows<T: EuclideanInt>(m: &mut Matrix<T>, a: usize, b: usize, x: &T, y: &T, p: &T, q: &T) {
    for j in 0..m.cols {
        let va = m[(a, j)].clone();
        let vb = m[(b, j)].clone();
        m[(a, j)] = x.clone() * va.clone() + y.clone() * vb.clone();
        m[(b, j)] = p.clone() * va + q.clone() * vb;
    }
}

fn add_row_multiple<T: EuclideanInt>(m: &mut Matrix<T>, target: usize, source: usize, factor: &T) {
    for j in 0..m.cols {
        let v = m[(target, j)].clone() + factor.clone() * m[(source, j)].clone();
        m[(target, j)] = v;
    }
}

fn negate_row<T: EuclideanInt>(m: &mut Matrix<T>, i: usize) {
    for j in 0..m.cols {
        let v = -m[(i, j)].clone();
        m[(i, j)] = v;
    }
}

/// Computes the row-style Hermite normal form of `a` together with the
/// unimodular transform: `h = u·a`, `h` is in row echelon form with positive
/// pivots, and every entry above a pivot lies in `[0, pivot)`.
pub fn hermite_normal_form<T: EuclideanInt>(a: &Matrix<T>) -> HermiteForm<T> {
    let (m, n) = (a.rows, a.cols);
    let mut h = a.clone();
    let mut u = Matrix::identity(m);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        for i in r + 1..m {
            if h[(i, c)].is_zero() {
                continue;
            }
            let (hr, hi) = (h[(r, c)].clone(), h[(i, c)].clone());
            let eg = hr.extended_gcd(&hi);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let p = -(hi / g.clone());
            let q = hr / g;
            combine_rows(&mut h, r, i, &x, &y, &p, &q);
            combine_rows(&mut u, r, i, &x, &y, &p, &q);
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            negate_row(&mut h, r);
            negate_row(&mut u, r);
        }
        let pivot = h[(r, c)].clone();
        for i in 0..r {
            let quotient = h[(i, c)].div_floor(&pivot);
            if !quotient.is_zero() {
                let f = -quotient;
                add_row_multiple(&mut h, i, r, &f);
                add_row_multiple(&mut u, i, r, &f);
            }
        }
        pivots.push(c);
        r += 1;
    }
    HermiteForm {
        h,
        u,
        rank: r,
        pivots,
    }
}

/// Invariant factors `d_1 | d_2 | ... | d_r` of an integer matrix (its
/// nonzero Smith normal form diagonal).
pub fn smith_invariants<T: EuclideanInt>(a: &Matrix<T>) -> Vec<T> {
    let mut m = a.clone();
    loop {
        let rows = hermite_normal_form(&m);
        let reduced = Matrix::from_rows(rows.basis(), m.cols).expect("consistent width");
        let cols = hermite_normal_form(&reduced.transpose());
        m = Matrix::from_rows(cols.basis(), reduced.rows).expect("consistent width");
        let diagonal = (0..m.rows).all(|i| (0..m.cols).all(|j| i == j || m[(i, j)].is_zero()));
        if diagonal {
            break;
        }
    }
    let mut d: Vec<T> = (0..m.rows.min(m.cols)).map(|i| m[(i, i)].abs()).collect();
    d.retain(|x| !x.is_zero());
    // Enforce the divisibility chain: (a, b) -> (gcd, lcm) pairwise.
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d
}

/// Outcome of [`solve_diophantine`]. When feasible, `solution` satisfies
/// `A·x = b` exactly; every vector of `kernel_basis` satisfies `A·v = 0`, and
/// together they span the integer kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiophantineResult<T> {
    pub feasible: bool,
    pub solution: Option<Vec<T>>,
    pub kernel_basis: Vec<Vec<T>>,
}

/// Decides whether `b` lies in the integer column span of `a` and returns a
/// witness and the integer kernel.
pub fn solve_diophantine<T: EuclideanInt>(
    a: &Matrix<T>,
    b: &[T],
) -> Result<DiophantineResult<T>, LinError> {
    if b.len() != a.rows {
        return Err(LinError::DimensionMismatch {
            expected: a.rows,
            found: b.len(),
        });
    }
    // Columns of `a` are the rows of its transpose; y·H = b gives x = Uᵀ·y.
    let hnf = hermite_normal_form(&a.transpose());
    let n = a.cols;
    let kernel_basis = (hnf.rank..n).map(|k| hnf.u.row(k).to_vec()).collect();

    let mut residual = b.to_vec();
    let mut y = Vec::with_capacity(hnf.rank);
    for (k, &p) in hnf.pivots.iter().enumerate() {
        let pivot = &hnf.h[(k, p)];
        let (q, rem) = residual[p].div_rem(pivot);
        if !rem.is_zero() {
            return Ok(DiophantineResult {
                feasible: false,
                solution: None,
                kernel_basis,
            });
        }
        for (j, r) in residual.iter_mut().enumerate() {
            let v = r.clone() - q.clone() * hnf.h[(k, j)].clone();
            *r = v;
        }
        y.push(q);
    }
    if residual.iter().any(|r| !r.is_zero()) {
        return Ok(DiophantineResult {
            feasible: false,
            solution: None,
            kernel_basis,
        });
    }
    let mut x = vec![T::zero(); n];
    for (k, yk) in y.iter().enumerate() {
        if yk.is_zero() {
            continue;
        }
        for (j, xj) in x.iter_mut().enumerate() {
            let v = xj.clone() + yk.clone() * hnf.u[(k, j)].clone();
            *xj = v;
        }
    }
    debug_assert_eq!(a.mul_vec(&x).ok().as_deref(), Some(b));
    Ok(DiophantineResult {
        feasible: true,
        solution: Some(x),
        kernel_basis,
    })
}

/// Result of a lattice membership query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership<T> {
    pub member: bool,
    /// Coefficients expressing the target in the given generators.
    pub coeffs: Option<Vec<T>>,
}

/// Tests whether `target` is an integer combination of `generators`.
pub fn lattice_membership<T: EuclideanInt>(
    generators: &[Vec<T>],
    target: &[T],
) -> Result<Membership<T>, LinError> {
    let dim = target.len();
    if let Some(bad) = generators.iter().find(|g| g.len() != dim) {
        return Err(LinError::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    let a = Matrix::from_rows(generators.to_vec(), dim)?.transpose();
    let result = solve_diophantine(&a, target)?;
    Ok(Membership {
        member: result.feasible,
        coeffs: result.solution,
    })
}

/// Hermite basis of the lattice spanned by `generators` (rows).
pub fn lattice_basis<T: EuclideanInt>(generators: &[Vec<T>], dim: usize) -> Result<Vec<Vec<T>>, LinError> {
    let m = Matrix::from_rows(generators.to_vec(), dim)?;
    Ok(hermite_normal_form(&m).basis())
}
