//! Exact linear algebra over the rationals.
//!
//! Matrices are dense and row-major. Elimination works on sparse copies of
//! the rows because almost every matrix built downstream (monomial
//! coordinates, trace coordinates) is very sparse.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary precision rational, always kept in lowest terms.
pub type Rational = num_rational::BigRational;

/// Integer as a rational.
pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d` as a rational. Panics on `d == 0`.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("linear system has no solution")]
    Inconsistent,
    #[error("linear system is underdetermined (nullity {nullity})")]
    Underdetermined { particular: Vec<Rational>, nullity: usize },
    #[error("right-hand side has {got} entries, expected {expected}")]
    Shape { expected: usize, got: usize },
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from equally long rows. `cols` is needed for the
    /// zero-row case.
    pub fn from_rows(rows: Vec<Vec<Rational>>, cols: usize) -> Self {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix row");
            entries.extend(r);
        }
        QMatrix { rows: n, cols, entries }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect(), cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = Rational::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let idx = r * out.cols + c;
                        out.entries[idx] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Stacks `other` to the right of `self`.
    pub fn hstack(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.rows, other.rows);
        let rows = (0..self.rows)
            .map(|r| self.row(r).iter().chain(other.row(r)).cloned().collect())
            .collect();
        Self::from_rows(rows, self.cols + other.cols)
    }

    fn sparse_rows(&self) -> Vec<SparseRow> {
        (0..self.rows).map(|r| SparseRow::from_dense(self.row(r))).collect()
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let aug = self.hstack(&Self::identity(n));
        let ech = Echelon::reduced(aug.sparse_rows(), 2 * n);
        if ech.pivots.iter().take_while(|(c, _)| *c < n).count() != n {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for (c, row) in &ech.pivots {
            for (j, v) in &row.0 {
                if *j >= n {
                    inv.set(*c, j - n, v.clone());
                }
            }
        }
        Some(inv)
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for v in self.row(r) {
                write!(f, "{} ", v)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Sorted (column, nonzero value) pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseRow(pub Vec<(usize, Rational)>);

impl SparseRow {
    pub fn from_dense(r: &[Rational]) -> Self {
        SparseRow(r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v.clone())).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn lead(&self) -> Option<usize> {
        self.0.first().map(|(c, _)| *c)
    }

    fn coeff(&self, col: usize) -> Option<&Rational> {
        self.0.binary_search_by_key(&col, |(c, _)| *c).ok().map(|i| &self.0[i].1)
    }

    /// `self - f * other`.
    fn axpy(&self, f: &Rational, other: &SparseRow) -> SparseRow {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let ca = a.get(i).map_or(usize::MAX, |e| e.0);
            let cb = b.get(j).map_or(usize::MAX, |e| e.0);
            if ca < cb {
                out.push(a[i].clone());
                i += 1;
            } else if cb < ca {
                out.push((cb, -(f * &b[j].1)));
                j += 1;
            } else {
                let v = &a[i].1 - f * &b[j].1;
                if !v.is_zero() {
                    out.push((ca, v));
                }
                i += 1;
                j += 1;
            }
        }
        SparseRow(out)
    }

    fn scale(&mut self, f: &Rational) {
        for (_, v) in &mut self.0 {
            *v *= f;
        }
    }
}

/// Row echelon form built one row at a time. Each pivot row has leading
/// coefficient one; rows are only reduced on their leading entry unless
/// `reduced` is requested.
struct Echelon {
    /// (pivot column, row) in insertion order.
    pivots: Vec<(usize, SparseRow)>,
    by_col: Vec<Option<usize>>,
}

impl Echelon {
    fn new(cols: usize) -> Self {
        Echelon { pivots: Vec::new(), by_col: vec![None; cols] }
    }

    /// Reduces `row` against the current pivots; returns what is left.
    fn reduce(&self, mut row: SparseRow, limit: usize) -> SparseRow {
        while let Some(c) = row.lead() {
            if c >= limit {
                break;
            }
            match self.by_col[c] {
                Some(p) => {
                    let f = row.0[0].1.clone();
                    row = row.axpy(&f, &self.pivots[p].1);
                }
                None => break,
            }
        }
        row
    }

    /// Inserts a row; returns `true` when it was independent of earlier ones
    /// (on columns below `limit`).
    fn insert(&mut self, row: SparseRow, limit: usize) -> bool {
        let mut row = self.reduce(row, limit);
        match row.lead() {
            Some(c) if c < limit => {
                let inv = row.0[0].1.recip();
                row.scale(&inv);
                self.by_col[c] = Some(self.pivots.len());
                self.pivots.push((c, row));
                true
            }
            _ => false,
        }
    }

    /// Fully reduced row echelon form of `rows`, pivots sorted by column.
    fn reduced(rows: Vec<SparseRow>, cols: usize) -> Self {
        let mut e = Echelon::new(cols);
        for r in rows {
            e.insert(r, cols);
        }
        e.pivots.sort_by_key(|(c, _)| *c);
        for (i, (c, _)) in e.pivots.iter().enumerate() {
            e.by_col[*c] = Some(i);
        }
        // back substitution, last pivot first
        for i in (0..e.pivots.len()).rev() {
            let (ci, ri) = e.pivots[i].clone();
            for j in 0..i {
                if let Some(f) = e.pivots[j].1.coeff(ci).cloned() {
                    let nr = e.pivots[j].1.axpy(&f, &ri);
                    e.pivots[j].1 = nr;
                }
            }
        }
        e
    }
}

/// Rank over the rationals.
pub fn mat_rank(m: &QMatrix) -> usize {
    rank_of_rows(m.sparse_rows(), m.cols)
}

/// Rank of a list of sparse rows with `cols` columns.
pub fn rank_of_rows(rows: Vec<SparseRow>, cols: usize) -> usize {
    independent_of_rows(rows, cols).len()
}

/// Indices of a maximal independent subset of rows, chosen greedily in order.
pub fn independent_rows(m: &QMatrix) -> Vec<usize> {
    independent_of_rows(m.sparse_rows(), m.cols)
}

pub fn independent_of_rows(rows: Vec<SparseRow>, cols: usize) -> Vec<usize> {
    let mut e = Echelon::new(cols);
    let mut keep = Vec::new();
    for (i, r) in rows.into_iter().enumerate() {
        if e.insert(r, cols) {
            keep.push(i);
        }
    }
    keep
}

/// Basis of the kernel `{v : m v = 0}`; `cols - rank` vectors.
pub fn mat_nullspace(m: &QMatrix) -> Vec<Vec<Rational>> {
    let e = Echelon::reduced(m.sparse_rows(), m.cols);
    let mut is_pivot = vec![false; m.cols];
    for (c, _) in &e.pivots {
        is_pivot[*c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|c| !is_pivot[*c]) {
        let mut v = vec![Rational::zero(); m.cols];
        v[free] = Rational::one();
        for (c, row) in &e.pivots {
            if let Some(x) = row.coeff(free) {
                v[*c] = -x.clone();
            }
        }
        basis.push(v);
    }
    basis
}

/// Basis of the left kernel `{c : c^T rows = 0}` of a list of sparse rows.
/// Each vector has one entry per input row.
pub fn left_kernel(rows: Vec<SparseRow>, cols: usize) -> Vec<Vec<Rational>> {
    let n = rows.len();
    let mut e = Echelon::new(cols + n);
    let mut out = Vec::new();
    for (i, mut r) in rows.into_iter().enumerate() {
        r.0.push((cols + i, Rational::one()));
        let red = e.reduce(r, cols);
        match red.lead() {
            Some(c) if c < cols => {
                e.insert(red, cols);
            }
            _ => {
                let mut v = vec![Rational::zero(); n];
                for (c, x) in red.0 {
                    v[c - cols] = x;
                }
                out.push(v);
            }
        }
    }
    out
}

/// Solves `m x = b` exactly.
pub fn solve_linear(m: &QMatrix, b: &[Rational]) -> Result<Vec<Rational>, SolveError> {
    if b.len() != m.rows {
        return Err(SolveError::Shape { expected: m.rows, got: b.len() });
    }
    let rhs = QMatrix::from_rows(b.iter().map(|x| vec![x.clone()]).collect(), 1);
    let aug = m.hstack(&rhs);
    let e = Echelon::reduced(aug.sparse_rows(), m.cols + 1);
    if e.pivots.iter().any(|(c, _)| *c == m.cols) {
        return Err(SolveError::Inconsistent);
    }
    let mut x = vec![Rational::zero(); m.cols];
    for (c, row) in &e.pivots {
        if let Some(v) = row.coeff(m.cols) {
            x[*c] = v.clone();
        }
    }
    let nullity = m.cols - e.pivots.len();
    if nullity > 0 {
        return Err(SolveError::Underdetermined { particular: x, nullity });
    }
    Ok(x)
}

/// Parses `p/q` or an integer; rejects a zero denominator.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Largest absolute numerator or denominator bit length; handy for tests
/// that watch coefficient growth.
pub fn max_bits(v: &[Rational]) -> u64 {
    v.iter().map(|x| x.numer().abs().bits().max(x.denom().bits())).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(mat_rank(&QMatrix::identity(2)), 2);
        assert_eq!(mat_rank(&QMatrix::zeros(3, 3)), 0);
        assert_eq!(mat_rank(&QMatrix::from_i64(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn nullspace_examples() {
        let n = mat_nullspace(&QMatrix::from_i64(&[&[1, 1]]));
        assert_eq!(n, vec![vec![qi(-1), qi(1)]]);
        assert!(mat_nullspace(&QMatrix::identity(2)).is_empty());
        let m = QMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        let n = mat_nullspace(&m);
        assert_eq!(n.len(), 1);
        assert_eq!(&n[0][0] / &n[0][1], qi(-2));
        assert!(m.mul_vec(&n[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn solve_examples() {
        let x = solve_linear(&QMatrix::identity(2), &[q(3, 2), qi(-1)]).unwrap();
        assert_eq!(x, vec![q(3, 2), qi(-1)]);
        assert_eq!(solve_linear(&QMatrix::from_i64(&[&[2]]), &[qi(1)]).unwrap(), vec![q(1, 2)]);
        assert_eq!(
            solve_linear(&QMatrix::from_i64(&[&[1, 1], &[1, 1]]), &[qi(1), qi(2)]),
            Err(SolveError::Inconsistent)
        );
        match solve_linear(&QMatrix::from_i64(&[&[1, 1]]), &[qi(2)]) {
            Err(SolveError::Underdetermined { particular, nullity }) => {
                assert_eq!(nullity, 1);
                assert_eq!(&particular[0] + &particular[1], qi(2));
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let m = QMatrix::from_i64(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMatrix::identity(3));
        assert!(QMatrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn left_kernel_combines_rows() {
        let m = QMatrix::from_i64(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 2], &[2, 0, 2]]);
        let k = left_kernel(m.sparse_rows(), 3);
        assert_eq!(k.len(), 2);
        let mt = m.transpose();
        for v in &k {
            assert!(mt.mul_vec(v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn independent_rows_is_greedy() {
        let m = QMatrix::from_i64(&[&[1, 0], &[2, 0], &[0, 1], &[1, 1]]);
        assert_eq!(independent_rows(&m), vec![0, 2]);
    }
}
