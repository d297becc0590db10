//! Dense exact linear algebra over the rationals.
//!
//! Sizes here are partition-number sized (tens of rows), so plain
//! fraction-exact Gaussian elimination is all we need.

use alloc::vec;
use alloc::vec::Vec;

use crate::scalar::Scalar;

/// A dense matrix of exact rationals, row major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c));
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Scalar {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.at(i, j) == self.at(j, i)))
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Matrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if !b.is_zero() {
                        *out.at_mut(i, j) += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for j in 0..self.cols {
                    let a = self.at(i, j);
                    if !a.is_zero() && !v[j].is_zero() {
                        acc += a * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    /// Exact determinant by Gaussian elimination; square only.
    pub fn determinant(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Scalar::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m.at(r, col).is_zero());
            let Some(p) = pivot else {
                return Scalar::zero();
            };
            if p != col {
                for j in 0..n {
                    let a = m.at(p, j).clone();
                    let b = m.at(col, j).clone();
                    *m.at_mut(p, j) = b;
                    *m.at_mut(col, j) = a;
                }
                det = -det;
            }
            let pv = m.at(col, col).clone();
            det *= pv.clone();
            for r in col + 1..n {
                if m.at(r, col).is_zero() {
                    continue;
                }
                let f = &m.at(r, col).clone() / &pv;
                for j in col..n {
                    let sub = &f * m.at(col, j);
                    *m.at_mut(r, j) -= sub;
                }
            }
        }
        det
    }

    /// Reduced row echelon form; returns the pivot column per pivot row.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.at(i, col).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    let a = self.at(p, j).clone();
                    let b = self.at(r, j).clone();
                    *self.at_mut(p, j) = b;
                    *self.at_mut(r, j) = a;
                }
            }
            let pv = self.at(r, col).clone();
            for j in col..self.cols {
                *self.at_mut(r, j) = &self.at(r, j).clone() / &pv;
            }
            for i in 0..self.rows {
                if i != r && !self.at(i, col).is_zero() {
                    let f = self.at(i, col).clone();
                    for j in col..self.cols {
                        let sub = &f * self.at(r, j);
                        *self.at_mut(i, j) -= sub;
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// A basis of the right null space, as column vectors.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut out = Vec::new();
        let mut next_pivot = 0usize;
        for col in 0..self.cols {
            if next_pivot < pivots.len() && pivots[next_pivot] == col {
                next_pivot += 1;
                continue;
            }
            // free column: back-substitute
            let mut v = vec![Scalar::zero(); self.cols];
            v[col] = Scalar::one();
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = -m.at(prow, col);
            }
            out.push(v);
        }
        out
    }

    /// Solve `A x = b` exactly. Returns `None` when inconsistent; otherwise
    /// one particular solution (free variables set to zero).
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(self.rows, b.len());
        let mut aug = Matrix::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, self.cols) = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.last().is_some_and(|&p| p == self.cols) {
            return None; // pivot in the augmented column
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (prow, &pcol) in pivots.iter().enumerate() {
            x[pcol] = aug.at(prow, self.cols).clone();
        }
        Some(x)
    }
}

/// Row-reduce a list of vectors (as coordinate rows) to an independent
/// spanning set; keeps the reduced rows.
pub struct RowSpan {
    pub cols: usize,
    rows: Vec<Vec<Scalar>>,
    pivot_cols: Vec<usize>,
}

impl RowSpan {
    pub fn new(cols: usize) -> Self {
        RowSpan {
            cols,
            rows: Vec::new(),
            pivot_cols: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    /// Reduce `v` against the span; the remainder has zeros in all pivot
    /// columns.
    pub fn reduce(&self, mut v: Vec<Scalar>) -> Vec<Scalar> {
        for (row, &pc) in self.rows.iter().zip(&self.pivot_cols) {
            if !v[pc].is_zero() {
                let f = v[pc].clone();
                for j in 0..self.cols {
                    if !row[j].is_zero() {
                        let sub = &f * &row[j];
                        v[j] -= sub;
                    }
                }
            }
        }
        v
    }

    /// Insert a vector; returns `true` when it enlarged the span.
    pub fn insert(&mut self, v: Vec<Scalar>) -> bool {
        let mut v = self.reduce(v);
        let Some(pc) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[pc].recip();
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        // back-eliminate the new pivot from existing rows
        for row in self.rows.iter_mut() {
            if !row[pc].is_zero() {
                let f = row[pc].clone();
                for j in 0..self.cols {
                    if !v[j].is_zero() {
                        let sub = &f * &v[j];
                        row[j] -= sub;
                    }
                }
            }
        }
        self.rows.push(v);
        self.pivot_cols.push(pc);
        true
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v.to_vec()).iter().all(|x| x.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(m(&[&[2]]).determinant(), s("2"));
        assert_eq!(m(&[&[1, 2], &[3, 4]]).determinant(), s("-2"));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).determinant(), s("0"));
        // 3x3 with fractions
        let mut a = Matrix::zero(3, 3);
        *a.at_mut(0, 0) = s("1/2");
        *a.at_mut(0, 1) = s("1/3");
        *a.at_mut(1, 0) = s("1/3");
        *a.at_mut(1, 1) = s("1/4");
        *a.at_mut(2, 2) = s("5");
        assert_eq!(a.determinant(), s("5/72"));
    }

    #[test]
    fn kernel_and_solve() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = a.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.mul_vec(v).iter().all(|x| x.is_zero()));
        }
        let a = m(&[&[1, 1], &[1, -1]]);
        let x = a.solve(&[s("3"), s("1")]).unwrap();
        assert_eq!(x, vec![s("2"), s("1")]);
        let bad = m(&[&[1, 1], &[1, 1]]);
        assert!(bad.solve(&[s("0"), s("1")]).is_none());
    }

    #[test]
    fn row_span_reduction() {
        let mut sp = RowSpan::new(3);
        assert!(sp.insert(vec![s("1"), s("2"), s("0")]));
        assert!(sp.insert(vec![s("0"), s("1"), s("1")]));
        assert!(!sp.insert(vec![s("1"), s("3"), s("1")]));
        assert_eq!(sp.dim(), 2);
        assert!(sp.contains(&[s("2"), s("5"), s("1")]));
        assert!(!sp.contains(&[s("0"), s("0"), s("1")]));
    }
}
