use super::Ring;
use crate::error::{Error, Result};

/// Dense row-major matrix. Arithmetic goes through a [`Ring`] handle since
/// element types (e.g. residues mod p) do not carry their ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn filled(rows: usize, cols: usize, e: E) -> Self {
        Matrix { rows, cols, data: vec![e; rows * cols] }
    }

    pub fn zeros<R: Ring<Elem = E>>(ring: &R, rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, ring.zero())
    }

    pub fn identity<R: Ring<Elem = E>>(ring: &R, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m[(i, i)] = ring.one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<E>]) -> Result<Self>
    where
        E: Default,
    {
        let mut data = vec![E::default(); rows * cols.len()];
        for (j, c) in cols.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::Dimension(format!("column of length {} in {}-row matrix", c.len(), rows)));
            }
            for (i, e) in c.iter().enumerate() {
                data[i * cols.len() + j] = e.clone();
            }
        }
        Ok(Matrix { rows, cols: cols.len(), data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn col_vecs(&self) -> Vec<Vec<E>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Horizontal concatenation.
    pub fn hcat(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!("hcat {}x{} with {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut rows = self.to_rows();
        for (r, o) in rows.iter_mut().zip(other.to_rows()) {
            r.extend(o);
        }
        let cols = self.cols + other.cols;
        Ok(Matrix { rows: self.rows, cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn submatrix_cols(&self, range: std::ops::Range<usize>) -> Self {
        let cols = range.len();
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            for j in range.clone() {
                data.push(self[(i, j)].clone());
            }
        }
        Matrix { rows: self.rows, cols, data }
    }

    pub fn submatrix_rows(&self, range: std::ops::Range<usize>) -> Self {
        let rows = range.len();
        let data = self.data[range.start * self.cols..range.end * self.cols].to_vec();
        Matrix { rows, cols: self.cols, data }
    }

    pub fn map<F, R2>(&self, f: F) -> Matrix<R2>
    where
        F: FnMut(&E) -> R2,
    {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<E: Clone> Matrix<E> {
    pub fn mul<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if ring.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if ring.is_zero(b) {
                        continue;
                    }
                    let t = ring.mul(a, b);
                    out[(i, j)] = ring.add(&out[(i, j)], &t);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec<R: Ring<Elem = E>>(&self, ring: &R, v: &[E]) -> Vec<E> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = ring.zero();
                for (k, x) in v.iter().enumerate() {
                    let a = &self[(i, k)];
                    if ring.is_zero(a) || ring.is_zero(x) {
                        continue;
                    }
                    acc = ring.add(&acc, &ring.mul(a, x));
                }
                acc
            })
            .collect()
    }

    pub fn is_zero_matrix<R: Ring<Elem = E>>(&self, ring: &R) -> bool {
        self.data.iter().all(|e| ring.is_zero(e))
    }

    /// Applies the unimodular step `[[p,q],[r,s]]` to rows `a`, `b`.
    pub fn row_op<R: Ring<Elem = E>>(&mut self, ring: &R, a: usize, b: usize, t: &super::Bezout<E>) {
        for j in 0..self.cols {
            let x = self[(a, j)].clone();
            let y = self[(b, j)].clone();
            if ring.is_zero(&x) && ring.is_zero(&y) {
                continue;
            }
            self[(a, j)] = ring.add(&ring.mul(&t.p, &x), &ring.mul(&t.q, &y));
            self[(b, j)] = ring.add(&ring.mul(&t.r, &x), &ring.mul(&t.s, &y));
        }
    }

    /// Applies the unimodular step to columns `a`, `b`.
    pub fn col_op<R: Ring<Elem = E>>(&mut self, ring: &R, a: usize, b: usize, t: &super::Bezout<E>) {
        for i in 0..self.rows {
            let x = self[(i, a)].clone();
            let y = self[(i, b)].clone();
            if ring.is_zero(&x) && ring.is_zero(&y) {
                continue;
            }
            self[(i, a)] = ring.add(&ring.mul(&t.p, &x), &ring.mul(&t.q, &y));
            self[(i, b)] = ring.add(&ring.mul(&t.r, &x), &ring.mul(&t.s, &y));
        }
    }

    /// Determinant by fraction-free cofactor expansion; only for small matrices.
    pub fn det<R: Ring<Elem = E>>(&self, ring: &R) -> E {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        fn rec<R: Ring>(ring: &R, m: &[Vec<R::Elem>]) -> R::Elem {
            let n = m.len();
            if n == 0 {
                return ring.one();
            }
            if n == 1 {
                return m[0][0].clone();
            }
            let mut acc = ring.zero();
            for j in 0..n {
                if ring.is_zero(&m[0][j]) {
                    continue;
                }
                let minor: Vec<Vec<R::Elem>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, e)| e.clone()).collect())
                    .collect();
                let t = ring.mul(&m[0][j], &rec(ring, &minor));
                acc = if j % 2 == 0 { ring.add(&acc, &t) } else { ring.sub(&acc, &t) };
            }
            acc
        }
        rec(ring, &self.to_rows())
    }
}

impl<E> std::ops::Index<(usize, usize)> for Matrix<E> {
    type Output = E;
    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.data[i * self.cols + j]
    }
}

impl<E> std::ops::IndexMut<(usize, usize)> for Matrix<E> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.data[i * self.cols + j]
    }
}
