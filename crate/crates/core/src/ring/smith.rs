use serde::Serialize;

use super::{Bezout, Matrix, Ring};

/// `left · A · right = diag(diagonal, 0, …)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmithForm<E> {
    /// Nonzero invariants, each dividing the next.
    pub diagonal: Vec<E>,
    /// Rows of `A` minus the number of nonzero invariants: the free rank of `coker A`.
    pub free_rank: usize,
    #[serde(skip)]
    pub left: Matrix<E>,
    #[serde(skip)]
    pub right: Matrix<E>,
    #[serde(skip)]
    pub reduced: Matrix<E>,
}

fn pick_pivot<R: Ring>(ring: &R, d: &Matrix<R::Elem>, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<((crate::scalars::Rational, usize), usize, usize)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            if let Some(k) = ring.pivot_key(&d[(i, j)]) {
                let k = (k, ring.pivot_cost(&d[(i, j)]));
                if best.as_ref().map_or(true, |(b, _, _)| k < *b) {
                    best = Some((k, i, j));
                }
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Diagonalizes `a` by unimodular row and column operations. The pivot at
/// each stage is an entry of globally minimal [`Ring::pivot_key`], then
/// [`Ring::pivot_cost`] (lowest row, then column, on ties); if it fails to divide the rest of the block, the
/// offending row is folded in and the stage repeats.
pub fn smith_reduce<R: Ring>(ring: &R, a: &Matrix<R::Elem>) -> SmithForm<R::Elem> {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = Matrix::identity(ring, m);
    let mut v = Matrix::identity(ring, n);
    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = pick_pivot(ring, &d, t) else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if !ring.is_zero(&d[(i, t)]) {
                    let bz = ring.bezout(&d[(t, t)], &d[(i, t)]);
                    d.row_op(ring, t, i, &bz);
                    u.row_op(ring, t, i, &bz);
                }
            }
            for j in t + 1..n {
                if !ring.is_zero(&d[(t, j)]) {
                    let bz = ring.bezout(&d[(t, t)], &d[(t, j)]);
                    d.col_op(ring, t, j, &bz);
                    v.col_op(ring, t, j, &bz);
                    dirty = true;
                }
            }
            if dirty && (t + 1..m).any(|i| !ring.is_zero(&d[(i, t)])) {
                continue;
            }
            // fold in a row the pivot does not divide
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !ring.divides(&d[(t, t)], &d[(i, j)])));
            match bad {
                Some(i) => {
                    let add = Bezout { p: ring.one(), q: ring.one(), r: ring.zero(), s: ring.one(), g: ring.zero() };
                    d.row_op(ring, t, i, &add);
                    u.row_op(ring, t, i, &add);
                }
                None => break,
            }
        }
        t += 1;
    }
    let diagonal: Vec<_> = (0..t).map(|i| d[(i, i)].clone()).collect();
    SmithForm { free_rank: m - diagonal.len(), diagonal, left: u, right: v, reduced: d }
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;
    use num_traits::Signed;

    use super::*;
    use crate::ring::{Integers, PrimeField, ValElement, Valuation};
    use crate::scalars::rat;

    fn zmat(rows: &[&[i64]]) -> Matrix<BigInt> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()).unwrap()
    }

    fn check<R: Ring>(ring: &R, a: &Matrix<R::Elem>, s: &SmithForm<R::Elem>) {
        let prod = s.left.mul(ring, a).unwrap().mul(ring, &s.right).unwrap();
        assert_eq!(prod, s.reduced);
        for i in 0..prod.rows() {
            for j in 0..prod.cols() {
                if i != j {
                    assert!(ring.is_zero(&prod[(i, j)]));
                }
            }
        }
        assert!(ring.is_unit(&s.left.det(ring)));
        assert!(ring.is_unit(&s.right.det(ring)));
    }

    #[test]
    fn integer_example() {
        let a = zmat(&[&[2, 1], &[0, 3]]);
        let s = smith_reduce(&Integers, &a);
        check(&Integers, &a, &s);
        let inv: Vec<_> = s.diagonal.iter().map(|d| d.abs()).collect();
        assert_eq!(inv, vec![BigInt::from(1), BigInt::from(6)]);
        assert_eq!(s.free_rank, 0);
    }

    #[test]
    fn integer_divisibility_chain() {
        let a = zmat(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 4]]);
        let s = smith_reduce(&Integers, &a);
        check(&Integers, &a, &s);
        let inv: Vec<_> = s.diagonal.iter().map(|d| d.abs()).collect();
        assert_eq!(inv, vec![BigInt::from(1), BigInt::from(2), BigInt::from(12)]);
    }

    #[test]
    fn valuation_example() {
        let x = |n, d| ValElement::monomial(rat(n, d));
        let a = Matrix::from_rows(vec![vec![x(1, 2), x(1, 1)], vec![x(3, 2), x(1, 3)]]).unwrap();
        let s = smith_reduce(&Valuation, &a);
        check(&Valuation, &a, &s);
        let vals: Vec<_> = s.diagonal.iter().map(|d| d.valuation().unwrap().clone()).collect();
        assert_eq!(vals, vec![rat(1, 3), rat(1, 2)]);
    }

    #[test]
    fn prime_field_zero() {
        let f = PrimeField::new(5).unwrap();
        let a = Matrix::from_rows(vec![vec![0u64]]).unwrap();
        let s = smith_reduce(&f, &a);
        assert!(s.diagonal.is_empty());
        assert_eq!(s.free_rank, 1);
    }

    #[test]
    fn empty_relations() {
        let a: Matrix<BigInt> = Matrix::zeros(&Integers, 3, 0);
        let s = smith_reduce(&Integers, &a);
        assert_eq!(s.free_rank, 3);
    }
}
