use std::collections::BTreeMap;

use crate::error::Result;
use crate::ring::{LatticeRing, LengthFunction, Ring};
use crate::scalars::LengthValue;

/// Sparse vector: position → nonzero entry.
pub type SVec<E> = BTreeMap<usize, E>;

pub(crate) fn lin2<R: Ring>(ring: &R, p: &R::Elem, a: &SVec<R::Elem>, q: &R::Elem, b: &SVec<R::Elem>) -> SVec<R::Elem> {
    let mut out = SVec::new();
    let pz = ring.is_zero(p);
    let qz = ring.is_zero(q);
    if !pz {
        for (&i, x) in a {
            let t = ring.mul(p, x);
            if !ring.is_zero(&t) {
                out.insert(i, t);
            }
        }
    }
    if !qz {
        for (&i, y) in b {
            let t = ring.mul(q, y);
            let s = match out.get(&i) {
                Some(x) => ring.add(x, &t),
                None => t,
            };
            if ring.is_zero(&s) {
                out.remove(&i);
            } else {
                out.insert(i, s);
            }
        }
    }
    out
}

pub(crate) fn scale<R: Ring>(ring: &R, c: &R::Elem, a: &SVec<R::Elem>) -> SVec<R::Elem> {
    lin2(ring, c, a, &ring.zero(), &SVec::new())
}

/// `a - q·b`.
pub(crate) fn sub_mul<R: Ring>(ring: &R, a: &SVec<R::Elem>, q: &R::Elem, b: &SVec<R::Elem>) -> SVec<R::Elem> {
    lin2(ring, &ring.one(), a, &ring.neg(q), b)
}

pub(crate) fn from_dense<R: Ring>(ring: &R, v: &[R::Elem]) -> SVec<R::Elem> {
    v.iter().enumerate().filter(|(_, e)| !ring.is_zero(e)).map(|(i, e)| (i, e.clone())).collect()
}

pub(crate) fn to_dense<R: Ring>(ring: &R, v: &SVec<R::Elem>, dim: usize) -> Vec<R::Elem> {
    let mut out = vec![ring.zero(); dim];
    for (&i, e) in v {
        out[i] = e.clone();
    }
    out
}

pub(crate) fn shift_positions<E: Clone>(v: &SVec<E>, by: usize) -> SVec<E> {
    v.iter().map(|(&i, e)| (i + by, e.clone())).collect()
}

/// A submodule of `R^dim` in lower-echelon (Hermite) form: at most one basis
/// vector per leading position. When `modulus` is set the lattice contains
/// `modulus·R^dim` and entries are kept reduced modulo it.
#[derive(Clone, Debug)]
pub struct Lattice<R: LatticeRing> {
    ring: R,
    dim: usize,
    modulus: Option<R::Elem>,
    basis: Vec<Option<SVec<R::Elem>>>,
    canonical: bool,
}

impl<R: LatticeRing> Lattice<R> {
    pub fn new(ring: &R, dim: usize, modulus: Option<R::Elem>) -> Self {
        let basis = match &modulus {
            Some(m) => (0..dim).map(|k| Some(SVec::from([(k, m.clone())]))).collect(),
            None => vec![None; dim],
        };
        let mut l = Lattice { ring: ring.clone(), dim, modulus, basis, canonical: true };
        l.canonicalize();
        l
    }

    pub fn from_vectors(ring: &R, dim: usize, modulus: Option<R::Elem>, vs: impl IntoIterator<Item = SVec<R::Elem>>) -> Self {
        let mut l = Self::new(ring, dim, modulus);
        l.insert_all(vs);
        l
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modulus(&self) -> Option<&R::Elem> {
        self.modulus.as_ref()
    }

    /// False only over the valuation engine without a modulus, when some
    /// pivot is not a monomial; equality then falls back to containment.
    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn vectors(&self) -> impl Iterator<Item = &SVec<R::Elem>> {
        self.basis.iter().flatten()
    }

    pub fn pivot(&self, k: usize) -> Option<&R::Elem> {
        self.basis[k].as_ref().map(|b| &b[&k])
    }

    pub fn rank(&self) -> usize {
        self.basis.iter().flatten().count()
    }

    fn reduce_entries(&self, v: &mut SVec<R::Elem>, keep: Option<usize>) {
        if let Some(m) = &self.modulus {
            let ring = &self.ring;
            v.retain(|&i, e| {
                if Some(i) != keep {
                    *e = ring.reduce_mod(e, m);
                }
                !ring.is_zero(e)
            });
        }
    }

    fn insert_raw(&mut self, mut w: SVec<R::Elem>) {
        self.reduce_entries(&mut w, None);
        let ring = self.ring.clone();
        while let Some((&k, wk)) = w.iter().next() {
            let wk = wk.clone();
            match self.basis[k].take() {
                None => {
                    self.basis[k] = Some(w);
                    return;
                }
                Some(b) => {
                    let bz = ring.bezout(&b[&k], &wk);
                    let nb = if ring.is_zero(&bz.q) && bz.p == ring.one() {
                        b.clone()
                    } else {
                        let mut nb = lin2(&ring, &bz.p, &b, &bz.q, &w);
                        self.reduce_entries(&mut nb, Some(k));
                        nb
                    };
                    let mut nw = lin2(&ring, &bz.r, &b, &bz.s, &w);
                    nw.remove(&k);
                    self.reduce_entries(&mut nw, None);
                    self.basis[k] = Some(nb);
                    w = nw;
                }
            }
        }
    }

    /// Inserts vectors and restores canonical form. Returns whether the
    /// lattice grew.
    pub fn insert_all(&mut self, vs: impl IntoIterator<Item = SVec<R::Elem>>) -> bool {
        let mut changed = false;
        for v in vs {
            if !self.contains(&v) {
                self.insert_raw(v);
                changed = true;
            }
        }
        if changed {
            self.canonicalize();
        }
        changed
    }

    pub fn insert(&mut self, v: SVec<R::Elem>) -> bool {
        self.insert_all(std::iter::once(v))
    }

    fn canonicalize(&mut self) {
        let ring = self.ring.clone();
        let mut canonical = true;
        let mut exact_pivot = vec![false; self.dim];
        for k in 0..self.dim {
            let Some(b) = self.basis[k].take() else { continue };
            let nb = match ring.normal_unit(&b[&k], self.modulus.as_ref()) {
                Some(u) => {
                    let mut nb = scale(&ring, &u, &b);
                    let g = ring.ideal_generator(&b[&k]);
                    if self.modulus.is_some() || nb[&k] == g {
                        nb.insert(k, g);
                        exact_pivot[k] = true;
                    }
                    self.reduce_entries(&mut nb, Some(k));
                    nb
                }
                None => b,
            };
            canonical &= exact_pivot[k];
            self.basis[k] = Some(nb);
        }
        for j in 0..self.dim {
            let Some(mut b) = self.basis[j].take() else { continue };
            let mut cursor = j + 1;
            loop {
                let next = b.range(cursor..).map(|(&k, _)| k).find(|&k| exact_pivot[k]);
                let Some(k) = next else { break };
                let pk = self.basis[k].as_ref().unwrap();
                let q = ring.residue_quotient(&b[&k], &pk[&k]);
                if !ring.is_zero(&q) {
                    b = sub_mul(&ring, &b, &q, pk);
                    self.reduce_entries(&mut b, Some(j));
                }
                cursor = k + 1;
            }
            self.basis[j] = Some(b);
        }
        self.canonical = canonical;
    }

    /// Membership by echelon elimination; only unit multiples of the target
    /// are formed, so no division is needed.
    pub fn contains(&self, v: &SVec<R::Elem>) -> bool {
        let ring = &self.ring;
        let mut w = v.clone();
        self.reduce_entries(&mut w, None);
        while let Some((&k, wk)) = w.iter().next() {
            let Some(b) = &self.basis[k] else { return false };
            if !ring.divides(&b[&k], wk) {
                return false;
            }
            let bz = ring.bezout(&b[&k], wk);
            debug_assert!(ring.is_unit(&bz.s));
            let mut nw = lin2(ring, &bz.r, b, &bz.s, &w);
            nw.remove(&k);
            self.reduce_entries(&mut nw, None);
            w = nw;
        }
        true
    }

    pub fn contains_lattice(&self, other: &Self) -> bool {
        other.vectors().all(|v| self.contains(v))
    }

    /// `L(R^dim / Λ)`, summed over the echelon positions.
    pub fn index_length(&self, lf: LengthFunction) -> Result<LengthValue> {
        let mut acc = LengthValue::zero();
        for k in 0..self.dim {
            let d = match &self.basis[k] {
                Some(b) => b[&k].clone(),
                None => self.ring.zero(),
            };
            acc = acc.plus(&self.ring.cyclic_length(lf, &d)?);
            if acc.is_infinite() {
                break;
            }
        }
        Ok(acc)
    }

    /// Block-diagonal union of lattices on consecutive coordinate ranges.
    pub fn direct_sum(ring: &R, parts: &[&Self], modulus: Option<R::Elem>) -> Self {
        let dim = parts.iter().map(|p| p.dim).sum();
        let mut basis = Vec::with_capacity(dim);
        let mut canonical = true;
        let mut off = 0;
        for p in parts {
            canonical &= p.canonical;
            for b in &p.basis {
                basis.push(b.as_ref().map(|v| shift_positions(v, off)));
            }
            off += p.dim;
        }
        Lattice { ring: ring.clone(), dim, modulus, basis, canonical }
    }

}

impl<R: LatticeRing> PartialEq for Lattice<R> {
    fn eq(&self, other: &Self) -> bool {
        if self.dim != other.dim {
            return false;
        }
        if self.canonical && other.canonical {
            return self.basis == other.basis;
        }
        self.contains_lattice(other) && other.contains_lattice(self)
    }
}

/// Generators of `{c ∈ R^n : Σ c_j·cols[j] = 0}` where each column lives in
/// `R^rows`; column-echelon reduction of the stacked matrix `[A; I]`.
pub(crate) fn kernel_vectors<R: Ring>(ring: &R, cols: &[SVec<R::Elem>], rows: usize) -> Vec<SVec<R::Elem>> {
    let n = cols.len();
    let mut pivots: Vec<Option<SVec<R::Elem>>> = vec![None; rows];
    let mut kernel = Vec::new();
    for (j, c) in cols.iter().enumerate() {
        let mut w = c.clone();
        w.insert(rows + j, ring.one());
        loop {
            let head = w.keys().next().copied().filter(|&k| k < rows);
            let Some(k) = head else {
                let kv: SVec<R::Elem> = w.iter().map(|(&i, e)| (i - rows, e.clone())).collect();
                if !kv.is_empty() {
                    kernel.push(kv);
                }
                break;
            };
            match pivots[k].take() {
                None => {
                    pivots[k] = Some(w);
                    break;
                }
                Some(b) => {
                    let bz = ring.bezout(&b[&k], &w[&k]);
                    let nb = lin2(ring, &bz.p, &b, &bz.q, &w);
                    let mut nw = lin2(ring, &bz.r, &b, &bz.s, &w);
                    nw.remove(&k);
                    pivots[k] = Some(nb);
                    w = nw;
                }
            }
        }
    }
    debug_assert!(kernel.iter().all(|v| v.keys().all(|&i| i < n)));
    kernel
}

/// A generator of the ideal generated by `elems` (a gcd over Bézout rings).
pub(crate) fn ideal_sum<R: Ring>(ring: &R, elems: impl IntoIterator<Item = R::Elem>) -> R::Elem {
    elems.into_iter().fold(ring.zero(), |g, e| ring.bezout(&g, &e).g)
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;
    use crate::ring::{Integers, ValElement, Valuation};
    use crate::scalars::rat;

    fn zv(v: &[i64]) -> SVec<BigInt> {
        from_dense(&Integers, &v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
    }

    #[test]
    fn hermite_form_is_canonical() {
        let a = Lattice::from_vectors(&Integers, 2, None, [zv(&[2, 1]), zv(&[0, 3])]);
        let b = Lattice::from_vectors(&Integers, 2, None, [zv(&[2, 4]), zv(&[4, 5]), zv(&[0, 3])]);
        assert_eq!(a.basis, b.basis);
        assert_eq!(a.index_length(LengthFunction::LogCard).unwrap().to_string(), "log(2)+log(3)");
    }

    #[test]
    fn membership() {
        let l = Lattice::from_vectors(&Integers, 2, None, [zv(&[2, 1]), zv(&[0, 3])]);
        assert!(l.contains(&zv(&[4, 5])));
        assert!(!l.contains(&zv(&[1, 0])));
        assert!(!l.contains(&zv(&[0, 1])));
    }

    #[test]
    fn kernel_of_integer_matrix() {
        // columns (2, 4) and (1, 2): kernel spanned by (1, -2)
        let k = kernel_vectors(&Integers, &[zv(&[2, 4]), zv(&[1, 2])], 2);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert_eq!(&v[&0] * BigInt::from(2) + &v[&1], BigInt::from(0));
    }

    #[test]
    fn valuation_lattice_with_modulus() {
        let x = |n, d| ValElement::monomial(rat(n, d));
        let m = x(2, 1);
        let mut l = Lattice::new(&Valuation, 1, Some(m));
        l.insert(SVec::from([(0, x(1, 2).add(&x(1, 1)))]));
        assert_eq!(l.pivot(0), Some(&x(1, 2)));
        assert!(l.is_canonical());
        assert_eq!(l.index_length(LengthFunction::Valuation).unwrap(), LengthValue::rational(rat(1, 2)));
    }
}
