use std::sync::Arc;

use super::{from_dense, kernel_vectors, lin2, to_dense, FPModule, SVec, Submodule};
use crate::error::{Error, Result};
use crate::ring::{LatticeRing, Matrix};

/// A homomorphism given by the images of the source generators.
#[derive(Clone, Debug)]
pub struct Morphism<R: LatticeRing> {
    source: Arc<FPModule<R>>,
    target: Arc<FPModule<R>>,
    cols: Vec<SVec<R::Elem>>,
}

impl<R: LatticeRing> Morphism<R> {
    /// Checks that every source relation lands in the target relations.
    pub fn new(source: &Arc<FPModule<R>>, target: &Arc<FPModule<R>>, cols: Vec<SVec<R::Elem>>) -> Result<Self> {
        if cols.len() != source.gens() {
            return Err(Error::Dimension(format!("{} images for {} generators", cols.len(), source.gens())));
        }
        if let Some(c) = cols.iter().find(|c| c.keys().any(|&i| i >= target.gens())) {
            return Err(Error::Dimension(format!("image {c:?} outside a target with {} generators", target.gens())));
        }
        let f = Self::new_unchecked(source, target, cols);
        for r in source.relations().vectors() {
            if !target.relations().contains(&f.apply(r)) {
                return Err(Error::NotAMorphism(format!(
                    "relation {:?} maps outside the target relations",
                    to_dense(source.ring(), r, source.gens())
                )));
            }
        }
        Ok(f)
    }

    /// From a `target.gens × source.gens` matrix.
    pub fn from_matrix(source: &Arc<FPModule<R>>, target: &Arc<FPModule<R>>, m: &Matrix<R::Elem>) -> Result<Self> {
        if m.rows() != target.gens() || m.cols() != source.gens() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix for a map from {} to {} generators",
                m.rows(),
                m.cols(),
                source.gens(),
                target.gens()
            )));
        }
        let cols = (0..m.cols()).map(|j| from_dense(source.ring(), &m.col(j))).collect();
        Self::new(source, target, cols)
    }

    pub(crate) fn new_unchecked(source: &Arc<FPModule<R>>, target: &Arc<FPModule<R>>, cols: Vec<SVec<R::Elem>>) -> Self {
        Morphism { source: source.clone(), target: target.clone(), cols }
    }

    pub fn identity(m: &Arc<FPModule<R>>) -> Self {
        let cols = (0..m.gens()).map(|i| m.basis_vector(i)).collect();
        Self::new_unchecked(m, m, cols)
    }

    pub fn scalar(m: &Arc<FPModule<R>>, c: &R::Elem) -> Self {
        let ring = m.ring();
        let cols = (0..m.gens()).map(|i| super::scale(ring, c, &m.basis_vector(i))).collect();
        Self::new_unchecked(m, m, cols)
    }

    pub fn zero(source: &Arc<FPModule<R>>, target: &Arc<FPModule<R>>) -> Self {
        Self::new_unchecked(source, target, vec![SVec::new(); source.gens()])
    }

    pub fn source(&self) -> &Arc<FPModule<R>> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FPModule<R>> {
        &self.target
    }

    pub fn columns(&self) -> &[SVec<R::Elem>] {
        &self.cols
    }

    pub fn matrix(&self) -> Matrix<R::Elem> {
        let ring = self.source.ring();
        let mut m = Matrix::zeros(ring, self.target.gens(), self.source.gens());
        for (j, c) in self.cols.iter().enumerate() {
            for (&i, e) in c {
                m[(i, j)] = e.clone();
            }
        }
        m
    }

    pub fn apply(&self, v: &SVec<R::Elem>) -> SVec<R::Elem> {
        let ring = self.source.ring();
        let mut acc = SVec::new();
        for (&j, x) in v {
            acc = lin2(ring, &ring.one(), &acc, x, &self.cols[j]);
        }
        acc
    }

    pub fn image(&self, s: &Submodule<R>) -> Result<Submodule<R>> {
        if **s.ambient() != *self.source {
            return Err(Error::AmbientMismatch);
        }
        Submodule::generated(&self.target, s.generators().iter().map(|g| self.apply(g)))
    }

    pub fn kernel(&self) -> Submodule<R> {
        let ring = self.source.ring();
        let g = self.source.gens();
        let mut cols = self.cols.clone();
        cols.extend(self.target.relations().vectors().cloned());
        let ker = kernel_vectors(ring, &cols, self.target.gens());
        let gens = ker.into_iter().map(|v| v.into_iter().filter(|(i, _)| *i < g).collect::<SVec<_>>());
        Submodule::generated(&self.source, gens).expect("kernel vectors lie in the source")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if *other.target != *self.source {
            return Err(Error::AmbientMismatch);
        }
        let cols = other.cols.iter().map(|c| self.apply(c)).collect();
        Ok(Self::new_unchecked(&other.source, &self.target, cols))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if *other.source != *self.source || *other.target != *self.target {
            return Err(Error::AmbientMismatch);
        }
        let ring = self.source.ring();
        let cols = self.cols.iter().zip(&other.cols).map(|(a, b)| lin2(ring, &ring.one(), a, &ring.one(), b)).collect();
        Ok(Self::new_unchecked(&self.source, &self.target, cols))
    }

    pub fn power(&self, n: usize) -> Result<Self> {
        if *self.source != *self.target {
            return Err(Error::Invalid("power of a map between different modules".into()));
        }
        let mut acc = Self::identity(&self.source);
        for _ in 0..n {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Equality as maps of modules: images agree modulo the target relations.
    pub fn same_map(&self, other: &Self) -> bool {
        let ring = self.source.ring();
        *self.source == *other.source
            && *self.target == *other.target
            && self
                .cols
                .iter()
                .zip(&other.cols)
                .all(|(a, b)| self.target.relations().contains(&lin2(ring, &ring.one(), a, &ring.neg(&ring.one()), b)))
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_zero()
    }

    pub fn is_surjective(&self) -> bool {
        let whole = self.target.whole();
        (0..self.source.gens()).fold(self.target.zero_sub(), |mut s, j| {
            s.extend([self.cols[j].clone()]);
            s
        }) == whole
    }

    /// The inverse of a bijective map, solved one target generator at a time.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_injective() || !self.is_surjective() {
            return Err(Error::NotInvertible);
        }
        let ring = self.source.ring();
        let gt = self.target.gens();
        let gs = self.source.gens();
        let mut cols = Vec::with_capacity(gt);
        for i in 0..gt {
            // Σ c_j f(e_j) + Σ d_k r_k + t·e_i = 0 with t generating R gives f(c) = −t·e_i
            let mut sys: Vec<SVec<R::Elem>> = self.cols.clone();
            sys.extend(self.target.relations().vectors().cloned());
            sys.push(self.target.basis_vector(i));
            let last = sys.len() - 1;
            let mut acc = SVec::new();
            for v in kernel_vectors(ring, &sys, gt) {
                let a = acc.get(&last).cloned().unwrap_or_else(|| ring.zero());
                let b = v.get(&last).cloned().unwrap_or_else(|| ring.zero());
                let bz = ring.bezout(&a, &b);
                acc = lin2(ring, &bz.p, &acc, &bz.q, &v);
            }
            let t = acc.get(&last).cloned().unwrap_or_else(|| ring.zero());
            let u = ring.normal_unit(&t, self.source.modulus()).ok_or(Error::NotInvertible)?;
            let coeffs: SVec<R::Elem> = acc.into_iter().filter(|(j, _)| *j < gs).collect();
            let col = super::scale(ring, &ring.neg(&u), &coeffs);
            cols.push(col);
        }
        let inv = Self::new_unchecked(&self.target, &self.source, cols);
        if !self.compose(&inv)?.same_map(&Self::identity(&self.target)) {
            return Err(Error::NotInvertible);
        }
        Ok(inv)
    }
}
