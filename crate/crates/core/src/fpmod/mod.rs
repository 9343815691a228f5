//! Finitely presented modules `R^g / Λ`, their submodules and morphisms.
//!
//! A module is stored through the canonical form of its relation lattice
//! `Λ ⊆ R^g`; a submodule `S ≤ M` through the canonical form of its preimage
//! `S̃ = S + Λ`. Lengths are read off the echelon pivots.

mod lattice;
mod morphism;
mod submodule;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::{Integers, LatticeRing, LengthFunction, Matrix};
use crate::scalars::LengthValue;

pub use lattice::{Lattice, SVec};
pub(crate) use lattice::{from_dense, ideal_sum, kernel_vectors, lin2, scale, shift_positions, to_dense};
pub use morphism::Morphism;
pub use submodule::{SubCompare, Submodule};

#[derive(Clone, Debug)]
pub struct FPModule<R: LatticeRing> {
    ring: R,
    gens: usize,
    relations: Lattice<R>,
}

impl<R: LatticeRing> PartialEq for FPModule<R> {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens && self.relations == other.relations
    }
}

/// The annihilator generator of `coker A` when it is torsion.
fn torsion_modulus<R: LatticeRing>(ring: &R, gens: usize, rel_cols: &[SVec<R::Elem>]) -> Option<R::Elem> {
    if gens == 0 {
        return None;
    }
    let dense: Vec<Vec<R::Elem>> = rel_cols.iter().map(|c| to_dense(ring, c, gens)).collect();
    let a = Matrix::from_rows(dense).ok()?.transpose();
    let a = if rel_cols.is_empty() { Matrix::zeros(ring, gens, 0) } else { a };
    let s = crate::ring::smith_reduce(ring, &a);
    if s.free_rank > 0 {
        return None;
    }
    let mut m = ring.one();
    for d in &s.diagonal {
        m = ring.lcm_like(&m, &ring.ideal_generator(d));
    }
    Some(m)
}

impl<R: LatticeRing> FPModule<R> {
    /// `R^gens / ⟨rel_cols⟩`; each relation is a vector of length `gens`.
    pub fn from_relations(ring: &R, gens: usize, rel_cols: &[Vec<R::Elem>]) -> Result<Self> {
        if let Some(c) = rel_cols.iter().find(|c| c.len() != gens) {
            return Err(Error::Dimension(format!("relation of length {} for {} generators", c.len(), gens)));
        }
        let sparse: Vec<_> = rel_cols.iter().map(|c| from_dense(ring, c)).collect();
        let modulus = torsion_modulus(ring, gens, &sparse);
        let relations = Lattice::from_vectors(ring, gens, modulus, sparse);
        Ok(FPModule { ring: ring.clone(), gens, relations })
    }

    /// Presentation given as a `gens × r` matrix whose columns are the relations.
    pub fn from_matrix(ring: &R, a: &Matrix<R::Elem>) -> Result<Self> {
        Self::from_relations(ring, a.rows(), &a.col_vecs())
    }

    pub fn free(ring: &R, gens: usize) -> Self {
        FPModule { ring: ring.clone(), gens, relations: Lattice::new(ring, gens, None) }
    }

    pub fn zero(ring: &R) -> Self {
        Self::free(ring, 0)
    }

    /// `R / dR`.
    pub fn cyclic(ring: &R, d: R::Elem) -> Self {
        Self::from_relations(ring, 1, &[vec![d]]).expect("one relation of length one")
    }

    /// `⊕ R / d_i R`.
    pub fn diagonal(ring: &R, ds: &[R::Elem]) -> Self {
        let parts: Vec<_> = ds.iter().map(|d| Self::cyclic(ring, d.clone())).collect();
        Self::direct_sum(ring, &parts.iter().collect::<Vec<_>>())
    }

    pub(crate) fn from_lattice(ring: &R, relations: Lattice<R>) -> Self {
        FPModule { ring: ring.clone(), gens: relations.dim(), relations }
    }

    pub fn direct_sum(ring: &R, parts: &[&Self]) -> Self {
        let mut modulus = Some(ring.one());
        for p in parts.iter().filter(|p| p.gens > 0) {
            modulus = match (modulus, p.relations.modulus()) {
                (Some(a), Some(b)) => Some(ring.lcm_like(&a, b)),
                _ => None,
            };
        }
        let lats: Vec<_> = parts.iter().map(|p| &p.relations).collect();
        let gens: usize = parts.iter().map(|p| p.gens).sum();
        let modulus = if gens == 0 { None } else { modulus };
        FPModule { ring: ring.clone(), gens, relations: Lattice::direct_sum(ring, &lats, modulus) }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn gens(&self) -> usize {
        self.gens
    }

    pub fn relations(&self) -> &Lattice<R> {
        &self.relations
    }

    /// An element annihilating the module, when it is torsion.
    pub fn modulus(&self) -> Option<&R::Elem> {
        self.relations.modulus()
    }

    /// Rank of the free part of the module.
    pub fn free_rank(&self) -> usize {
        self.gens - self.relations.rank()
    }

    pub fn is_zero_module(&self) -> bool {
        self.relations.rank() == self.gens
            && (0..self.gens).all(|k| self.relations.pivot(k).is_some_and(|p| self.ring.is_unit(p)))
    }

    /// `L(M) = Σ L(R / I_k)` over the echelon pivots `I_k` of the relations.
    pub fn length(&self, lf: LengthFunction) -> Result<LengthValue> {
        self.ring.check_length(lf)?;
        self.relations.index_length(lf)
    }

    /// Every f.g. submodule has finite length: either `L(R) < ∞` or `M` is torsion.
    pub fn is_locally_finite(&self, lf: LengthFunction) -> Result<bool> {
        let lr = self.ring.cyclic_length(lf, &self.ring.zero())?;
        Ok(lr.is_finite() || self.free_rank() == 0)
    }

    /// Length of the largest submodule with finite length: the torsion part
    /// if `L(R) = ∞`, the whole module otherwise.
    pub fn finite_part_length(&self, lf: LengthFunction) -> Result<LengthValue> {
        self.ring.check_length(lf)?;
        let lr = self.ring.cyclic_length(lf, &self.ring.zero())?;
        if lr.is_finite() {
            return self.length(lf);
        }
        let mut acc = LengthValue::zero();
        for k in 0..self.gens {
            if let Some(p) = self.relations.pivot(k) {
                acc = acc.plus(&self.ring.cyclic_length(lf, p)?);
            }
        }
        Ok(acc)
    }

    pub fn element(&self, v: &[R::Elem]) -> Result<SVec<R::Elem>> {
        if v.len() != self.gens {
            return Err(Error::Dimension(format!("element of length {} in module with {} generators", v.len(), self.gens)));
        }
        Ok(from_dense(&self.ring, v))
    }

    pub fn basis_vector(&self, i: usize) -> SVec<R::Elem> {
        SVec::from([(i, self.ring.one())])
    }

    pub fn is_zero_element(&self, v: &SVec<R::Elem>) -> bool {
        self.relations.contains(v)
    }

    /// The ideal `{r : r·x = 0}`, as a generator.
    pub fn annihilator(&self, x: &SVec<R::Elem>) -> R::Elem {
        colon(&self.ring, x, &self.relations)
    }

    /// The whole module as a submodule of itself.
    pub fn whole(self: &Arc<Self>) -> Submodule<R> {
        Submodule::generated(self, (0..self.gens).map(|i| self.basis_vector(i))).expect("basis vectors lie in the module")
    }

    pub fn zero_sub(self: &Arc<Self>) -> Submodule<R> {
        Submodule::generated(self, std::iter::empty()).expect("empty generating set")
    }

    /// `M / S`, presented by adjoining the generators of `S` to the relations.
    pub fn quotient(self: &Arc<Self>, s: &Submodule<R>) -> Result<FPModule<R>> {
        if !Arc::ptr_eq(s.ambient(), self) && **s.ambient() != **self {
            return Err(Error::AmbientMismatch);
        }
        Ok(FPModule::from_lattice(&self.ring, s.lattice().clone()))
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        for k in 0..self.gens {
            match self.relations.pivot(k) {
                Some(p) if self.ring.is_unit(p) => {}
                Some(p) => parts.push(format!("R/{}", self.ring.fmt_ideal(p))),
                None => parts.push("R".to_string()),
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" ⊕ ")
        }
    }
}

impl FPModule<Integers> {
    /// A module over `ℤ/m` seen as a `ℤ`-module: the relations plus `m·e_i`.
    pub fn over_modular(m: u64, gens: usize, rel_cols: &[Vec<num_bigint::BigInt>]) -> Result<Self> {
        if m < 2 {
            return Err(Error::Invalid(format!("modulus must be at least 2, got {m}")));
        }
        let mut rels = rel_cols.to_vec();
        for i in 0..gens {
            let mut c = vec![num_bigint::BigInt::from(0); gens];
            c[i] = num_bigint::BigInt::from(m);
            rels.push(c);
        }
        Self::from_relations(&Integers, gens, &rels)
    }
}

impl<R: LatticeRing> fmt::Display for FPModule<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Generator of `{r : r·x ∈ Λ}`.
pub(crate) fn colon<R: LatticeRing>(ring: &R, x: &SVec<R::Elem>, lattice: &Lattice<R>) -> R::Elem {
    let mut cols = vec![x.clone()];
    cols.extend(lattice.vectors().cloned());
    let ker = kernel_vectors(ring, &cols, lattice.dim());
    ring.ideal_generator(&ideal_sum(ring, ker.iter().filter_map(|v| v.get(&0).cloned())))
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;
    use crate::ring::{PrimeField, ValElement, Valuation};
    use crate::scalars::rat;

    fn z(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn length_examples() {
        let m = FPModule::from_matrix(&Integers, &Matrix::from_rows(vec![vec![z(2), z(1)], vec![z(0), z(3)]]).unwrap()).unwrap();
        assert_eq!(m.length(LengthFunction::LogCard).unwrap().to_string(), "log(2)+log(3)");
        let x = |n, d| ValElement::monomial(rat(n, d));
        let v = FPModule::diagonal(&Valuation, &[x(1, 3), x(1, 2)]);
        assert_eq!(v.length(LengthFunction::Valuation).unwrap(), LengthValue::rational(rat(5, 6)));
        assert_eq!(FPModule::free(&Integers, 2).length(LengthFunction::Rank).unwrap(), LengthValue::integer(2));
        assert!(FPModule::free(&Integers, 1).length(LengthFunction::LogCard).unwrap().is_infinite());
        assert!(m.length(LengthFunction::Dim).is_err());
    }

    #[test]
    fn local_finiteness() {
        let z1 = FPModule::free(&Integers, 1);
        assert!(!z1.is_locally_finite(LengthFunction::LogCard).unwrap());
        assert!(z1.is_locally_finite(LengthFunction::Rank).unwrap());
        assert!(FPModule::cyclic(&Integers, z(6)).is_locally_finite(LengthFunction::LogCard).unwrap());
        let f = PrimeField::new(5).unwrap();
        assert!(FPModule::free(&f, 3).is_locally_finite(LengthFunction::Dim).unwrap());
        assert!(FPModule::free(&f, 3).length(LengthFunction::Valuation).is_err());
    }

    #[test]
    fn annihilators() {
        let m = FPModule::cyclic(&Integers, z(6));
        assert_eq!(m.annihilator(&m.basis_vector(0)), z(6));
        let x = |n, d| ValElement::monomial(rat(n, d));
        let v = FPModule::cyclic(&Valuation, x(3, 2));
        let a = v.annihilator(&SVec::from([(0, x(1, 2))]));
        assert_eq!(a.valuation(), Some(&rat(1, 1)));
        let free = FPModule::free(&Integers, 2);
        assert_eq!(free.annihilator(&free.basis_vector(1)), z(0));
    }

    #[test]
    fn modular_lift() {
        let m = FPModule::over_modular(4, 2, &[vec![z(2), z(0)]]).unwrap();
        assert_eq!(m.length(LengthFunction::LogCard).unwrap(), LengthValue::log_u64(8));
        assert_eq!(m.modulus(), Some(&z(4)));
    }

    #[test]
    fn finite_part() {
        let m = FPModule::direct_sum(&Integers, &[&FPModule::free(&Integers, 1), &FPModule::cyclic(&Integers, z(4))]);
        assert_eq!(m.finite_part_length(LengthFunction::LogCard).unwrap(), LengthValue::log_u64(4));
        assert_eq!(m.finite_part_length(LengthFunction::Rank).unwrap(), LengthValue::integer(1));
    }
}
