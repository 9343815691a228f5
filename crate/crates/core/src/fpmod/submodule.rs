use std::sync::Arc;

use serde::Serialize;

use super::{kernel_vectors, FPModule, Lattice, SVec};
use crate::error::{Error, Result};
use crate::ring::{LatticeRing, LengthFunction};
use crate::scalars::LengthValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SubCompare {
    Equal,
    /// The first is strictly contained in the second.
    Less,
    Greater,
    Incomparable,
}

/// A submodule `S ≤ M`, stored as the canonical lattice `S + Λ ⊆ R^g`.
#[derive(Clone, Debug)]
pub struct Submodule<R: LatticeRing> {
    ambient: Arc<FPModule<R>>,
    lattice: Lattice<R>,
}

impl<R: LatticeRing> PartialEq for Submodule<R> {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.ambient, &other.ambient) || self.ambient == other.ambient) && self.lattice == other.lattice
    }
}

impl<R: LatticeRing> Submodule<R> {
    pub fn generated(ambient: &Arc<FPModule<R>>, gens: impl IntoIterator<Item = SVec<R::Elem>>) -> Result<Self> {
        let dim = ambient.gens();
        let mut lattice = ambient.relations().clone();
        let gens: Vec<_> = gens.into_iter().collect();
        if let Some(bad) = gens.iter().find(|v| v.keys().any(|&i| i >= dim)) {
            return Err(Error::Dimension(format!("vector {bad:?} outside a module with {dim} generators")));
        }
        lattice.insert_all(gens);
        Ok(Submodule { ambient: ambient.clone(), lattice })
    }

    pub fn ambient(&self) -> &Arc<FPModule<R>> {
        &self.ambient
    }

    pub fn lattice(&self) -> &Lattice<R> {
        &self.lattice
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ambient, &other.ambient) || self.ambient == other.ambient {
            Ok(())
        } else {
            Err(Error::AmbientMismatch)
        }
    }

    /// Canonical generators: the echelon vectors of `S + Λ` that are not relations.
    pub fn generators(&self) -> Vec<SVec<R::Elem>> {
        let rel = self.ambient.relations();
        self.lattice.vectors().filter(|v| !rel.contains(v)).cloned().collect()
    }

    pub fn contains(&self, v: &SVec<R::Elem>) -> bool {
        self.lattice.contains(v)
    }

    pub fn is_zero(&self) -> bool {
        self.lattice == *self.ambient.relations()
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.lattice.insert_all(other.lattice.vectors().cloned());
        Ok(out)
    }

    /// Adds generators in place; returns whether the submodule grew.
    pub fn extend(&mut self, gens: impl IntoIterator<Item = SVec<R::Elem>>) -> bool {
        self.lattice.insert_all(gens)
    }

    pub fn le(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        Ok(other.lattice.contains_lattice(&self.lattice))
    }

    pub fn compare(&self, other: &Self) -> Result<SubCompare> {
        let a = self.le(other)?;
        let b = other.le(self)?;
        Ok(match (a, b) {
            (true, true) => SubCompare::Equal,
            (true, false) => SubCompare::Less,
            (false, true) => SubCompare::Greater,
            (false, false) => SubCompare::Incomparable,
        })
    }

    /// `L(M / S)`.
    pub fn colength(&self, lf: LengthFunction) -> Result<LengthValue> {
        self.ambient.ring().check_length(lf)?;
        self.lattice.index_length(lf)
    }

    /// `L(S)`: `L(M) − L(M/S)` when `L(M)` is finite, otherwise read off a
    /// presentation of `S`.
    pub fn length(&self, lf: LengthFunction) -> Result<LengthValue> {
        let whole = self.ambient.length(lf)?;
        if whole.is_finite() {
            let q = self.colength(lf)?;
            return Ok(whole.checked_sub(&q).expect("submodule longer than its ambient"));
        }
        self.as_module().length(lf)
    }

    /// `S` as a module in its own right, presented on its canonical generators.
    pub fn as_module(&self) -> FPModule<R> {
        let ring = self.ambient.ring();
        let gens = self.generators();
        let h = gens.len();
        let mut cols = gens.clone();
        cols.extend(self.ambient.relations().vectors().cloned());
        let ker = kernel_vectors(ring, &cols, self.ambient.gens());
        let rels: Vec<SVec<R::Elem>> = ker
            .into_iter()
            .map(|v| v.into_iter().filter(|(i, _)| *i < h).collect::<SVec<_>>())
            .filter(|v| !v.is_empty())
            .collect();
        let modulus = self.ambient.modulus().cloned();
        let dense: Vec<Vec<R::Elem>> = rels.iter().map(|v| super::to_dense(ring, v, h)).collect();
        match modulus {
            Some(m) => FPModule::from_lattice(ring, Lattice::from_vectors(ring, h, Some(m), rels)),
            None => FPModule::from_relations(ring, h, &dense).expect("kernel vectors have the right length"),
        }
    }
}
