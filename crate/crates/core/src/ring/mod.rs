//! Base rings, their length functions, and matrix reduction over them.
//!
//! Every engine exposes the same small interface: ring arithmetic, a
//! unimodular 2×2 elimination step ([`Ring::bezout`]), and an ordering of
//! elements by the ideal they generate ([`Ring::pivot_key`]). Smith and
//! Hermite reductions are written once against that interface.

mod integers;
mod matrix;
mod modular;
mod prime_field;
mod smith;
mod valuation;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{LengthValue, Rational};

pub use integers::Integers;
pub use matrix::Matrix;
pub use modular::Modular;
pub use prime_field::PrimeField;
pub use smith::{smith_reduce, SmithForm};
pub use valuation::{Boundary, IdealCut, ValElement, Valuation};

/// `[[p, q], [r, s]]` with unit determinant, `p·a + q·b = g` and `r·a + s·b = 0`.
#[derive(Clone, Debug)]
pub struct Bezout<E> {
    pub p: E,
    pub q: E,
    pub r: E,
    pub s: E,
    pub g: E,
}

pub trait Ring: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + fmt::Debug + PartialEq + Eq + std::hash::Hash + Send + Sync + 'static;

    fn name(&self) -> String;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn is_unit(&self, a: &Self::Elem) -> bool;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    /// Elimination step; see [`Bezout`]. When `a` divides `b` the returned
    /// `g` is `a` itself and `p = 1, q = 0`.
    fn bezout(&self, a: &Self::Elem, b: &Self::Elem) -> Bezout<Self::Elem>;

    /// `a | b`, i.e. `b ∈ aR`.
    fn divides(&self, a: &Self::Elem, b: &Self::Elem) -> bool;

    /// Smaller keys generate larger ideals. `None` for zero.
    fn pivot_key(&self, a: &Self::Elem) -> Option<Rational>;

    /// Tie-break among pivots of equal key: cheaper entries are preferred.
    fn pivot_cost(&self, _a: &Self::Elem) -> usize {
        0
    }

    fn parse_elem(&self, v: &serde_json::Value) -> Result<Self::Elem>;
    fn elem_to_json(&self, a: &Self::Elem) -> serde_json::Value;
    fn fmt_elem(&self, a: &Self::Elem) -> String;
}

/// Rings over which submodule lattices have a canonical (Hermite) form and
/// over which lengths of cyclic modules are defined.
pub trait LatticeRing: Ring {
    /// A unit `u` with `u·a` the canonical associate of `a`, computed modulo
    /// `modulus` when one is given. `None` if the inverse is not representable.
    fn normal_unit(&self, a: &Self::Elem, modulus: Option<&Self::Elem>) -> Option<Self::Elem>;

    /// For a canonical pivot `p`, the `q` making `e - q·p` the canonical
    /// residue of `e` modulo `pR`.
    fn residue_quotient(&self, e: &Self::Elem, pivot: &Self::Elem) -> Self::Elem;

    /// Canonical residue of `e` modulo `modulus·R`.
    fn reduce_mod(&self, e: &Self::Elem, modulus: &Self::Elem) -> Self::Elem;

    /// `L(R / dR)`.
    fn cyclic_length(&self, lf: LengthFunction, d: &Self::Elem) -> Result<LengthValue>;

    /// The element `x^γ` of the valuation engine; `None` elsewhere.
    fn monomial(&self, _gamma: &Rational) -> Option<Self::Elem> {
        None
    }

    fn check_length(&self, lf: LengthFunction) -> Result<()> {
        self.cyclic_length(lf, &self.zero()).map(|_| ())
    }

    /// Product of two moduli (both annihilate the relevant quotients).
    fn lcm_like(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, b)
    }

    /// A canonical generator of the ideal `aR`.
    fn ideal_generator(&self, a: &Self::Elem) -> Self::Elem {
        if self.is_zero(a) {
            return self.zero();
        }
        match self.normal_unit(a, None) {
            Some(u) => self.mul(&u, a),
            None => a.clone(),
        }
    }

    fn fmt_ideal(&self, d: &Self::Elem) -> String {
        format!("({})", self.fmt_elem(&self.ideal_generator(d)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthFunction {
    /// `log |M|` for abelian groups.
    #[serde(alias = "logcard", alias = "log|-|")]
    LogCard,
    /// Torsion-free rank over `ℤ`.
    Rank,
    /// Dimension over a prime field.
    Dim,
    /// `L_v(R/I) = inf v(I)` over the valuation engine.
    #[serde(alias = "lv", alias = "L_v")]
    Valuation,
}

impl fmt::Display for LengthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LengthFunction::LogCard => "log_card",
            LengthFunction::Rank => "rank",
            LengthFunction::Dim => "dim",
            LengthFunction::Valuation => "valuation",
        };
        f.write_str(s)
    }
}

pub(crate) fn unsupported<R: Ring>(ring: &R, lf: LengthFunction) -> Error {
    Error::UnsupportedPair { length: lf.to_string(), ring: ring.name() }
}

pub(crate) fn json_to_rational(v: &serde_json::Value) -> Result<Rational> {
    match v {
        serde_json::Value::String(s) => crate::scalars::parse_rational(s),
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(crate::scalars::rat_int)
            .ok_or_else(|| Error::Parse(format!("non-integer number {n}; write rationals as strings"))),
        other => Err(Error::Parse(format!("expected rational, got {other}"))),
    }
}
