use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{json_to_rational, unsupported, Bezout, LatticeRing, LengthFunction, Ring};
use crate::error::{Error, Result};
use crate::scalars::{LengthValue, Rational};

/// A finite sum `Σ c_i x^{q_i}` with rational `q_i ≥ 0`: an element of the
/// valuation domain whose value group is `ℚ`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ValElement {
    terms: BTreeMap<Rational, Rational>,
}

impl ValElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Rational::zero())
    }

    /// `c·x^q`; panics on a negative exponent.
    pub fn term(c: Rational, q: Rational) -> Self {
        assert!(!q.is_negative(), "negative exponent {q}");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(q, c);
        }
        ValElement { terms }
    }

    pub fn monomial(q: Rational) -> Self {
        Self::term(Rational::one(), q)
    }

    pub fn from_terms(pairs: impl IntoIterator<Item = (Rational, Rational)>) -> Result<Self> {
        let mut e = ValElement::zero();
        for (c, q) in pairs {
            if q.is_negative() {
                return Err(Error::Invalid(format!("negative exponent {q}")));
            }
            e.add_term(q, c);
        }
        Ok(e)
    }

    fn add_term(&mut self, q: Rational, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(q.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&q);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Minimum exponent; `None` stands for `v(0) = ∞`.
    pub fn valuation(&self) -> Option<&Rational> {
        self.terms.keys().next()
    }

    pub fn leading(&self) -> Option<(&Rational, &Rational)> {
        self.terms.iter().next()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.terms.iter()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (q, c) in &o.terms {
            out.add_term(q.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        ValElement { terms: self.terms.iter().map(|(q, c)| (q.clone(), -c)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = ValElement::zero();
        for (q1, c1) in &self.terms {
            for (q2, c2) in &o.terms {
                out.add_term(q1 + q2, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ValElement { terms: self.terms.iter().map(|(q, d)| (q.clone(), d * c)).collect() }
    }

    /// Multiplies by `x^δ`; `δ` may be negative as long as no exponent drops below 0.
    pub fn shift(&self, delta: &Rational) -> Self {
        let terms: BTreeMap<_, _> = self.terms.iter().map(|(q, c)| (q + delta, c.clone())).collect();
        assert!(terms.keys().all(|q| !q.is_negative()), "shift below x^0");
        ValElement { terms }
    }

    /// `x^{-v(e)}·e`, a unit. Zero stays zero.
    pub fn unit_part(&self) -> Self {
        match self.valuation() {
            Some(v) => self.shift(&-v.clone()),
            None => Self::zero(),
        }
    }

    /// Drops every term of exponent `≥ bound` (reduction modulo `x^bound`).
    pub fn truncate(&self, bound: &Rational) -> Self {
        ValElement { terms: self.terms.range(..bound.clone()).map(|(q, c)| (q.clone(), c.clone())).collect() }
    }

    /// The terms of exponent `≥ bound`.
    pub fn high_part(&self, bound: &Rational) -> Self {
        ValElement { terms: self.terms.range(bound.clone()..).map(|(q, c)| (q.clone(), c.clone())).collect() }
    }

    /// For a unit `u`, the `w` with `u·w ≡ 1 (mod x^bound)`, via the truncated
    /// geometric series `c⁻¹ Σ (−t)^k` where `u = c(1 + t)`.
    pub fn inverse_unit_trunc(&self, bound: &Rational) -> Option<Self> {
        let (q0, c0) = self.leading()?;
        if !q0.is_zero() {
            return None;
        }
        let inv_c = c0.recip();
        let mut t = self.scale(&inv_c);
        t.add_term(Rational::zero(), -Rational::one());
        let neg_t = t.neg();
        let mut acc = Self::constant(Rational::one()).truncate(bound);
        let mut power = Self::constant(Rational::one());
        loop {
            power = power.mul(&neg_t).truncate(bound);
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power);
        }
        Some(acc.scale(&inv_c))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(q, c)| serde_json::json!([c.to_string(), q.to_string()]))
                .collect(),
        )
    }

    /// Accepts `[[coeff, exp], ...]`, or a bare rational constant.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::Array(items) => {
                let mut pairs = Vec::with_capacity(items.len());
                for it in items {
                    match it.as_array().map(|a| a.as_slice()) {
                        Some([c, q]) => pairs.push((json_to_rational(c)?, json_to_rational(q)?)),
                        _ => return Err(Error::Parse(format!("expected [coeff, exponent], got {it}"))),
                    }
                }
                Self::from_terms(pairs)
            }
            other => Ok(Self::constant(json_to_rational(other)?)),
        }
    }
}

impl fmt::Display for ValElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (q, c)) in self.terms.iter().enumerate() {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let xpart = if q.is_zero() {
                String::new()
            } else if q.is_one() {
                "x".to_string()
            } else if q.is_integer() {
                format!("x^{q}")
            } else {
                format!("x^({q})")
            };
            match (mag.is_one(), xpart.is_empty()) {
                (_, true) => write!(f, "{mag}")?,
                (true, false) => write!(f, "{xpart}")?,
                (false, false) => write!(f, "{mag}*{xpart}")?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// `{a : v(a) ≥ γ}`, the principal ideal `x^γ R`.
    Closed,
    /// `{a : v(a) > γ}`; only ever a limit of a chain.
    Open,
}

/// An ideal of the valuation domain, described by its cut in the value group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IdealCut {
    Zero,
    Unit,
    Cut {
        #[serde(with = "rational_str")]
        gamma: Rational,
        boundary: Boundary,
    },
}

impl IdealCut {
    /// The principal ideal generated by `e`.
    pub fn principal(e: &ValElement) -> Self {
        match e.valuation() {
            None => IdealCut::Zero,
            Some(v) if v.is_zero() => IdealCut::Unit,
            Some(v) => IdealCut::Cut { gamma: v.clone(), boundary: Boundary::Closed },
        }
    }

    /// `L_v(R/I) = inf v(I)`.
    pub fn length(&self) -> LengthValue {
        match self {
            IdealCut::Zero => LengthValue::Infinity,
            IdealCut::Unit => LengthValue::zero(),
            IdealCut::Cut { gamma, .. } => LengthValue::rational(gamma.clone()),
        }
    }

    /// The union of an ascending chain whose principal members have the
    /// given cuts converging down to `limit`.
    pub fn chain_limit(limit: &Rational, attained: bool) -> Self {
        if limit.is_zero() && attained {
            return IdealCut::Unit;
        }
        let boundary = if attained { Boundary::Closed } else { Boundary::Open };
        IdealCut::Cut { gamma: limit.clone(), boundary }
    }
}

impl fmt::Display for IdealCut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdealCut::Zero => write!(f, "0"),
            IdealCut::Unit => write!(f, "R"),
            IdealCut::Cut { gamma, boundary: Boundary::Closed } => write!(f, "{{v >= {gamma}}}"),
            IdealCut::Cut { gamma, boundary: Boundary::Open } => write!(f, "{{v > {gamma}}}"),
        }
    }
}

pub(crate) mod rational_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::scalars::{parse_rational, Rational};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// The monomial valuation domain: finite sums of `c·x^q`, `q ∈ ℚ≥0`, valued
/// by the minimum exponent. Elimination multiplies by units and monomials
/// only, so entries stay finite sums.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Valuation;

impl Ring for Valuation {
    type Elem = ValElement;

    fn name(&self) -> String {
        "valuation".into()
    }
    fn zero(&self) -> ValElement {
        ValElement::zero()
    }
    fn one(&self) -> ValElement {
        ValElement::constant(Rational::one())
    }
    fn from_i64(&self, n: i64) -> ValElement {
        ValElement::constant(Rational::from_integer(n.into()))
    }
    fn add(&self, a: &ValElement, b: &ValElement) -> ValElement {
        a.add(b)
    }
    fn mul(&self, a: &ValElement, b: &ValElement) -> ValElement {
        a.mul(b)
    }
    fn neg(&self, a: &ValElement) -> ValElement {
        a.neg()
    }
    fn is_zero(&self, a: &ValElement) -> bool {
        a.is_zero()
    }
    fn is_unit(&self, a: &ValElement) -> bool {
        a.valuation().is_some_and(|v| v.is_zero())
    }

    fn bezout(&self, a: &ValElement, b: &ValElement) -> Bezout<ValElement> {
        let one = self.one();
        let zero = self.zero();
        let (va, vb) = match (a.valuation(), b.valuation()) {
            (_, None) => return Bezout { p: one.clone(), q: zero.clone(), r: zero, s: one, g: a.clone() },
            (None, Some(_)) => return Bezout { p: zero.clone(), q: one.clone(), r: one, s: zero, g: b.clone() },
            (Some(va), Some(vb)) => (va.clone(), vb.clone()),
        };
        if va <= vb {
            let (r, s) = kill(a, b, &va, &vb);
            Bezout { p: one, q: zero, r, s, g: a.clone() }
        } else {
            let (s, r) = kill(b, a, &vb, &va);
            Bezout { p: zero, q: one, r, s, g: b.clone() }
        }
    }

    fn divides(&self, a: &ValElement, b: &ValElement) -> bool {
        match (a.valuation(), b.valuation()) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(va), Some(vb)) => va <= vb,
        }
    }

    fn pivot_key(&self, a: &ValElement) -> Option<Rational> {
        a.valuation().cloned()
    }

    fn pivot_cost(&self, a: &ValElement) -> usize {
        a.terms.len()
    }

    fn parse_elem(&self, v: &serde_json::Value) -> Result<ValElement> {
        ValElement::from_json(v)
    }
    fn elem_to_json(&self, a: &ValElement) -> serde_json::Value {
        a.to_json()
    }
    fn fmt_elem(&self, a: &ValElement) -> String {
        a.to_string()
    }
}

/// For `v(a) ≤ v(b)`, returns `(r, s)` with `r·a + s·b = 0` and `s` a unit.
fn kill(a: &ValElement, b: &ValElement, va: &Rational, vb: &Rational) -> (ValElement, ValElement) {
    if a.is_monomial() {
        let (_, c) = a.leading().unwrap();
        // b / (c x^va) is a finite sum since every exponent of b is ≥ va
        let r = b.shift(&-va.clone()).scale(&c.recip()).neg();
        return (r, Valuation.one());
    }
    let delta = vb - va;
    let r = b.unit_part().shift(&delta).neg();
    (r, a.unit_part())
}

impl LatticeRing for Valuation {
    fn normal_unit(&self, a: &ValElement, modulus: Option<&ValElement>) -> Option<ValElement> {
        let (v, c) = a.leading()?;
        if a.is_monomial() {
            return Some(ValElement::constant(c.recip()));
        }
        let bound = modulus?.valuation()? - v;
        a.unit_part().inverse_unit_trunc(&bound)
    }

    fn residue_quotient(&self, e: &ValElement, pivot: &ValElement) -> ValElement {
        match pivot.leading() {
            Some((g, c)) if pivot.is_monomial() => e.high_part(g).shift(&-g.clone()).scale(&c.recip()),
            _ => ValElement::zero(),
        }
    }

    fn reduce_mod(&self, e: &ValElement, modulus: &ValElement) -> ValElement {
        match modulus.valuation() {
            Some(g) => e.truncate(g),
            None => e.clone(),
        }
    }

    fn cyclic_length(&self, lf: LengthFunction, d: &ValElement) -> Result<LengthValue> {
        match lf {
            LengthFunction::Valuation => Ok(IdealCut::principal(d).length()),
            _ => Err(unsupported(self, lf)),
        }
    }

    fn monomial(&self, gamma: &Rational) -> Option<ValElement> {
        Some(ValElement::monomial(gamma.clone()))
    }

    fn lcm_like(&self, a: &ValElement, b: &ValElement) -> ValElement {
        match (a.valuation(), b.valuation()) {
            (Some(x), Some(y)) => ValElement::monomial(x.max(y).clone()),
            _ => self.zero(),
        }
    }

    fn ideal_generator(&self, a: &ValElement) -> ValElement {
        match a.valuation() {
            Some(v) => ValElement::monomial(v.clone()),
            None => self.zero(),
        }
    }

    fn fmt_ideal(&self, d: &ValElement) -> String {
        IdealCut::principal(d).to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;

    fn x(n: i64, d: i64) -> ValElement {
        ValElement::monomial(rat(n, d))
    }

    #[test]
    fn valuation_is_min_exponent() {
        let e = x(1, 2).add(&x(13, 6).neg());
        assert_eq!(e.valuation(), Some(&rat(1, 2)));
        assert_eq!(ValElement::zero().valuation(), None);
        let f = ValElement::constant(rat(3, 1)).add(&x(5, 1));
        assert_eq!(f.valuation(), Some(&rat(0, 1)));
        assert_eq!(e.to_string(), "x^(1/2) - x^(13/6)");
        assert_eq!(f.to_string(), "3 + x^5");
    }

    #[test]
    fn bezout_on_non_monomials() {
        let v = Valuation;
        let a = x(1, 2).add(&x(1, 1));
        let b = x(1, 3).add(&x(2, 1).scale(&rat(-5, 1)));
        for (a, b) in [(a.clone(), b.clone()), (b.clone(), a.clone()), (a.clone(), a.clone())] {
            let t = v.bezout(&a, &b);
            assert!(v.add(&v.mul(&t.r, &a), &v.mul(&t.s, &b)).is_zero());
            assert_eq!(v.add(&v.mul(&t.p, &a), &v.mul(&t.q, &b)), t.g);
            let det = v.sub(&v.mul(&t.p, &t.s), &v.mul(&t.q, &t.r));
            assert!(v.is_unit(&det));
        }
    }

    #[test]
    fn truncated_inverse() {
        let u = ValElement::constant(rat(2, 1)).add(&x(1, 3)).add(&x(1, 2).scale(&rat(-1, 1)));
        let w = u.inverse_unit_trunc(&rat(2, 1)).unwrap();
        let prod = u.mul(&w).truncate(&rat(2, 1));
        assert_eq!(prod, ValElement::constant(rat(1, 1)));
    }

    #[test]
    fn cut_lengths() {
        let v = Valuation;
        assert_eq!(v.cyclic_length(LengthFunction::Valuation, &x(3, 2)).unwrap(), LengthValue::rational(rat(3, 2)));
        assert!(v.cyclic_length(LengthFunction::Valuation, &ValElement::zero()).unwrap().is_infinite());
        assert!(v.cyclic_length(LengthFunction::LogCard, &x(1, 1)).is_err());
        let open = IdealCut::chain_limit(&rat(1, 1), false);
        assert_eq!(open.length(), LengthValue::integer(1));
    }

    #[test]
    fn json_round_trip() {
        let e = x(1, 2).scale(&rat(2, 3)).add(&ValElement::constant(rat(-1, 1)));
        assert_eq!(ValElement::from_json(&e.to_json()).unwrap(), e);
        let parsed = ValElement::from_json(&serde_json::json!([["1", "1/2"], ["-1", "13/6"]])).unwrap();
        assert_eq!(parsed.valuation(), Some(&rat(1, 2)));
    }
}
