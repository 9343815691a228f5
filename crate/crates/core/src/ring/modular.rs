use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::integers::ext_gcd;
use super::{unsupported, Bezout, LengthFunction, Ring};
use crate::error::{Error, Result};
use crate::scalars::{LengthValue, Rational};

/// `ℤ/m` for `m ≥ 2`, elements stored as representatives in `[0, m)`.
///
/// Used for matrix reduction over the residue ring. Modules over `ℤ/m` are
/// built as `ℤ`-modules (see [`crate::fpmod::FPModule::over_modular`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Modular {
    m: BigInt,
}

impl Modular {
    pub fn new(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::Invalid(format!("modulus must be at least 2, got {m}")));
        }
        Ok(Modular { m: BigInt::from(m) })
    }

    pub fn modulus(&self) -> &BigInt {
        &self.m
    }

    fn norm(&self, a: BigInt) -> BigInt {
        a.mod_floor(&self.m)
    }

    /// Some `c` with `a·c = b`, if `a` divides `b`.
    fn quotient(&self, a: &BigInt, b: &BigInt) -> Option<BigInt> {
        let g = a.gcd(&self.m);
        if !(b % &g).is_zero() {
            return None;
        }
        let m1 = &self.m / &g;
        let (_, inv, _) = ext_gcd(&(a / &g).mod_floor(&m1), &m1);
        Some(self.norm((b / &g) * inv).mod_floor(&m1))
    }

    /// `log |(ℤ/m)/(d)| = log gcd(d, m)`.
    pub fn cyclic_length(&self, lf: LengthFunction, d: &BigInt) -> Result<LengthValue> {
        match lf {
            LengthFunction::LogCard => Ok(LengthValue::log_of(&d.gcd(&self.m).to_biguint().unwrap())),
            _ => Err(unsupported(self, lf)),
        }
    }
}

impl Ring for Modular {
    type Elem = BigInt;

    fn name(&self) -> String {
        format!("modular({})", self.m)
    }
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn from_i64(&self, n: i64) -> BigInt {
        self.norm(BigInt::from(n))
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.norm(a + b)
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.norm(a * b)
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        self.norm(-a)
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn is_unit(&self, a: &BigInt) -> bool {
        a.gcd(&self.m).is_one()
    }
    fn bezout(&self, a: &BigInt, b: &BigInt) -> Bezout<BigInt> {
        let one = BigInt::one();
        let zero = BigInt::zero();
        if b.is_zero() {
            return Bezout { p: one.clone(), q: zero.clone(), r: zero, s: one, g: a.clone() };
        }
        if a.is_zero() {
            return Bezout { p: zero.clone(), q: one.clone(), r: one, s: zero, g: b.clone() };
        }
        if let Some(c) = self.quotient(a, b) {
            // keep the pivot fixed when it already divides: the loop in Smith
            // reduction relies on this to terminate
            return Bezout { p: one.clone(), q: zero.clone(), r: self.norm(-c), s: one, g: a.clone() };
        }
        // work with the lifts; the integer transform has determinant 1
        let (g, x, y) = ext_gcd(a, b);
        Bezout {
            p: self.norm(x),
            q: self.norm(y),
            r: self.norm(-(b / &g)),
            s: self.norm(a / &g),
            g: self.norm(g),
        }
    }
    fn divides(&self, a: &BigInt, b: &BigInt) -> bool {
        (b % a.gcd(&self.m)).is_zero()
    }
    fn pivot_key(&self, a: &BigInt) -> Option<Rational> {
        (!a.is_zero()).then(|| Rational::from_integer(a.gcd(&self.m)))
    }
    fn parse_elem(&self, v: &serde_json::Value) -> Result<BigInt> {
        Ok(self.norm(super::Integers.parse_elem(v)?))
    }
    fn elem_to_json(&self, a: &BigInt) -> serde_json::Value {
        super::Integers.elem_to_json(a)
    }
    fn fmt_elem(&self, a: &BigInt) -> String {
        a.to_string()
    }
}
