use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{unsupported, Bezout, LatticeRing, LengthFunction, Ring};
use crate::error::{Error, Result};
use crate::scalars::{LengthValue, Rational};

/// The integers. Modules over `ℤ/m` are handled as `ℤ`-modules carrying the
/// extra relations `m·e_i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Integers;

pub(crate) fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

pub(crate) fn int_bezout(a: &BigInt, b: &BigInt) -> Bezout<BigInt> {
    let one = BigInt::one();
    let zero = BigInt::zero();
    if b.is_zero() {
        return Bezout { p: one.clone(), q: zero.clone(), r: zero, s: one, g: a.clone() };
    }
    if a.is_zero() {
        return Bezout { p: zero.clone(), q: one.clone(), r: one, s: zero, g: b.clone() };
    }
    if (b % a).is_zero() {
        return Bezout { p: one.clone(), q: zero, r: -(b / a), s: one, g: a.clone() };
    }
    let (g, x, y) = ext_gcd(a, b);
    Bezout { p: x, q: y, r: -(b / &g), s: a / &g, g }
}

impl Ring for Integers {
    type Elem = BigInt;

    fn name(&self) -> String {
        "integers".into()
    }
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn from_i64(&self, n: i64) -> BigInt {
        BigInt::from(n)
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn is_unit(&self, a: &BigInt) -> bool {
        a.abs().is_one()
    }
    fn bezout(&self, a: &BigInt, b: &BigInt) -> Bezout<BigInt> {
        int_bezout(a, b)
    }
    fn divides(&self, a: &BigInt, b: &BigInt) -> bool {
        if a.is_zero() {
            b.is_zero()
        } else {
            (b % a).is_zero()
        }
    }
    fn pivot_key(&self, a: &BigInt) -> Option<Rational> {
        (!a.is_zero()).then(|| Rational::from_integer(a.abs()))
    }
    fn parse_elem(&self, v: &serde_json::Value) -> Result<BigInt> {
        match v {
            serde_json::Value::Number(n) => {
                n.as_i64().map(BigInt::from).ok_or_else(|| Error::Parse(format!("bad integer {n}")))
            }
            serde_json::Value::String(s) => s.trim().parse().map_err(|_| Error::Parse(format!("bad integer {s:?}"))),
            other => Err(Error::Parse(format!("expected integer, got {other}"))),
        }
    }
    fn elem_to_json(&self, a: &BigInt) -> serde_json::Value {
        match i64::try_from(a) {
            Ok(n) => serde_json::Value::from(n),
            Err(_) => serde_json::Value::from(a.to_string()),
        }
    }
    fn fmt_elem(&self, a: &BigInt) -> String {
        a.to_string()
    }
}

impl LatticeRing for Integers {
    fn normal_unit(&self, a: &BigInt, _modulus: Option<&BigInt>) -> Option<BigInt> {
        Some(if a.is_negative() { -BigInt::one() } else { BigInt::one() })
    }

    fn residue_quotient(&self, e: &BigInt, pivot: &BigInt) -> BigInt {
        e.div_floor(pivot)
    }

    fn reduce_mod(&self, e: &BigInt, modulus: &BigInt) -> BigInt {
        e.mod_floor(modulus)
    }

    fn cyclic_length(&self, lf: LengthFunction, d: &BigInt) -> Result<LengthValue> {
        match lf {
            LengthFunction::LogCard => Ok(if d.is_zero() {
                LengthValue::Infinity
            } else {
                LengthValue::log_of(&d.abs().to_biguint().unwrap())
            }),
            LengthFunction::Rank => Ok(LengthValue::integer(if d.is_zero() { 1 } else { 0 })),
            _ => Err(unsupported(self, lf)),
        }
    }

    fn lcm_like(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a.lcm(b)
    }

    fn fmt_ideal(&self, d: &BigInt) -> String {
        if d.is_zero() {
            "0".into()
        } else {
            format!("{}Z", d.abs())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bezout_kills_second_entry() {
        let z = Integers;
        for (a, b) in [(4, 6), (0, 5), (5, 0), (-3, 9), (7, -12), (0, 0)] {
            let (a, b) = (BigInt::from(a), BigInt::from(b));
            let t = z.bezout(&a, &b);
            assert_eq!(&t.p * &a + &t.q * &b, t.g);
            assert!((&t.r * &a + &t.s * &b).is_zero());
            assert!((&t.p * &t.s - &t.q * &t.r).abs().is_one());
        }
    }

    #[test]
    fn cyclic_lengths() {
        let z = Integers;
        assert_eq!(z.cyclic_length(LengthFunction::LogCard, &BigInt::from(6)).unwrap().to_string(), "log(2)+log(3)");
        assert!(z.cyclic_length(LengthFunction::LogCard, &BigInt::zero()).unwrap().is_infinite());
        assert_eq!(z.cyclic_length(LengthFunction::Rank, &BigInt::zero()).unwrap(), LengthValue::integer(1));
        assert!(z.cyclic_length(LengthFunction::Valuation, &BigInt::one()).is_err());
    }
}
