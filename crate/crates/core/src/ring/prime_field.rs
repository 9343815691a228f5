use num_traits::Zero;

use super::{unsupported, Bezout, LatticeRing, LengthFunction, Ring};
use crate::error::{Error, Result};
use crate::scalars::{LengthValue, Rational};

/// `F_p` with residues stored as `u64` (so `p < 2^32` keeps products in range).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) || p >= 1 << 32 {
            return Err(Error::Invalid(format!("{p} is not a prime below 2^32")));
        }
        Ok(PrimeField { p })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero in F_{}", self.p);
        // Fermat
        let mut base = a % self.p;
        let mut e = self.p - 2;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        acc
    }
}

impl Ring for PrimeField {
    type Elem = u64;

    fn name(&self) -> String {
        format!("prime_field({})", self.p)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn is_unit(&self, a: &u64) -> bool {
        *a != 0
    }
    fn bezout(&self, a: &u64, b: &u64) -> Bezout<u64> {
        if *b == 0 {
            return Bezout { p: 1, q: 0, r: 0, s: 1, g: *a };
        }
        if *a == 0 {
            return Bezout { p: 0, q: 1, r: 1, s: 0, g: *b };
        }
        let r = self.neg(&self.mul(b, &self.inv(*a)));
        Bezout { p: 1, q: 0, r, s: 1, g: *a }
    }
    fn divides(&self, a: &u64, b: &u64) -> bool {
        *a != 0 || *b == 0
    }
    fn pivot_key(&self, a: &u64) -> Option<Rational> {
        (*a != 0).then(Rational::zero)
    }
    fn parse_elem(&self, v: &serde_json::Value) -> Result<u64> {
        let n = match v {
            serde_json::Value::Number(n) => n.as_i64(),
            serde_json::Value::String(s) => s.trim().parse().ok(),
            _ => None,
        };
        n.map(|n| self.from_i64(n)).ok_or_else(|| Error::Parse(format!("bad F_{} element {v}", self.p)))
    }
    fn elem_to_json(&self, a: &u64) -> serde_json::Value {
        serde_json::Value::from(*a)
    }
    fn fmt_elem(&self, a: &u64) -> String {
        a.to_string()
    }
}

impl LatticeRing for PrimeField {
    fn normal_unit(&self, a: &u64, _modulus: Option<&u64>) -> Option<u64> {
        (*a != 0).then(|| self.inv(*a))
    }
    fn residue_quotient(&self, e: &u64, pivot: &u64) -> u64 {
        self.mul(e, &self.inv(*pivot))
    }
    fn reduce_mod(&self, e: &u64, modulus: &u64) -> u64 {
        if *modulus == 0 {
            *e
        } else {
            0
        }
    }
    fn cyclic_length(&self, lf: LengthFunction, d: &u64) -> Result<LengthValue> {
        match lf {
            LengthFunction::Dim => Ok(LengthValue::integer(if *d == 0 { 1 } else { 0 })),
            _ => Err(unsupported(self, lf)),
        }
    }
    fn fmt_ideal(&self, d: &u64) -> String {
        if *d == 0 { "0".into() } else { "F".into() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites() {
        assert!(PrimeField::new(6).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(7).is_ok());
    }

    #[test]
    fn inverses() {
        let f = PrimeField::new(13).unwrap();
        for a in 1..13 {
            assert_eq!(f.mul(&a, &f.inv(a)), 1);
        }
    }
}
