//! Exact values in `[0, ∞]`: a rational part plus a rational combination of
//! natural logarithms of primes, or infinity.
//!
//! Every length the crate computes (log-cardinality, rank, dimension, valuation
//! cuts) and every entropy lives in this type. Comparisons between a pure
//! rational and a value carrying log terms are decided by interval refinement;
//! equal canonical forms are the only way two values compare equal.

use std::collections::{BTreeMap, HashMap};
use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

static PRECISION_BITS: AtomicU32 = AtomicU32::new(256);

/// Bit budget for interval refinement of mixed rational/log comparisons.
pub fn precision_bits() -> u32 {
    PRECISION_BITS.load(AtomicOrdering::Relaxed)
}

pub fn set_precision_bits(bits: u32) {
    PRECISION_BITS.store(bits.max(32), AtomicOrdering::Relaxed);
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"3"`, `"-2/3"` or `" 7 / 4 "`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Trial-division factorisation; fine for the moduli and pivots this crate meets.
pub fn factorize(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut out = Vec::new();
    let mut n = n.clone();
    if n.is_zero() {
        return out;
    }
    let mut p = BigUint::from(2u32);
    while &p * &p <= n {
        let mut e = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += if p == BigUint::from(2u32) { 1u32 } else { 2u32 };
    }
    if n > BigUint::one() {
        out.push((n, 1));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LengthValue {
    /// `rat + Σ logs[p]·ln p`, canonical: prime keys, no zero coefficients.
    Finite { rat: Rational, logs: BTreeMap<BigUint, Rational> },
    Infinity,
}

impl Default for LengthValue {
    fn default() -> Self {
        LengthValue::zero()
    }
}

impl LengthValue {
    pub fn zero() -> Self {
        LengthValue::Finite { rat: Rational::zero(), logs: BTreeMap::new() }
    }

    pub fn infinity() -> Self {
        LengthValue::Infinity
    }

    pub fn rational(q: Rational) -> Self {
        LengthValue::Finite { rat: q, logs: BTreeMap::new() }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(rat_int(n))
    }

    /// `ln n`, factored into prime logs. `ln 1 = 0`.
    pub fn log_of(n: &BigUint) -> Self {
        assert!(!n.is_zero(), "log of zero");
        let mut logs = BTreeMap::new();
        for (p, e) in factorize(n) {
            logs.insert(p, rat_int(e as i64));
        }
        LengthValue::Finite { rat: Rational::zero(), logs }
    }

    pub fn log_u64(n: u64) -> Self {
        Self::log_of(&BigUint::from(n))
    }

    /// Builds a value from a rational part and (not necessarily prime) log
    /// arguments. Composite arguments are factored.
    pub fn from_parts(rat: Rational, terms: impl IntoIterator<Item = (BigUint, Rational)>) -> Self {
        let mut logs: BTreeMap<BigUint, Rational> = BTreeMap::new();
        for (n, c) in terms {
            for (p, e) in factorize(&n) {
                *logs.entry(p).or_insert_with(Rational::zero) += &c * rat_int(e as i64);
            }
        }
        logs.retain(|_, c| !c.is_zero());
        LengthValue::Finite { rat, logs }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, LengthValue::Infinity)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    pub fn is_zero(&self) -> bool {
        match self {
            LengthValue::Finite { rat, logs } => rat.is_zero() && logs.is_empty(),
            LengthValue::Infinity => false,
        }
    }

    pub fn rational_part(&self) -> Option<&Rational> {
        match self {
            LengthValue::Finite { rat, .. } => Some(rat),
            LengthValue::Infinity => None,
        }
    }

    pub fn log_terms(&self) -> Option<&BTreeMap<BigUint, Rational>> {
        match self {
            LengthValue::Finite { logs, .. } => Some(logs),
            LengthValue::Infinity => None,
        }
    }

    /// Re-establishes the canonical form. Idempotent.
    pub fn canonical(&self) -> Self {
        match self {
            LengthValue::Infinity => LengthValue::Infinity,
            LengthValue::Finite { rat, logs } => {
                Self::from_parts(rat.clone(), logs.iter().map(|(p, c)| (p.clone(), c.clone())))
            }
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        match (self, other) {
            (LengthValue::Finite { rat: a, logs: la }, LengthValue::Finite { rat: b, logs: lb }) => {
                let mut logs = la.clone();
                for (p, c) in lb {
                    *logs.entry(p.clone()).or_insert_with(Rational::zero) += c;
                }
                logs.retain(|_, c| !c.is_zero());
                LengthValue::Finite { rat: a + b, logs }
            }
            _ => LengthValue::Infinity,
        }
    }

    /// Exact difference; `None` if `other` is infinite while `self` is
    /// finite, if both are infinite, or if the difference would be negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        match (self, other) {
            (LengthValue::Infinity, LengthValue::Finite { .. }) => Some(LengthValue::Infinity),
            (LengthValue::Finite { rat: a, logs: la }, LengthValue::Finite { rat: b, logs: lb }) => {
                let mut logs = la.clone();
                for (p, c) in lb {
                    *logs.entry(p.clone()).or_insert_with(Rational::zero) -= c;
                }
                logs.retain(|_, c| !c.is_zero());
                let d = LengthValue::Finite { rat: a - b, logs };
                match d.sign() {
                    Ok(Ordering::Less) => None,
                    Ok(_) => Some(d),
                    Err(_) => None,
                }
            }
            _ => None,
        }
    }

    /// Multiplies by a positive rational. Infinity is fixed.
    pub fn scale(&self, q: &Rational) -> Self {
        assert!(q.is_positive(), "scale factor must be positive");
        match self {
            LengthValue::Infinity => LengthValue::Infinity,
            LengthValue::Finite { rat, logs } => LengthValue::Finite {
                rat: rat * q,
                logs: logs.iter().map(|(p, c)| (p.clone(), c * q)).collect(),
            },
        }
    }

    pub fn mul_int(&self, n: u64) -> Self {
        if n == 0 {
            return match self {
                LengthValue::Infinity => LengthValue::Infinity,
                _ => LengthValue::zero(),
            };
        }
        self.scale(&Rational::from_integer(BigInt::from(n)))
    }

    /// Double-precision shadow of the value.
    pub fn to_f64(&self) -> f64 {
        match self {
            LengthValue::Infinity => f64::INFINITY,
            LengthValue::Finite { rat, logs } => {
                let mut v = rat.to_f64().unwrap_or(f64::NAN);
                for (p, c) in logs {
                    v += c.to_f64().unwrap_or(f64::NAN) * ln_biguint(p);
                }
                v
            }
        }
    }

    /// Sign of the represented real (finite values may carry negative
    /// coefficients transiently, e.g. inside a difference).
    fn sign(&self) -> Result<Ordering> {
        self.sign_with_cap(precision_bits())
    }

    fn sign_with_cap(&self, cap: u32) -> Result<Ordering> {
        let (rat, logs) = match self {
            LengthValue::Infinity => return Ok(Ordering::Greater),
            LengthValue::Finite { rat, logs } => (rat, logs),
        };
        if logs.is_empty() {
            return Ok(rat.cmp(&Rational::zero()));
        }
        if rat.is_zero() {
            if let Some(o) = pure_log_sign(logs) {
                return Ok(o);
            }
        }
        if let Some(o) = float_sign(rat, logs) {
            return Ok(o);
        }
        let mut bits = 64.min(cap);
        loop {
            let (lo, hi) = interval(rat, logs, bits);
            if lo.is_positive() {
                return Ok(Ordering::Greater);
            }
            if hi.is_negative() {
                return Ok(Ordering::Less);
            }
            if bits >= cap {
                return Err(Error::PrecisionExhausted { bits: cap });
            }
            bits = (bits * 2).min(cap);
        }
    }

    /// Total order on `[0, ∞]`.
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering> {
        self.try_cmp_with_precision(other, precision_bits())
    }

    pub fn try_cmp_with_precision(&self, other: &Self, bits: u32) -> Result<Ordering> {
        match (self, other) {
            (LengthValue::Infinity, LengthValue::Infinity) => Ok(Ordering::Equal),
            (LengthValue::Infinity, _) => Ok(Ordering::Greater),
            (_, LengthValue::Infinity) => Ok(Ordering::Less),
            (LengthValue::Finite { rat: a, logs: la }, LengthValue::Finite { rat: b, logs: lb }) => {
                let mut logs = la.clone();
                for (p, c) in lb {
                    *logs.entry(p.clone()).or_insert_with(Rational::zero) -= c;
                }
                logs.retain(|_, c| !c.is_zero());
                LengthValue::Finite { rat: a - b, logs }.sign_with_cap(bits)
            }
        }
    }

    pub fn min_of<'a>(a: &'a Self, b: &'a Self) -> &'a Self {
        if a.try_cmp(b).map(|o| o == Ordering::Greater).unwrap_or(false) {
            b
        } else {
            a
        }
    }

    pub fn max_of<'a>(a: &'a Self, b: &'a Self) -> &'a Self {
        if a.try_cmp(b).map(|o| o == Ordering::Less).unwrap_or(false) {
            b
        } else {
            a
        }
    }

    pub fn le(&self, other: &Self) -> bool {
        self.try_cmp(other).map(|o| o != Ordering::Greater).unwrap_or(false)
    }
}

impl PartialOrd for LengthValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.try_cmp(other).ok()
    }
}

impl Add for &LengthValue {
    type Output = LengthValue;
    fn add(self, rhs: &LengthValue) -> LengthValue {
        LengthValue::plus(self, rhs)
    }
}

impl Add for LengthValue {
    type Output = LengthValue;
    fn add(self, rhs: LengthValue) -> LengthValue {
        LengthValue::plus(&self, &rhs)
    }
}

impl std::iter::Sum for LengthValue {
    fn sum<I: Iterator<Item = LengthValue>>(iter: I) -> Self {
        iter.fold(LengthValue::zero(), |a, b| a.plus(&b))
    }
}

fn ln_biguint(n: &BigUint) -> f64 {
    match n.to_f64() {
        Some(f) if f.is_finite() => f.ln(),
        _ => {
            let bits = n.bits();
            let shifted = n >> (bits - 53);
            shifted.to_f64().unwrap().ln() + (bits - 53) as f64 * std::f64::consts::LN_2
        }
    }
}

/// Exact sign of `Σ c_p ln p` by comparing integer powers.
fn pure_log_sign(logs: &BTreeMap<BigUint, Rational>) -> Option<Ordering> {
    let denom = logs.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut pos = BigUint::one();
    let mut neg = BigUint::one();
    let mut budget_bits: u64 = 0;
    for (p, c) in logs {
        let e = (c * Rational::from_integer(denom.clone())).to_integer();
        let abs = e.abs().to_u32()?;
        budget_bits += p.bits() * abs as u64;
        if budget_bits > 200_000 {
            return None;
        }
        let pw = p.pow(abs);
        match e.sign() {
            Sign::Plus => pos *= pw,
            Sign::Minus => neg *= pw,
            Sign::NoSign => {}
        }
    }
    Some(pos.cmp(&neg))
}

fn float_sign(rat: &Rational, logs: &BTreeMap<BigUint, Rational>) -> Option<Ordering> {
    let r = rat.to_f64()?;
    if !r.is_finite() {
        return None;
    }
    let mut v = r;
    let mut mag = r.abs();
    for (p, c) in logs {
        let cf = c.to_f64()?;
        if !cf.is_finite() {
            return None;
        }
        let t = cf * ln_biguint(p);
        v += t;
        mag += t.abs();
    }
    if v.abs() > 1e-10 * mag + 1e-300 {
        Some(if v > 0.0 { Ordering::Greater } else { Ordering::Less })
    } else {
        None
    }
}

fn dyadic_floor(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << (bits + 8);
    let n = (x * Rational::from_integer(scale.clone())).floor().to_integer();
    Rational::new(n, scale)
}

fn dyadic_ceil(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << (bits + 8);
    let n = (x * Rational::from_integer(scale.clone())).ceil().to_integer();
    Rational::new(n, scale)
}

/// Enclosure of `atanh(z)` for `0 ≤ z ≤ 1/3` with width below `2^-bits`.
fn atanh_interval(z: &Rational, bits: u32) -> (Rational, Rational) {
    let eps = Rational::new(BigInt::one(), BigInt::one() << bits);
    let z2 = z * z;
    let one = Rational::one();
    let mut sum = Rational::zero();
    let mut pw = z.clone();
    let mut k: i64 = 0;
    loop {
        let d = rat_int(2 * k + 1);
        sum += &pw / &d;
        pw = &pw * &z2;
        let tail = &pw / (rat_int(2 * k + 3) * (&one - &z2));
        if tail < eps {
            return (dyadic_floor(&sum, bits), dyadic_ceil(&(sum + tail), bits));
        }
        k += 1;
    }
}

fn log_interval(p: &BigUint, bits: u32) -> (Rational, Rational) {
    static CACHE: OnceLock<Mutex<HashMap<(BigUint, u32), (Rational, Rational)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(p.clone(), bits)) {
        return v.clone();
    }
    let inner = bits + 8 + (p.bits() as u32);
    let (a2lo, a2hi) = atanh_interval(&rat(1, 3), inner);
    let two = rat_int(2);
    let (ln2lo, ln2hi) = (&a2lo * &two, &a2hi * &two);
    // p = 2^k · r with 1 ≤ r < 2
    let k = p.bits() - 1;
    let r = Rational::new(BigInt::from(p.clone()), BigInt::one() << k);
    let z = (&r - Rational::one()) / (&r + Rational::one());
    let (alo, ahi) = atanh_interval(&z, inner);
    let kq = rat_int(k as i64);
    let lo = &kq * &ln2lo + &two * &alo;
    let hi = &kq * &ln2hi + &two * &ahi;
    let out = (dyadic_floor(&lo, bits), dyadic_ceil(&hi, bits));
    cache.lock().unwrap().insert((p.clone(), bits), out.clone());
    out
}

fn interval(rat: &Rational, logs: &BTreeMap<BigUint, Rational>, bits: u32) -> (Rational, Rational) {
    let mut lo = rat.clone();
    let mut hi = rat.clone();
    for (p, c) in logs {
        let (l, h) = log_interval(p, bits);
        if c.is_positive() {
            lo += c * &l;
            hi += c * &h;
        } else {
            lo += c * &h;
            hi += c * &l;
        }
    }
    (lo, hi)
}

fn fmt_coeff_term(c: &Rational, p: &BigUint) -> String {
    if c.is_one() {
        format!("log({p})")
    } else if *c == -Rational::one() {
        format!("-log({p})")
    } else {
        format!("{c}*log({p})")
    }
}

impl fmt::Display for LengthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (rat, logs) = match self {
            LengthValue::Infinity => return write!(f, "inf"),
            LengthValue::Finite { rat, logs } => (rat, logs),
        };
        if rat.is_zero() && logs.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        if !rat.is_zero() {
            out.push_str(&rat.to_string());
        }
        for (p, c) in logs {
            let t = fmt_coeff_term(c, p);
            if !out.is_empty() && !t.starts_with('-') {
                out.push('+');
            }
            out.push_str(&t);
        }
        write!(f, "{out}")
    }
}

impl FromStr for LengthValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "inf" || s == "∞" {
            return Ok(LengthValue::Infinity);
        }
        if s.is_empty() {
            return Err(Error::Parse("empty length value".into()));
        }
        // split on top-level + and - (not inside parentheses, not a leading sign)
        let mut terms = Vec::new();
        let mut depth = 0i32;
        let mut start = 0usize;
        let bytes = s.as_bytes();
        for (i, &b) in bytes.iter().enumerate() {
            match b {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b'+' | b'-' if depth == 0 && i > start => {
                    terms.push(&s[start..i]);
                    start = i;
                }
                _ => {}
            }
        }
        terms.push(&s[start..]);
        let mut rat_part = Rational::zero();
        let mut log_terms = Vec::new();
        for t in terms {
            let t = t.strip_prefix('+').unwrap_or(t);
            if let Some(idx) = t.find("log(") {
                let coeff = &t[..idx];
                let coeff = coeff.strip_suffix('*').unwrap_or(coeff);
                let c = match coeff {
                    "" => Rational::one(),
                    "-" => -Rational::one(),
                    other => parse_rational(other)?,
                };
                let arg = t[idx + 4..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("bad log term {t:?}")))?;
                let n: BigUint = arg.parse().map_err(|_| Error::Parse(format!("bad log argument {arg:?}")))?;
                if n.is_zero() {
                    return Err(Error::Parse("log(0)".into()));
                }
                log_terms.push((n, c));
            } else {
                rat_part += parse_rational(t)?;
            }
        }
        let v = LengthValue::from_parts(rat_part, log_terms);
        if v.sign()? == Ordering::Less {
            return Err(Error::Parse(format!("negative length value {s:?}")));
        }
        Ok(v)
    }
}

impl serde::Serialize for LengthValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for LengthValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(s: &str) -> LengthValue {
        s.parse().unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(lv("1/2").plus(&lv("1/3")), lv("5/6"));
        assert_eq!(lv("log(2)").plus(&lv("log(3)")), lv("log(6)"));
        assert_eq!(lv("log(2)").plus(&lv("log(3)")).to_string(), "log(2)+log(3)");
        assert!(LengthValue::Infinity.plus(&lv("1")).is_infinite());
    }

    #[test]
    fn compare_examples() {
        assert_eq!(lv("log(2)+log(3)").try_cmp(&lv("7/4")).unwrap(), Ordering::Greater);
        assert_eq!(lv("2*log(2)").try_cmp(&lv("2*log(2)")).unwrap(), Ordering::Equal);
        assert_eq!(lv("5/6").try_cmp(&LengthValue::Infinity).unwrap(), Ordering::Less);
        assert_eq!(lv("log(3)").try_cmp(&lv("log(2)")).unwrap(), Ordering::Greater);
    }

    #[test]
    fn interval_decides_close_mixed_values() {
        // ln 2 = 0.693147180559945309417...; the rational below differs by ~1e-20
        let close = lv("693147180559945309417/1000000000000000000000");
        assert_eq!(lv("log(2)").try_cmp(&close).unwrap(), Ordering::Greater);
        let above = lv("693147180559945309418/1000000000000000000000");
        assert_eq!(lv("log(2)").try_cmp(&above).unwrap(), Ordering::Less);
    }

    #[test]
    fn precision_exhaustion_is_reported() {
        // a rational within 2^-200 of ln 2 cannot be separated with a 64-bit cap
        let lo = LengthValue::rational(log_interval(&BigUint::from(2u32), 200).0);
        let r = lo.try_cmp_with_precision(&lv("log(2)"), 64);
        assert!(matches!(r, Err(Error::PrecisionExhausted { bits: 64 })));
        assert_eq!(lo.try_cmp(&lv("log(2)")).unwrap(), Ordering::Less);
    }

    #[test]
    fn scale_examples() {
        assert_eq!(lv("4*log(2)").scale(&rat(1, 4)), lv("log(2)"));
        assert_eq!(lv("3/2").scale(&rat(1, 3)), lv("1/2"));
        assert!(LengthValue::Infinity.scale(&rat(1, 7)).is_infinite());
    }

    #[test]
    fn rendering() {
        assert_eq!(lv("5/6").to_string(), "5/6");
        assert_eq!(lv("5/6+2*log(2)").to_string(), "5/6+2*log(2)");
        assert_eq!(LengthValue::Infinity.to_string(), "inf");
        assert_eq!(LengthValue::zero().to_string(), "0");
        assert_eq!(lv("log(12)").to_string(), "2*log(2)+log(3)");
        assert_eq!(lv("1-1/2*log(2)").to_string(), "1-1/2*log(2)");
    }

    #[test]
    fn checked_sub_refuses_negative() {
        assert_eq!(lv("log(6)").checked_sub(&lv("log(2)")), Some(lv("log(3)")));
        assert_eq!(lv("1/2").checked_sub(&lv("log(2)")), None);
    }

    #[test]
    fn log_interval_brackets_ln() {
        for p in [2u32, 3, 5, 7, 11, 101] {
            let (lo, hi) = log_interval(&BigUint::from(p), 128);
            let f = (p as f64).ln();
            assert!(lo.to_f64().unwrap() <= f + 1e-15 && hi.to_f64().unwrap() >= f - 1e-15);
            assert!(&hi - &lo < Rational::new(BigInt::one(), BigInt::one() << 120));
        }
    }
}
