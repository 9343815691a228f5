use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{parse_rational, Rational};

/// Polynomial in `n` with rational coefficients, lowest degree first, no
/// trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(Vec<Rational>);

impl Poly {
    fn trim(mut v: Vec<Rational>) -> Self {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        Poly(v)
    }

    pub fn constant(c: Rational) -> Self {
        Self::trim(vec![c])
    }

    pub fn var() -> Self {
        Poly(vec![Rational::zero(), Rational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.0.last()
    }

    pub fn eval(&self, n: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * n + c)
    }

    pub fn add(&self, o: &Self) -> Self {
        let len = self.0.len().max(o.0.len());
        let z = Rational::zero();
        Self::trim((0..len).map(|i| self.0.get(i).unwrap_or(&z) + o.0.get(i).unwrap_or(&z)).collect())
    }

    pub fn neg(&self) -> Self {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly(vec![]);
        }
        let mut out = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::trim(out)
    }

    /// `p(n + 1)`.
    pub fn shift_one(&self) -> Self {
        let step = Poly(vec![Rational::one(), Rational::one()]);
        self.0.iter().rev().fold(Poly(vec![]), |acc, c| acc.mul(&step).add(&Poly::constant(c.clone())))
    }

    /// Every real root has absolute value below this integer.
    pub fn root_bound(&self) -> BigInt {
        let Some(lead) = self.leading() else { return BigInt::zero() };
        let m = self.0[..self.0.len() - 1].iter().map(|c| (c / lead).abs()).fold(Rational::zero(), |a, b| a.max(b));
        (m + Rational::one()).ceil().to_integer() + BigInt::one()
    }
}

/// A rational function `num(n) / den(n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn constant(c: Rational) -> Self {
        RatFunc { num: Poly::constant(c), den: Poly::constant(Rational::one()) }
    }

    fn var() -> Self {
        RatFunc { num: Poly::var(), den: Poly::constant(Rational::one()) }
    }

    fn add(&self, o: &Self) -> Self {
        RatFunc { num: self.num.mul(&o.den).add(&o.num.mul(&self.den)), den: self.den.mul(&o.den) }
    }

    fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    fn mul(&self, o: &Self) -> Self {
        RatFunc { num: self.num.mul(&o.num), den: self.den.mul(&o.den) }
    }

    fn div(&self, o: &Self) -> Result<Self> {
        if o.num.is_zero() {
            return Err(Error::Parse("division by the zero function".into()));
        }
        Ok(RatFunc { num: self.num.mul(&o.den), den: self.den.mul(&o.num) })
    }

    pub fn eval(&self, n: &Rational) -> Option<Rational> {
        let d = self.den.eval(n);
        (!d.is_zero()).then(|| self.num.eval(n) / d)
    }

    /// `lim_{n→∞}`; `None` when the function is unbounded.
    pub fn limit(&self) -> Option<Rational> {
        match (self.num.degree(), self.den.degree()) {
            (None, _) => Some(Rational::zero()),
            (Some(a), Some(b)) if a < b => Some(Rational::zero()),
            (Some(a), Some(b)) if a == b => Some(self.num.leading().unwrap() / self.den.leading().unwrap()),
            _ => None,
        }
    }

    /// A bound beyond which neither numerator nor denominator changes sign.
    fn sign_bound(&self) -> BigInt {
        self.num.root_bound().max(self.den.root_bound())
    }

    /// Sign for all sufficiently large `n`.
    fn eventual_sign(&self) -> i8 {
        match (self.num.leading(), self.den.leading()) {
            (None, _) => 0,
            (Some(a), Some(b)) => {
                if a.is_positive() == b.is_positive() {
                    1
                } else {
                    -1
                }
            }
            (Some(_), None) => 0,
        }
    }
}

/// Parser for the tail micro-grammar: rationals, `n`, `+ - * /`, `^` with a
/// non-negative integer exponent, and parentheses.
pub fn parse_expr(src: &str) -> Result<RatFunc> {
    let toks: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = Parser { toks: &toks, pos: 0, src };
    let f = p.expr()?;
    if p.pos != toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    toks: &'a [char],
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at position {} in {:?}", self.pos, self.src))
    }

    fn peek(&self) -> Option<char> {
        self.toks.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { acc.add(&t) } else { acc.add(&t.neg()) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.factor()?;
        while let Some(c @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let f = self.factor()?;
            acc = if c == '*' { acc.mul(&f) } else { acc.div(&f)? };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RatFunc> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(self.factor()?.neg());
        }
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let digits: String = self.toks[start..self.pos].iter().collect();
            let e: u32 = digits.parse().map_err(|_| self.err("expected an integer exponent"))?;
            let mut acc = RatFunc::constant(Rational::one());
            for _ in 0..e {
                acc = acc.mul(&base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc> {
        match self.peek() {
            Some('n') => {
                self.pos += 1;
                Ok(RatFunc::var())
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let s: String = self.toks[start..self.pos].iter().collect();
                Ok(RatFunc::constant(parse_rational(&s)?))
            }
            _ => Err(self.err("expected a number, 'n' or '('")),
        }
    }
}

/// Largest explicit range scanned when certifying monotonicity of a tail.
const SCAN_LIMIT: u64 = 200_000;

/// The cut values `γ_1, γ_2, …` of an ascending ideal chain `I_n = x^{γ_n} R`:
/// explicit prefix values, then a rational function of `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CutSpec", into = "CutSpec")]
pub struct CutSequence {
    prefix: Vec<Rational>,
    tail: RatFunc,
    tail_src: String,
    limit: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutSpec {
    #[serde(default)]
    pub prefix: Vec<String>,
    pub tail: String,
}

impl TryFrom<CutSpec> for CutSequence {
    type Error = Error;
    fn try_from(s: CutSpec) -> Result<Self> {
        let prefix = s.prefix.iter().map(|p| parse_rational(p)).collect::<Result<Vec<_>>>()?;
        CutSequence::new(prefix, &s.tail)
    }
}

impl From<CutSequence> for CutSpec {
    fn from(c: CutSequence) -> Self {
        CutSpec { prefix: c.prefix.iter().map(|q| q.to_string()).collect(), tail: c.tail_src }
    }
}

impl CutSequence {
    /// Validates that the values are defined, non-negative and
    /// non-increasing (the ideals ascend) for every `n ≥ 1`.
    pub fn new(prefix: Vec<Rational>, tail: &str) -> Result<Self> {
        let f = parse_expr(tail)?;
        let limit = f.limit().ok_or_else(|| Error::NotAscending(format!("tail {tail:?} is unbounded")))?;
        if limit.is_negative() {
            return Err(Error::NotAscending(format!("tail {tail:?} tends to the negative value {limit}")));
        }
        let seq = CutSequence { prefix, tail: f, tail_src: tail.to_string(), limit };
        seq.check_monotone()?;
        Ok(seq)
    }

    pub fn constant(c: Rational) -> Result<Self> {
        Self::new(vec![], &c.to_string())
    }

    fn first_tail_index(&self) -> u64 {
        self.prefix.len() as u64 + 1
    }

    fn check_monotone(&self) -> Result<()> {
        let n0 = self.first_tail_index();
        let diff = self.tail.add(&RatFunc { num: self.tail.num.shift_one(), den: self.tail.den.shift_one() }.neg());
        let bound = diff.sign_bound().max(self.tail.sign_bound());
        let bound = bound.to_u64().filter(|&b| b <= SCAN_LIMIT).ok_or_else(|| {
            Error::NotAscending(format!("cannot certify monotonicity of {:?}: coefficients too large", self.tail_src))
        })?;
        if diff.eventual_sign() < 0 {
            return Err(Error::NotAscending(format!("tail {:?} eventually increases", self.tail_src)));
        }
        if self.tail.den.leading().is_none() {
            return Err(Error::NotAscending("zero denominator".into()));
        }
        // explicit prefix, the junction, and the tail up to the sign bound
        let last = bound.max(n0) + 1;
        let mut prev: Option<Rational> = None;
        for n in 1..=last {
            let v = self.value(n)?;
            if v.is_negative() {
                return Err(Error::NotAscending(format!("cut {v} at n = {n} is negative")));
            }
            if let Some(p) = &prev {
                if v > *p {
                    return Err(Error::NotAscending(format!("cut rises from {p} to {v} at n = {n}")));
                }
            }
            prev = Some(v);
        }
        Ok(())
    }

    /// `γ_n` for `n ≥ 1`.
    pub fn value(&self, n: u64) -> Result<Rational> {
        if n == 0 {
            return Err(Error::Invalid("cuts are indexed from n = 1".into()));
        }
        if let Some(v) = self.prefix.get(n as usize - 1) {
            return Ok(v.clone());
        }
        self.tail
            .eval(&Rational::from_integer(BigInt::from(n)))
            .ok_or_else(|| Error::NotAscending(format!("tail {:?} undefined at n = {n}", self.tail_src)))
    }

    /// `γ_∞ = lim γ_n`, computed from leading coefficients.
    pub fn limit(&self) -> &Rational {
        &self.limit
    }

    /// Whether some `γ_n` equals the limit (then the union ideal is closed).
    pub fn attains_limit(&self) -> bool {
        if self.prefix.iter().any(|p| *p == self.limit) {
            return true;
        }
        // tail − limit is a rational function; it vanishes identically or at finitely many n
        let d = self.tail.add(&RatFunc::constant(-self.limit.clone()));
        if d.num.is_zero() {
            return true;
        }
        let n0 = self.first_tail_index();
        let b = d.sign_bound().to_u64().unwrap_or(SCAN_LIMIT).min(SCAN_LIMIT);
        (n0..=b.max(n0)).any(|n| self.value(n).is_ok_and(|v| v == self.limit))
    }

    pub fn prefix(&self) -> &[Rational] {
        &self.prefix
    }

    pub fn tail_source(&self) -> &str {
        &self.tail_src
    }

    /// `min(γ_n, c)`, again a cut sequence (the chain of a quotient by `x^c`).
    pub fn min_with(&self, c: &Rational) -> Result<Self> {
        if self.limit >= *c {
            return Self::constant(c.clone());
        }
        // γ is non-increasing with limit below c: find where it drops under c
        let mut prefix = Vec::new();
        let mut n = 1u64;
        loop {
            let v = self.value(n)?;
            if v <= *c && n > self.prefix.len() as u64 {
                break;
            }
            prefix.push(v.min(c.clone()));
            n += 1;
            if n > SCAN_LIMIT {
                return Err(Error::Invalid(format!("cut sequence stays above {c} too long")));
            }
        }
        // the tail expression is in n, so it keeps its meaning after the longer prefix
        Self::new(prefix, &self.tail_src)
    }

    /// `γ_n − c`, requiring `γ_∞ ≥ c` (the chain of the submodule `x^c·B_σ`).
    pub fn minus(&self, c: &Rational) -> Result<Self> {
        if self.limit < *c {
            return Err(Error::Invalid(format!("cuts tend to {} below {c}", self.limit)));
        }
        let prefix = self.prefix.iter().map(|p| p - c).collect();
        Self::new(prefix, &format!("({})-({})", self.tail_src, c))
    }
}

impl fmt::Display for CutSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.prefix.is_empty() {
            let p: Vec<_> = self.prefix.iter().map(|q| q.to_string()).collect();
            write!(f, "[{}] then ", p.join(", "))?;
        }
        write!(f, "{}", self.tail_src)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;

    #[test]
    fn parse_and_evaluate() {
        let f = parse_expr("1 + 1/n").unwrap();
        assert_eq!(f.eval(&rat(4, 1)), Some(rat(5, 4)));
        assert_eq!(f.limit(), Some(rat(1, 1)));
        let g = parse_expr("(2*n^2 + 3)/(n^2 - 1/2)").unwrap();
        assert_eq!(g.limit(), Some(rat(2, 1)));
        assert!(parse_expr("1 + ").is_err());
        assert!(parse_expr("1/(n-n)").is_err());
    }

    #[test]
    fn cut_sequences() {
        let c = CutSequence::new(vec![], "1+1/n").unwrap();
        assert_eq!(c.value(1).unwrap(), rat(2, 1));
        assert_eq!(*c.limit(), rat(1, 1));
        assert!(!c.attains_limit());
        let h = CutSequence::new(vec![], "1/n").unwrap();
        assert_eq!(*h.limit(), rat(0, 1));
        assert!(CutSequence::new(vec![], "2").unwrap().attains_limit());
        assert!(matches!(CutSequence::new(vec![], "1-1/n"), Err(Error::NotAscending(_))));
        assert!(matches!(CutSequence::new(vec![rat(1, 1)], "2"), Err(Error::NotAscending(_))));
        assert!(matches!(CutSequence::new(vec![], "n"), Err(Error::NotAscending(_))));
    }

    #[test]
    fn quotient_and_sub_chains() {
        let c = CutSequence::new(vec![], "1+1/n").unwrap();
        let q = c.min_with(&rat(5, 4)).unwrap();
        let vals: Vec<_> = (1..=6).map(|n| q.value(n).unwrap()).collect();
        assert_eq!(vals, vec![rat(5, 4), rat(5, 4), rat(5, 4), rat(5, 4), rat(6, 5), rat(7, 6)]);
        let s = c.minus(&rat(1, 2)).unwrap();
        assert_eq!(s.value(2).unwrap(), rat(1, 1));
        assert_eq!(*s.limit(), rat(1, 2));
        assert_eq!(*c.min_with(&rat(1, 2)).unwrap().limit(), rat(1, 2));
    }
}
