//! Brute-force ground truth for small instances, and seeded instance generation.
//!
//! Nothing here goes through the Hermite or Smith machinery: modules are
//! finite sets of residue vectors, submodules are closed under addition by
//! breadth-first search, and determinants come from fraction-free elimination.

mod gen;
mod suite;

use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

pub use gen::{
    gen_at, gen_cyclic, gen_cuts, gen_finite, gen_hyper, gen_system, gen_valuation, AtInstance, Caps, CyclicInstance,
    EngineChoice, FamilyChoice, FiniteInstance, Generated, InstanceSpec, ValuationInstance,
};
pub use suite::{
    check_alpha_properties, check_at, check_brute_trajectories, check_colon, check_hyperkernel, check_lengths,
    check_multiplicity, check_smith, run_suite, PropertyResult, SmithEngine, SuiteReport,
};

use crate::error::{Error, Result};
use crate::scalars::LengthValue;

/// Largest group the oracle will enumerate.
pub const ENUM_LIMIT: u64 = 1_000_000;

/// `ℤ^gens / ⟨relations⟩`, optionally also modulo `modulus·ℤ^gens`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub gens: usize,
    /// Relation vectors, each of length `gens`.
    pub relations: Vec<Vec<i64>>,
    #[serde(default)]
    pub modulus: Option<u64>,
}

impl Presentation {
    pub fn cyclic(d: i64) -> Self {
        Presentation { gens: 1, relations: vec![vec![d]], modulus: None }
    }

    pub fn diagonal(ds: &[i64]) -> Self {
        let g = ds.len();
        let relations = (0..g)
            .map(|i| {
                let mut c = vec![0; g];
                c[i] = ds[i];
                c
            })
            .collect();
        Presentation { gens: g, relations, modulus: None }
    }

    /// A positive integer killing the module, or `None` when it is infinite.
    pub fn exponent(&self) -> Option<u64> {
        if let Some(m) = self.modulus {
            return Some(m);
        }
        let g = self.gens;
        if g == 0 {
            return Some(1);
        }
        // Δ_g / Δ_{g−1}, the largest invariant factor, via determinantal divisors
        let top = self.minor_gcd(g);
        (top != 0).then(|| (top / self.minor_gcd(g - 1)).unsigned_abs() as u64)
    }

    /// Gcd of the `k × k` minors of the relation matrix (`Δ_k`).
    fn minor_gcd(&self, k: usize) -> i128 {
        if k == 0 {
            return 1;
        }
        let mut acc: i128 = 0;
        for rows in subsets(self.gens, k) {
            for cols in subsets(self.relations.len(), k) {
                let m: Vec<Vec<i128>> = rows.iter().map(|&i| cols.iter().map(|&j| self.relations[j][i] as i128).collect()).collect();
                acc = acc.gcd(&det_i128(m));
                if acc == 1 {
                    return 1;
                }
            }
        }
        acc
    }

    fn relation_residues(&self, e: u64) -> Vec<Vec<u64>> {
        self.relations.iter().map(|c| c.iter().map(|&x| x.rem_euclid(e as i64) as u64).collect()).collect()
    }
}

/// All `k`-element subsets of `0..n`, in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Bareiss elimination over `i128`.
pub fn det_i128(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else { return 0 };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// A subgroup of `(ℤ/e)^g`, stored as the set of its elements.
#[derive(Clone, Debug)]
pub struct BruteSpan {
    e: u64,
    g: usize,
    elems: HashSet<u64>,
    relations: usize,
}

impl BruteSpan {
    fn encode(&self, v: &[u64]) -> u64 {
        v.iter().rev().fold(0, |acc, &x| acc * self.e + x % self.e)
    }

    fn decode(&self, mut k: u64) -> Vec<u64> {
        (0..self.g)
            .map(|_| {
                let x = k % self.e;
                k /= self.e;
                x
            })
            .collect()
    }

    /// Closure of `seed` under addition.
    fn closure(e: u64, g: usize, start: HashSet<u64>, gens: &[Vec<u64>]) -> Result<HashSet<u64>> {
        let probe = BruteSpan { e, g, elems: HashSet::new(), relations: 1 };
        let gens: Vec<Vec<u64>> = gens.iter().filter(|v| v.iter().any(|&x| x % e != 0)).cloned().collect();
        let mut set = start;
        set.insert(0);
        let mut queue: VecDeque<u64> = set.iter().copied().collect();
        while let Some(k) = queue.pop_front() {
            let v = probe.decode(k);
            for gv in &gens {
                let w: Vec<u64> = v.iter().zip(gv).map(|(a, b)| (a + b) % e).collect();
                let kw = probe.encode(&w);
                if set.insert(kw) {
                    if set.len() as u64 > ENUM_LIMIT {
                        return Err(Error::TooLarge(format!("more than {ENUM_LIMIT}")));
                    }
                    queue.push_back(kw);
                }
            }
        }
        Ok(set)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        let r: Vec<u64> = v.iter().map(|&x| x.rem_euclid(self.e as i64) as u64).collect();
        self.elems.contains(&self.encode(&r))
    }

    /// `|S / relations|`.
    pub fn order(&self) -> u64 {
        self.elems.len() as u64 / self.relations as u64
    }

    pub fn length(&self) -> LengthValue {
        LengthValue::log_u64(self.order())
    }
}

fn residue_space(p: &Presentation) -> Result<(u64, HashSet<u64>)> {
    let e = p.exponent().ok_or_else(|| Error::Invalid("the module is infinite".into()))?;
    let size = (e as u128).checked_pow(p.gens as u32).unwrap_or(u128::MAX);
    if size > ENUM_LIMIT as u128 {
        return Err(Error::TooLarge(size.to_string()));
    }
    let rel = BruteSpan::closure(e, p.gens, HashSet::new(), &p.relation_residues(e))?;
    Ok((e, rel))
}

/// `log |M|` by listing the elements of `(ℤ/e)^g / relations`.
pub fn count_length(p: &Presentation) -> Result<LengthValue> {
    if p.exponent().is_none() {
        return Ok(LengthValue::infinity());
    }
    let (e, rel) = residue_space(p)?;
    let total = e.pow(p.gens as u32);
    debug_assert_eq!(total % rel.len() as u64, 0);
    Ok(LengthValue::log_of(&BigUint::from(total / rel.len() as u64)))
}

/// `T_n = S + φS + … + φ^{n−1}S` by closure, with `φ` acting on columns:
/// the image of `e_j` is column `j` of `endo`.
pub fn brute_trajectory(p: &Presentation, endo: &[Vec<i64>], seed: &[Vec<i64>], n: usize) -> Result<BruteSpan> {
    let (e, rel) = residue_space(p)?;
    let g = p.gens;
    let apply = |v: &[u64]| -> Vec<u64> {
        (0..g)
            .map(|i| {
                let s: i128 = (0..g).map(|j| endo[i][j] as i128 * v[j] as i128).sum();
                s.rem_euclid(e as i128) as u64
            })
            .collect()
    };
    let mut gens = Vec::new();
    for s in seed {
        let mut v: Vec<u64> = s.iter().map(|&x| x.rem_euclid(e as i64) as u64).collect();
        for _ in 0..n {
            gens.push(v.clone());
            v = apply(&v);
        }
    }
    let relations = rel.len();
    let elems = BruteSpan::closure(e, g, rel, &gens)?;
    Ok(BruteSpan { e, g, elems, relations })
}

/// `k` copies of `c` with the shift sending copy `i` to copy `i + 1` (the last
/// copy is sent to zero): the window `[0, k)` of `B(c)`.
pub fn bernoulli_window(c: &Presentation, k: usize) -> (Presentation, Vec<Vec<i64>>) {
    let g = c.gens;
    let dim = g * k;
    let mut relations = Vec::new();
    for b in 0..k {
        for r in &c.relations {
            let mut col = vec![0; dim];
            col[b * g..(b + 1) * g].copy_from_slice(r);
            relations.push(col);
        }
        if let Some(m) = c.modulus {
            for i in 0..g {
                let mut col = vec![0; dim];
                col[b * g + i] = m as i64;
                relations.push(col);
            }
        }
    }
    let mut shift = vec![vec![0; dim]; dim];
    for b in 0..k.saturating_sub(1) {
        for i in 0..g {
            shift[(b + 1) * g + i][b * g + i] = 1;
        }
    }
    (Presentation { gens: dim, relations, modulus: None }, shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let p = Presentation { gens: 2, relations: vec![vec![2, 0], vec![1, 3]], modulus: None };
        assert_eq!(count_length(&p).unwrap(), LengthValue::log_u64(6));
        assert_eq!(count_length(&Presentation::cyclic(1)).unwrap(), LengthValue::zero());
        assert_eq!(count_length(&Presentation::diagonal(&[2, 2, 2])).unwrap(), LengthValue::log_u64(8));
        assert!(count_length(&Presentation { gens: 1, relations: vec![], modulus: None }).unwrap().is_infinite());
        let big = Presentation { gens: 4, relations: vec![], modulus: Some(97) };
        assert!(matches!(count_length(&big), Err(Error::TooLarge(_))));
    }

    #[test]
    fn closures() {
        let p = Presentation::diagonal(&[2, 2, 2]);
        let down = vec![vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]];
        let t = brute_trajectory(&p, &down, &[vec![0, 0, 1]], 5).unwrap();
        assert_eq!(t.order(), 8);
        let id = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        let t = brute_trajectory(&p, &id, &[vec![1, 1, 0]], 4).unwrap();
        assert_eq!(t.order(), 2);
        assert!(t.contains(&[3, -1, 2]));
        let (w, s) = bernoulli_window(&Presentation::cyclic(2), 5);
        assert_eq!(count_length(&w).unwrap(), LengthValue::log_u64(32));
        let t = brute_trajectory(&w, &s, &[vec![1, 0, 0, 0, 0]], 3).unwrap();
        assert_eq!(t.length(), LengthValue::log_u64(8));
    }

    #[test]
    fn determinants() {
        assert_eq!(det_i128(vec![vec![2, 1], vec![0, 3]]), 6);
        assert_eq!(det_i128(vec![vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(det_i128(vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]), -3);
    }
}
