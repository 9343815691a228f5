use std::cmp::Ordering;
use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gen::{gen_at, gen_cyclic, gen_finite, gen_hyper, gen_valuation, AtInstance, CyclicInstance, EngineChoice, FamilyChoice, InstanceSpec};
use super::{bernoulli_window, brute_trajectory, count_length, Presentation};
use crate::dynamics::{
    alpha_seq, at_check, colon_chain, entropy, hyperkernel_reduce, invert_endo, multiplicity, trajectory, EndoSystem,
    EntropyOptions, Seed, Verdict,
};
use crate::error::Result;
use crate::fpmod::{from_dense, FPModule};
use crate::ring::{smith_reduce, Integers, LatticeRing, LengthFunction, Matrix, Modular, PrimeField, Ring, ValElement, Valuation};
use crate::scalars::{rat, LengthValue};
use crate::shiftmod::{bernoulli, bernoulli_sigma, two_sided, CutSequence, ORIGIN};

const KEEP_FAILURES: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// The first few failing cases.
    pub examples: Vec<String>,
    pub seconds: f64,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Tally {
    name: String,
    cases: usize,
    failures: usize,
    examples: Vec<String>,
    start: Instant,
}

impl Tally {
    fn new(name: impl Into<String>) -> Self {
        Tally { name: name.into(), cases: 0, failures: 0, examples: Vec::new(), start: Instant::now() }
    }

    fn record(&mut self, label: impl FnOnce() -> String, outcome: Result<std::result::Result<(), String>>) {
        self.cases += 1;
        let msg = match outcome {
            Ok(Ok(())) => return,
            Ok(Err(m)) => m,
            Err(e) => format!("error: {e}"),
        };
        self.failures += 1;
        if self.examples.len() < KEEP_FAILURES {
            self.examples.push(format!("{}: {msg}", label()));
        }
    }

    fn finish(self) -> PropertyResult {
        PropertyResult {
            name: self.name,
            cases: self.cases,
            failures: self.failures,
            examples: self.examples,
            seconds: self.start.elapsed().as_secs_f64(),
        }
    }
}

fn expect(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmithEngine {
    Integers,
    Modular(u64),
    PrimeField(u64),
    Valuation,
}

fn naive_mul<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    let rows = (0..a.rows())
        .map(|i| (0..b.cols()).map(|j| (0..a.cols()).fold(ring.zero(), |s, t| ring.add(&s, &ring.mul(&a[(i, t)], &b[(t, j)])))).collect())
        .collect();
    Matrix::from_rows(rows).unwrap_or_else(|_| Matrix::zeros(ring, a.rows(), b.cols()))
}

/// Cofactor expansion along the first row.
fn naive_det<R: Ring>(ring: &R, a: &Matrix<R::Elem>) -> R::Elem {
    let n = a.rows();
    if n == 0 {
        return ring.one();
    }
    let mut acc = ring.zero();
    for j in 0..n {
        let minor: Vec<Vec<R::Elem>> = (1..n).map(|i| (0..n).filter(|&c| c != j).map(|c| a[(i, c)].clone()).collect()).collect();
        let m = if minor.is_empty() { ring.one() } else { naive_det(ring, &Matrix::from_rows(minor).expect("square minor")) };
        let term = ring.mul(&a[(0, j)], &m);
        acc = if j % 2 == 0 { ring.add(&acc, &term) } else { ring.sub(&acc, &term) };
    }
    acc
}

fn random_matrix<R: Ring>(rng: &mut ChaCha8Rng, mut entry: impl FnMut(&mut ChaCha8Rng) -> R::Elem, ring: &R) -> Matrix<R::Elem> {
    let (m, n) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
    let sparse = rng.gen_bool(0.3);
    let rows = (0..m).map(|_| (0..n).map(|_| if sparse && rng.gen_bool(0.5) { ring.zero() } else { entry(rng) }).collect()).collect();
    Matrix::from_rows(rows).expect("rectangular")
}

/// Structural checks shared by all engines: `U·A·V = D` recomputed with a
/// naive product, `D` diagonal with a divisibility chain, `U` and `V` invertible.
fn smith_structure<R: Ring>(ring: &R, a: &Matrix<R::Elem>) -> std::result::Result<Vec<R::Elem>, String> {
    smith_structure_with(ring, a, |e| e.clone())
}

/// As [`smith_structure`], taking determinants of `U` and `V` after applying
/// `residue`, a ring map that detects units.
fn smith_structure_with<R: Ring>(ring: &R, a: &Matrix<R::Elem>, residue: impl Fn(&R::Elem) -> R::Elem) -> std::result::Result<Vec<R::Elem>, String> {
    let s = smith_reduce(ring, a);
    let uav = naive_mul(ring, &naive_mul(ring, &s.left, a), &s.right);
    expect(uav == s.reduced, || "U·A·V differs from the reduced matrix".into())?;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let want = if i == j && i < s.diagonal.len() { s.diagonal[i].clone() } else { ring.zero() };
            expect(s.reduced[(i, j)] == want, || format!("entry ({i},{j}) of D is {}", ring.fmt_elem(&s.reduced[(i, j)])))?;
        }
    }
    for w in s.diagonal.windows(2) {
        expect(ring.divides(&w[0], &w[1]), || format!("{} does not divide {}", ring.fmt_elem(&w[0]), ring.fmt_elem(&w[1])))?;
    }
    expect(s.diagonal.iter().all(|d| !ring.is_zero(d)), || "zero among the invariants".into())?;
    expect(s.free_rank == a.rows() - s.diagonal.len(), || "free rank mismatch".into())?;
    let unit = |m: &Matrix<R::Elem>| ring.is_unit(&naive_det(ring, &m.map(&residue)));
    expect(unit(&s.left) && unit(&s.right), || "U or V is not invertible".into())?;
    Ok(s.diagonal)
}

fn sum_lengths(ls: impl IntoIterator<Item = Result<LengthValue>>) -> Result<LengthValue> {
    ls.into_iter().try_fold(LengthValue::zero(), |acc, l| Ok(acc.plus(&l?)))
}

/// Over a domain, `Σ L(R/d_i) = L(R/det A)` for square nonsingular `A`.
fn det_identity<R: LatticeRing>(ring: &R, lf: LengthFunction, a: &Matrix<R::Elem>, diag: &[R::Elem]) -> Result<std::result::Result<(), String>> {
    if a.rows() != a.cols() {
        return Ok(Ok(()));
    }
    let det = naive_det(ring, a);
    if ring.is_zero(&det) {
        return Ok(expect(diag.len() < a.rows(), || "singular matrix with full invariants".into()));
    }
    let lhs = sum_lengths(diag.iter().map(|d| ring.cyclic_length(lf, d)))?;
    let rhs = ring.cyclic_length(lf, &det)?;
    Ok(expect(lhs == rhs, || format!("Σ L(R/d_i) = {lhs} but L(R/det) = {rhs}")))
}

fn int_presentation(a: &Matrix<BigInt>, modulus: Option<u64>) -> Presentation {
    let to_i64 = |x: &BigInt| i64::try_from(x).expect("small entries");
    Presentation { gens: a.rows(), relations: (0..a.cols()).map(|j| a.col(j).iter().map(to_i64).collect()).collect(), modulus }
}

pub fn check_smith(engine: SmithEngine, cases: usize, seed: u64) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5111);
    let label = match engine {
        SmithEngine::Integers => "integers".to_string(),
        SmithEngine::Modular(m) => format!("mod_{m}"),
        SmithEngine::PrimeField(p) => format!("gf_{p}"),
        SmithEngine::Valuation => "valuation".to_string(),
    };
    let mut t = Tally::new(format!("smith_{label}"));
    for case in 0..cases {
        match engine {
            SmithEngine::Integers => {
                let a = random_matrix(&mut rng, |r| BigInt::from(r.gen_range(-9..=9)), &Integers);
                let out = (|| {
                    let diag = match smith_structure(&Integers, &a) {
                        Ok(d) => d,
                        Err(m) => return Ok(Err(m)),
                    };
                    if let Err(e) = det_identity(&Integers, LengthFunction::LogCard, &a, &diag)? {
                        return Ok(Err(e));
                    }
                    // the cokernel counted by enumeration
                    let p = int_presentation(&a, None);
                    if p.exponent().is_none() {
                        return Ok(expect(diag.len() < a.rows(), || "infinite cokernel with full invariants".into()));
                    }
                    let lhs = sum_lengths(diag.iter().map(|d| Integers.cyclic_length(LengthFunction::LogCard, d)))?;
                    let counted = match count_length(&p) {
                        Err(crate::error::Error::TooLarge(_)) => return Ok(Ok(())),
                        other => other?,
                    };
                    Ok(expect(lhs == counted, || format!("invariants give {lhs}, enumeration {counted}")))
                })();
                t.record(|| format!("case {case}"), out);
            }
            SmithEngine::Modular(m) => {
                let ring = Modular::new(m).expect("modulus ≥ 2");
                let a = random_matrix(&mut rng, |r| ring.from_i64(r.gen_range(0..m as i64)), &ring);
                let out = (|| {
                    let diag = match smith_structure(&ring, &a) {
                        Ok(d) => d,
                        Err(m) => return Ok(Err(m)),
                    };
                    // ℤ/m is not a domain: compare with the enumerated cokernel instead of det
                    let lhs = sum_lengths(
                        diag.iter().map(|d| ring.cyclic_length(LengthFunction::LogCard, d)).chain(
                            (0..a.rows() - diag.len()).map(|_| ring.cyclic_length(LengthFunction::LogCard, &BigInt::from(0))),
                        ),
                    )?;
                    let counted = count_length(&int_presentation(&a, Some(m)))?;
                    Ok(expect(lhs == counted, || format!("invariants give {lhs}, enumeration {counted}")))
                })();
                t.record(|| format!("case {case}"), out);
            }
            SmithEngine::PrimeField(p) => {
                let ring = PrimeField::new(p).expect("prime");
                let a = random_matrix(&mut rng, |r| r.gen_range(0..p), &ring);
                let out = smith_structure(&ring, &a).map_or_else(|m| Ok(Err(m)), |diag| det_identity(&ring, LengthFunction::Dim, &a, &diag));
                t.record(|| format!("case {case}"), out);
            }
            SmithEngine::Valuation => {
                // monomial entries; sums appear during elimination
                let mut entry = |r: &mut ChaCha8Rng| {
                    if r.gen_ratio(1, 6) {
                        return ValElement::zero();
                    }
                    let c = rat(r.gen_range(1..=3) * if r.gen() { 1 } else { -1 }, 1);
                    ValElement::monomial(rat(r.gen_range(0..=8), r.gen_range(1..=3))).scale(&c)
                };
                let a = random_matrix(&mut rng, &mut entry, &Valuation);
                // the constant term is a ring map to ℚ, nonzero exactly on units
                let constant = |e: &ValElement| ValElement::constant(e.terms().find(|(q, _)| **q == rat(0, 1)).map_or_else(|| rat(0, 1), |(_, c)| c.clone()));
                let out = smith_structure_with(&Valuation, &a, constant)
                    .map_or_else(|m| Ok(Err(m)), |diag| det_identity(&Valuation, LengthFunction::Valuation, &a, &diag));
                t.record(|| format!("case {case}"), out);
            }
        }
    }
    t.finish()
}

fn engines(i: usize) -> EngineChoice {
    [EngineChoice::Modular(12), EngineChoice::Integers, EngineChoice::Modular(8), EngineChoice::Modular(30)][i % 4]
}

/// Module lengths from the echelon form against enumeration.
pub fn check_lengths(cases: usize, seed: u64) -> PropertyResult {
    let mut t = Tally::new("count_length");
    for i in 0..cases {
        let spec = InstanceSpec::new(seed.wrapping_add(i as u64), engines(i), FamilyChoice::Finite);
        let inst = gen_finite(&spec);
        let out = (|| {
            let m = inst.module()?;
            let ours = m.length(LengthFunction::LogCard)?;
            let counted = count_length(&inst.pres)?;
            Ok(expect(ours == counted, || format!("module gives {ours}, enumeration {counted}")))
        })();
        t.record(|| serde_json::to_string(&inst).unwrap_or_default(), out);
    }
    t.finish()
}

/// `L(T_n)` from the lattice machinery against closure by enumeration, for
/// finite systems and for windows of Bernoulli shifts.
pub fn check_brute_trajectories(cases: usize, seed: u64) -> PropertyResult {
    let mut t = Tally::new("brute_trajectories");
    for i in 0..cases {
        let spec = InstanceSpec::new(seed.wrapping_add(i as u64), engines(i), FamilyChoice::Finite);
        let inst = gen_finite(&spec);
        let n = 1 + i % 6;
        if i % 2 == 0 {
            let out = (|| {
                let sys = inst.system()?;
                let ours = trajectory(&sys, &inst.seed_of(), n)?.length(LengthFunction::LogCard)?;
                let brute = brute_trajectory(&inst.pres, &inst.endo, &inst.seed, n)?.length();
                Ok(expect(ours == brute, || format!("T_{n}: {ours} vs {brute}")))
            })();
            t.record(|| serde_json::to_string(&inst).unwrap_or_default(), out);
        } else {
            // windows of B(C) grow like |C|^n, so C stays tiny
            let ds: Vec<i64> = (0..1 + i % 2).map(|k| [2, 3, 4, 6][(i / 2 + k) % 4]).collect();
            let c = Presentation::diagonal(&ds);
            let mut n = n;
            let per_copy = (ds.iter().fold(1i64, |a, &d| num_integer::Integer::lcm(&a, &d)) as f64).powi(ds.len() as i32);
            while n > 1 && per_copy.powi(n as i32 + 1) > super::ENUM_LIMIT as f64 {
                n -= 1;
            }
            let out = (|| {
                let m = super::FiniteInstance { pres: c.clone(), endo: vec![], seed: vec![] }.module()?;
                let sys = EndoSystem::from_pair(bernoulli(m), LengthFunction::LogCard)?;
                let ours = trajectory(&sys, &Seed::component(&sys, ORIGIN), n)?.length(LengthFunction::LogCard)?;
                let (w, shift) = bernoulli_window(&c, n + 1);
                let seed: Vec<Vec<i64>> = (0..c.gens).map(|k| (0..w.gens).map(|j| i64::from(j == k)).collect()).collect();
                let brute = brute_trajectory(&w, &shift, &seed, n)?.length();
                Ok(expect(ours == brute, || format!("Bernoulli T_{n}: {ours} vs {brute}")))
            })();
            t.record(|| format!("B({:?})", c), out);
        }
    }
    t.finish()
}

fn alpha_checks(seq: &crate::dynamics::AlphaSequence) -> Result<std::result::Result<(), String>> {
    for (i, w) in seq.alphas.windows(2).enumerate() {
        if w[1].try_cmp(&w[0])? == Ordering::Greater {
            return Ok(Err(format!("α_{} > α_{}", i + 2, i + 1)));
        }
    }
    let l = &seq.lengths;
    for (i, a) in seq.alphas.iter().enumerate() {
        if l[i].plus(a) != l[i + 1] {
            return Ok(Err(format!("L(T_{}) ≠ L(T_{}) + α_{}", i + 2, i + 1, i + 1)));
        }
    }
    // subadditivity, and L(T_n)/n never increases (Fekete's limit is the infimum)
    for a in 1..=l.len() {
        for b in 1..=l.len() - a {
            if l[a + b - 1].try_cmp(&l[a - 1].plus(&l[b - 1]))? == Ordering::Greater {
                return Ok(Err(format!("L(T_{}) > L(T_{a}) + L(T_{b})", a + b)));
            }
        }
    }
    for n in 1..l.len() {
        let (x, y) = (l[n - 1].mul_int((n + 1) as u64), l[n].mul_int(n as u64));
        if y.try_cmp(&x)? == Ordering::Greater {
            return Ok(Err(format!("L(T_{})/{} > L(T_{n})/{n}", n + 1, n + 1)));
        }
    }
    Ok(Ok(()))
}

/// Monotone α, additivity of the α-steps, subadditivity and the Fekete
/// infimum on random trajectories of every kind.
pub fn check_alpha_properties(cases: usize, seed: u64) -> PropertyResult {
    let mut t = Tally::new("alpha_fekete");
    for i in 0..cases {
        let s = seed.wrapping_add(i as u64);
        let n = 6 + i % 5;
        let (label, out) = match i % 4 {
            0 => {
                let inst = gen_finite(&InstanceSpec::new(s, engines(i), FamilyChoice::Finite));
                let out = inst.system().and_then(|sys| alpha_seq(&sys, &inst.seed_of(), n)).and_then(|q| alpha_checks(&q));
                (serde_json::to_string(&inst).unwrap_or_default(), out)
            }
            1 => {
                let inst = gen_valuation(&InstanceSpec::new(s, EngineChoice::Valuation, FamilyChoice::Finite));
                let out = inst.system().and_then(|sys| alpha_seq(&sys, &inst.seed_of(), n)).and_then(|q| alpha_checks(&q));
                (format!("{inst:?}"), out)
            }
            2 => {
                let inst = gen_finite(&InstanceSpec::new(s, EngineChoice::Integers, FamilyChoice::Bernoulli));
                let out = (|| {
                    let sys = EndoSystem::from_pair(bernoulli(inst.module()?), LengthFunction::LogCard)?;
                    let mut rng = ChaCha8Rng::seed_from_u64(s);
                    let v: Vec<BigInt> = (0..inst.pres.gens).map(|_| BigInt::from(rng.gen_range(0..12))).collect();
                    let q = alpha_seq(&sys, &Seed::element(ORIGIN, from_dense(&Integers, &v)), n)?;
                    alpha_checks(&q)
                })();
                (format!("B({:?})", inst.pres), out)
            }
            _ => {
                let tail = super::gen_cuts(&InstanceSpec::new(s, EngineChoice::Valuation, FamilyChoice::Sigma));
                let out = (|| {
                    let sys = EndoSystem::from_pair(bernoulli_sigma(&Valuation, CutSequence::new(vec![], &tail)?)?, LengthFunction::Valuation)?;
                    let q = alpha_seq(&sys, &Seed::component(&sys, ORIGIN), n)?;
                    alpha_checks(&q)
                })();
                (format!("B_σ({tail})"), out)
            }
        };
        t.record(|| label, out);
    }
    t.finish()
}

/// `L(R/J_n) = α_n` along cyclic trajectories.
pub fn check_colon(cases: usize, seed: u64, n_max: usize) -> PropertyResult {
    let mut t = Tally::new("colon_chain");
    for i in 0..cases {
        let spec = InstanceSpec::new(seed.wrapping_add(i as u64), EngineChoice::Integers, FamilyChoice::Finite);
        let (label, out) = match gen_cyclic(&spec) {
            Err(e) => ("generation".to_string(), Err(e)),
            Ok(CyclicInstance::Integers { system, x, label }) => {
                let out = colon_chain(&system, ORIGIN, &x, n_max).map(|c| expect(c.consistent, || "L(R/J_n) ≠ α_n".into()));
                (label, out)
            }
            Ok(CyclicInstance::Valuation { system, x, label }) => {
                let out = colon_chain(&system, ORIGIN, &x, n_max).map(|c| expect(c.consistent, || "L(R/J_n) ≠ α_n".into()));
                (label, out)
            }
        };
        t.record(|| label, out);
    }
    t.finish()
}

/// Addition on exact sequences of locally finite systems.
pub fn check_at(cases: usize, seed: u64) -> PropertyResult {
    let mut t = Tally::new("addition");
    let opts = EntropyOptions::default();
    let ok = |v: Verdict| expect(v != Verdict::Violated, || "additivity violated".into());
    for i in 0..cases {
        let engine = if i % 2 == 0 { EngineChoice::Integers } else { EngineChoice::Valuation };
        let inst = gen_at(&InstanceSpec::new(seed.wrapping_add(i as u64), engine, FamilyChoice::Embedding));
        let (label, out) = match inst {
            Err(e) => ("generation".to_string(), Err(e)),
            Ok(AtInstance::Integers { sub, ambient, embedding, label }) => (label, at_check(&sub, &ambient, &embedding, &opts).map(|r| ok(r.verdict))),
            Ok(AtInstance::Valuation { sub, ambient, embedding, label }) => (label, at_check(&sub, &ambient, &embedding, &opts).map(|r| ok(r.verdict))),
        };
        t.record(|| label, out);
    }
    t.finish()
}

/// Quotienting out the hyperkernel leaves the entropy unchanged.
pub fn check_hyperkernel(cases: usize, seed: u64) -> PropertyResult {
    let mut t = Tally::new("hyperkernel");
    let opts = EntropyOptions::default();
    for i in 0..cases {
        let spec = InstanceSpec::new(seed.wrapping_add(i as u64), EngineChoice::Integers, FamilyChoice::Finite);
        let mut label = String::new();
        let out = (|| {
            let (sys, nil) = gen_hyper(&spec)?;
            label = format!("{} with nilpotent {}", sys.describe(), serde_json::to_string(&nil).unwrap_or_default());
            let before = entropy(&sys, &opts)?;
            let hk = hyperkernel_reduce(&sys, 64)?;
            let after = entropy(&hk.reduced, &opts)?;
            Ok(expect(before.exact.is_some() && before.exact == after.exact, || {
                format!("entropy {:?} before, {:?} after", before.exact, after.exact)
            }))
        })();
        t.record(|| label, out);
    }
    t.finish()
}

/// Multiplicity of two-sided shifts equals the entropy of the inverse, and
/// vanishes on finite systems.
pub fn check_multiplicity(cases: usize, seed: u64) -> PropertyResult {
    let mut t = Tally::new("multiplicity");
    let opts = EntropyOptions::default();
    for i in 0..cases {
        let inst = gen_finite(&InstanceSpec::new(seed.wrapping_add(i as u64), EngineChoice::Integers, FamilyChoice::Finite));
        let out = (|| {
            if i % 2 == 0 {
                let m: FPModule<Integers> = inst.module()?;
                let sys = EndoSystem::from_pair(two_sided(m.clone()), LengthFunction::LogCard)?;
                let mult = multiplicity(&sys, &opts)?;
                let inv = entropy(&invert_endo(&sys)?, &opts)?;
                let base = m.length(LengthFunction::LogCard)?;
                Ok(expect(mult.exact == inv.exact && inv.exact == Some(base.clone()), || {
                    format!("mult {:?}, inverse {:?}, L(M) = {base}", mult.exact, inv.exact)
                }))
            } else {
                let sys = inst.system()?;
                let mult = multiplicity(&sys, &opts)?;
                Ok(expect(mult.exact == Some(LengthValue::zero()), || format!("finite system has multiplicity {:?}", mult.exact)))
            }
        })();
        t.record(|| serde_json::to_string(&inst).unwrap_or_default(), out);
    }
    t.finish()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub properties: Vec<PropertyResult>,
    pub passed: bool,
    pub seconds: f64,
}

/// Every property at `scale` times a small base case count.
pub fn run_suite(seed: u64, scale: usize) -> SuiteReport {
    let start = Instant::now();
    let k = scale.max(1);
    let properties = vec![
        check_smith(SmithEngine::Integers, 20 * k, seed),
        check_smith(SmithEngine::Modular(12), 20 * k, seed),
        check_smith(SmithEngine::PrimeField(5), 20 * k, seed),
        check_smith(SmithEngine::Valuation, 20 * k, seed),
        check_lengths(10 * k, seed),
        check_brute_trajectories(10 * k, seed),
        check_alpha_properties(20 * k, seed),
        check_colon(3 * k, seed, 16),
        check_at(5 * k, seed),
        check_hyperkernel(2 * k, seed),
        check_multiplicity(4 * k, seed),
    ];
    let passed = properties.iter().all(PropertyResult::passed);
    SuiteReport { seed, properties, passed, seconds: start.elapsed().as_secs_f64() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let r = run_suite(7, 1);
        for p in &r.properties {
            assert!(p.passed(), "{}: {:?}", p.name, p.examples);
        }
    }

    #[test]
    fn naive_det_matches() {
        let a = Matrix::from_rows(vec![vec![BigInt::from(2), BigInt::from(1)], vec![BigInt::from(4), BigInt::from(5)]]).unwrap();
        assert_eq!(naive_det(&Integers, &a), BigInt::from(6));
    }
}
