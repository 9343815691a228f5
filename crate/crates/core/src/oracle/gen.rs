use num_bigint::BigInt;
use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Presentation;
use crate::dynamics::{EndoSystem, Embedding, Seed};
use crate::error::Result;
use crate::fpmod::{FPModule, SVec, Submodule};
use crate::ring::{Integers, LengthFunction, Matrix, ValElement, Valuation};
use crate::scalars::{rat, Rational};
use crate::shiftmod::{bernoulli, bernoulli_sigma, CutSequence, MapRule, ORIGIN};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineChoice {
    Modular(u64),
    Integers,
    Valuation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyChoice {
    Finite,
    Bernoulli,
    Sigma,
    Embedding,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub max_gens: usize,
    pub max_entry: i64,
    pub max_den: i64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_gens: 4, max_entry: 9, max_den: 12 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub seed: u64,
    pub engine: EngineChoice,
    pub family: FamilyChoice,
    #[serde(default)]
    pub caps: Caps,
}

impl InstanceSpec {
    pub fn new(seed: u64, engine: EngineChoice, family: FamilyChoice) -> Self {
        InstanceSpec { seed, engine, family, caps: Caps::default() }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt)
    }
}

/// A torsion abelian group with an endomorphism, in disguised coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteInstance {
    pub pres: Presentation,
    /// Rows of the matrix; the image of `e_j` is column `j`.
    pub endo: Vec<Vec<i64>>,
    pub seed: Vec<Vec<i64>>,
}

fn bigs(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

impl FiniteInstance {
    pub fn module(&self) -> Result<FPModule<Integers>> {
        let rels: Vec<Vec<BigInt>> = self.pres.relations.iter().map(|c| bigs(c)).collect();
        match self.pres.modulus {
            Some(m) => FPModule::over_modular(m, self.pres.gens, &rels),
            None => FPModule::from_relations(&Integers, self.pres.gens, &rels),
        }
    }

    pub fn system(&self) -> Result<EndoSystem<Integers>> {
        let m = Matrix::from_rows(self.endo.iter().map(|r| bigs(r)).collect())?;
        EndoSystem::from_matrix(self.module()?, &m, LengthFunction::LogCard)
    }

    pub fn seed_of(&self) -> Seed<Integers> {
        Seed::new(self.seed.iter().map(|v| (ORIGIN, crate::fpmod::from_dense(&Integers, &bigs(v)))).collect())
    }
}

fn divisors(m: i64) -> Vec<i64> {
    (1..=m).filter(|d| m % d == 0).collect()
}

/// `(P, P⁻¹)` as a product of a few elementary operations.
fn unimodular(rng: &mut ChaCha8Rng, g: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let id = |g: usize| (0..g).map(|i| (0..g).map(|j| i64::from(i == j)).collect::<Vec<i64>>()).collect::<Vec<_>>();
    let (mut p, mut q) = (id(g), id(g));
    if g < 2 {
        return (p, q);
    }
    for _ in 0..rng.gen_range(0..=3) {
        let i = rng.gen_range(0..g);
        let mut j = rng.gen_range(0..g - 1);
        if j >= i {
            j += 1;
        }
        let c = rng.gen_range(-2..=2);
        // P ← E·P with E = I + c·E_ij; P⁻¹ ← P⁻¹·E⁻¹
        for k in 0..g {
            p[i][k] += c * p[j][k];
        }
        for row in q.iter_mut() {
            row[j] -= c * row[i];
        }
    }
    (p, q)
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, |r| r.len()));
    (0..n).map(|i| (0..m).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect()).collect()
}

fn finite_core(rng: &mut ChaCha8Rng, m: i64, caps: &Caps, nilpotent: bool) -> (Vec<i64>, Vec<Vec<i64>>) {
    let g = rng.gen_range(1..=caps.max_gens.min(3));
    let divs = divisors(m);
    let d: Vec<i64> = (0..g).map(|_| *divs.choose(rng).unwrap()).collect();
    let mut a = vec![vec![0i64; g]; g];
    for i in 0..g {
        for j in 0..g {
            if nilpotent && i >= j {
                continue;
            }
            // e_j ↦ Σ a_ij e_i needs d_j·a_ij ≡ 0 mod d_i
            let step = d[i] / d[i].gcd(&d[j]);
            a[i][j] = (rng.gen_range(0..=caps.max_entry) * step).rem_euclid(d[i].max(1));
        }
    }
    (d, a)
}

fn disguise(rng: &mut ChaCha8Rng, d: &[i64], a: &[Vec<i64>], modulus: Option<u64>) -> (Presentation, Vec<Vec<i64>>) {
    let g = d.len();
    let (p, q) = unimodular(rng, g);
    let relations = (0..g).map(|j| (0..g).map(|i| p[i][j] * d[j]).collect()).collect();
    let endo = mat_mul(&mat_mul(&p, a), &q);
    (Presentation { gens: g, relations, modulus }, endo)
}

/// A random endomorphism of a random finite abelian group of exponent
/// dividing `m`, with one or two random seed vectors.
pub fn gen_finite(spec: &InstanceSpec) -> FiniteInstance {
    let mut rng = spec.rng(1);
    let (m, modulus) = match spec.engine {
        EngineChoice::Modular(m) => (m as i64, Some(m)),
        _ => (rng.gen_range(2..=12), None),
    };
    let (d, a) = finite_core(&mut rng, m, &spec.caps, false);
    let (pres, endo) = disguise(&mut rng, &d, &a, modulus);
    let seed = (0..rng.gen_range(1..=2)).map(|_| (0..pres.gens).map(|_| rng.gen_range(0..m)).collect()).collect();
    FiniteInstance { pres, endo, seed }
}

/// `⊕ R/(x^{γ_i})` over the valuation engine with a monomial-entry endomorphism.
#[derive(Clone, Debug, PartialEq)]
pub struct ValuationInstance {
    pub cuts: Vec<Rational>,
    /// `(coefficient, exponent)` per entry, `None` for zero.
    pub endo: Vec<Vec<Option<(i64, Rational)>>>,
    pub seed: Vec<Vec<Option<Rational>>>,
}

fn rand_rat(rng: &mut ChaCha8Rng, max_den: i64, max_num_factor: i64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    rat(rng.gen_range(0..=max_num_factor * den), den)
}

impl ValuationInstance {
    pub fn system(&self) -> Result<EndoSystem<Valuation>> {
        let ds: Vec<ValElement> = self.cuts.iter().map(|c| ValElement::monomial(c.clone())).collect();
        let m = FPModule::diagonal(&Valuation, &ds);
        let rows = self
            .endo
            .iter()
            .map(|r| r.iter().map(|e| e.as_ref().map_or_else(ValElement::zero, |(c, q)| ValElement::term(rat(*c, 1), q.clone()))).collect())
            .collect();
        EndoSystem::from_matrix(m, &Matrix::from_rows(rows)?, LengthFunction::Valuation)
    }

    pub fn seed_of(&self) -> Seed<Valuation> {
        let v = |r: &Vec<Option<Rational>>| -> SVec<ValElement> {
            r.iter().enumerate().filter_map(|(i, q)| q.as_ref().map(|q| (i, ValElement::monomial(q.clone())))).collect()
        };
        Seed::new(self.seed.iter().map(|r| (ORIGIN, v(r))).collect())
    }
}

pub fn gen_valuation(spec: &InstanceSpec) -> ValuationInstance {
    let mut rng = spec.rng(2);
    let g = rng.gen_range(1..=spec.caps.max_gens.min(3));
    // one denominator per instance: mixed denominators make truncated inverses
    // range over a dense semigroup and entries grow to thousands of terms
    let den = rng.gen_range(1..=spec.caps.max_den);
    let q = |rng: &mut ChaCha8Rng, f: i64| rat(rng.gen_range(0..=f * den), den);
    let cuts: Vec<Rational> = (0..g).map(|_| q(&mut rng, 3) + rat(1, den)).collect();
    let mut endo = vec![vec![None; g]; g];
    for i in 0..g {
        for j in 0..g {
            if rng.gen_bool(0.3) {
                continue;
            }
            let floor = (cuts[i].clone() - cuts[j].clone()).max(rat(0, 1));
            let extra = if rng.gen_bool(0.5) { rat(0, 1) } else { q(&mut rng, 1) };
            let c = rng.gen_range(1..=spec.caps.max_entry);
            endo[i][j] = Some((c, floor + extra));
        }
    }
    let seed = (0..rng.gen_range(1..=2))
        .map(|_| (0..g).map(|_| rng.gen_bool(0.7).then(|| q(&mut rng, 1))).collect())
        .collect();
    ValuationInstance { cuts, endo, seed }
}

/// A non-increasing cut tail `a + b/(n + c)` with a non-negative limit `a`.
pub fn gen_cuts(spec: &InstanceSpec) -> String {
    let mut rng = spec.rng(3);
    let den = rng.gen_range(1..=spec.caps.max_den);
    let a = rat(rng.gen_range(0..=2 * den), den);
    let b = rng.gen_range(1..=3);
    let c = rng.gen_range(0..=3);
    format!("{a}+{b}/(n+{c})")
}

/// An exact sequence `0 → N → M → M/N → 0` of locally finite systems.
#[derive(Clone, Debug)]
pub enum AtInstance {
    Integers { sub: EndoSystem<Integers>, ambient: EndoSystem<Integers>, embedding: Embedding<Integers>, label: String },
    Valuation { sub: EndoSystem<Valuation>, ambient: EndoSystem<Valuation>, embedding: Embedding<Valuation>, label: String },
}

impl AtInstance {
    pub fn label(&self) -> &str {
        match self {
            AtInstance::Integers { label, .. } | AtInstance::Valuation { label, .. } => label,
        }
    }
}

/// `B(S) ↪ B(C)` for a random finite `C` and random `S ≤ C`.
fn bernoulli_pair(rng: &mut ChaCha8Rng, caps: &Caps) -> Result<(EndoSystem<Integers>, EndoSystem<Integers>, Embedding<Integers>, String)> {
    let m = rng.gen_range(2..=12);
    let (d, a) = finite_core(rng, m, caps, false);
    let (pres, _) = disguise(rng, &d, &a, None);
    let inst = FiniteInstance { pres, endo: vec![], seed: vec![] };
    let c = std::sync::Arc::new(inst.module()?);
    let gens: Vec<SVec<BigInt>> = (0..rng.gen_range(0..=2))
        .map(|_| crate::fpmod::from_dense(&Integers, &bigs(&(0..c.gens()).map(|_| rng.gen_range(0..m)).collect::<Vec<_>>())))
        .collect();
    let s = Submodule::generated(&c, gens)?;
    let s_gens = s.generators();
    let s_mod = s.as_module();
    let block_cols: Vec<Vec<BigInt>> = s_gens.iter().map(|v| crate::fpmod::to_dense(&Integers, v, c.gens())).collect();
    let block = if block_cols.is_empty() { Matrix::zeros(&Integers, c.gens(), 0) } else { Matrix::from_cols(c.gens(), &block_cols)? };
    let label = format!("B({}) in B({})", s_mod.describe(), c.describe());
    let sub = EndoSystem::from_pair(bernoulli(s_mod), LengthFunction::LogCard)?;
    let amb = EndoSystem::from_pair(bernoulli((*c).clone()), LengthFunction::LogCard)?;
    Ok((sub, amb, Embedding::Family(MapRule::periodic(ORIGIN, vec![block])), label))
}

/// Bernoulli composites over `ℤ` (odd seeds) or `x^c·B_σ ↪ B_σ` nests (even seeds).
pub fn gen_at(spec: &InstanceSpec) -> Result<AtInstance> {
    let mut rng = spec.rng(4);
    if spec.engine != EngineChoice::Valuation {
        let parts = rng.gen_range(1..=2);
        let mut subs = Vec::new();
        let mut ambs = Vec::new();
        let mut embs = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..parts {
            let (s, a, e, l) = bernoulli_pair(&mut rng, &spec.caps)?;
            subs.push(s);
            ambs.push(a);
            embs.push(e);
            labels.push(l);
        }
        if parts == 1 {
            let (sub, ambient, embedding) = (subs.pop().unwrap(), ambs.pop().unwrap(), embs.pop().unwrap());
            return Ok(AtInstance::Integers { sub, ambient, embedding, label: labels.pop().unwrap() });
        }
        return Ok(AtInstance::Integers {
            sub: EndoSystem::direct_sum(subs)?,
            ambient: EndoSystem::direct_sum(ambs)?,
            embedding: Embedding::Sum(embs),
            label: labels.join(" ⊕ "),
        });
    }
    let tail = gen_cuts(spec);
    let cuts = CutSequence::new(vec![], &tail)?;
    let lim = cuts.limit().clone();
    let den = rng.gen_range(1..=spec.caps.max_den);
    // 0 ≤ c ≤ γ_∞ keeps γ_n − c ≥ 0
    let c = (rat(rng.gen_range(0..=den), den) * lim.clone()).min(lim);
    let sub_cuts = cuts.minus(&c)?;
    let sub = EndoSystem::from_pair(bernoulli_sigma(&Valuation, sub_cuts)?, LengthFunction::Valuation)?;
    let ambient = EndoSystem::from_pair(bernoulli_sigma(&Valuation, cuts)?, LengthFunction::Valuation)?;
    let block = Matrix::from_rows(vec![vec![ValElement::monomial(c.clone())]])?;
    Ok(AtInstance::Valuation {
        sub,
        ambient,
        embedding: Embedding::Family(MapRule::periodic(ORIGIN, vec![block])),
        label: format!("x^({c})·B_σ({tail}) in B_σ({tail})"),
    })
}

/// `B(C) ⊕ (finite group with a nilpotent map)`.
pub fn gen_hyper(spec: &InstanceSpec) -> Result<(EndoSystem<Integers>, FiniteInstance)> {
    let mut rng = spec.rng(5);
    let m = rng.gen_range(2..=12);
    let (d, _) = finite_core(&mut rng, m, &spec.caps, false);
    let c = FiniteInstance { pres: Presentation::diagonal(&d), endo: vec![], seed: vec![] }.module()?;
    let (dn, an) = finite_core(&mut rng, m, &spec.caps, true);
    let (pres, endo) = disguise(&mut rng, &dn, &an, None);
    let nil = FiniteInstance { pres, endo, seed: vec![] };
    let sys = EndoSystem::direct_sum(vec![EndoSystem::from_pair(bernoulli(c), LengthFunction::LogCard)?, nil.system()?])?;
    Ok((sys, nil))
}

/// A system with a single-element seed, for colon chains.
#[derive(Clone, Debug)]
pub enum CyclicInstance {
    Integers { system: EndoSystem<Integers>, x: SVec<BigInt>, label: String },
    Valuation { system: EndoSystem<Valuation>, x: SVec<ValElement>, label: String },
}

pub fn gen_cyclic(spec: &InstanceSpec) -> Result<CyclicInstance> {
    let mut rng = spec.rng(6);
    match spec.seed % 3 {
        0 => {
            let m = rng.gen_range(2..=12);
            let (d, a) = finite_core(&mut rng, m, &spec.caps, false);
            let c = FiniteInstance { pres: Presentation::diagonal(&d), endo: vec![], seed: vec![] }.module()?;
            let _ = a;
            let x = crate::fpmod::from_dense(&Integers, &bigs(&(0..c.gens()).map(|_| rng.gen_range(0..m)).collect::<Vec<_>>()));
            let label = format!("B({})", c.describe());
            Ok(CyclicInstance::Integers { system: EndoSystem::from_pair(bernoulli(c), LengthFunction::LogCard)?, x, label })
        }
        1 => {
            let inst = gen_finite(&InstanceSpec { engine: EngineChoice::Integers, ..*spec });
            let x = crate::fpmod::from_dense(&Integers, &bigs(&inst.seed[0]));
            Ok(CyclicInstance::Integers { system: inst.system()?, x, label: "finite".into() })
        }
        _ => {
            let tail = gen_cuts(spec);
            let q = rand_rat(&mut rng, spec.caps.max_den, 1);
            let sys = EndoSystem::from_pair(bernoulli_sigma(&Valuation, CutSequence::new(vec![], &tail)?)?, LengthFunction::Valuation)?;
            Ok(CyclicInstance::Valuation { system: sys, x: SVec::from([(0, ValElement::monomial(q.clone()))]), label: format!("B_σ({tail}), x^({q})") })
        }
    }
}

/// A generated system with its seed (and, for embeddings, the sequence).
#[derive(Clone, Debug)]
pub enum Generated {
    Integers { system: EndoSystem<Integers>, seed: Seed<Integers>, raw: Option<FiniteInstance> },
    Valuation { system: EndoSystem<Valuation>, seed: Seed<Valuation> },
    Sequence(AtInstance),
}

pub fn gen_system(spec: &InstanceSpec) -> Result<Generated> {
    Ok(match (spec.family, spec.engine) {
        (FamilyChoice::Embedding, _) => Generated::Sequence(gen_at(spec)?),
        (FamilyChoice::Finite, EngineChoice::Valuation) => {
            let v = gen_valuation(spec);
            Generated::Valuation { system: v.system()?, seed: v.seed_of() }
        }
        (FamilyChoice::Finite, _) => {
            let f = gen_finite(spec);
            Generated::Integers { system: f.system()?, seed: f.seed_of(), raw: Some(f) }
        }
        (FamilyChoice::Bernoulli, _) => {
            let f = gen_finite(&InstanceSpec { engine: EngineChoice::Integers, ..*spec });
            let sys = EndoSystem::from_pair(bernoulli(f.module()?), LengthFunction::LogCard)?;
            let seed = Seed::component(&sys, ORIGIN);
            Generated::Integers { system: sys, seed, raw: Some(f) }
        }
        (FamilyChoice::Sigma, _) => {
            let sys = EndoSystem::from_pair(bernoulli_sigma(&Valuation, CutSequence::new(vec![], &gen_cuts(spec))?)?, LengthFunction::Valuation)?;
            let seed = Seed::component(&sys, ORIGIN);
            Generated::Valuation { system: sys, seed }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::count_length;

    #[test]
    fn deterministic() {
        let spec = InstanceSpec::new(1, EngineChoice::Modular(4), FamilyChoice::Finite);
        let a = serde_json::to_string(&gen_finite(&spec)).unwrap();
        assert_eq!(a, serde_json::to_string(&gen_finite(&spec)).unwrap());
        assert_ne!(a, serde_json::to_string(&gen_finite(&InstanceSpec { seed: 2, ..spec })).unwrap());
        assert_eq!(gen_cuts(&spec), gen_cuts(&spec));
    }

    #[test]
    fn generated_systems_are_valid() {
        for seed in 0..20 {
            let spec = InstanceSpec::new(seed, EngineChoice::Modular(12), FamilyChoice::Finite);
            let f = gen_finite(&spec);
            let sys = f.system().unwrap();
            let crate::dynamics::Body::Finite { module, .. } = sys.body() else { panic!() };
            assert_eq!(module.length(LengthFunction::LogCard).unwrap(), count_length(&f.pres).unwrap());
            gen_valuation(&spec).system().unwrap();
            CutSequence::new(vec![], &gen_cuts(&spec)).unwrap();
            gen_at(&spec).unwrap();
            gen_at(&InstanceSpec { engine: EngineChoice::Valuation, ..spec }).unwrap();
            gen_hyper(&spec).unwrap();
            gen_cyclic(&spec).unwrap();
        }
    }
}
