//! Trajectories, α-sequences and certified entropies of module endomorphisms.
//!
//! Every computation runs on a finite materialization: the module itself for
//! finitely presented systems, or a window of a shift family large enough that
//! the requested number of steps never leaves it.

mod addition;
mod auto;
mod colon;
mod multi;

use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use addition::{at_check, quotient_system, zero_embedding, ATReport, Embedding, Verdict};
pub use auto::{auto_entropy, hyperkernel_reduce, invert_endo, multiplicity, Hyperkernel, PartKernel};
pub use colon::{colon_chain, ColonChain};
pub use multi::{multivar_entropy, MultiEndoSystem, MultiResult};

use crate::error::{Error, Result};
use crate::fpmod::{shift_positions, FPModule, Morphism, SVec, Submodule};
use crate::ring::{smith_reduce, LatticeRing, LengthFunction, Matrix};
use crate::scalars::{LengthValue, Rational};
use crate::shiftmod::{
    closed_form_entropy, truncate, BandedEndo, FamilyKind, Grade, SeedKind, ShiftFamily, TailRule, Window, ORIGIN,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    TrajectoryStabilized,
    AlphaZero,
    ClosedForm,
    AutoFormula,
    /// `L(M/φM) − L(Ker φ)` on a finitely presented module.
    DirectFormula,
    BoundsOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormKind {
    Bernoulli,
    TwoSided,
    Grid,
    BernoulliSigma,
    /// Trajectories sit inside a module of finite length.
    FiniteLength,
    /// An identity or zero direction among several commuting maps.
    DegenerateDirection,
    DirectSum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyResult {
    pub exact: Option<LengthValue>,
    pub lower: LengthValue,
    pub upper: LengthValue,
    pub certificate: Certificate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ClosedFormKind>,
    pub steps_used: usize,
    /// Decimal shadow of `exact` (or of `upper` for bounds).
    #[serde(default)]
    pub approx: Option<f64>,
}

impl EntropyResult {
    pub fn exact(v: LengthValue, certificate: Certificate, steps_used: usize) -> Self {
        let approx = v.is_finite().then(|| v.to_f64());
        EntropyResult { exact: Some(v.clone()), lower: v.clone(), upper: v, certificate, closed_form: None, steps_used, approx }
    }

    pub fn closed(v: LengthValue, kind: ClosedFormKind, steps_used: usize) -> Self {
        let mut r = Self::exact(v, Certificate::ClosedForm, steps_used);
        r.closed_form = Some(kind);
        r
    }

    pub fn bounds(lower: LengthValue, upper: LengthValue, steps_used: usize) -> Self {
        let approx = upper.is_finite().then(|| upper.to_f64());
        EntropyResult { exact: None, lower, upper, certificate: Certificate::BoundsOnly, closed_form: None, steps_used, approx }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Sum of independent results (direct sums add).
    fn sum(parts: &[EntropyResult]) -> Self {
        let add = |f: fn(&EntropyResult) -> &LengthValue| parts.iter().fold(LengthValue::zero(), |a, p| a.plus(f(p)));
        let steps = parts.iter().map(|p| p.steps_used).max().unwrap_or(0);
        if parts.iter().all(|p| p.is_exact()) {
            let v = add(|p| &p.lower);
            let first = parts.first().map(|p| (p.certificate, p.closed_form));
            match first {
                Some((c, k)) if parts.iter().all(|p| (p.certificate, p.closed_form) == (c, k)) => {
                    let mut r = Self::exact(v, c, steps);
                    r.closed_form = k;
                    r
                }
                None => Self::exact(v, Certificate::TrajectoryStabilized, 0),
                _ => Self::closed(v, ClosedFormKind::DirectSum, steps),
            }
        } else {
            Self::bounds(add(|p| &p.lower), add(|p| &p.upper), steps)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EntropyOptions {
    /// Number of trajectory extensions allowed.
    pub budget: usize,
    /// Compute even when the ambient is not locally L-finite.
    pub force: bool,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions { budget: 64, force: false }
    }
}

impl EntropyOptions {
    pub fn with_budget(budget: usize) -> Self {
        EntropyOptions { budget, ..Self::default() }
    }
}

/// `M_φ`: a module with an endomorphism.
#[derive(Clone, Debug)]
pub struct EndoSystem<R: LatticeRing> {
    body: Body<R>,
    lf: LengthFunction,
}

#[derive(Clone, Debug)]
pub enum Body<R: LatticeRing> {
    Finite { module: Arc<FPModule<R>>, endo: Morphism<R> },
    Family { family: Arc<ShiftFamily<R>>, endo: Arc<BandedEndo<R>> },
    Sum(Vec<EndoSystem<R>>),
}

impl<R: LatticeRing> EndoSystem<R> {
    pub fn finite(endo: Morphism<R>, lf: LengthFunction) -> Result<Self> {
        if *endo.source() != *endo.target() {
            return Err(Error::Invalid("an endomorphism needs equal source and target".into()));
        }
        endo.source().ring().check_length(lf)?;
        Ok(EndoSystem { body: Body::Finite { module: endo.source().clone(), endo }, lf })
    }

    /// From a matrix acting on the generators of `module`.
    pub fn from_matrix(module: FPModule<R>, m: &Matrix<R::Elem>, lf: LengthFunction) -> Result<Self> {
        let module = Arc::new(module);
        Self::finite(Morphism::from_matrix(&module, &module, m)?, lf)
    }

    /// A family system; families without a tail are materialized outright.
    pub fn family(family: ShiftFamily<R>, endo: BandedEndo<R>, lf: LengthFunction) -> Result<Self> {
        family.ring().check_length(lf)?;
        if !family.has_tail() {
            let Some((lo, hi)) = family.explicit_hull() else {
                let zero = Arc::new(FPModule::zero(family.ring()));
                return Self::finite(Morphism::zero(&zero, &zero), lf);
            };
            let t = truncate(&family, &[&endo], Window::new(lo, hi))?;
            let endo = t.endos.into_iter().next().expect("one endomorphism");
            return Self::finite(endo, lf);
        }
        Ok(EndoSystem { body: Body::Family { family: Arc::new(family), endo: Arc::new(endo) }, lf })
    }

    pub fn from_pair(pair: (ShiftFamily<R>, BandedEndo<R>), lf: LengthFunction) -> Result<Self> {
        Self::family(pair.0, pair.1, lf)
    }

    pub fn direct_sum(parts: Vec<EndoSystem<R>>) -> Result<Self> {
        let lf = parts.first().ok_or_else(|| Error::Invalid("empty direct sum".into()))?.lf;
        if parts.iter().any(|p| p.lf != lf) {
            return Err(Error::Invalid("direct summands use different length functions".into()));
        }
        Ok(EndoSystem { body: Body::Sum(parts), lf })
    }

    pub fn body(&self) -> &Body<R> {
        &self.body
    }

    pub fn length_function(&self) -> LengthFunction {
        self.lf
    }

    pub fn parts(&self) -> Option<&[EndoSystem<R>]> {
        match &self.body {
            Body::Sum(p) => Some(p),
            _ => None,
        }
    }

    pub fn ring(&self) -> Option<&R> {
        match &self.body {
            Body::Finite { module, .. } => Some(module.ring()),
            Body::Family { family, .. } => Some(family.ring()),
            Body::Sum(p) => p.iter().find_map(|s| s.ring()),
        }
    }

    pub fn component_gens(&self, g: Grade) -> usize {
        match &self.body {
            Body::Finite { module, .. } => {
                if g == ORIGIN {
                    module.gens()
                } else {
                    0
                }
            }
            Body::Family { family, .. } => family.component_gens(g),
            Body::Sum(p) => p.iter().map(|s| s.component_gens(g)).sum(),
        }
    }

    pub fn is_locally_finite(&self) -> Result<bool> {
        match &self.body {
            Body::Finite { module, .. } => module.is_locally_finite(self.lf),
            Body::Family { family, .. } => family.is_locally_finite(self.lf),
            Body::Sum(p) => {
                for s in p {
                    if !s.is_locally_finite()? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    pub fn describe(&self) -> String {
        match &self.body {
            Body::Finite { module, .. } => format!("endomorphism of {module}"),
            Body::Family { family, .. } => family.describe(),
            Body::Sum(p) => p.iter().map(|s| format!("({})", s.describe())).collect::<Vec<_>>().join(" ⊕ "),
        }
    }

    /// Splits a seed of a direct sum into per-summand seeds, or `None` if some
    /// element has nonzero parts in two summands.
    fn split_seed(&self, seed: &Seed<R>) -> Option<Vec<Seed<R>>> {
        let Body::Sum(parts) = &self.body else { return None };
        let mut out = vec![Seed::empty(); parts.len()];
        for (g, v) in &seed.elems {
            let mut start = 0;
            let mut owner = None;
            for (p, part) in parts.iter().enumerate() {
                let n = part.component_gens(*g);
                let slice: SVec<R::Elem> = v.range(start..start + n).map(|(i, e)| (i - start, e.clone())).collect();
                if !slice.is_empty() {
                    if owner.is_some() {
                        return None;
                    }
                    owner = Some((p, slice));
                }
                start += n;
            }
            if let Some((p, slice)) = owner {
                out[p].elems.push((*g, slice));
            }
        }
        Some(out)
    }

    /// Per-summand projections of a seed (always possible).
    fn project_seed(&self, seed: &Seed<R>) -> Vec<Seed<R>> {
        let Body::Sum(parts) = &self.body else { return vec![seed.clone()] };
        let mut out = vec![Seed::empty(); parts.len()];
        for (g, v) in &seed.elems {
            let mut start = 0;
            for (p, part) in parts.iter().enumerate() {
                let n = part.component_gens(*g);
                let slice: SVec<R::Elem> = v.range(start..start + n).map(|(i, e)| (i - start, e.clone())).collect();
                if !slice.is_empty() {
                    out[p].elems.push((*g, slice));
                }
                start += n;
            }
        }
        out
    }
}

/// A finitely generated seed submodule: elements of the components `C_g`.
#[derive(Clone, Debug, PartialEq)]
pub struct Seed<R: LatticeRing> {
    pub elems: Vec<(Grade, SVec<R::Elem>)>,
}

impl<R: LatticeRing> Seed<R> {
    pub fn empty() -> Self {
        Seed { elems: Vec::new() }
    }

    pub fn new(elems: Vec<(Grade, SVec<R::Elem>)>) -> Self {
        Seed { elems }
    }

    pub fn element(g: Grade, v: SVec<R::Elem>) -> Self {
        Seed { elems: vec![(g, v)] }
    }

    /// All generators of the component at `g`.
    pub fn component(sys: &EndoSystem<R>, g: Grade) -> Self {
        let ring = sys.ring().cloned();
        let elems = match ring {
            Some(r) => (0..sys.component_gens(g)).map(|i| (g, SVec::from([(i, r.one())]))).collect(),
            None => Vec::new(),
        };
        Seed { elems }
    }

    /// All generators of a finitely presented ambient.
    pub fn whole(sys: &EndoSystem<R>) -> Self {
        Self::component(sys, ORIGIN)
    }

    pub fn support(&self) -> Vec<Grade> {
        let mut s: Vec<Grade> = self.elems.iter().filter(|(_, v)| !v.is_empty()).map(|(g, _)| *g).collect();
        s.sort();
        s.dedup();
        s
    }

    /// The grade and elements when the seed lives in one component.
    pub fn single_grade(&self) -> Option<(Grade, Vec<SVec<R::Elem>>)> {
        let support = self.support();
        match support.as_slice() {
            [g] => Some((*g, self.elems.iter().filter(|(h, _)| h == g).map(|(_, v)| v.clone()).collect())),
            _ => None,
        }
    }

    fn validate(&self, sys: &EndoSystem<R>) -> Result<()> {
        for (g, v) in &self.elems {
            let n = sys.component_gens(*g);
            if let Some((&i, _)) = v.iter().next_back() {
                if i >= n {
                    return Err(Error::Dimension(format!("seed vector index {i} at grade {g:?}, component has {n} generators")));
                }
            }
        }
        Ok(())
    }
}

/// A finite module carrying the system's maps and the lifted seed.
#[derive(Clone, Debug)]
pub struct Materialized<R: LatticeRing> {
    pub module: Arc<FPModule<R>>,
    pub endos: Vec<Morphism<R>>,
    pub seed: Vec<SVec<R::Elem>>,
    pub windows: Vec<Window>,
}

/// Materializes `sys` so that `steps` applications of the endomorphism from
/// the seed are computed exactly.
pub fn materialize<R: LatticeRing>(sys: &EndoSystem<R>, seed: &Seed<R>, steps: usize) -> Result<Materialized<R>> {
    seed.validate(sys)?;
    match &sys.body {
        Body::Finite { module, endo } => {
            if let Some((g, _)) = seed.elems.iter().find(|(g, v)| *g != ORIGIN && !v.is_empty()) {
                return Err(Error::Invalid(format!("a finitely presented system has no grade {g:?}")));
            }
            Ok(Materialized {
                module: module.clone(),
                endos: vec![endo.clone()],
                seed: seed.elems.iter().map(|(_, v)| v.clone()).collect(),
                windows: vec![],
            })
        }
        Body::Family { family, endo } => {
            let support = seed.support();
            let reach = endo.reach();
            let window = Window::covering(&support, steps as u64, reach).unwrap_or(Window::new(ORIGIN, ORIGIN));
            let t = truncate(family, &[endo], window)?;
            t.certify(&support, steps as u64)?;
            let seed_vecs =
                seed.elems.iter().filter(|(_, v)| !v.is_empty()).map(|(g, v)| t.embed(*g, v)).collect::<Result<Vec<_>>>()?;
            Ok(Materialized { module: t.module.clone(), endos: t.endos, seed: seed_vecs, windows: vec![t.window] })
        }
        Body::Sum(parts) => {
            let seeds = sys.project_seed(seed);
            let mats = parts.iter().zip(&seeds).map(|(p, s)| materialize(p, s, steps)).collect::<Result<Vec<_>>>()?;
            // the lifted seed must be the lift of the original elements, not of their projections
            let ring = sys.ring().expect("nonempty sum").clone();
            combine(&ring, mats, seed, sys)
        }
    }
}

fn combine<R: LatticeRing>(ring: &R, mats: Vec<Materialized<R>>, seed: &Seed<R>, sys: &EndoSystem<R>) -> Result<Materialized<R>> {
    let Body::Sum(parts) = &sys.body else { unreachable!() };
    let module = Arc::new(FPModule::direct_sum(ring, &mats.iter().map(|m| m.module.as_ref()).collect::<Vec<_>>()));
    let mut offsets = Vec::with_capacity(mats.len());
    let mut at = 0;
    for m in &mats {
        offsets.push(at);
        at += m.module.gens();
    }
    let mut cols = Vec::with_capacity(module.gens());
    for (m, off) in mats.iter().zip(&offsets) {
        cols.extend(m.endos[0].columns().iter().map(|c| shift_positions(c, *off)));
    }
    let endo = Morphism::new_unchecked(&module, &module, cols);
    // re-lift each seed element summand by summand, in the same order as the projections
    let seeds = sys.project_seed(seed);
    let mut seed_vecs = Vec::new();
    for (g, v) in seed.elems.iter().filter(|(_, v)| !v.is_empty()) {
        let mut lifted = SVec::new();
        let mut start = 0;
        for (p, part) in parts.iter().enumerate() {
            let n = part.component_gens(*g);
            let slice: SVec<R::Elem> = v.range(start..start + n).map(|(i, e)| (i - start, e.clone())).collect();
            if !slice.is_empty() {
                let k = seeds[p].elems.iter().position(|(h, w)| h == g && *w == slice).expect("projection present");
                for (i, e) in &mats[p].seed[k] {
                    lifted.insert(i + offsets[p], e.clone());
                }
            }
            start += n;
        }
        seed_vecs.push(lifted);
    }
    let windows = mats.into_iter().flat_map(|m| m.windows).collect();
    Ok(Materialized { module, endos: vec![endo], seed: seed_vecs, windows })
}

/// State of an incremental trajectory computation.
#[derive(Clone, Debug)]
pub(crate) struct Run<R: LatticeRing> {
    pub traj: Submodule<R>,
    /// `L(T_1), L(T_2), …`
    pub lengths: Vec<LengthValue>,
    /// First `n` with `T_{n+1} = T_n`.
    pub stabilized: Option<usize>,
}

pub(crate) fn run_trajectory<R: LatticeRing>(
    mat: &Materialized<R>,
    endo: usize,
    lf: LengthFunction,
    steps: usize,
    stop_when_stable: bool,
) -> Result<Run<R>> {
    let f = &mat.endos[endo];
    let mut traj = Submodule::generated(&mat.module, mat.seed.iter().cloned())?;
    let first = traj.length(lf)?;
    if first.is_infinite() {
        return Err(Error::NotLFinite);
    }
    let mut lengths = vec![first];
    let mut cur: Vec<SVec<R::Elem>> = mat.seed.clone();
    let mut stabilized = None;
    for n in 1..=steps {
        if stabilized.is_some() {
            lengths.push(lengths[n - 1].clone());
            continue;
        }
        cur = cur.iter().map(|v| f.apply(v)).filter(|v| !mat.module.is_zero_element(v)).collect();
        if traj.extend(cur.iter().cloned()) {
            lengths.push(traj.length(lf)?);
        } else {
            stabilized = Some(n);
            if stop_when_stable {
                lengths.push(lengths[n - 1].clone());
                break;
            }
            lengths.push(lengths[n - 1].clone());
        }
    }
    Ok(Run { traj, lengths, stabilized })
}

/// `T_n(φ, S) = S + φS + … + φ^{n−1}S`, inside the certified materialization.
pub fn trajectory<R: LatticeRing>(sys: &EndoSystem<R>, seed: &Seed<R>, n: usize) -> Result<Submodule<R>> {
    if n == 0 {
        return Err(Error::Invalid("trajectories start at n = 1".into()));
    }
    let mat = materialize(sys, seed, n - 1)?;
    Ok(run_trajectory(&mat, 0, sys.lf, n - 1, true)?.traj)
}

/// `α_n = L(T_{n+1}/T_n)` for `n = 1..=n_max`, with the lengths `L(T_1..T_{n_max+1})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaSequence {
    pub alphas: Vec<LengthValue>,
    pub lengths: Vec<LengthValue>,
    pub stabilized_at: Option<usize>,
}

#[derive(Serialize)]
struct CsvRow {
    n: usize,
    alpha_exact: String,
    alpha_float: f64,
    #[serde(rename = "Ln_over_n_float")]
    ln_over_n_float: f64,
}

impl AlphaSequence {
    /// Columns `n, alpha_exact, alpha_float, Ln_over_n_float` with `L_n = L(T_n)`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for (i, a) in self.alphas.iter().enumerate() {
            let n = i + 1;
            let row = CsvRow {
                n,
                alpha_exact: a.to_string(),
                alpha_float: a.to_f64(),
                ln_over_n_float: self.lengths[i].to_f64() / n as f64,
            };
            w.serialize(row).map_err(|e| Error::Invalid(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn alphas_of(lengths: &[LengthValue]) -> Vec<LengthValue> {
    lengths.windows(2).map(|w| w[1].checked_sub(&w[0]).expect("trajectories ascend")).collect()
}

fn check_monotone(alphas: &[LengthValue]) -> Result<()> {
    for (i, w) in alphas.windows(2).enumerate() {
        if w[1].try_cmp(&w[0])? == Ordering::Greater {
            return Err(Error::Invalid(format!("α-sequence increased at n = {}: {} > {}", i + 2, w[1], w[0])));
        }
    }
    Ok(())
}

pub fn alpha_seq<R: LatticeRing>(sys: &EndoSystem<R>, seed: &Seed<R>, n_max: usize) -> Result<AlphaSequence> {
    let mat = materialize(sys, seed, n_max)?;
    let run = run_trajectory(&mat, 0, sys.lf, n_max, false)?;
    let alphas = alphas_of(&run.lengths);
    check_monotone(&alphas)?;
    Ok(AlphaSequence { alphas, lengths: run.lengths, stabilized_at: run.stabilized })
}

fn min_value(vals: impl IntoIterator<Item = LengthValue>) -> Result<LengthValue> {
    let mut best = LengthValue::infinity();
    for v in vals {
        if v.try_cmp(&best)? == Ordering::Less {
            best = v;
        }
    }
    Ok(best)
}

/// `min(α_n, L(T_n)/n)` over the computed range.
fn upper_bound(lengths: &[LengthValue]) -> Result<LengthValue> {
    let alphas = alphas_of(lengths);
    let ratios = lengths.iter().enumerate().map(|(i, l)| l.scale(&Rational::new((1).into(), ((i + 1) as i64).into())));
    min_value(alphas.into_iter().chain(ratios))
}

fn kind_of<R: LatticeRing>(fam: &ShiftFamily<R>) -> ClosedFormKind {
    match fam.kind() {
        FamilyKind::Bernoulli(_) => ClosedFormKind::Bernoulli,
        FamilyKind::TwoSided(_) => ClosedFormKind::TwoSided,
        FamilyKind::Grid(_) => ClosedFormKind::Grid,
        FamilyKind::Sigma(_) => ClosedFormKind::BernoulliSigma,
        FamilyKind::General => ClosedFormKind::DirectSum,
    }
}

/// `ent_L(φ, S)` with the strongest certificate available.
pub fn entropy_of<R: LatticeRing>(sys: &EndoSystem<R>, seed: &Seed<R>, opts: &EntropyOptions) -> Result<EntropyResult> {
    if let Some(split) = sys.split_seed(seed) {
        let Body::Sum(parts) = &sys.body else { unreachable!() };
        let rs = parts.iter().zip(&split).map(|(p, s)| entropy_of(p, s, opts)).collect::<Result<Vec<_>>>()?;
        return Ok(EntropyResult::sum(&rs));
    }
    let budget = opts.budget.max(1);
    let mat = materialize(sys, seed, budget)?;
    let run = run_trajectory(&mat, 0, sys.lf, budget, true)?;
    let steps = run.lengths.len() - 1;
    if let Some(n) = run.stabilized {
        return Ok(EntropyResult::exact(LengthValue::zero(), Certificate::TrajectoryStabilized, n));
    }
    let alphas = alphas_of(&run.lengths);
    check_monotone(&alphas)?;
    if let Some(i) = alphas.iter().position(|a| a.is_zero()) {
        return Ok(EntropyResult::exact(LengthValue::zero(), Certificate::AlphaZero, i + 1));
    }
    let upper = upper_bound(&run.lengths)?;
    let exact = match &sys.body {
        Body::Family { family, endo } => match seed.single_grade() {
            Some((g, elems)) => match closed_form_entropy(family, endo, SeedKind::Grade(g, &elems), sys.lf) {
                Ok(v) => Some(EntropyResult::closed(v, kind_of(family), steps)),
                Err(Error::NotRecognized) => None,
                Err(e) => return Err(e),
            },
            None => None,
        },
        // every L-finite seed of a finitely presented module generates inside its finite-length part
        Body::Finite { .. } => Some(EntropyResult::closed(LengthValue::zero(), ClosedFormKind::FiniteLength, steps)),
        Body::Sum(_) => None,
    };
    if let Some(r) = exact {
        if r.lower.try_cmp(&upper)? == Ordering::Greater {
            return Err(Error::Invalid(format!("closed form {} exceeds the computed bound {upper}", r.lower)));
        }
        return Ok(r);
    }
    if !matches!(&sys.body, Body::Family { family, .. } if !matches!(family.kind(), FamilyKind::General)) {
        if let Ok(r) = auto::auto_formula(sys, seed, opts) {
            if r.is_exact() {
                return Ok(r);
            }
        }
    }
    Ok(EntropyResult::bounds(LengthValue::zero(), upper, steps))
}

/// Generators of the largest L-finite submodule: everything when `L(R) < ∞`
/// or the module is torsion, otherwise the kernel of multiplication by the
/// product of the torsion invariants.
pub fn torsion_seed<R: LatticeRing>(module: &Arc<FPModule<R>>, lf: LengthFunction) -> Result<Vec<SVec<R::Elem>>> {
    let ring = module.ring();
    let whole = || (0..module.gens()).map(|i| module.basis_vector(i)).collect();
    if ring.cyclic_length(lf, &ring.zero())?.is_finite() || module.modulus().is_some() {
        return Ok(whole());
    }
    let dense: Vec<Vec<R::Elem>> = module.relations().vectors().map(|v| crate::fpmod::to_dense(ring, v, module.gens())).collect();
    let a = if dense.is_empty() { Matrix::zeros(ring, module.gens(), 0) } else { Matrix::from_rows(dense)?.transpose() };
    let s = smith_reduce(ring, &a);
    let mut t: Option<R::Elem> = None;
    for d in s.diagonal.iter().filter(|d| !ring.is_zero(d) && !ring.is_unit(d)) {
        let g = ring.ideal_generator(d);
        t = Some(match t {
            None => g,
            Some(t) => ring.lcm_like(&t, &g),
        });
    }
    let Some(t) = t else { return Ok(vec![]) };
    Ok(Morphism::scalar(module, &t).kernel().generators())
}

/// `ent_L(φ)`: the supremum over L-finite seeds.
pub fn entropy<R: LatticeRing>(sys: &EndoSystem<R>, opts: &EntropyOptions) -> Result<EntropyResult> {
    if !opts.force && !sys.is_locally_finite()? {
        return Err(Error::NotLocallyFinite);
    }
    match &sys.body {
        Body::Finite { module, .. } => {
            let seed = Seed::new(torsion_seed(module, sys.lf)?.into_iter().map(|v| (ORIGIN, v)).collect());
            entropy_of(sys, &seed, opts)
        }
        Body::Family { family, endo } => match closed_form_entropy(family, endo, SeedKind::Global, sys.lf) {
            Ok(v) => Ok(EntropyResult::closed(v, kind_of(family), 0)),
            Err(Error::NotRecognized) => general_family_entropy(sys, family, opts),
            Err(e) => Err(e),
        },
        Body::Sum(parts) => {
            let rs = parts.iter().map(|p| entropy(p, opts)).collect::<Result<Vec<_>>>()?;
            Ok(EntropyResult::sum(&rs))
        }
    }
}

/// Lower bounds from one seed per grade near the explicit part; the supremum
/// over all seeds is not bounded above by anything computable here.
fn general_family_entropy<R: LatticeRing>(
    sys: &EndoSystem<R>,
    family: &ShiftFamily<R>,
    opts: &EntropyOptions,
) -> Result<EntropyResult> {
    let (lo, hi) = family.explicit_hull().unwrap_or((ORIGIN, ORIGIN));
    let period = match &sys.body {
        Body::Family { endo, .. } => endo.rules().iter().map(|r| r.period()).max().unwrap_or(1) as i64,
        _ => 1,
    };
    let grades = Window::new(lo, [hi[0] + period, hi[1]]).grades(family.index());
    let mut lower = LengthValue::zero();
    let mut steps = 0;
    for g in grades {
        let comp = family.component(g)?.expect("grade in index");
        let seed = Seed::new(torsion_seed(&comp, sys.lf)?.into_iter().map(|v| (g, v)).collect());
        let r = entropy_of(sys, &seed, opts)?;
        steps = steps.max(r.steps_used);
        if r.lower.try_cmp(&lower)? == Ordering::Greater {
            lower = r.lower;
        }
    }
    if matches!(family.tail(), TailRule::Zero) && lower.is_zero() {
        return Ok(EntropyResult::closed(lower, ClosedFormKind::FiniteLength, steps));
    }
    Ok(EntropyResult::bounds(lower, LengthValue::infinity(), steps))
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;
    use crate::ring::{Integers, PrimeField, ValElement, Valuation};
    use crate::scalars::rat;
    use crate::shiftmod::{bernoulli, bernoulli_sigma, CutSequence};

    fn z(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn bern(m: i64, lf: LengthFunction) -> EndoSystem<Integers> {
        EndoSystem::from_pair(bernoulli(FPModule::cyclic(&Integers, z(m))), lf).unwrap()
    }

    fn sigma(tail: &str) -> EndoSystem<Valuation> {
        let cuts = CutSequence::new(vec![], tail).unwrap();
        EndoSystem::from_pair(bernoulli_sigma(&Valuation, cuts).unwrap(), LengthFunction::Valuation).unwrap()
    }

    #[test]
    fn bernoulli_trajectory_and_alphas() {
        let sys = bern(2, LengthFunction::LogCard);
        let seed = Seed::component(&sys, ORIGIN);
        let t3 = trajectory(&sys, &seed, 3).unwrap();
        assert_eq!(t3.length(LengthFunction::LogCard).unwrap(), LengthValue::log_u64(8));
        let six = bern(6, LengthFunction::LogCard);
        let a = alpha_seq(&six, &Seed::component(&six, ORIGIN), 5).unwrap();
        assert!(a.alphas.iter().all(|x| x.to_string() == "log(2)+log(3)"));
        let r = entropy_of(&six, &Seed::component(&six, ORIGIN), &EntropyOptions::default()).unwrap();
        assert_eq!(r.certificate, Certificate::ClosedForm);
        assert_eq!(r.exact.unwrap().to_string(), "log(2)+log(3)");
    }

    #[test]
    fn sigma_alphas_decrease_to_one() {
        let sys = sigma("1+1/n");
        let seed = Seed::component(&sys, ORIGIN);
        let t2 = trajectory(&sys, &seed, 2).unwrap();
        assert_eq!(t2.length(LengthFunction::Valuation).unwrap(), LengthValue::rational(rat(7, 2)));
        let a = alpha_seq(&sys, &seed, 6).unwrap();
        for (k, al) in a.alphas.iter().enumerate() {
            assert_eq!(*al, LengthValue::rational(rat(1, 1) + rat(1, k as i64 + 2)));
        }
        let r = entropy_of(&sys, &seed, &EntropyOptions::default()).unwrap();
        assert_eq!(r.exact, Some(LengthValue::rational(rat(1, 1))));
    }

    #[test]
    fn finite_systems_have_zero_entropy() {
        let m = FPModule::cyclic(&Integers, z(4));
        let sys = EndoSystem::from_matrix(m, &Matrix::identity(&Integers, 1), LengthFunction::LogCard).unwrap();
        let r = entropy_of(&sys, &Seed::whole(&sys), &EntropyOptions::default()).unwrap();
        assert_eq!((r.exact, r.certificate), (Some(LengthValue::zero()), Certificate::TrajectoryStabilized));
        let a = alpha_seq(&sys, &Seed::whole(&sys), 4).unwrap();
        assert!(a.alphas.iter().all(|x| x.is_zero()));
        let m = FPModule::cyclic(&Integers, z(6));
        let sys = EndoSystem::from_matrix(m, &Matrix::from_rows(vec![vec![z(5)]]).unwrap(), LengthFunction::LogCard).unwrap();
        assert_eq!(entropy(&sys, &EntropyOptions::default()).unwrap().exact, Some(LengthValue::zero()));
    }

    #[test]
    fn global_entropies() {
        let r = entropy(&bern(4, LengthFunction::LogCard), &EntropyOptions::default()).unwrap();
        assert_eq!(r.exact, Some(LengthValue::log_u64(4)));
        let free = EndoSystem::from_pair(bernoulli(FPModule::free(&Integers, 1)), LengthFunction::Rank).unwrap();
        assert_eq!(entropy(&free, &EntropyOptions::default()).unwrap().exact, Some(LengthValue::integer(1)));
        let logcard = EndoSystem::from_pair(bernoulli(FPModule::free(&Integers, 1)), LengthFunction::LogCard).unwrap();
        assert_eq!(entropy(&logcard, &EntropyOptions::default()), Err(Error::NotLocallyFinite));
        let f5 = PrimeField::new(5).unwrap();
        let fsys = EndoSystem::from_pair(bernoulli(FPModule::free(&f5, 2)), LengthFunction::Dim).unwrap();
        assert_eq!(entropy(&fsys, &EntropyOptions::default()).unwrap().exact, Some(LengthValue::integer(2)));
    }

    #[test]
    fn harmonic_cuts() {
        let sys = sigma("1/n");
        let seed = Seed::component(&sys, ORIGIN);
        let r = entropy_of(&sys, &seed, &EntropyOptions::default()).unwrap();
        assert_eq!(r.exact, Some(LengthValue::zero()));
        assert_eq!(r.closed_form, Some(ClosedFormKind::BernoulliSigma));
        let t = trajectory(&sys, &seed, 64).unwrap();
        let h64 = (1..=64).fold(rat(0, 1), |a, k| a + rat(1, k));
        assert_eq!(t.length(LengthFunction::Valuation).unwrap(), LengthValue::rational(h64));
    }

    #[test]
    fn sum_seed_split_and_csv() {
        let sys = EndoSystem::direct_sum(vec![bern(2, LengthFunction::LogCard), bern(3, LengthFunction::LogCard)]).unwrap();
        let seed = Seed::component(&sys, ORIGIN);
        let r = entropy_of(&sys, &seed, &EntropyOptions::default()).unwrap();
        assert_eq!(r.exact, Some(LengthValue::log_u64(6)));
        // a diagonal element only sees one copy of the shift
        let diag = Seed::element(ORIGIN, SVec::from([(0, z(1)), (1, z(1))]));
        let a = alpha_seq(&sys, &diag, 3).unwrap();
        assert_eq!(a.alphas[2], LengthValue::log_u64(6));
        let csv = a.to_csv().unwrap();
        assert!(csv.starts_with("n,alpha_exact,alpha_float,Ln_over_n_float\n1,log(2)+log(3),"));
        let v = sigma("1+1/n");
        let seed = Seed::element(ORIGIN, SVec::from([(0, ValElement::monomial(rat(1, 2)))]));
        assert_eq!(entropy_of(&v, &seed, &EntropyOptions::default()).unwrap().exact, Some(LengthValue::rational(rat(1, 2))));
    }
}
