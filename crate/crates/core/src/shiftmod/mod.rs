//! Lazy graded modules `⊕_i C_i` indexed by `ℕ`, `ℤ` or `ℕ²`, with banded
//! endomorphisms, finite windows, and closed-form entropies for the
//! Bernoulli-type constructors.
//!
//! A family has finitely many explicit components plus a tail rule for all
//! other grades. A [`BandedEndo`] is a list of [`MapRule`]s: blocks
//! `C_g → C_{g+offset}`, given explicitly on finitely many grades and by an
//! eventually periodic pattern elsewhere.

mod cuts;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use cuts::{parse_expr, CutSequence, CutSpec, Poly, RatFunc};

use crate::error::{Error, Result};
use crate::fpmod::{from_dense, ideal_sum, lin2, FPModule, Morphism, SVec, Submodule};
use crate::ring::{LatticeRing, LengthFunction, Matrix};
use crate::scalars::LengthValue;

/// A grade; `ℕ` and `ℤ` families only use the first coordinate.
pub type Grade = [i64; 2];

pub const ORIGIN: Grade = [0, 0];

fn add_grade(a: Grade, b: Grade) -> Grade {
    [a[0] + b[0], a[1] + b[1]]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexSet {
    Nat,
    Int,
    Grid,
}

impl IndexSet {
    pub fn contains(&self, g: Grade) -> bool {
        match self {
            IndexSet::Nat => g[0] >= 0 && g[1] == 0,
            IndexSet::Int => g[1] == 0,
            IndexSet::Grid => g[0] >= 0 && g[1] >= 0,
        }
    }

    pub fn dims(&self) -> usize {
        if *self == IndexSet::Grid {
            2
        } else {
            1
        }
    }
}

/// Components at grades without an explicit entry.
#[derive(Clone, Debug)]
pub enum TailRule<R: LatticeRing> {
    Zero,
    Constant(Arc<FPModule<R>>),
    /// `R/(x^{γ_{i+1}})` at grade `i`.
    Cuts(CutSequence),
}

/// What a family was built as; drives the closed forms.
#[derive(Clone, Debug)]
pub enum FamilyKind<R: LatticeRing> {
    Bernoulli(Arc<FPModule<R>>),
    TwoSided(Arc<FPModule<R>>),
    Grid(Arc<FPModule<R>>),
    Sigma(SigmaLimit<R>),
    General,
}

/// The union ideal `I_∞` of a B_σ chain.
#[derive(Clone, Debug)]
pub enum SigmaLimit<R: LatticeRing> {
    Cuts(CutSequence),
    /// An explicit chain that ends in a constant ideal.
    Ideal(R::Elem),
}

#[derive(Clone, Debug)]
pub struct ShiftFamily<R: LatticeRing> {
    ring: R,
    index: IndexSet,
    explicit: BTreeMap<Grade, Arc<FPModule<R>>>,
    tail: TailRule<R>,
    kind: FamilyKind<R>,
}

impl<R: LatticeRing> ShiftFamily<R> {
    pub fn new(ring: &R, index: IndexSet, explicit: BTreeMap<Grade, Arc<FPModule<R>>>, tail: TailRule<R>) -> Result<Self> {
        if let Some(g) = explicit.keys().find(|g| !index.contains(**g)) {
            return Err(Error::Invalid(format!("grade {g:?} is not in the index set {index:?}")));
        }
        if let TailRule::Cuts(_) = &tail {
            if index != IndexSet::Nat {
                return Err(Error::Invalid("cut tails need an ℕ-indexed family".into()));
            }
            if ring.monomial(&crate::scalars::rat_int(1)).is_none() {
                return Err(Error::Invalid(format!("cut tails need a valuation ring, not {}", ring.name())));
            }
        }
        Ok(ShiftFamily { ring: ring.clone(), index, explicit, tail, kind: FamilyKind::General })
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn index(&self) -> IndexSet {
        self.index
    }

    pub fn kind(&self) -> &FamilyKind<R> {
        &self.kind
    }

    pub fn tail(&self) -> &TailRule<R> {
        &self.tail
    }

    pub fn explicit(&self) -> &BTreeMap<Grade, Arc<FPModule<R>>> {
        &self.explicit
    }

    pub fn has_tail(&self) -> bool {
        !matches!(self.tail, TailRule::Zero)
    }

    /// `C_g`, or `None` outside the index set.
    pub fn component(&self, g: Grade) -> Result<Option<Arc<FPModule<R>>>> {
        if !self.index.contains(g) {
            return Ok(None);
        }
        if let Some(c) = self.explicit.get(&g) {
            return Ok(Some(c.clone()));
        }
        Ok(Some(match &self.tail {
            TailRule::Zero => Arc::new(FPModule::zero(&self.ring)),
            TailRule::Constant(c) => c.clone(),
            TailRule::Cuts(cuts) => {
                let gamma = cuts.value(g[0] as u64 + 1)?;
                let x = self.ring.monomial(&gamma).expect("checked at construction");
                Arc::new(FPModule::cyclic(&self.ring, x))
            }
        }))
    }

    pub fn component_gens(&self, g: Grade) -> usize {
        if !self.index.contains(g) {
            return 0;
        }
        match (self.explicit.get(&g), &self.tail) {
            (Some(c), _) => c.gens(),
            (None, TailRule::Zero) => 0,
            (None, TailRule::Constant(c)) => c.gens(),
            (None, TailRule::Cuts(_)) => 1,
        }
    }

    pub fn is_locally_finite(&self, lf: LengthFunction) -> Result<bool> {
        for c in self.explicit.values() {
            if !c.is_locally_finite(lf)? {
                return Ok(false);
            }
        }
        match &self.tail {
            TailRule::Constant(c) => c.is_locally_finite(lf),
            TailRule::Cuts(_) => {
                self.ring.check_length(lf)?;
                Ok(true)
            }
            TailRule::Zero => Ok(true),
        }
    }

    /// Bounding box of the explicit grades.
    pub fn explicit_hull(&self) -> Option<(Grade, Grade)> {
        let mut it = self.explicit.keys();
        let first = *it.next()?;
        Some(it.fold((first, first), |(lo, hi), g| {
            ([lo[0].min(g[0]), lo[1].min(g[1])], [hi[0].max(g[0]), hi[1].max(g[1])])
        }))
    }

    pub fn describe(&self) -> String {
        let tail = match &self.tail {
            TailRule::Zero => "0".to_string(),
            TailRule::Constant(c) => c.describe(),
            TailRule::Cuts(c) => format!("R/(x^γ_n), γ_n = {c}"),
        };
        match &self.kind {
            FamilyKind::Bernoulli(c) => format!("B({c})"),
            FamilyKind::TwoSided(c) => format!("two-sided B({c})"),
            FamilyKind::Grid(c) => format!("ℕ²-graded B({c})"),
            FamilyKind::Sigma(_) => format!("B_σ(R), components {tail}"),
            FamilyKind::General => format!("{:?}-graded family, {} explicit grades, tail {tail}", self.index, self.explicit.len()),
        }
    }
}

impl<R: LatticeRing> fmt::Display for ShiftFamily<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Blocks `C_g → C_{g+offset}`: explicit ones first, then `pattern[g[0] mod p]`.
#[derive(Clone, Debug)]
pub struct MapRule<R: LatticeRing> {
    pub offset: Grade,
    pub explicit: BTreeMap<Grade, Matrix<R::Elem>>,
    pub pattern: Vec<Matrix<R::Elem>>,
}

impl<R: LatticeRing> MapRule<R> {
    pub fn periodic(offset: Grade, pattern: Vec<Matrix<R::Elem>>) -> Self {
        MapRule { offset, explicit: BTreeMap::new(), pattern }
    }

    pub fn block(&self, g: Grade) -> Option<&Matrix<R::Elem>> {
        self.explicit.get(&g).or_else(|| {
            (!self.pattern.is_empty()).then(|| &self.pattern[g[0].rem_euclid(self.pattern.len() as i64) as usize])
        })
    }

    pub fn period(&self) -> usize {
        self.pattern.len().max(1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndoKind {
    /// The identity-block shift by the given offset.
    Shift(Grade),
    /// The shift with further quotient `R/I_n → R/I_{n+1}`.
    SigmaShift,
    Identity,
    General,
}

#[derive(Clone, Debug)]
pub struct BandedEndo<R: LatticeRing> {
    rules: Vec<MapRule<R>>,
    kind: EndoKind,
}

impl<R: LatticeRing> BandedEndo<R> {
    /// Checks block shapes on the explicit grades and one period of the tail,
    /// and that no nonzero block leaves the index set.
    pub fn new(fam: &ShiftFamily<R>, rules: Vec<MapRule<R>>) -> Result<Self> {
        let e = BandedEndo { rules, kind: EndoKind::General };
        e.validate(fam)?;
        Ok(e)
    }

    fn with_kind(rules: Vec<MapRule<R>>, kind: EndoKind) -> Self {
        BandedEndo { rules, kind }
    }

    pub fn identity(fam: &ShiftFamily<R>) -> Result<Self> {
        let ring = fam.ring();
        let mut rule = MapRule::periodic(ORIGIN, vec![]);
        for (g, c) in &fam.explicit {
            rule.explicit.insert(*g, Matrix::identity(ring, c.gens()));
        }
        match &fam.tail {
            TailRule::Constant(c) => rule.pattern.push(Matrix::identity(ring, c.gens())),
            TailRule::Cuts(_) => rule.pattern.push(Matrix::identity(ring, 1)),
            TailRule::Zero => {}
        }
        Ok(Self::with_kind(vec![rule], EndoKind::Identity))
    }

    pub fn zero() -> Self {
        Self::with_kind(vec![], EndoKind::General)
    }

    pub fn rules(&self) -> &[MapRule<R>] {
        &self.rules
    }

    pub fn kind(&self) -> EndoKind {
        self.kind
    }

    pub fn is_zero(&self) -> bool {
        self.rules.is_empty()
    }

    /// Per coordinate, the most negative and most positive offsets in use.
    pub fn reach(&self) -> [(i64, i64); 2] {
        let mut r = [(0, 0); 2];
        for rule in &self.rules {
            for (c, slot) in r.iter_mut().enumerate() {
                slot.0 = slot.0.min(rule.offset[c]);
                slot.1 = slot.1.max(rule.offset[c]);
            }
        }
        r
    }

    fn validate(&self, fam: &ShiftFamily<R>) -> Result<()> {
        let ring = fam.ring();
        let mut grades: Vec<Grade> = fam.explicit.keys().copied().collect();
        let period = self.rules.iter().map(|r| r.period()).max().unwrap_or(1) as i64;
        if fam.has_tail() {
            let base = fam.explicit_hull().map(|(_, hi)| hi[0] + 1).unwrap_or(0).max(0);
            for k in 0..period {
                let g = [base + k, 0];
                if fam.index.contains(g) {
                    grades.push(g);
                }
            }
        }
        for rule in &self.rules {
            grades.extend(rule.explicit.keys().copied());
        }
        for rule in &self.rules {
            for &g in &grades {
                let Some(m) = rule.block(g) else { continue };
                let t = add_grade(g, rule.offset);
                if !fam.index.contains(g) {
                    return Err(Error::Invalid(format!("block at grade {g:?} outside the index set")));
                }
                if !fam.index.contains(t) {
                    if !m.is_zero_matrix(ring) {
                        return Err(Error::Invalid(format!("block at grade {g:?} maps outside the index set")));
                    }
                    continue;
                }
                let (src, tgt) = (fam.component(g)?.unwrap(), fam.component(t)?.unwrap());
                Morphism::from_matrix(&src, &tgt, m)?;
            }
            // a negative step on ℕ would leave the index set at the boundary
            if fam.index != IndexSet::Int && (rule.offset[0] < 0 || rule.offset[1] < 0) {
                if rule.pattern.iter().any(|m| !m.is_zero_matrix(ring)) {
                    return Err(Error::Invalid("periodic blocks with a negative offset leave the index set".into()));
                }
            }
        }
        Ok(())
    }
}

/// A box of grades `lo ..= hi`, intersected with the index set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    pub lo: Grade,
    pub hi: Grade,
}

impl Window {
    pub fn new(lo: Grade, hi: Grade) -> Self {
        Window { lo, hi }
    }

    pub fn contains(&self, g: Grade) -> bool {
        (0..2).all(|c| self.lo[c] <= g[c] && g[c] <= self.hi[c])
    }

    pub fn grades(&self, index: IndexSet) -> Vec<Grade> {
        let mut out = Vec::new();
        for a in self.lo[0]..=self.hi[0] {
            for b in self.lo[1]..=self.hi[1] {
                if index.contains([a, b]) {
                    out.push([a, b]);
                }
            }
        }
        out
    }

    /// The smallest box that keeps `steps` applications of maps with the given
    /// reaches, started from `support`, inside the window.
    pub fn covering(support: &[Grade], steps: u64, reach: [(i64, i64); 2]) -> Option<Self> {
        let first = *support.first()?;
        let (mut lo, mut hi) = (first, first);
        for g in support {
            for c in 0..2 {
                lo[c] = lo[c].min(g[c]);
                hi[c] = hi[c].max(g[c]);
            }
        }
        let n = steps as i64;
        for c in 0..2 {
            lo[c] += n * reach[c].0;
            hi[c] += n * reach[c].1;
        }
        Some(Window { lo, hi })
    }

    /// Whether a trajectory of `steps` applications from `support` stays inside.
    pub fn certifies(&self, support: &[Grade], steps: u64, reach: [(i64, i64); 2]) -> bool {
        match Self::covering(support, steps, reach) {
            None => true,
            Some(need) => (0..2).all(|c| self.lo[c] <= need.lo[c] && need.hi[c] <= self.hi[c]),
        }
    }

    fn clamp(self, fam_index: IndexSet, hull: Option<(Grade, Grade)>, has_tail: bool) -> Self {
        let mut w = self;
        if fam_index != IndexSet::Int {
            w.lo[0] = w.lo[0].max(0);
        }
        if fam_index == IndexSet::Grid {
            w.lo[1] = w.lo[1].max(0);
        } else {
            w.lo[1] = 0;
            w.hi[1] = 0;
        }
        if !has_tail {
            if let Some((a, b)) = hull {
                for c in 0..2 {
                    w.lo[c] = w.lo[c].max(a[c]);
                    w.hi[c] = w.hi[c].min(b[c]);
                }
            }
        }
        w
    }
}

/// A finite window of a family materialized as one module, with the window
/// parts of the given endomorphisms. Blocks leaving the window are dropped, so
/// results are exact only for computations the window [`certifies`](Window::certifies).
#[derive(Clone, Debug)]
pub struct Truncation<R: LatticeRing> {
    pub window: Window,
    pub module: Arc<FPModule<R>>,
    pub endos: Vec<Morphism<R>>,
    /// First generator position of each grade's component.
    pub slots: BTreeMap<Grade, usize>,
    reach: [(i64, i64); 2],
    index: IndexSet,
    hull: Option<(Grade, Grade)>,
    has_tail: bool,
}

impl<R: LatticeRing> Truncation<R> {
    /// Lifts a vector of `C_g` into the window module.
    pub fn embed(&self, g: Grade, v: &SVec<R::Elem>) -> Result<SVec<R::Elem>> {
        let start = *self
            .slots
            .get(&g)
            .ok_or_else(|| Error::WindowTooSmall(format!("grade {g:?} outside window {:?}..{:?}", self.window.lo, self.window.hi)))?;
        Ok(v.iter().map(|(i, e)| (start + i, e.clone())).collect())
    }

    pub fn reach(&self) -> [(i64, i64); 2] {
        self.reach
    }

    /// Errors unless `steps` applications from `support` stay in the window.
    pub fn certify(&self, support: &[Grade], steps: u64) -> Result<()> {
        let need = Window::covering(support, steps, self.reach).map(|w| w.clamp(self.index, self.hull, self.has_tail));
        let ok = need.map_or(true, |w| (0..2).all(|c| self.window.lo[c] <= w.lo[c] && w.hi[c] <= self.window.hi[c]));
        if ok {
            Ok(())
        } else {
            Err(Error::WindowTooSmall(format!(
                "{steps} steps from {support:?} leave the window {:?}..{:?}",
                self.window.lo, self.window.hi
            )))
        }
    }
}

/// Materializes a window of `fam` with the given endomorphisms.
pub fn truncate<R: LatticeRing>(fam: &ShiftFamily<R>, endos: &[&BandedEndo<R>], window: Window) -> Result<Truncation<R>> {
    let ring = fam.ring();
    let window = window.clamp(fam.index, fam.explicit_hull(), fam.has_tail());
    let grades = window.grades(fam.index);
    let mut comps = Vec::with_capacity(grades.len());
    let mut slots = BTreeMap::new();
    let mut at = 0;
    for &g in &grades {
        let c = fam.component(g)?.expect("window grades lie in the index set");
        slots.insert(g, at);
        at += c.gens();
        comps.push(c);
    }
    let module = Arc::new(FPModule::direct_sum(ring, &comps.iter().map(|c| c.as_ref()).collect::<Vec<_>>()));
    let by_grade: BTreeMap<Grade, &Arc<FPModule<R>>> = grades.iter().copied().zip(&comps).collect();
    let mut maps = Vec::with_capacity(endos.len());
    let mut reach = [(0, 0); 2];
    for endo in endos {
        let r = endo.reach();
        for c in 0..2 {
            reach[c].0 = reach[c].0.min(r[c].0);
            reach[c].1 = reach[c].1.max(r[c].1);
        }
        let mut cols: Vec<SVec<R::Elem>> = vec![SVec::new(); module.gens()];
        for &g in &grades {
            let src = by_grade[&g];
            for rule in &endo.rules {
                let Some(m) = rule.block(g) else { continue };
                let t = add_grade(g, rule.offset);
                let Some(tgt) = by_grade.get(&t) else {
                    if !fam.index.contains(t) && !m.is_zero_matrix(ring) {
                        return Err(Error::Invalid(format!("block at grade {g:?} maps outside the index set")));
                    }
                    continue;
                };
                let block = Morphism::from_matrix(src, tgt, m)?;
                let (s0, t0) = (slots[&g], slots[&t]);
                for (j, col) in block.columns().iter().enumerate() {
                    let lifted: SVec<R::Elem> = col.iter().map(|(i, e)| (t0 + i, e.clone())).collect();
                    cols[s0 + j] = lin2(ring, &ring.one(), &cols[s0 + j], &ring.one(), &lifted);
                }
            }
        }
        maps.push(Morphism::new_unchecked(&module, &module, cols));
    }
    Ok(Truncation { window, module, endos: maps, slots, reach, index: fam.index, hull: fam.explicit_hull(), has_tail: fam.has_tail() })
}

/// `B(M)`: copies of `M` at every `n ∈ ℕ`, shifted up by one.
pub fn bernoulli<R: LatticeRing>(m: FPModule<R>) -> (ShiftFamily<R>, BandedEndo<R>) {
    constant_shift(m, IndexSet::Nat, [1, 0], |c| FamilyKind::Bernoulli(c))
}

/// The `ℤ`-indexed shift, which is bijective.
pub fn two_sided<R: LatticeRing>(m: FPModule<R>) -> (ShiftFamily<R>, BandedEndo<R>) {
    constant_shift(m, IndexSet::Int, [1, 0], |c| FamilyKind::TwoSided(c))
}

/// `ℕ²`-indexed copies of `M` with the two coordinate shifts.
pub fn grid2d<R: LatticeRing>(m: FPModule<R>) -> (ShiftFamily<R>, BandedEndo<R>, BandedEndo<R>) {
    let (fam, sx) = constant_shift(m, IndexSet::Grid, [1, 0], |c| FamilyKind::Grid(c));
    let sy = shift_endo(&fam, [0, 1]);
    (fam, sx, sy)
}

fn constant_shift<R: LatticeRing>(
    m: FPModule<R>,
    index: IndexSet,
    offset: Grade,
    kind: impl FnOnce(Arc<FPModule<R>>) -> FamilyKind<R>,
) -> (ShiftFamily<R>, BandedEndo<R>) {
    let ring = m.ring().clone();
    let c = Arc::new(m);
    let fam = ShiftFamily { ring, index, explicit: BTreeMap::new(), tail: TailRule::Constant(c.clone()), kind: kind(c) };
    let endo = shift_endo(&fam, offset);
    (fam, endo)
}

/// The identity-block shift by `offset` on a constant family.
pub fn shift_endo<R: LatticeRing>(fam: &ShiftFamily<R>, offset: Grade) -> BandedEndo<R> {
    let g = fam.component_gens(ORIGIN);
    BandedEndo::with_kind(vec![MapRule::periodic(offset, vec![Matrix::identity(fam.ring(), g)])], EndoKind::Shift(offset))
}

/// `B_σ(R) = ⊕_{n≥1} R/(x^{γ_n})` with `x_n ↦ x_n + I_{n+1}` one grade up.
/// Grade `i` carries `R/(x^{γ_{i+1}})`.
pub fn bernoulli_sigma<R: LatticeRing>(ring: &R, cuts: CutSequence) -> Result<(ShiftFamily<R>, BandedEndo<R>)> {
    let mut fam = ShiftFamily::new(ring, IndexSet::Nat, BTreeMap::new(), TailRule::Cuts(cuts.clone()))?;
    fam.kind = FamilyKind::Sigma(SigmaLimit::Cuts(cuts));
    let endo = BandedEndo::with_kind(vec![MapRule::periodic([1, 0], vec![Matrix::identity(ring, 1)])], EndoKind::SigmaShift);
    Ok((fam, endo))
}

/// `B_σ(R)` for an explicit ascending chain `I_1 ≤ … ≤ I_k`, constant after `I_k`.
pub fn bernoulli_sigma_ideals<R: LatticeRing>(ring: &R, ideals: &[R::Elem]) -> Result<(ShiftFamily<R>, BandedEndo<R>)> {
    let last = ideals.last().ok_or_else(|| Error::Invalid("empty ideal chain".into()))?;
    for (n, w) in ideals.windows(2).enumerate() {
        // I_n ⊆ I_{n+1} iff the next generator divides the previous one
        if !ring.divides(&w[1], &w[0]) {
            return Err(Error::NotAscending(format!("I_{} does not contain I_{}", n + 2, n + 1)));
        }
    }
    let mut explicit = BTreeMap::new();
    for (i, d) in ideals[..ideals.len() - 1].iter().enumerate() {
        explicit.insert([i as i64, 0], Arc::new(FPModule::cyclic(ring, d.clone())));
    }
    let tail = TailRule::Constant(Arc::new(FPModule::cyclic(ring, last.clone())));
    let mut fam = ShiftFamily::new(ring, IndexSet::Nat, explicit, tail)?;
    fam.kind = FamilyKind::Sigma(SigmaLimit::Ideal(ring.ideal_generator(last)));
    let endo = BandedEndo::with_kind(vec![MapRule::periodic([1, 0], vec![Matrix::identity(ring, 1)])], EndoKind::SigmaShift);
    Ok((fam, endo))
}

pub(crate) fn endo_with_kind<R: LatticeRing>(rules: Vec<MapRule<R>>, kind: EndoKind) -> BandedEndo<R> {
    BandedEndo::with_kind(rules, kind)
}

/// Which seed a closed form is asked for.
#[derive(Clone, Debug)]
pub enum SeedKind<'a, R: LatticeRing> {
    /// The entropy of the whole system.
    Global,
    /// The submodule generated by these elements of `C_g`.
    Grade(Grade, &'a [SVec<R::Elem>]),
}

/// The constructor closed forms: `L(M)` for Bernoulli and two-sided shifts,
/// `L(R/I_∞)` for `B_σ`, and their single-grade seed versions.
pub fn closed_form_entropy<R: LatticeRing>(
    fam: &ShiftFamily<R>,
    endo: &BandedEndo<R>,
    seed: SeedKind<'_, R>,
    lf: LengthFunction,
) -> Result<LengthValue> {
    let ring = fam.ring();
    ring.check_length(lf)?;
    let seed_length = |c: &Arc<FPModule<R>>, elems: &[SVec<R::Elem>]| -> Result<LengthValue> {
        let s = Submodule::generated(c, elems.iter().cloned())?;
        let l = s.length(lf)?;
        if l.is_infinite() {
            return Err(Error::NotLFinite);
        }
        Ok(l)
    };
    match (&fam.kind, endo.kind) {
        (FamilyKind::Bernoulli(c), EndoKind::Shift([1, 0])) | (FamilyKind::TwoSided(c), EndoKind::Shift([1 | -1, 0])) => {
            match seed {
                SeedKind::Global => c.finite_part_length(lf),
                SeedKind::Grade(_, elems) => seed_length(c, elems),
            }
        }
        (FamilyKind::Grid(c), EndoKind::Shift([1, 0] | [0, 1])) => match seed {
            // infinitely many independent copies of B(C) side by side
            SeedKind::Global => {
                let f = c.finite_part_length(lf)?;
                Ok(if f.is_zero() { f } else { LengthValue::infinity() })
            }
            SeedKind::Grade(_, elems) => seed_length(c, elems),
        },
        (FamilyKind::Sigma(limit), EndoKind::SigmaShift) => {
            let lim = match limit {
                SigmaLimit::Cuts(c) => {
                    if lf != LengthFunction::Valuation {
                        return Err(crate::ring::unsupported(ring, lf));
                    }
                    LengthValue::rational(c.limit().clone())
                }
                SigmaLimit::Ideal(d) => ring.cyclic_length(lf, d)?,
            };
            match seed {
                SeedKind::Global => Ok(lim),
                SeedKind::Grade(_, elems) => {
                    // L(S + I_∞ / I_∞) = L(R/I_∞) − L(R/(S + I_∞)) for a cyclic component
                    let s = ideal_sum(ring, elems.iter().map(|v| v.get(&0).cloned().unwrap_or_else(|| ring.zero())));
                    let low = match limit {
                        SigmaLimit::Cuts(_) => {
                            let ls = ring.cyclic_length(lf, &s)?;
                            LengthValue::min_of(&ls, &lim).clone()
                        }
                        SigmaLimit::Ideal(d) => ring.cyclic_length(lf, &ideal_sum(ring, [s, d.clone()]))?,
                    };
                    Ok(lim.checked_sub(&low).expect("quotient shorter than the ring"))
                }
            }
        }
        _ => Err(Error::NotRecognized),
    }
}

/// Convenience: a dense matrix from rows of engine elements.
pub fn matrix_from_rows<R: LatticeRing>(rows: Vec<Vec<R::Elem>>) -> Result<Matrix<R::Elem>> {
    Matrix::from_rows(rows)
}

/// Lifts a dense vector into sparse form.
pub fn sparse<R: LatticeRing>(ring: &R, v: &[R::Elem]) -> SVec<R::Elem> {
    from_dense(ring, v)
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;
    use crate::ring::{Integers, Valuation};
    use crate::scalars::rat;

    #[test]
    fn bernoulli_truncation() {
        let (fam, shift) = bernoulli(FPModule::cyclic(&Integers, BigInt::from(2)));
        let t = truncate(&fam, &[&shift], Window::new([0, 0], [4, 0])).unwrap();
        assert_eq!(t.module.length(LengthFunction::LogCard).unwrap(), LengthValue::log_u64(2).mul_int(5));
        let e0 = t.embed([0, 0], &SVec::from([(0, BigInt::from(1))])).unwrap();
        let img = t.endos[0].apply(&e0);
        assert_eq!(img, t.embed([1, 0], &SVec::from([(0, BigInt::from(1))])).unwrap());
        assert!(t.certify(&[[0, 0]], 3).is_ok());
        assert!(matches!(t.certify(&[[0, 0]], 5), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn sigma_truncation_length() {
        let cuts = CutSequence::new(vec![], "1+1/n").unwrap();
        let (fam, shift) = bernoulli_sigma(&Valuation, cuts).unwrap();
        let t = truncate(&fam, &[&shift], Window::new([0, 0], [2, 0])).unwrap();
        assert_eq!(t.module.length(LengthFunction::Valuation).unwrap(), LengthValue::rational(rat(29, 6)));
        assert_eq!(
            closed_form_entropy(&fam, &shift, SeedKind::Global, LengthFunction::Valuation).unwrap(),
            LengthValue::rational(rat(1, 1))
        );
    }

    #[test]
    fn bad_chains_and_maps() {
        let z = |n: i64| BigInt::from(n);
        assert!(bernoulli_sigma_ideals(&Integers, &[z(2), z(4)]).is_err());
        let (fam, _) = bernoulli_sigma_ideals(&Integers, &[z(4), z(2)]).unwrap();
        assert_eq!(fam.component([0, 0]).unwrap().unwrap().length(LengthFunction::LogCard).unwrap(), LengthValue::log_u64(4));
        // ℤ/2 → ℤ/4 by 1 is not a morphism
        let (fam, _) = bernoulli(FPModule::cyclic(&Integers, z(4)));
        let mut explicit = BTreeMap::new();
        explicit.insert([0, 0], Arc::new(FPModule::cyclic(&Integers, z(2))));
        let fam2 = ShiftFamily::new(&Integers, IndexSet::Nat, explicit, fam.tail().clone()).unwrap();
        let rule = MapRule::periodic([1, 0], vec![Matrix::identity(&Integers, 1)]);
        assert!(matches!(BandedEndo::new(&fam2, vec![rule]), Err(Error::NotAMorphism(_))));
        let back = MapRule::periodic([-1, 0], vec![Matrix::identity(&Integers, 1)]);
        assert!(BandedEndo::new(&fam, vec![back]).is_err());
    }

    #[test]
    fn closed_forms() {
        let z = |n: i64| BigInt::from(n);
        let (fam, shift) = bernoulli(FPModule::cyclic(&Integers, z(4)));
        assert_eq!(closed_form_entropy(&fam, &shift, SeedKind::Global, LengthFunction::LogCard).unwrap(), LengthValue::log_u64(4));
        let seed = [SVec::from([(0, z(2))])];
        assert_eq!(
            closed_form_entropy(&fam, &shift, SeedKind::Grade(ORIGIN, &seed), LengthFunction::LogCard).unwrap(),
            LengthValue::log_u64(2)
        );
        let id = BandedEndo::identity(&fam).unwrap();
        assert!(matches!(closed_form_entropy(&fam, &id, SeedKind::Global, LengthFunction::LogCard), Err(Error::NotRecognized)));
        let cuts = CutSequence::new(vec![], "1+1/n").unwrap();
        let (sf, ss) = bernoulli_sigma(&Valuation, cuts).unwrap();
        let e = [SVec::from([(0, crate::ring::ValElement::monomial(rat(1, 3)))])];
        assert_eq!(
            closed_form_entropy(&sf, &ss, SeedKind::Grade(ORIGIN, &e), LengthFunction::Valuation).unwrap(),
            LengthValue::rational(rat(2, 3))
        );
    }
}
