//! Checking `ent(φ) = ent(φ|_N) + ent(φ̄)` on an equivariant embedding `N ↪ M`.

use std::cmp::Ordering;
use std::sync::Arc;

use serde::Serialize;

use super::{entropy, Body, EndoSystem, EntropyOptions, EntropyResult};
use crate::error::{Error, Result};
use crate::fpmod::{lin2, FPModule, Morphism, SVec, Submodule};
use crate::ring::{LatticeRing, Matrix};
use crate::shiftmod::{
    bernoulli, bernoulli_sigma, grid2d, shift_endo, truncate, two_sided, BandedEndo, EndoKind, FamilyKind, IndexSet,
    MapRule, ShiftFamily, SigmaLimit, Window, ORIGIN,
};

/// An equivariant injection `N → M`, shaped like the two systems.
#[derive(Clone, Debug)]
pub enum Embedding<R: LatticeRing> {
    Finite(Morphism<R>),
    /// Grade-preserving blocks `N_g → M_g` (offset must be zero).
    Family(MapRule<R>),
    Sum(Vec<Embedding<R>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// All three entropies exact and additive.
    Additive,
    /// Bounds leave room for additivity.
    Consistent,
    Violated,
}

#[derive(Clone, Debug, Serialize)]
pub struct ATReport {
    pub ent_sub: EntropyResult,
    pub ent_ambient: EntropyResult,
    pub ent_quotient: EntropyResult,
    pub verdict: Verdict,
    /// Computed with `force` on a system that is not locally L-finite.
    pub forced: bool,
}

pub fn at_check<R: LatticeRing>(
    sub: &EndoSystem<R>,
    ambient: &EndoSystem<R>,
    emb: &Embedding<R>,
    opts: &EntropyOptions,
) -> Result<ATReport> {
    if sub.lf != ambient.lf {
        return Err(Error::Invalid("the two systems use different length functions".into()));
    }
    check_embedding(sub, ambient, emb)?;
    let quotient = quotient_system(sub, ambient, emb)?;
    let finite = sub.is_locally_finite()? && ambient.is_locally_finite()? && quotient.is_locally_finite()?;
    if !finite && !opts.force {
        return Err(Error::NotLocallyFinite);
    }
    let opts = EntropyOptions { force: true, ..*opts };
    let ent_sub = entropy(sub, &opts)?;
    let ent_ambient = entropy(ambient, &opts)?;
    let ent_quotient = entropy(&quotient, &opts)?;
    let verdict = verdict(&ent_sub, &ent_ambient, &ent_quotient)?;
    Ok(ATReport { ent_sub, ent_ambient, ent_quotient, verdict, forced: !finite })
}

fn verdict(n: &EntropyResult, m: &EntropyResult, q: &EntropyResult) -> Result<Verdict> {
    if let (Some(a), Some(b), Some(c)) = (&n.exact, &m.exact, &q.exact) {
        let sum = a.plus(c);
        return Ok(if sum.try_cmp(b)? == Ordering::Equal { Verdict::Additive } else { Verdict::Violated });
    }
    let (lo, hi) = (n.lower.plus(&q.lower), n.upper.plus(&q.upper));
    let meets = lo.try_cmp(&m.upper)? != Ordering::Greater && m.lower.try_cmp(&hi)? != Ordering::Greater;
    Ok(if meets { Verdict::Consistent } else { Verdict::Violated })
}

fn check_embedding<R: LatticeRing>(sub: &EndoSystem<R>, amb: &EndoSystem<R>, emb: &Embedding<R>) -> Result<()> {
    match (&sub.body, &amb.body, emb) {
        (Body::Finite { module: n, endo: fn_ }, Body::Finite { module: m, endo: fm }, Embedding::Finite(a)) => {
            if a.source() != n || a.target() != m {
                return Err(Error::AmbientMismatch);
            }
            if !a.compose(fn_)?.same_map(&fm.compose(a)?) {
                return Err(Error::NotEquivariant("α·φ_N ≠ φ_M·α".into()));
            }
            if !a.is_injective() {
                return Err(Error::Invalid("the embedding is not injective".into()));
            }
            Ok(())
        }
        (Body::Family { family: nf, endo: ne }, Body::Family { family: mf, endo: me }, Embedding::Family(rule)) => {
            check_family_embedding(nf, ne, mf, me, rule)
        }
        (Body::Sum(ns), Body::Sum(ms), Embedding::Sum(es)) if ns.len() == ms.len() && ms.len() == es.len() => {
            ns.iter().zip(ms).zip(es).try_for_each(|((n, m), e)| check_embedding(n, m, e))
        }
        _ => Err(Error::Invalid("the embedding does not match the shapes of the two systems".into())),
    }
}

fn check_family_embedding<R: LatticeRing>(
    nf: &ShiftFamily<R>,
    ne: &BandedEndo<R>,
    mf: &ShiftFamily<R>,
    me: &BandedEndo<R>,
    rule: &MapRule<R>,
) -> Result<()> {
    if rule.offset != ORIGIN {
        return Err(Error::Invalid("embeddings of families must preserve grades".into()));
    }
    if nf.index() != mf.index() {
        return Err(Error::Invalid("the two families have different index sets".into()));
    }
    let ring = mf.ring();
    let period = ne.rules().iter().chain(me.rules()).map(|r| r.period()).chain([rule.period()]).max().unwrap_or(1) as i64;
    let mut span = [0i64; 2];
    for reach in [ne.reach(), me.reach()] {
        for (c, (lo, hi)) in reach.into_iter().enumerate() {
            span[c] = span[c].max(-lo).max(hi);
        }
    }
    let hull = |f: &ShiftFamily<R>| f.explicit_hull().unwrap_or((ORIGIN, ORIGIN));
    let ((a, b), (c, d)) = (hull(nf), hull(mf));
    let (lo, hi) = ([a[0].min(c[0]), a[1].min(c[1])], [b[0].max(d[0]), b[1].max(d[1])]);
    let inner = Window::new([lo[0] - period - span[0], lo[1] - span[1]], [hi[0] + period + span[0], hi[1] + span[1] + 1]);
    let outer = Window::new([inner.lo[0] - span[0], inner.lo[1] - span[1]], [inner.hi[0] + span[0], inner.hi[1] + span[1]]);
    let tn = truncate(nf, &[ne], outer)?;
    let tm = truncate(mf, &[me], outer)?;
    let mut cols = vec![SVec::new(); tn.module.gens()];
    for (&g, &s0) in &tn.slots {
        let src = nf.component(g)?.expect("grade in index");
        let Some(&t0) = tm.slots.get(&g) else {
            if src.is_zero_module() {
                continue;
            }
            return Err(Error::Invalid(format!("grade {g:?} of the submodule has no counterpart")));
        };
        let tgt = mf.component(g)?.expect("grade in index");
        let block = match rule.block(g) {
            Some(m) => Morphism::from_matrix(&src, &tgt, m)?,
            None => Morphism::zero(&src, &tgt),
        };
        if !block.is_injective() {
            return Err(Error::Invalid(format!("the embedding is not injective at grade {g:?}")));
        }
        for (j, col) in block.columns().iter().enumerate() {
            cols[s0 + j] = col.iter().map(|(i, e)| (t0 + i, e.clone())).collect();
        }
    }
    let alpha = Morphism::new_unchecked(&tn.module, &tm.module, cols);
    let left = alpha.compose(&tn.endos[0])?;
    let right = tm.endos[0].compose(&alpha)?;
    for g in inner.grades(nf.index()) {
        let Some(&s0) = tn.slots.get(&g) else { continue };
        for j in 0..nf.component_gens(g) {
            let d = lin2(ring, &ring.one(), &left.columns()[s0 + j], &ring.neg(&ring.one()), &right.columns()[s0 + j]);
            if !tm.module.is_zero_element(&d) {
                return Err(Error::NotEquivariant(format!("α·φ_N ≠ φ_M·α at grade {g:?}")));
            }
        }
    }
    Ok(())
}

/// `M/N` with the induced endomorphism, for embeddings whose cokernel is
/// again a recognized system.
pub fn quotient_system<R: LatticeRing>(sub: &EndoSystem<R>, amb: &EndoSystem<R>, emb: &Embedding<R>) -> Result<EndoSystem<R>> {
    let lf = amb.lf;
    match (&sub.body, &amb.body, emb) {
        (_, Body::Finite { module, endo }, Embedding::Finite(a)) => {
            let image = Submodule::generated(module, a.columns().iter().cloned())?;
            let q = Arc::new(module.quotient(&image)?);
            EndoSystem::finite(Morphism::new(&q, &q, endo.columns().to_vec())?, lf)
        }
        (_, Body::Family { family, endo }, Embedding::Family(rule)) => {
            if rule.explicit.is_empty() && rule.pattern.iter().all(|m| m.is_zero_matrix(family.ring())) {
                return Ok(amb.clone());
            }
            let [block] = rule.pattern.as_slice() else { return Err(Error::NotRecognized) };
            if !rule.explicit.is_empty() {
                return Err(Error::NotRecognized);
            }
            match (family.kind(), endo.kind()) {
                (FamilyKind::Bernoulli(c), EndoKind::Shift([1, 0])) => {
                    EndoSystem::from_pair(bernoulli(cokernel(c, block)?), lf)
                }
                (FamilyKind::TwoSided(c), EndoKind::Shift(o)) => {
                    let (fam, _) = two_sided(cokernel(c, block)?);
                    let e = shift_endo(&fam, o);
                    EndoSystem::family(fam, e, lf)
                }
                (FamilyKind::Grid(c), EndoKind::Shift(o)) => {
                    let (fam, _, _) = grid2d(cokernel(c, block)?);
                    let e = shift_endo(&fam, o);
                    EndoSystem::family(fam, e, lf)
                }
                (FamilyKind::Sigma(SigmaLimit::Cuts(cuts)), EndoKind::SigmaShift) => {
                    let ring = family.ring();
                    let e = &block[(0, 0)];
                    if block.rows() != 1 || block.cols() != 1 {
                        return Err(Error::NotRecognized);
                    }
                    // R/(x^γ) modulo (x^c) is R/(x^{min(γ, c)})
                    let c = ring.pivot_key(e).ok_or(Error::NotRecognized)?;
                    if ring.monomial(&c).as_ref() != Some(&ring.ideal_generator(e)) {
                        return Err(Error::NotRecognized);
                    }
                    EndoSystem::from_pair(bernoulli_sigma(ring, cuts.min_with(&c)?)?, lf)
                }
                _ => Err(Error::NotRecognized),
            }
        }
        (Body::Sum(ns), Body::Sum(ms), Embedding::Sum(es)) if ns.len() == ms.len() && ms.len() == es.len() => {
            let qs = ns.iter().zip(ms).zip(es).map(|((n, m), e)| quotient_system(n, m, e)).collect::<Result<Vec<_>>>()?;
            EndoSystem::direct_sum(qs)
        }
        _ => Err(Error::Invalid("the embedding does not match the shapes of the two systems".into())),
    }
}

fn cokernel<R: LatticeRing>(c: &Arc<FPModule<R>>, block: &Matrix<R::Elem>) -> Result<FPModule<R>> {
    let src_gens = block.cols();
    let src = Arc::new(FPModule::free(c.ring(), src_gens));
    // only the image of the block matters
    let f = Morphism::new_unchecked(&src, c, (0..src_gens).map(|j| crate::fpmod::from_dense(c.ring(), &block.col(j))).collect());
    if block.rows() != c.gens() {
        return Err(Error::Dimension(format!("{} block rows for a component with {} generators", block.rows(), c.gens())));
    }
    c.quotient(&f.image(&src.whole())?)
}

/// `0 ↪ M` for any system shape.
pub fn zero_embedding<R: LatticeRing>(amb: &EndoSystem<R>) -> Result<(EndoSystem<R>, Embedding<R>)> {
    let ring = amb.ring().ok_or_else(|| Error::Invalid("empty system".into()))?.clone();
    match &amb.body {
        Body::Finite { module, .. } => {
            let z = Arc::new(FPModule::zero(&ring));
            let sys = EndoSystem::finite(Morphism::zero(&z, &z), amb.lf)?;
            Ok((sys, Embedding::Finite(Morphism::zero(&z, module))))
        }
        Body::Family { family, .. } => {
            let zero = FPModule::zero(&ring);
            let (fam, e) = match family.index() {
                IndexSet::Nat => bernoulli(zero),
                IndexSet::Int => two_sided(zero),
                IndexSet::Grid => {
                    let (f, sx, _) = grid2d(zero);
                    (f, sx)
                }
            };
            Ok((EndoSystem::family(fam, e, amb.lf)?, Embedding::Family(MapRule::periodic(ORIGIN, vec![]))))
        }
        Body::Sum(parts) => {
            let (ss, es): (Vec<_>, Vec<_>) = parts.iter().map(zero_embedding).collect::<Result<Vec<_>>>()?.into_iter().unzip();
            Ok((EndoSystem::direct_sum(ss)?, Embedding::Sum(es)))
        }
    }
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;
    use crate::ring::{Integers, LengthFunction};
    use crate::scalars::LengthValue;

    fn z(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn bern(m: FPModule<Integers>) -> EndoSystem<Integers> {
        EndoSystem::from_pair(bernoulli(m), LengthFunction::LogCard).unwrap()
    }

    #[test]
    fn bernoulli_sequence_is_additive() {
        let n = bern(FPModule::cyclic(&Integers, z(2)));
        let m = bern(FPModule::cyclic(&Integers, z(4)));
        let emb = Embedding::Family(MapRule::periodic(ORIGIN, vec![Matrix::from_rows(vec![vec![z(2)]]).unwrap()]));
        let r = at_check(&n, &m, &emb, &EntropyOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Additive);
        assert_eq!(r.ent_quotient.exact, Some(LengthValue::log_u64(2)));
        assert_eq!(r.ent_ambient.exact, Some(LengthValue::log_u64(4)));
    }

    #[test]
    fn counterexample_outside_local_finiteness() {
        let n = bern(FPModule::free(&Integers, 1));
        let m = bern(FPModule::free(&Integers, 1));
        let emb = Embedding::Family(MapRule::periodic(ORIGIN, vec![Matrix::from_rows(vec![vec![z(2)]]).unwrap()]));
        assert_eq!(at_check(&n, &m, &emb, &EntropyOptions::default()).err(), Some(Error::NotLocallyFinite));
        let r = at_check(&n, &m, &emb, &EntropyOptions { force: true, ..Default::default() }).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(r.forced);
        assert_eq!(r.ent_quotient.exact, Some(LengthValue::log_u64(2)));
    }

    #[test]
    fn zero_sub_and_bad_maps() {
        let m = bern(FPModule::cyclic(&Integers, z(6)));
        let (n, emb) = zero_embedding(&m).unwrap();
        let r = at_check(&n, &m, &emb, &EntropyOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Additive);
        // a grade-shifting embedding breaks equivariance
        let n = bern(FPModule::cyclic(&Integers, z(6)));
        let mut rule = MapRule::periodic(ORIGIN, vec![Matrix::from_rows(vec![vec![z(1)]]).unwrap()]);
        rule.explicit.insert([0, 0], Matrix::from_rows(vec![vec![z(5)]]).unwrap());
        assert!(matches!(at_check(&n, &m, &Embedding::Family(rule), &EntropyOptions::default()), Err(Error::NotEquivariant(_))));
    }
}
