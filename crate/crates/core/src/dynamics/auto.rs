//! Automorphisms, multiplicity and hyperkernel reduction.

use std::sync::Arc;

use super::{
    entropy, entropy_of, materialize, run_trajectory, torsion_seed, Body, Certificate, EndoSystem, EntropyOptions,
    EntropyResult, Seed,
};
use crate::error::{Error, Result};
use crate::fpmod::{Morphism, Submodule};
use crate::ring::{LatticeRing, Matrix};
use crate::scalars::LengthValue;
use crate::shiftmod::{endo_with_kind, BandedEndo, EndoKind, FamilyKind, Grade, IndexSet, MapRule, ShiftFamily, TailRule, ORIGIN};

fn add(a: Grade, b: Grade) -> Grade {
    [a[0] + b[0], a[1] + b[1]]
}

fn invert_block<R: LatticeRing>(fam: &ShiftFamily<R>, g: Grade, t: Grade, m: &Matrix<R::Elem>) -> Result<Matrix<R::Elem>> {
    let (src, tgt) = (fam.component(g)?.expect("grade in index"), fam.component(t)?.expect("grade in index"));
    Ok(Morphism::from_matrix(&src, &tgt, m)?.inverse()?.matrix())
}

/// The inverse of a single-offset banded endomorphism with invertible blocks.
fn invert_banded<R: LatticeRing>(fam: &ShiftFamily<R>, endo: &BandedEndo<R>) -> Result<BandedEndo<R>> {
    if let (FamilyKind::TwoSided(_), EndoKind::Shift(o)) = (fam.kind(), endo.kind()) {
        let inv = crate::shiftmod::shift_endo(fam, [-o[0], -o[1]]);
        return Ok(endo_with_kind(inv.rules().to_vec(), EndoKind::Shift([-o[0], -o[1]])));
    }
    let [rule] = endo.rules() else { return Err(Error::NotInvertible) };
    let o = rule.offset;
    if o != ORIGIN && fam.index() != IndexSet::Int {
        // the lowest grades are never hit
        return Err(Error::NotInvertible);
    }
    if matches!(fam.tail(), TailRule::Cuts(_)) && endo.kind() != EndoKind::Identity {
        return Err(Error::NotInvertible);
    }
    let mut inv = MapRule::periodic([-o[0], -o[1]], Vec::new());
    let mut special: Vec<Grade> = fam.explicit().keys().copied().collect();
    special.extend(fam.explicit().keys().map(|g| [g[0] - o[0], g[1] - o[1]]));
    special.extend(rule.explicit.keys().copied());
    special.sort();
    special.dedup();
    for g in special {
        if !fam.index().contains(g) {
            continue;
        }
        let t = add(g, o);
        let m = rule.block(g).ok_or(Error::NotInvertible)?;
        inv.explicit.insert(t, invert_block(fam, g, t, m)?);
    }
    if fam.has_tail() {
        let p = rule.period() as i64;
        let base = fam.explicit_hull().map_or(0, |(_, hi)| hi[0] + 1).max(0) + p;
        let mut pattern = vec![None; p as usize];
        for k in 0..p {
            let g = [base + k, 0];
            let t = add(g, o);
            let m = rule.block(g).ok_or(Error::NotInvertible)?;
            pattern[t[0].rem_euclid(p) as usize] = Some(invert_block(fam, g, t, m)?);
        }
        inv.pattern = pattern.into_iter().map(|m| m.expect("each residue hit once")).collect();
    }
    let kind = match endo.kind() {
        EndoKind::Identity => EndoKind::Identity,
        _ => EndoKind::General,
    };
    let out = BandedEndo::new(fam, vec![inv])?;
    Ok(endo_with_kind(out.rules().to_vec(), kind))
}

/// `φ^{-1}` for bijective systems.
pub fn invert_endo<R: LatticeRing>(sys: &EndoSystem<R>) -> Result<EndoSystem<R>> {
    let body = match &sys.body {
        Body::Finite { module, endo } => Body::Finite { module: module.clone(), endo: endo.inverse()? },
        Body::Family { family, endo } => Body::Family { family: family.clone(), endo: Arc::new(invert_banded(family, endo)?) },
        Body::Sum(parts) => Body::Sum(parts.iter().map(invert_endo).collect::<Result<_>>()?),
    };
    Ok(EndoSystem { body, lf: sys.lf })
}

/// The quotient formula `L(T(φ⁻¹,S) / φ⁻¹T(φ⁻¹,S))` where it can be evaluated
/// exactly: after the inverse trajectory stabilizes, or for a seed in one
/// component of a nonzero-offset single-rule map (then the quotient is `S`).
pub(crate) fn auto_formula<R: LatticeRing>(sys: &EndoSystem<R>, seed: &Seed<R>, opts: &EntropyOptions) -> Result<EntropyResult> {
    let inv = invert_endo(sys)?;
    if let Body::Family { family, endo } = &sys.body {
        let moving = matches!(endo.rules(), [r] if r.offset != ORIGIN);
        if let (true, Some((g, elems))) = (moving, seed.single_grade()) {
            let comp = family.component(g)?.ok_or_else(|| Error::Invalid(format!("grade {g:?} outside the family")))?;
            let l = Submodule::generated(&comp, elems)?.length(sys.lf)?;
            if l.is_infinite() {
                return Err(Error::NotLFinite);
            }
            return Ok(EntropyResult::exact(l, Certificate::AutoFormula, 0));
        }
    }
    let budget = opts.budget.max(1);
    let mat = materialize(&inv, seed, budget)?;
    let run = run_trajectory(&mat, 0, sys.lf, budget, true)?;
    match run.stabilized {
        Some(n) => {
            let psi_t = mat.endos[0].image(&run.traj)?;
            let l = run.lengths[n].checked_sub(&psi_t.length(sys.lf)?).expect("ψT ≤ T");
            Ok(EntropyResult::exact(l, Certificate::AutoFormula, n))
        }
        None => Ok(EntropyResult::bounds(LengthValue::zero(), LengthValue::infinity(), budget)),
    }
}

/// `ent_L(φ, S)` for bijective `φ` through the inverse trajectory, falling back
/// to the forward computation when the formula is not decidable in budget.
pub fn auto_entropy<R: LatticeRing>(sys: &EndoSystem<R>, seed: &Seed<R>, opts: &EntropyOptions) -> Result<EntropyResult> {
    let r = auto_formula(sys, seed, opts)?;
    if r.is_exact() {
        return Ok(r);
    }
    entropy_of(sys, seed, opts)
}

/// `mult_L(M_φ)`: `ent_L` of the inverse for bijective maps, otherwise
/// `L(N/φN) − L(Ker φ|_N)` on the L-finite part of a finitely presented module.
pub fn multiplicity<R: LatticeRing>(sys: &EndoSystem<R>, opts: &EntropyOptions) -> Result<EntropyResult> {
    if let Ok(inv) = invert_endo(sys) {
        return entropy(&inv, opts);
    }
    match &sys.body {
        Body::Finite { module, endo } => {
            let n = Submodule::generated(module, torsion_seed(module, sys.lf)?)?;
            let fn_ = endo.image(&n)?;
            let ln = n.length(sys.lf)?;
            let lfn = fn_.length(sys.lf)?;
            // Ker φ|_N = Ker φ when N is everything; otherwise read it off φN by additivity
            let lk = if n == module.whole() { endo.kernel().length(sys.lf)? } else { ln.checked_sub(&lfn).unwrap_or_default() };
            if ln.is_infinite() || lk.is_infinite() {
                return Ok(EntropyResult::bounds(LengthValue::zero(), LengthValue::infinity(), 0));
            }
            let l = ln.checked_sub(&lfn).expect("φN ≤ N").checked_sub(&lk);
            match l {
                Some(l) => Ok(EntropyResult::exact(l, Certificate::DirectFormula, 0)),
                None => Err(Error::Invalid("kernel longer than the cokernel on a finite-length module".into())),
            }
        }
        Body::Family { family, endo } => match (family.kind(), endo.kind()) {
            (FamilyKind::Bernoulli(c), EndoKind::Shift([1, 0])) => {
                Ok(EntropyResult::closed(c.finite_part_length(sys.lf)?, super::ClosedFormKind::Bernoulli, 0))
            }
            (FamilyKind::Sigma(_), EndoKind::SigmaShift) => entropy(sys, opts),
            _ => Ok(EntropyResult::bounds(LengthValue::zero(), LengthValue::infinity(), 0)),
        },
        Body::Sum(parts) => {
            let rs = parts.iter().map(|p| multiplicity(p, opts)).collect::<Result<Vec<_>>>()?;
            Ok(EntropyResult::sum(&rs))
        }
    }
}

/// `Ker_∞ φ` per summand, and the system induced on `M / Ker_∞ φ`.
#[derive(Clone, Debug)]
pub struct Hyperkernel<R: LatticeRing> {
    pub parts: Vec<PartKernel<R>>,
    pub reduced: EndoSystem<R>,
}

#[derive(Clone, Debug)]
pub struct PartKernel<R: LatticeRing> {
    /// `None` for shift families, whose hyperkernel is zero.
    pub kernel: Option<Submodule<R>>,
    /// First `n` with `Ker φ^{n+1} = Ker φ^n`.
    pub steps: usize,
}

impl<R: LatticeRing> Hyperkernel<R> {
    pub fn is_trivial(&self) -> bool {
        self.parts.iter().all(|p| p.kernel.as_ref().map_or(true, |k| k.is_zero()))
    }

    pub fn describe(&self) -> String {
        let ks: Vec<String> = self
            .parts
            .iter()
            .map(|p| match &p.kernel {
                None => "0".into(),
                Some(k) if k.is_zero() => "0".into(),
                Some(k) if k == &k.ambient().whole() => "whole".into(),
                Some(k) => k.as_module().describe(),
            })
            .collect();
        ks.join(" ⊕ ")
    }
}

pub fn hyperkernel_reduce<R: LatticeRing>(sys: &EndoSystem<R>, cap: usize) -> Result<Hyperkernel<R>> {
    let mut parts = Vec::new();
    let reduced = reduce(sys, cap, &mut parts)?;
    Ok(Hyperkernel { parts, reduced })
}

fn reduce<R: LatticeRing>(sys: &EndoSystem<R>, cap: usize, out: &mut Vec<PartKernel<R>>) -> Result<EndoSystem<R>> {
    match &sys.body {
        Body::Finite { module, endo } => {
            let mut power = endo.clone();
            let mut k = endo.kernel();
            let mut steps = None;
            for n in 1..=cap {
                power = endo.compose(&power)?;
                let next = power.kernel();
                if next == k {
                    steps = Some(n);
                    break;
                }
                k = next;
            }
            let steps = steps.ok_or(Error::CapExceeded { cap })?;
            let q = Arc::new(module.quotient(&k)?);
            let induced = Morphism::new(&q, &q, endo.columns().to_vec())?;
            if !induced.is_injective() {
                return Err(Error::Invalid("induced map on M/Ker_∞ is not injective".into()));
            }
            out.push(PartKernel { kernel: Some(k), steps });
            EndoSystem::finite(induced, sys.lf)
        }
        Body::Family { family, endo } => match (family.kind(), endo.kind()) {
            (FamilyKind::Bernoulli(_) | FamilyKind::TwoSided(_) | FamilyKind::Grid(_), EndoKind::Shift(_)) => {
                out.push(PartKernel { kernel: None, steps: 0 });
                Ok(sys.clone())
            }
            _ => Err(Error::NotRecognized),
        },
        Body::Sum(parts) => {
            let rs = parts.iter().map(|p| reduce(p, cap, out)).collect::<Result<Vec<_>>>()?;
            EndoSystem::direct_sum(rs)
        }
    }
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;
    use crate::fpmod::FPModule;
    use crate::ring::{Integers, LengthFunction};
    use crate::shiftmod::{bernoulli, two_sided};

    fn z(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn mult(m: i64, c: i64) -> EndoSystem<Integers> {
        EndoSystem::from_matrix(FPModule::cyclic(&Integers, z(m)), &Matrix::from_rows(vec![vec![z(c)]]).unwrap(), LengthFunction::LogCard)
            .unwrap()
    }

    #[test]
    fn inverses() {
        let five = invert_endo(&mult(6, 5)).unwrap();
        let Body::Finite { module, endo } = five.body() else { panic!() };
        assert!(endo.same_map(&Morphism::scalar(module, &z(5))));
        let b = EndoSystem::from_pair(bernoulli(FPModule::cyclic(&Integers, z(2))), LengthFunction::LogCard).unwrap();
        assert_eq!(invert_endo(&b).err(), Some(Error::NotInvertible));
        let t = EndoSystem::from_pair(two_sided(FPModule::cyclic(&Integers, z(3))), LengthFunction::LogCard).unwrap();
        let inv = invert_endo(&t).unwrap();
        let Body::Family { endo, .. } = inv.body() else { panic!() };
        assert_eq!(endo.kind(), EndoKind::Shift([-1, 0]));
    }

    #[test]
    fn automorphism_formula() {
        let t = EndoSystem::from_pair(two_sided(FPModule::cyclic(&Integers, z(3))), LengthFunction::LogCard).unwrap();
        let seed = Seed::component(&t, ORIGIN);
        let r = auto_entropy(&t, &seed, &EntropyOptions::default()).unwrap();
        assert_eq!((r.exact, r.certificate), (Some(LengthValue::log_u64(3)), Certificate::AutoFormula));
        let r = auto_entropy(&mult(6, 5), &Seed::component(&mult(6, 5), ORIGIN), &EntropyOptions::default()).unwrap();
        assert_eq!(r.exact, Some(LengthValue::zero()));
    }

    #[test]
    fn multiplicities() {
        let t = EndoSystem::from_pair(two_sided(FPModule::cyclic(&Integers, z(3))), LengthFunction::LogCard).unwrap();
        assert_eq!(multiplicity(&t, &EntropyOptions::default()).unwrap().exact, Some(LengthValue::log_u64(3)));
        assert_eq!(multiplicity(&mult(6, 1), &EntropyOptions::default()).unwrap().exact, Some(LengthValue::zero()));
        let r = multiplicity(&mult(4, 2), &EntropyOptions::default()).unwrap();
        assert_eq!((r.exact, r.certificate), (Some(LengthValue::zero()), Certificate::DirectFormula));
    }

    #[test]
    fn hyperkernels() {
        let b = EndoSystem::from_pair(bernoulli(FPModule::cyclic(&Integers, z(2))), LengthFunction::LogCard).unwrap();
        let sys = EndoSystem::direct_sum(vec![b, mult(4, 2)]).unwrap();
        let h = hyperkernel_reduce(&sys, 16).unwrap();
        assert_eq!(h.describe(), "0 ⊕ whole");
        let opts = EntropyOptions::default();
        assert_eq!(entropy(&sys, &opts).unwrap().exact, entropy(&h.reduced, &opts).unwrap().exact);
        let nil = Matrix::from_rows(vec![vec![z(0), z(1), z(0)], vec![z(0), z(0), z(1)], vec![z(0), z(0), z(0)]]).unwrap();
        let sys = EndoSystem::from_matrix(FPModule::diagonal(&Integers, &[z(2), z(2), z(2)]), &nil, LengthFunction::LogCard).unwrap();
        let h = hyperkernel_reduce(&sys, 16).unwrap();
        assert_eq!(h.parts[0].steps, 3);
        let Body::Finite { module, .. } = h.reduced.body() else { panic!() };
        assert!(module.is_zero_module());
    }
}
