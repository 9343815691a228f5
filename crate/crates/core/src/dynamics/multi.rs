//! Entropy of `k` commuting endomorphisms, averaged over the boxes `[0, n)^k`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::{ClosedFormKind, EntropyOptions, EntropyResult, Seed};
use crate::error::{Error, Result};
use crate::fpmod::{FPModule, Morphism, SVec, Submodule};
use crate::ring::{LatticeRing, LengthFunction};
use crate::scalars::{LengthValue, Rational};
use crate::shiftmod::{truncate, BandedEndo, EndoKind, FamilyKind, Grade, ShiftFamily, Window, ORIGIN};

pub const MAX_MAPS: usize = 3;

#[derive(Clone, Debug)]
enum Base<R: LatticeRing> {
    Finite { module: Arc<FPModule<R>>, endos: Vec<Morphism<R>> },
    Family { family: Arc<ShiftFamily<R>>, endos: Vec<Arc<BandedEndo<R>>> },
}

/// A module with `k ≤ 3` pairwise commuting endomorphisms.
#[derive(Clone, Debug)]
pub struct MultiEndoSystem<R: LatticeRing> {
    base: Base<R>,
    lf: LengthFunction,
}

fn check_count(k: usize) -> Result<()> {
    if k == 0 || k > MAX_MAPS {
        return Err(Error::Invalid(format!("between 1 and {MAX_MAPS} maps are supported, got {k}")));
    }
    Ok(())
}

impl<R: LatticeRing> MultiEndoSystem<R> {
    pub fn finite(module: FPModule<R>, endos: Vec<Morphism<R>>, lf: LengthFunction) -> Result<Self> {
        check_count(endos.len())?;
        module.ring().check_length(lf)?;
        let module = Arc::new(module);
        for f in &endos {
            if **f.source() != *module || **f.target() != *module {
                return Err(Error::AmbientMismatch);
            }
        }
        for (i, a) in endos.iter().enumerate() {
            for (j, b) in endos.iter().enumerate().skip(i + 1) {
                if !a.compose(b)?.same_map(&b.compose(a)?) {
                    return Err(Error::NonCommuting(format!("maps {} and {} do not commute", i + 1, j + 1)));
                }
            }
        }
        Ok(MultiEndoSystem { base: Base::Finite { module, endos }, lf })
    }

    /// Commutation is checked on every grade within one period and one
    /// step of the explicit part, which covers all distinct block patterns.
    pub fn family(family: ShiftFamily<R>, endos: Vec<BandedEndo<R>>, lf: LengthFunction) -> Result<Self> {
        check_count(endos.len())?;
        family.ring().check_length(lf)?;
        let period = endos.iter().flat_map(|e| e.rules().iter().map(|r| r.period())).max().unwrap_or(1) as i64;
        let mut span = [0i64; 2];
        for e in &endos {
            for (c, (lo, hi)) in e.reach().iter().enumerate() {
                span[c] = span[c].max(hi - lo).max(-lo).max(*hi);
            }
        }
        let (lo, hi) = family.explicit_hull().unwrap_or((ORIGIN, ORIGIN));
        let inner = Window::new([lo[0] - period - span[0], lo[1] - span[1]], [hi[0] + period + span[0], hi[1] + span[1]]);
        let outer = Window::new(
            [inner.lo[0] - 2 * span[0], inner.lo[1] - 2 * span[1]],
            [inner.hi[0] + 2 * span[0], inner.hi[1] + 2 * span[1]],
        );
        let refs: Vec<&BandedEndo<R>> = endos.iter().collect();
        let t = truncate(&family, &refs, outer)?;
        let ring = family.ring();
        for (i, a) in t.endos.iter().enumerate() {
            for (j, b) in t.endos.iter().enumerate().skip(i + 1) {
                let (ab, ba) = (a.compose(b)?, b.compose(a)?);
                for g in inner.grades(family.index()) {
                    let Some(&start) = t.slots.get(&g) else { continue };
                    for k in 0..family.component_gens(g) {
                        let d = crate::fpmod::lin2(ring, &ring.one(), &ab.columns()[start + k], &ring.neg(&ring.one()), &ba.columns()[start + k]);
                        if !t.module.is_zero_element(&d) {
                            return Err(Error::NonCommuting(format!("maps {} and {} differ at grade {g:?}", i + 1, j + 1)));
                        }
                    }
                }
            }
        }
        Ok(MultiEndoSystem { base: Base::Family { family: Arc::new(family), endos: endos.into_iter().map(Arc::new).collect() }, lf })
    }

    pub fn k(&self) -> usize {
        match &self.base {
            Base::Finite { endos, .. } => endos.len(),
            Base::Family { endos, .. } => endos.len(),
        }
    }

    pub fn component_gens(&self, g: Grade) -> usize {
        match &self.base {
            Base::Finite { module, .. } => (g == ORIGIN).then(|| module.gens()).unwrap_or(0),
            Base::Family { family, .. } => family.component_gens(g),
        }
    }

    pub fn ring(&self) -> &R {
        match &self.base {
            Base::Finite { module, .. } => module.ring(),
            Base::Family { family, .. } => family.ring(),
        }
    }

    /// Whether some map is the identity or zero, making that direction trivial.
    fn degenerate(&self) -> bool {
        match &self.base {
            Base::Finite { module, endos } => {
                let (id, zero) = (Morphism::identity(module), Morphism::zero(module, module));
                endos.iter().any(|f| f.same_map(&id) || f.same_map(&zero))
            }
            Base::Family { endos, .. } => endos.iter().any(|e| e.kind() == EndoKind::Identity || e.is_zero()),
        }
    }

    fn is_grid_shifts(&self) -> bool {
        match &self.base {
            Base::Family { family, endos } => {
                let mut kinds: Vec<EndoKind> = endos.iter().map(|e| e.kind()).collect();
                kinds.sort_by_key(|k| format!("{k:?}"));
                matches!(family.kind(), FamilyKind::Grid(_))
                    && kinds == [EndoKind::Shift([0, 1]), EndoKind::Shift([1, 0])]
            }
            Base::Finite { .. } => false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiResult {
    pub result: EntropyResult,
    /// `L(T_n(Φ, S))` for `n = 1, 2, …`.
    pub lengths: Vec<LengthValue>,
}

/// `lim L(T_n(Φ,S)) / n^k` with `T_n` the sum of `φ^h S` over `h ∈ [0, n)^k`.
pub fn multivar_entropy<R: LatticeRing>(msys: &MultiEndoSystem<R>, seed: &Seed<R>, opts: &EntropyOptions) -> Result<MultiResult> {
    let k = msys.k();
    let n_max = opts.budget.max(1);
    for (g, v) in &seed.elems {
        if let Some((&i, _)) = v.iter().next_back() {
            if i >= msys.component_gens(*g) {
                return Err(Error::Dimension(format!("seed index {i} at grade {g:?}")));
            }
        }
    }
    let (module, maps, seed_vecs) = match &msys.base {
        Base::Finite { module, endos } => {
            (module.clone(), endos.clone(), seed.elems.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>())
        }
        Base::Family { family, endos } => {
            let support = seed.support();
            let mut reach = [(0, 0); 2];
            for e in endos {
                for (c, (lo, hi)) in e.reach().iter().enumerate() {
                    reach[c].0 += lo;
                    reach[c].1 += hi;
                }
            }
            let window = Window::covering(&support, (n_max - 1) as u64, reach).unwrap_or(Window::new(ORIGIN, ORIGIN));
            let refs: Vec<&BandedEndo<R>> = endos.iter().map(|e| e.as_ref()).collect();
            let t = truncate(family, &refs, window)?;
            let vecs = seed.elems.iter().filter(|(_, v)| !v.is_empty()).map(|(g, v)| t.embed(*g, v)).collect::<Result<Vec<_>>>()?;
            (t.module.clone(), t.endos, vecs)
        }
    };
    let mut traj = Submodule::generated(&module, seed_vecs.iter().cloned())?;
    let first = traj.length(msys.lf)?;
    if first.is_infinite() {
        return Err(Error::NotLFinite);
    }
    let mut images: HashMap<Vec<usize>, Vec<SVec<R::Elem>>> = HashMap::new();
    images.insert(vec![0; k], seed_vecs);
    let mut lengths = vec![first.clone()];
    let mut stabilized = None;
    for n in 1..n_max {
        // the shell of multi-indices with largest coordinate exactly n
        let mut grew = false;
        for h in shell(k, n) {
            let (i, prev) = h.iter().enumerate().find(|(_, &x)| x > 0).map(|(i, _)| {
                let mut p = h.clone();
                p[i] -= 1;
                (i, p)
            }).expect("nonzero multi-index");
            let vs: Vec<SVec<R::Elem>> = images[&prev].iter().map(|v| maps[i].apply(v)).filter(|v| !module.is_zero_element(v)).collect();
            grew |= traj.extend(vs.iter().cloned());
            images.insert(h, vs);
        }
        if !grew {
            stabilized = Some(n);
            break;
        }
        lengths.push(traj.length(msys.lf)?);
    }
    let steps = lengths.len();
    if let Some(n) = stabilized {
        return Ok(MultiResult { result: EntropyResult::exact(LengthValue::zero(), super::Certificate::TrajectoryStabilized, n), lengths });
    }
    let mut upper = LengthValue::infinity();
    for (i, l) in lengths.iter().enumerate() {
        let nk = ((i + 1) as i64).pow(k as u32);
        let r = l.scale(&Rational::new(1.into(), nk.into()));
        if r.try_cmp(&upper)? == Ordering::Less {
            upper = r;
        }
    }
    let exact = if matches!(msys.base, Base::Finite { .. }) {
        Some(EntropyResult::closed(LengthValue::zero(), ClosedFormKind::FiniteLength, steps))
    } else if k >= 2 && msys.degenerate() {
        Some(EntropyResult::closed(LengthValue::zero(), ClosedFormKind::DegenerateDirection, steps))
    } else if msys.is_grid_shifts() && seed.single_grade().is_some() {
        Some(EntropyResult::closed(first, ClosedFormKind::Grid, steps))
    } else {
        None
    };
    let result = match exact {
        Some(r) => {
            if r.lower.try_cmp(&upper)? == Ordering::Greater {
                return Err(Error::Invalid(format!("closed form {} exceeds the computed bound {upper}", r.lower)));
            }
            r
        }
        None => EntropyResult::bounds(LengthValue::zero(), upper, steps),
    };
    Ok(MultiResult { result, lengths })
}

/// Multi-indices in `[0, n]^k` with at least one coordinate equal to `n`, in
/// increasing coordinate-sum order so predecessors are always computed first.
fn shell(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut h = vec![0usize; k];
    loop {
        if h.iter().any(|&x| x == n) {
            out.push(h.clone());
        }
        let mut i = 0;
        loop {
            if i == k {
                out.sort_by_key(|v| v.iter().sum::<usize>());
                return out;
            }
            h[i] += 1;
            if h[i] <= n {
                break;
            }
            h[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;
    use crate::ring::{Integers, Matrix};
    use crate::shiftmod::{bernoulli, grid2d};

    fn z2() -> FPModule<Integers> {
        FPModule::cyclic(&Integers, BigInt::from(2))
    }

    #[test]
    fn grid_shifts() {
        let (fam, sx, sy) = grid2d(z2());
        let m = MultiEndoSystem::family(fam, vec![sx, sy], LengthFunction::LogCard).unwrap();
        let seed = Seed::element(ORIGIN, SVec::from([(0, BigInt::from(1))]));
        let r = multivar_entropy(&m, &seed, &EntropyOptions::with_budget(8)).unwrap();
        assert_eq!(r.result.exact, Some(LengthValue::log_u64(2)));
        for (i, l) in r.lengths.iter().enumerate() {
            assert_eq!(*l, LengthValue::log_u64(2).mul_int(((i + 1) * (i + 1)) as u64));
        }
    }

    #[test]
    fn degenerate_and_finite() {
        let (fam, s) = bernoulli(z2());
        let id = BandedEndo::identity(&fam).unwrap();
        let m = MultiEndoSystem::family(fam, vec![s, id], LengthFunction::LogCard).unwrap();
        let seed = Seed::element(ORIGIN, SVec::from([(0, BigInt::from(1))]));
        let r = multivar_entropy(&m, &seed, &EntropyOptions::with_budget(6)).unwrap();
        assert_eq!(r.result.closed_form, Some(ClosedFormKind::DegenerateDirection));
        assert_eq!(r.lengths[5], LengthValue::log_u64(2).mul_int(6));
        let z4 = Arc::new(FPModule::cyclic(&Integers, BigInt::from(4)));
        let id = Morphism::identity(&z4);
        let m = MultiEndoSystem::finite((*z4).clone(), vec![id.clone(), id], LengthFunction::LogCard).unwrap();
        let r = multivar_entropy(&m, &Seed::element(ORIGIN, SVec::from([(0, BigInt::from(1))])), &EntropyOptions::default()).unwrap();
        assert_eq!(r.result.exact, Some(LengthValue::zero()));
    }

    #[test]
    fn non_commuting_rejected() {
        let m = Arc::new(FPModule::diagonal(&Integers, &[BigInt::from(2), BigInt::from(2)]));
        let a = Morphism::from_matrix(&m, &m, &Matrix::from_rows(vec![vec![0.into(), 1.into()], vec![0.into(), 0.into()]]).unwrap()).unwrap();
        let b = Morphism::from_matrix(&m, &m, &Matrix::from_rows(vec![vec![0.into(), 0.into()], vec![1.into(), 0.into()]]).unwrap()).unwrap();
        assert!(matches!(
            MultiEndoSystem::finite((*m).clone(), vec![a, b], LengthFunction::LogCard),
            Err(Error::NonCommuting(_))
        ));
    }
}
