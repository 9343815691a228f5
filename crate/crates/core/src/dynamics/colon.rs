use serde::Serialize;

use super::{materialize, EndoSystem, Seed};
use crate::error::{Error, Result};
use crate::fpmod::{colon, SVec, Submodule};
use crate::ring::LatticeRing;
use crate::scalars::LengthValue;
use crate::shiftmod::Grade;

/// `J_n = {r : φⁿx·r ∈ T_n(φ, xR)}` for `n = 0..=n_max`, with `T_0 = 0`.
#[derive(Clone, Debug)]
pub struct ColonChain<R: LatticeRing> {
    pub ideals: Vec<R::Elem>,
    /// `L(R/J_n)`.
    pub quotient_lengths: Vec<LengthValue>,
    /// `L(T_{n+1}/T_n)`, computed independently from the trajectory.
    pub alphas: Vec<LengthValue>,
    /// Whether the two columns above agree everywhere.
    pub consistent: bool,
}

#[derive(Serialize)]
pub struct ColonRow {
    pub n: usize,
    pub ideal: String,
    pub quotient_length: LengthValue,
    pub alpha: LengthValue,
}

impl<R: LatticeRing> ColonChain<R> {
    pub fn rows(&self, ring: &R) -> Vec<ColonRow> {
        (0..self.ideals.len())
            .map(|n| ColonRow {
                n,
                ideal: ring.fmt_ideal(&self.ideals[n]),
                quotient_length: self.quotient_lengths[n].clone(),
                alpha: self.alphas[n].clone(),
            })
            .collect()
    }
}

pub fn colon_chain<R: LatticeRing>(sys: &EndoSystem<R>, g: Grade, x: &SVec<R::Elem>, n_max: usize) -> Result<ColonChain<R>> {
    let ring = sys.ring().ok_or_else(|| Error::Invalid("empty system".into()))?.clone();
    let mat = materialize(sys, &Seed::element(g, x.clone()), n_max)?;
    // a zero seed may be dropped when materializing
    let mut cur = match mat.seed.as_slice() {
        [] => SVec::new(),
        [x] => x.clone(),
        _ => return Err(Error::Invalid("the seed must be a single element".into())),
    };
    let f = &mat.endos[0];
    let mut traj = Submodule::generated(&mat.module, [])?;
    let mut prev_len = LengthValue::zero();
    let (mut ideals, mut qls, mut alphas) = (Vec::new(), Vec::new(), Vec::new());
    let mut consistent = true;
    for n in 0..=n_max {
        let j = colon(&ring, &cur, traj.lattice());
        if let Some(prev) = ideals.last() {
            if !ring.divides(&j, prev) {
                return Err(Error::NotAscending(format!("J_{} does not contain J_{}", n, n - 1)));
            }
        }
        let ql = ring.cyclic_length(sys.lf, &j)?;
        traj.extend([cur.clone()]);
        let len = traj.length(sys.lf)?;
        if len.is_infinite() {
            return Err(Error::NotLFinite);
        }
        let alpha = len.checked_sub(&prev_len).expect("trajectories ascend");
        consistent &= alpha == ql;
        prev_len = len;
        ideals.push(j);
        qls.push(ql);
        alphas.push(alpha);
        cur = f.apply(&cur);
    }
    Ok(ColonChain { ideals, quotient_lengths: qls, alphas, consistent })
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;
    use crate::fpmod::FPModule;
    use crate::ring::{Integers, LengthFunction, Matrix, ValElement, Valuation};
    use crate::scalars::rat;
    use crate::shiftmod::{bernoulli, bernoulli_sigma, CutSequence, ORIGIN};

    #[test]
    fn bernoulli_chain_is_constant() {
        let sys = EndoSystem::from_pair(bernoulli(FPModule::cyclic(&Integers, BigInt::from(4))), LengthFunction::LogCard).unwrap();
        let c = colon_chain(&sys, ORIGIN, &SVec::from([(0, BigInt::from(1))]), 5).unwrap();
        assert!(c.ideals.iter().all(|j| *j == BigInt::from(4)));
        assert!(c.consistent);
    }

    #[test]
    fn identity_chain_jumps_to_unit() {
        let sys = EndoSystem::from_matrix(FPModule::cyclic(&Integers, BigInt::from(6)), &Matrix::identity(&Integers, 1), LengthFunction::LogCard)
            .unwrap();
        let c = colon_chain(&sys, ORIGIN, &SVec::from([(0, BigInt::from(1))]), 3).unwrap();
        assert_eq!(c.ideals, vec![BigInt::from(6), BigInt::from(1), BigInt::from(1), BigInt::from(1)]);
    }

    #[test]
    fn sigma_chain_matches_cuts() {
        let cuts = CutSequence::new(vec![], "1+1/n").unwrap();
        let sys = EndoSystem::from_pair(bernoulli_sigma(&Valuation, cuts).unwrap(), LengthFunction::Valuation).unwrap();
        let c = colon_chain(&sys, ORIGIN, &SVec::from([(0, ValElement::monomial(rat(0, 1)))]), 6).unwrap();
        for (n, j) in c.ideals.iter().enumerate() {
            assert_eq!(*j, ValElement::monomial(rat(1, 1) + rat(1, n as i64 + 1)));
        }
        assert!(c.consistent);
    }
}
