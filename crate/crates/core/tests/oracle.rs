//! The Smith/Hermite pipeline against enumeration of small groups.

use std::sync::Arc;

use algent::dynamics::{alpha_seq, EndoSystem, Seed};
use algent::fpmod::{FPModule, SVec, Submodule};
use algent::oracle::{bernoulli_window, brute_trajectory, count_length, Presentation};
use algent::ring::{Integers, LengthFunction, Matrix};
use algent::shiftmod::ORIGIN;
use algent::LengthValue;
use num_bigint::BigInt;
use proptest::prelude::*;

fn bigs(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn sparse(v: &[i64]) -> SVec<BigInt> {
    v.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i, BigInt::from(x))).collect()
}

fn module(p: &Presentation) -> FPModule<Integers> {
    let rels: Vec<Vec<BigInt>> = p.relations.iter().map(|c| bigs(c)).collect();
    match p.modulus {
        Some(m) => FPModule::over_modular(m, p.gens, &rels).unwrap(),
        None => FPModule::from_relations(&Integers, p.gens, &rels).unwrap(),
    }
}

/// A finite presentation: a nonzero diagonal plus a few arbitrary relations.
fn finite_presentation() -> impl Strategy<Value = Presentation> {
    (1usize..=3).prop_flat_map(|g| {
        (prop::collection::vec(1i64..=6, g), prop::collection::vec(prop::collection::vec(-6i64..=6, g), 0..=2)).prop_map(
            move |(diag, extra)| {
                let mut relations = Presentation::diagonal(&diag).relations;
                relations.extend(extra);
                Presentation { gens: g, relations, modulus: None }
            },
        )
    })
}

/// `(ℤ/m)^g` modulo random relations, an endomorphism and a seed.
fn modular_system() -> impl Strategy<Value = (Presentation, Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    (2u64..=6, 1usize..=3).prop_flat_map(|(m, g)| {
        let row = prop::collection::vec(0i64..m as i64, g);
        (
            prop::collection::vec(row.clone(), 0..=1),
            prop::collection::vec(row.clone(), g),
            prop::collection::vec(row, 1..=2),
        )
            .prop_map(move |(relations, endo, seed)| (Presentation { gens: g, relations, modulus: Some(m) }, endo, seed))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn module_length_matches_count(p in finite_presentation()) {
        let want = count_length(&p).unwrap();
        prop_assert_eq!(module(&p).length(LengthFunction::LogCard).unwrap(), want);
    }

    #[test]
    fn trajectory_lengths_match_enumeration((p, endo, seed) in modular_system()) {
        let m = Arc::new(module(&p));
        let f = Matrix::from_rows(endo.iter().map(|r| bigs(r)).collect()).unwrap();
        let sys = EndoSystem::from_matrix((*m).clone(), &f, LengthFunction::LogCard);
        prop_assume!(sys.is_ok(), "the matrix does not preserve the relations");
        let sys = sys.unwrap();
        let s = Seed::new(seed.iter().map(|v| (ORIGIN, sparse(v))).collect());
        let n_max = 6;
        let q = alpha_seq(&sys, &s, n_max).unwrap();
        for n in 1..=n_max + 1 {
            let brute = brute_trajectory(&p, &endo, &seed, n).unwrap();
            prop_assert_eq!(&q.lengths[n - 1], &brute.length(), "n = {}", n);
        }
        // the seed itself, as a submodule, has the same length as T_1
        let t1 = Submodule::generated(&m, seed.iter().map(|v| sparse(v))).unwrap();
        prop_assert_eq!(t1.length(LengthFunction::LogCard).unwrap(), q.lengths[0].clone());
    }
}

#[test]
fn bernoulli_windows_grow_by_one_copy() {
    for d in 2..=6 {
        let (w, s) = bernoulli_window(&Presentation::cyclic(d), 6);
        let mut seed = vec![0; 6];
        seed[0] = 1;
        for n in 1..=6 {
            let t = brute_trajectory(&w, &s, &[seed.clone()], n).unwrap();
            assert_eq!(t.length(), LengthValue::log_u64(d as u64).mul_int(n as _));
        }
    }
}
