//! Quotienting by the hyperkernel leaves the entropy unchanged.

use algent::dynamics::{entropy, hyperkernel_reduce, EndoSystem, EntropyOptions};
use algent::fpmod::FPModule;
use algent::ring::{Integers, LengthFunction, Matrix};
use algent::shiftmod::bernoulli;
use num_bigint::BigInt;

fn main() -> algent::Result<()> {
    let b = |x: i64| BigInt::from(x);
    let opts = EntropyOptions::default();
    let shift = EndoSystem::from_pair(bernoulli(FPModule::cyclic(&Integers, b(2))), LengthFunction::LogCard)?;
    // a nilpotent map on (ℤ/3)²
    let nil = Matrix::from_rows(vec![vec![b(0), b(1)], vec![b(0), b(0)]])?;
    let nil = EndoSystem::from_matrix(FPModule::over_modular(3, 2, &[])?, &nil, LengthFunction::LogCard)?;
    let sys = EndoSystem::direct_sum(vec![shift, nil])?;
    let hk = hyperkernel_reduce(&sys, 64)?;
    for (i, p) in hk.parts.iter().enumerate() {
        let len = p.kernel.as_ref().map(|k| k.length(LengthFunction::LogCard)).transpose()?;
        println!("part {i}: hyperkernel length {}, {} steps", len.map_or("-".into(), |l| l.to_string()), p.steps);
    }
    println!("ent before: {}", entropy(&sys, &opts)?.exact.unwrap());
    println!("ent after:  {}", entropy(&hk.reduced, &opts)?.exact.unwrap());
    Ok(())
}
