//! Addition on 0 → B(ℤ/2) → B(ℤ/4) → B(ℤ/2) → 0, where ℤ/2 sits in ℤ/4 as 2ℤ/4.

use algent::dynamics::{at_check, EndoSystem, Embedding, EntropyOptions};
use algent::fpmod::FPModule;
use algent::ring::{Integers, LengthFunction, Matrix};
use algent::shiftmod::{bernoulli, MapRule};
use num_bigint::BigInt;

fn main() -> algent::Result<()> {
    let zmod = |d: i64| FPModule::cyclic(&Integers, BigInt::from(d));
    let sub = EndoSystem::from_pair(bernoulli(zmod(2)), LengthFunction::LogCard)?;
    let ambient = EndoSystem::from_pair(bernoulli(zmod(4)), LengthFunction::LogCard)?;
    let times_two = Matrix::from_rows(vec![vec![BigInt::from(2)]])?;
    let emb = Embedding::Family(MapRule::periodic([0, 0], vec![times_two]));
    let r = at_check(&sub, &ambient, &emb, &EntropyOptions::default())?;
    let show = |e: &algent::dynamics::EntropyResult| e.exact.as_ref().map_or("?".to_string(), |v| v.to_string());
    println!("ent(N)   = {}", show(&r.ent_sub));
    println!("ent(M)   = {}", show(&r.ent_ambient));
    println!("ent(M/N) = {}", show(&r.ent_quotient));
    println!("verdict  = {:?}", r.verdict);
    Ok(())
}
