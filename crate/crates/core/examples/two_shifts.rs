//! Two commuting shifts on ⊕_{ℤ²} ℤ/2: L(T_n) = n²·log 2.

use algent::dynamics::{multivar_entropy, EntropyOptions, MultiEndoSystem, Seed};
use algent::fpmod::{FPModule, SVec};
use algent::ring::{Integers, LengthFunction};
use algent::shiftmod::{grid2d, BandedEndo, ORIGIN};
use num_bigint::BigInt;

fn main() -> algent::Result<()> {
    let (fam, x, y) = grid2d(FPModule::cyclic(&Integers, BigInt::from(2)));
    let seed = Seed::new(vec![(ORIGIN, SVec::from([(0, BigInt::from(1))]))]);
    let opts = EntropyOptions::with_budget(8);
    let both = MultiEndoSystem::family(fam.clone(), vec![x.clone(), y], LengthFunction::LogCard)?;
    let r = multivar_entropy(&both, &seed, &opts)?;
    for (i, l) in r.lengths.iter().enumerate() {
        println!("L(T_{}) = {l}", i + 1);
    }
    println!("ent(x, y)        = {}", r.result.exact.unwrap());
    let id = BandedEndo::identity(&fam)?;
    let r = multivar_entropy(&MultiEndoSystem::family(fam, vec![x, id], LengthFunction::LogCard)?, &seed, &opts)?;
    println!("ent(x, identity) = {}", r.result.exact.unwrap());
    Ok(())
}
