//! The two-sided shift on ⊕_ℤ ℤ/3: entropy by the automorphism formula,
//! multiplicity, and the entropy of the inverse.

use algent::dynamics::{alpha_seq, auto_entropy, entropy, invert_endo, multiplicity, EndoSystem, EntropyOptions, Seed};
use algent::fpmod::FPModule;
use algent::ring::{Integers, LengthFunction};
use algent::shiftmod::{two_sided, ORIGIN};
use num_bigint::BigInt;

fn main() -> algent::Result<()> {
    let opts = EntropyOptions::default();
    let sys = EndoSystem::from_pair(two_sided(FPModule::cyclic(&Integers, BigInt::from(3))), LengthFunction::LogCard)?;
    let seed = Seed::component(&sys, ORIGIN);
    let a = auto_entropy(&sys, &seed, &opts)?;
    println!("auto:         {} ({:?})", a.exact.unwrap(), a.certificate);
    let q = alpha_seq(&sys, &seed, 5)?;
    println!("alphas:       {}", q.alphas.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", "));
    println!("multiplicity: {}", multiplicity(&sys, &opts)?.exact.unwrap());
    println!("ent(φ⁻¹):     {}", entropy(&invert_endo(&sys)?, &opts)?.exact.unwrap());
    Ok(())
}
