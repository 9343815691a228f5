//! Closed-form entropy of Bernoulli shifts.

use algent::dynamics::{entropy, EndoSystem, EntropyOptions};
use algent::fpmod::FPModule;
use algent::ring::{Integers, LengthFunction, PrimeField, ValElement, Valuation};
use algent::scalars::rat;
use algent::shiftmod::bernoulli;
use num_bigint::BigInt;

fn main() -> algent::Result<()> {
    let opts = EntropyOptions::default();
    for d in [2, 6, 12] {
        let sys = EndoSystem::from_pair(bernoulli(FPModule::cyclic(&Integers, BigInt::from(d))), LengthFunction::LogCard)?;
        let r = entropy(&sys, &opts)?;
        println!("B(Z/{d:<2})        {:>14}  {:?}", r.exact.unwrap().to_string(), r.certificate);
    }
    let f5 = PrimeField::new(5)?;
    let r = entropy(&EndoSystem::from_pair(bernoulli(FPModule::free(&f5, 2)), LengthFunction::Dim)?, &opts)?;
    println!("B(F_5^2)        {:>14}", r.exact.unwrap().to_string());
    let c = FPModule::cyclic(&Valuation, ValElement::monomial(rat(3, 2)));
    let r = entropy(&EndoSystem::from_pair(bernoulli(c), LengthFunction::Valuation)?, &opts)?;
    println!("B(R/x^(3/2))    {:>14}", r.exact.unwrap().to_string());
    Ok(())
}
