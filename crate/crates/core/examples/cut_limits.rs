//! On B_σ(R), the entropy is the limit of the cuts, whatever the chain.

use algent::dynamics::{entropy, EndoSystem, EntropyOptions};
use algent::ring::{LengthFunction, Valuation};
use algent::shiftmod::{bernoulli_sigma, CutSequence};

fn main() -> algent::Result<()> {
    for tail in ["1+1/n", "1/2+1/(n+1)", "2+3/(n+2)", "1/n"] {
        let sys = EndoSystem::from_pair(bernoulli_sigma(&Valuation, CutSequence::new(vec![], tail)?)?, LengthFunction::Valuation)?;
        let r = entropy(&sys, &EntropyOptions::default())?;
        println!("{tail:<12} ent = {}", r.exact.unwrap());
    }
    Ok(())
}
