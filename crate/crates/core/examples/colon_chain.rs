//! The ideals J_n of a cyclic seed, with L(R/J_n) against α_n.

use algent::dynamics::{colon_chain, EndoSystem};
use algent::fpmod::SVec;
use algent::ring::{LengthFunction, ValElement, Valuation};
use algent::scalars::rat;
use algent::shiftmod::{bernoulli_sigma, CutSequence, ORIGIN};

fn main() -> algent::Result<()> {
    let cuts = CutSequence::new(vec![], "1+1/n")?;
    let sys = EndoSystem::from_pair(bernoulli_sigma(&Valuation, cuts)?, LengthFunction::Valuation)?;
    let x = SVec::from([(0, ValElement::term(rat(1, 1), rat(1, 2)))]);
    let c = colon_chain(&sys, ORIGIN, &x, 8)?;
    for (n, (l, a)) in c.quotient_lengths.iter().zip(&c.alphas).enumerate() {
        println!("n={n}  L(R/J_n)={l:<6} alpha={a}");
    }
    println!("consistent: {}", c.consistent);
    Ok(())
}
