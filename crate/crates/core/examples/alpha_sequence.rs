//! α_n and L(T_n)/n on B_σ(R) with cuts 1 + 1/n: the infimum 1 is never attained.

use algent::dynamics::{alpha_seq, entropy, EndoSystem, EntropyOptions, Seed};
use algent::ring::{LengthFunction, Valuation};
use algent::shiftmod::{bernoulli_sigma, CutSequence, ORIGIN};

fn main() -> algent::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(12);
    let cuts = CutSequence::new(vec![], "1+1/n")?;
    let sys = EndoSystem::from_pair(bernoulli_sigma(&Valuation, cuts)?, LengthFunction::Valuation)?;
    let q = alpha_seq(&sys, &Seed::component(&sys, ORIGIN), n)?;
    println!("{:>3} {:>8} {:>10}", "n", "alpha", "L(T_n)/n");
    for (i, a) in q.alphas.iter().enumerate() {
        let avg = q.lengths[i].to_f64() / (i + 1) as f64;
        println!("{:>3} {:>8} {avg:>10.6}", i + 1, a.to_string());
    }
    println!("entropy = {}", entropy(&sys, &EntropyOptions::default())?.exact.unwrap());
    Ok(())
}
