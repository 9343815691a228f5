//! Randomized property checks against brute-force enumeration.

use algent::oracle::{count_length, run_suite, Presentation};

fn main() -> algent::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let p = Presentation { gens: 2, relations: vec![vec![4, 2], vec![0, 6]], modulus: None };
    println!("L(Z^2/<(4,2),(0,6)>) by enumeration: {}", count_length(&p)?);
    let report = run_suite(seed, 1);
    for prop in &report.properties {
        println!("{:<20} {:>4} cases {:>3} failures", prop.name, prop.cases, prop.failures);
    }
    println!("passed: {}", report.passed);
    Ok(())
}
