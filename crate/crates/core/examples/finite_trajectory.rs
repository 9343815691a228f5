//! A finite module: the trajectory stabilizes and the entropy is zero.

use algent::dynamics::{alpha_seq, entropy_of, EndoSystem, EntropyOptions, Seed};
use algent::fpmod::{FPModule, SVec};
use algent::ring::{LengthFunction, Matrix};
use algent::shiftmod::ORIGIN;
use num_bigint::BigInt;

fn main() -> algent::Result<()> {
    let b = |x: i64| BigInt::from(x);
    let m = FPModule::over_modular(4, 2, &[])?;
    let swap = Matrix::from_rows(vec![vec![b(0), b(1)], vec![b(1), b(0)]])?;
    let sys = EndoSystem::from_matrix(m, &swap, LengthFunction::LogCard)?;
    let seed = Seed::new(vec![(ORIGIN, SVec::from([(0, b(1))]))]);
    let q = alpha_seq(&sys, &seed, 4)?;
    for (n, l) in q.lengths.iter().enumerate() {
        println!("L(T_{}) = {l}", n + 1);
    }
    println!("stabilized at {:?}", q.stabilized_at);
    let r = entropy_of(&sys, &seed, &EntropyOptions::default())?;
    println!("ent = {} ({:?})", r.exact.unwrap(), r.certificate);
    Ok(())
}
