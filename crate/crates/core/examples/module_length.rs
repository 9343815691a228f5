//! Lengths of finitely presented modules over each engine.

use algent::fpmod::{FPModule, SVec, Submodule};
use algent::ring::{Integers, LengthFunction, PrimeField, ValElement, Valuation};
use algent::scalars::rat;
use num_bigint::BigInt;
use std::sync::Arc;

fn main() -> algent::Result<()> {
    // ℤ² / ⟨(2,0), (1,3)⟩ ≅ ℤ/6
    let z = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
    let m = Arc::new(FPModule::from_relations(&Integers, 2, &[z(&[2, 0]), z(&[1, 3])])?);
    println!("L(M)        = {}", m.length(LengthFunction::LogCard)?);
    let s = Submodule::generated(&m, [SVec::from([(0, BigInt::from(1))])])?;
    println!("L(<e_0>)    = {}", s.length(LengthFunction::LogCard)?);
    println!("L(M/<e_0>)  = {}", s.colength(LengthFunction::LogCard)?);

    let f5 = PrimeField::new(5)?;
    println!("dim F_5^3   = {}", FPModule::free(&f5, 3).length(LengthFunction::Dim)?);

    let v = FPModule::diagonal(&Valuation, &[ValElement::monomial(rat(3, 2)), ValElement::monomial(rat(1, 3))]);
    println!("L_v(R/x^(3/2) + R/x^(1/3)) = {}", v.length(LengthFunction::Valuation)?);
    Ok(())
}
