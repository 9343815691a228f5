//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use algent::cli::{run, EXIT_NOT_LOCALLY_FINITE, EXIT_OK};
use algent::dynamics::{
    alpha_seq, at_check, auto_entropy, entropy, entropy_of, hyperkernel_reduce, invert_endo, multiplicity, multivar_entropy,
    Certificate, EndoSystem, EntropyOptions, MultiEndoSystem, Seed, Verdict,
};
use algent::fpmod::{FPModule, SVec};
use algent::oracle::{
    check_alpha_properties, check_colon, check_lengths, check_smith, count_length, gen_at, gen_hyper, AtInstance, EngineChoice,
    FamilyChoice, InstanceSpec, Presentation, PropertyResult, SmithEngine,
};
use algent::ring::{Integers, LengthFunction, PrimeField, ValElement, Valuation};
use algent::scalars::{rat, LengthValue};
use algent::shiftmod::{bernoulli, bernoulli_sigma, grid2d, two_sided, BandedEndo, CutSequence, ORIGIN};
use num_bigint::BigInt;

type Check = std::result::Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: algent::Error) -> String {
    e.to_string()
}

fn z(d: i64) -> BigInt {
    BigInt::from(d)
}

fn zmod(ds: &[i64]) -> FPModule<Integers> {
    FPModule::diagonal(&Integers, &ds.iter().map(|&d| z(d)).collect::<Vec<_>>())
}

fn oracle_length(ds: &[i64]) -> Result<LengthValue, String> {
    count_length(&Presentation::diagonal(ds)).map_err(err)
}

fn property(p: PropertyResult, want: usize) -> Check {
    ensure(p.cases >= want, || format!("{}: only {} cases", p.name, p.cases))?;
    ensure(p.passed(), || format!("{}: {} failures, e.g. {:?}", p.name, p.failures, p.examples))
}

fn criterion_1() -> Check {
    let opts = EntropyOptions::default();
    for ds in [&[2][..], &[6], &[12], &[2, 2, 2]] {
        let t = Instant::now();
        let sys = EndoSystem::from_pair(bernoulli(zmod(ds)), LengthFunction::LogCard).map_err(err)?;
        let r = entropy(&sys, &opts).map_err(err)?;
        let want = oracle_length(ds)?;
        ensure(r.exact.as_ref() == Some(&want), || format!("B(Z/{ds:?}): {:?} vs {want}", r.exact))?;
        ensure(t.elapsed() < Duration::from_secs(1), || format!("B(Z/{ds:?}) took {:?}", t.elapsed()))?;
    }
    let t = Instant::now();
    let f5 = PrimeField::new(5).map_err(err)?;
    let sys = EndoSystem::from_pair(bernoulli(FPModule::free(&f5, 2)), LengthFunction::Dim).map_err(err)?;
    let r = entropy(&sys, &opts).map_err(err)?;
    ensure(r.exact == Some(LengthValue::integer(2)), || format!("B(F_5^2): {:?}", r.exact))?;
    ensure(t.elapsed() < Duration::from_secs(1), || "B(F_5^2) too slow".into())?;
    let t = Instant::now();
    let c = FPModule::cyclic(&Valuation, ValElement::monomial(rat(3, 2)));
    let sys = EndoSystem::from_pair(bernoulli(c), LengthFunction::Valuation).map_err(err)?;
    let r = entropy(&sys, &opts).map_err(err)?;
    ensure(r.exact == Some(LengthValue::rational(rat(3, 2))), || format!("B(R/x^(3/2)): {:?}", r.exact))?;
    ensure(t.elapsed() < Duration::from_secs(1), || "B(R/x^(3/2)) too slow".into())
}

fn sigma(tail: &str) -> Result<EndoSystem<Valuation>, String> {
    let cuts = CutSequence::new(vec![], tail).map_err(err)?;
    EndoSystem::from_pair(bernoulli_sigma(&Valuation, cuts).map_err(err)?, LengthFunction::Valuation).map_err(err)
}

fn first_copy() -> Seed<Valuation> {
    Seed::element(ORIGIN, SVec::from([(0, ValElement::monomial(rat(0, 1)))]))
}

fn criterion_2() -> Check {
    let sys = sigma("1+1/n")?;
    let seq = alpha_seq(&sys, &first_copy(), 64).map_err(err)?;
    ensure(seq.alphas.len() == 64, || format!("{} alphas", seq.alphas.len()))?;
    for (i, a) in seq.alphas.iter().enumerate() {
        // α_n = γ_{n+1} = 1 + 1/(n+1)
        let want = LengthValue::rational(rat(1, 1) + rat(1, i as i64 + 2));
        ensure(*a == want, || format!("α_{} = {a}, expected {want}", i + 1))?;
        ensure(a.try_cmp(&LengthValue::integer(1)).map_err(err)?.is_gt(), || format!("α_{} ≤ 1", i + 1))?;
    }
    for (i, w) in seq.alphas.windows(2).enumerate() {
        ensure(w[1].try_cmp(&w[0]).map_err(err)?.is_lt(), || format!("α_{} does not drop", i + 2))?;
    }
    let r = entropy(&sys, &EntropyOptions::default()).map_err(err)?;
    ensure(r.exact == Some(LengthValue::integer(1)), || format!("closed form {:?}", r.exact))?;
    let last = seq.alphas.last().expect("64 alphas");
    let gap = last.checked_sub(&LengthValue::integer(1)).ok_or("α_64 below 1")?;
    ensure(gap.le(&LengthValue::rational(rat(1, 65))), || format!("α_64 − 1 = {gap} exceeds 1/65"))?;
    let seeded = entropy_of(&sys, &first_copy(), &EntropyOptions::with_budget(64)).map_err(err)?;
    ensure(seeded.lower.le(&LengthValue::integer(1)) && LengthValue::integer(1).le(&seeded.upper), || {
        format!("bounds [{}, {}] miss 1", seeded.lower, seeded.upper)
    })
}

fn criterion_3() -> Check {
    let sys = sigma("1/n")?;
    let r = entropy_of(&sys, &first_copy(), &EntropyOptions::with_budget(64)).map_err(err)?;
    ensure(r.exact == Some(LengthValue::zero()), || format!("entropy {:?}", r.exact))?;
    let seq = alpha_seq(&sys, &first_copy(), 64).map_err(err)?;
    let harmonic = (1..=64).fold(rat(0, 1), |s, k| s + rat(1, k));
    // lengths[i] is L(T_{i+1})
    let l64 = &seq.lengths[63];
    ensure(*l64 == LengthValue::rational(harmonic.clone()), || format!("L(T_64) = {l64}, H_64 = {harmonic}"))?;
    ensure(LengthValue::integer(4).try_cmp(l64).map_err(err)?.is_lt(), || "L(T_64) ≤ 4".into())
}

fn criterion_4() -> Check {
    let opts = EntropyOptions::default();
    let mut seen = [0usize; 2];
    for i in 0..50u64 {
        let engine = if i % 2 == 0 { EngineChoice::Integers } else { EngineChoice::Valuation };
        let inst = gen_at(&InstanceSpec::new(1000 + i, engine, FamilyChoice::Embedding)).map_err(err)?;
        let label = inst.label().to_string();
        let verdict = match inst {
            AtInstance::Integers { sub, ambient, embedding, .. } => at_check(&sub, &ambient, &embedding, &opts),
            AtInstance::Valuation { sub, ambient, embedding, .. } => at_check(&sub, &ambient, &embedding, &opts),
        }
        .map_err(|e| format!("{label}: {e}"))?
        .verdict;
        ensure(verdict != Verdict::Violated, || format!("{label}: Violated"))?;
        seen[(verdict == Verdict::Consistent) as usize] += 1;
    }
    ensure(seen[0] + seen[1] == 50, || "not every case ran".into())
}

fn problem(name: &str) -> String {
    format!("{}/problems/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn criterion_5() -> Check {
    let doc = problem("at_check_multiplication_by_two.json");
    let o = run(["algent", "at-check", doc.as_str()]);
    ensure(o.code == EXIT_NOT_LOCALLY_FINITE, || format!("exit {} without --force", o.code))?;
    let o = run(["algent", "at-check", doc.as_str(), "--force"]);
    ensure(o.code == EXIT_OK, || format!("exit {} with --force: {}", o.code, o.stderr))?;
    ensure(o.stderr.contains("warning"), || "no warning".into())?;
    let v: serde_json::Value = serde_json::from_str(&o.stdout).map_err(|e| e.to_string())?;
    let triple = [&v["ent_sub"]["exact"], &v["ent_ambient"]["exact"], &v["ent_quotient"]["exact"]];
    ensure(triple == [&serde_json::json!("0"), &serde_json::json!("0"), &serde_json::json!("log(2)")], || format!("{triple:?}"))?;
    ensure(v["verdict"] == "Violated", || format!("verdict {}", v["verdict"]))
}

fn criterion_6() -> Check {
    let opts = EntropyOptions::default();
    let log3 = oracle_length(&[3])?;
    let sys = EndoSystem::from_pair(two_sided(zmod(&[3])), LengthFunction::LogCard).map_err(err)?;
    let seed = Seed::component(&sys, ORIGIN);
    let auto = auto_entropy(&sys, &seed, &opts).map_err(err)?;
    ensure(auto.exact.as_ref() == Some(&log3), || format!("auto {:?}", auto.exact))?;
    ensure(auto.certificate == Certificate::AutoFormula, || format!("certificate {:?}", auto.certificate))?;
    let seq = alpha_seq(&sys, &seed, 16).map_err(err)?;
    ensure(seq.alphas.iter().all(|a| *a == log3), || "α_n ≠ log 3".into())?;
    let mult = multiplicity(&sys, &opts).map_err(err)?;
    let inv = entropy(&invert_endo(&sys).map_err(err)?, &opts).map_err(err)?;
    ensure(mult.exact.is_some() && mult.exact == inv.exact, || format!("mult {:?}, inverse {:?}", mult.exact, inv.exact))?;
    ensure(inv.exact.as_ref() == Some(&log3), || format!("inverse entropy {:?}", inv.exact))
}

fn criterion_7() -> Check {
    let opts = EntropyOptions::default();
    for i in 0..20u64 {
        let (sys, nil) = gen_hyper(&InstanceSpec::new(2000 + i, EngineChoice::Integers, FamilyChoice::Finite)).map_err(err)?;
        let before = entropy(&sys, &opts).map_err(err)?;
        let hk = hyperkernel_reduce(&sys, 64).map_err(err)?;
        let after = entropy(&hk.reduced, &opts).map_err(err)?;
        ensure(before.exact.is_some() && before.exact == after.exact, || {
            format!("case {i}: {:?} before, {:?} after", before.exact, after.exact)
        })?;
        // a nilpotent summand lies entirely in the hyperkernel
        let whole = hk.parts.get(1).and_then(|p| p.kernel.as_ref()).map(|k| k.length(LengthFunction::LogCard));
        let nil_len = count_length(&nil.pres).map_err(err)?;
        ensure(matches!(whole, Some(Ok(ref l)) if *l == nil_len), || format!("case {i}: hyperkernel {whole:?}, module {nil_len}"))?;
    }
    Ok(())
}

fn criterion_8() -> Check {
    let log2 = oracle_length(&[2])?;
    let (fam, x, y) = grid2d(zmod(&[2]));
    let both = MultiEndoSystem::family(fam.clone(), vec![x.clone(), y], LengthFunction::LogCard).map_err(err)?;
    let seed = Seed::new(vec![(ORIGIN, SVec::from([(0, z(1))]))]);
    let r = multivar_entropy(&both, &seed, &EntropyOptions::with_budget(16)).map_err(err)?;
    ensure(r.result.exact.as_ref() == Some(&log2), || format!("two shifts: {:?}", r.result.exact))?;
    ensure(r.lengths.len() >= 16, || format!("{} lengths", r.lengths.len()))?;
    for (i, l) in r.lengths.iter().take(16).enumerate() {
        let n = (i + 1) as u64;
        ensure(*l == log2.mul_int(n * n), || format!("L(T_{n}) = {l}"))?;
    }
    let id = BandedEndo::identity(&fam).map_err(err)?;
    let degenerate = MultiEndoSystem::family(fam, vec![x, id], LengthFunction::LogCard).map_err(err)?;
    let r = multivar_entropy(&degenerate, &seed, &EntropyOptions::with_budget(16)).map_err(err)?;
    ensure(r.result.exact == Some(LengthValue::zero()), || format!("shift and identity: {:?}", r.result.exact))
}

fn criterion_9() -> Check {
    for engine in [SmithEngine::Integers, SmithEngine::Modular(12), SmithEngine::PrimeField(5), SmithEngine::Valuation] {
        property(check_smith(engine, 200, 9), 200)?;
    }
    property(check_lengths(100, 9), 100)?;
    property(check_alpha_properties(1000, 9), 1000)
}

fn criterion_10() -> Check {
    property(check_colon(30, 10, 16), 30)
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Check); 10] = [
        ("Bernoulli closed form", Duration::from_secs(6), criterion_1),
        ("unattained infimum on B_σ(1+1/n)", Duration::from_secs(5), criterion_2),
        ("zero entropy with unbounded trajectory on B_σ(1/n)", Duration::from_secs(5), criterion_3),
        ("addition on 50 exact sequences", Duration::from_secs(60), criterion_4),
        ("counterexample guard", Duration::from_secs(5), criterion_5),
        ("automorphism formula and multiplicity", Duration::from_secs(2), criterion_6),
        ("hyperkernel invariance", Duration::from_secs(10), criterion_7),
        ("two commuting shifts", Duration::from_secs(10), criterion_8),
        ("engine soundness", Duration::from_secs(120), criterion_9),
        ("colon-chain identity", Duration::from_secs(10), criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = outcome.and_then(|()| ensure(took < *limit, || format!("over the {limit:?} limit")));
        match outcome {
            Ok(()) => println!("PASS {:>2} {name} ({:.2}s)", i + 1, took.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({:.2}s): {why}", i + 1, took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
