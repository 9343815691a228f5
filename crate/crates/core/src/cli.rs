//! The `algent` command line: argument parsing, dispatch and exit codes.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::doc::{Ctx, DocRing, EngineSpec, Method, ProblemDoc};
use crate::dynamics::{
    alpha_seq, at_check, auto_entropy, colon_chain, entropy, entropy_of, hyperkernel_reduce, multiplicity, multivar_entropy,
    torsion_seed, Body, Certificate, EndoSystem, EntropyOptions, EntropyResult, Seed,
};
use crate::error::{Error, Result};
use crate::fpmod::Submodule;
use crate::oracle::run_suite;
use crate::ring::{Integers, LengthFunction, PrimeField, Valuation};
use crate::scalars::{rat, set_precision_bits, LengthValue};
use crate::shiftmod::{bernoulli_sigma, CutSequence, CutSpec, ORIGIN};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_LOCALLY_FINITE: i32 = 3;
pub const EXIT_BOUNDS_ONLY: i32 = 4;

const DEFAULT_N: usize = 16;
const HYPERKERNEL_CAP: usize = 256;

#[derive(Parser, Debug)]
#[command(name = "algent", version, about = "Algebraic entropy of module endomorphisms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Trajectory extensions allowed per computation.
    #[arg(long, global = true, default_value_t = 64)]
    pub budget: usize,
    /// Seed for randomized commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output format (tables default to csv, reports to json).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Compute even on systems that are not locally L-finite.
    #[arg(long, global = true)]
    pub force: bool,
    /// Bits of interval precision for comparing logarithms.
    #[arg(long, global = true, default_value_t = 256)]
    pub precision_bits: u32,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Length of a module, or of a submodule given by generators.
    Length { doc: PathBuf },
    /// Entropy of a system, globally or for a seed submodule.
    Entropy { doc: PathBuf },
    /// The α-sequence of a seed and the averages L(T_n)/n.
    Alpha {
        doc: PathBuf,
        #[arg(long)]
        n: Option<usize>,
    },
    /// The ideals J_n of a cyclic seed, checked against α_n.
    ColonChain {
        doc: PathBuf,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Additivity on an embedding N ↪ M.
    AtCheck { doc: PathBuf },
    /// Multiplicity of a system.
    Mult { doc: PathBuf },
    /// Entropy of several commuting maps.
    Multivar {
        doc: PathBuf,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Entropies of B_σ(R) and of cyclic seeds against the limits of their ideal chains.
    UniquenessDemo {
        doc: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Randomized property checks against the brute-force oracles.
    Suite {
        /// Number of consecutive seeds starting at --seed.
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Multiplier on the per-property case counts.
        #[arg(long, default_value_t = 1)]
        scale: usize,
    },
}

/// What a command printed and how the process should exit.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotLocallyFinite => EXIT_NOT_LOCALLY_FINITE,
        Error::Parse(_)
        | Error::Invalid(_)
        | Error::Dimension(_)
        | Error::NotAMorphism(_)
        | Error::NotAscending(_)
        | Error::AmbientMismatch
        | Error::UnsupportedPair { .. }
        | Error::NonCommuting(_)
        | Error::NotEquivariant(_)
        | Error::NotLFinite
        | Error::NotInvertible => EXIT_INVALID,
        _ => EXIT_ERROR,
    }
}

struct Report {
    body: String,
    bounds_only: bool,
    warning: Option<String>,
    /// The report is still written, but the command failed.
    failure: Option<String>,
}

impl Report {
    fn json(v: &impl Serialize) -> Result<Self> {
        let body = serde_json::to_string_pretty(v).map_err(|e| Error::Invalid(e.to_string()))? + "\n";
        Ok(Report { body, bounds_only: false, warning: None, failure: None })
    }

    fn bounds(mut self, b: bool) -> Self {
        self.bounds_only = b;
        self
    }
}

fn is_bounds(r: &EntropyResult) -> bool {
    r.certificate == Certificate::BoundsOnly
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            }
        }
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    set_precision_bits(cli.precision_bits);
    let result = dispatch(cli);
    let mut out = match result {
        Ok(r) => {
            let mut code = if r.bounds_only { EXIT_BOUNDS_ONLY } else { EXIT_OK };
            let mut stderr = r.warning.map(|w| format!("warning: {w}\n")).unwrap_or_default();
            if r.bounds_only {
                stderr.push_str("budget exhausted: only bounds are certified\n");
            }
            if let Some(f) = r.failure {
                stderr.push_str(&format!("error: {f}\n"));
                code = EXIT_ERROR;
            }
            Outcome { stdout: r.body, stderr, code }
        }
        Err(e) => {
            let hint = if e == Error::NotLocallyFinite { " (rerun with --force to compute anyway)" } else { "" };
            Outcome { stdout: String::new(), stderr: format!("error: {e}{hint}\n"), code: exit_code(&e) }
        }
    };
    if let Some(path) = &cli.out {
        if !out.stdout.is_empty() {
            if let Err(e) = std::fs::write(path, &out.stdout) {
                out.stderr.push_str(&format!("error: cannot write {}: {e}\n", path.display()));
                out.code = EXIT_ERROR;
            }
            out.stdout.clear();
        }
    }
    out
}

fn read_doc(path: &PathBuf) -> Result<ProblemDoc> {
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| Error::Invalid(format!("cannot read stdin: {e}")))?
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?
    };
    ProblemDoc::parse(&text)
}

fn dispatch(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Suite { count, scale } => {
            let start = cli.seed.unwrap_or(0);
            let reports: Vec<_> = (start..start + count).map(|s| run_suite(s, *scale)).collect();
            let failed: Vec<String> = reports
                .iter()
                .flat_map(|r| r.properties.iter().filter(|p| !p.passed()).map(move |p| format!("{} (seed {})", p.name, r.seed)))
                .collect();
            let mut rep = Report::json(&reports)?;
            if !failed.is_empty() {
                rep.failure = Some(format!("properties failed: {}", failed.join(", ")));
            }
            Ok(rep)
        }
        Command::UniquenessDemo { doc, n } => {
            let d = doc.as_ref().map(read_doc).transpose()?;
            let n = n.or(d.as_ref().and_then(|d| d.n)).unwrap_or(DEFAULT_N);
            let cuts = d.and_then(|d| d.cuts).unwrap_or_else(default_cuts);
            Report::json(&uniqueness_demo(&cuts, n, cli)?)
        }
        Command::Length { doc }
        | Command::Entropy { doc }
        | Command::Alpha { doc, .. }
        | Command::ColonChain { doc, .. }
        | Command::AtCheck { doc }
        | Command::Mult { doc }
        | Command::Multivar { doc, .. } => {
            let d = read_doc(doc)?;
            let lf = d.length_function();
            match d.engine {
                EngineSpec::Integers => on_engine(cli, &d, Ctx::new(Integers, None, lf)?),
                EngineSpec::Modular(m) => on_engine(cli, &d, Ctx::new(Integers, Some(m), lf)?),
                EngineSpec::PrimeField(p) => on_engine(cli, &d, Ctx::new(PrimeField::new(p)?, None, lf)?),
                EngineSpec::Valuation => on_engine(cli, &d, Ctx::new(Valuation, None, lf)?),
            }
        }
    }
}

fn opts(cli: &Cli) -> EntropyOptions {
    EntropyOptions { budget: cli.budget, force: cli.force }
}

fn default_seed<R: DocRing>(sys: &EndoSystem<R>) -> Result<Seed<R>> {
    match sys.body() {
        Body::Finite { module, .. } => {
            Ok(Seed::new(torsion_seed(module, sys.length_function())?.into_iter().map(|v| (ORIGIN, v)).collect()))
        }
        _ => Ok(Seed::component(sys, ORIGIN)),
    }
}

fn csv_table<S: Serialize>(rows: impl IntoIterator<Item = S>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Invalid(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn json_only(cli: &Cli, what: &str) -> Result<()> {
    if cli.format == Some(Format::Csv) {
        return Err(Error::Invalid(format!("{what} reports are JSON only")));
    }
    Ok(())
}

fn on_engine<R: DocRing>(cli: &Cli, d: &ProblemDoc, ctx: Ctx<R>) -> Result<Report> {
    let opts = opts(cli);
    let system = |field: &Option<crate::doc::SystemSpec>, name: &str| -> Result<EndoSystem<R>> {
        let sys = ctx.system(ProblemDoc::require(field, name)?)?;
        if d.reduce_hyperkernel {
            return Ok(hyperkernel_reduce(&sys, HYPERKERNEL_CAP)?.reduced);
        }
        Ok(sys)
    };
    match &cli.command {
        Command::Length { .. } => {
            json_only(cli, "length")?;
            let m = std::sync::Arc::new(ctx.module(ProblemDoc::require(&d.module, "module")?)?);
            let (length, what) = match &d.submodule {
                Some(gens) => {
                    let s = Submodule::generated(&m, gens.iter().map(|g| ctx.svec(g)).collect::<Result<Vec<_>>>()?)?;
                    (s.length(ctx.lf)?, format!("submodule of {m}"))
                }
                None => (m.length(ctx.lf)?, m.describe()),
            };
            Report::json(&json!({ "module": what, "length_function": ctx.lf, "length": length, "approx": length.is_finite().then(|| length.to_f64()) }))
        }
        Command::Entropy { .. } => {
            json_only(cli, "entropy")?;
            let sys = system(&d.system, "system")?;
            let r = match (&d.seed, d.method) {
                (None, Method::Alpha) => entropy(&sys, &opts)?,
                (seed, method) => {
                    if !opts.force && !sys.is_locally_finite()? {
                        return Err(Error::NotLocallyFinite);
                    }
                    let seed = match seed {
                        Some(s) => ctx.seed(s)?,
                        None => default_seed(&sys)?,
                    };
                    match method {
                        Method::Alpha => entropy_of(&sys, &seed, &opts)?,
                        Method::Auto => auto_entropy(&sys, &seed, &opts)?,
                    }
                }
            };
            Ok(Report::json(&r)?.bounds(is_bounds(&r)))
        }
        Command::Alpha { n, .. } => {
            let sys = system(&d.system, "system")?;
            let seed = match &d.seed {
                Some(s) => ctx.seed(s)?,
                None => default_seed(&sys)?,
            };
            let seq = alpha_seq(&sys, &seed, n.or(d.n).unwrap_or(DEFAULT_N))?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => Ok(Report { body: seq.to_csv()?, bounds_only: false, warning: None, failure: None }),
                Format::Json => Report::json(&seq),
            }
        }
        Command::ColonChain { n, .. } => {
            let sys = system(&d.system, "system")?;
            let (g, x) = ctx.element(ProblemDoc::require(&d.x, "x")?)?;
            let chain = colon_chain(&sys, g, &x, n.or(d.n).unwrap_or(DEFAULT_N))?;
            let rows = chain.rows(&ctx.ring);
            match cli.format.unwrap_or(Format::Json) {
                Format::Csv => Ok(Report { body: csv_table(&rows)?, bounds_only: false, warning: None, failure: None }),
                Format::Json => Report::json(&json!({ "rows": rows, "consistent": chain.consistent })),
            }
        }
        Command::AtCheck { .. } => {
            json_only(cli, "at-check")?;
            let amb = system(&d.system, "system")?;
            let sub = system(&d.sub, "sub")?;
            let emb = ctx.embedding(ProblemDoc::require(&d.embedding, "embedding")?, &sub, &amb)?;
            let r = at_check(&sub, &amb, &emb, &opts)?;
            let bounds = [&r.ent_sub, &r.ent_ambient, &r.ent_quotient].into_iter().any(is_bounds);
            let mut rep = Report::json(&r)?.bounds(bounds);
            if r.forced {
                rep.warning = Some("a system is not locally L-finite; additivity is not guaranteed there".into());
            }
            Ok(rep)
        }
        Command::Mult { .. } => {
            json_only(cli, "mult")?;
            let sys = system(&d.system, "system")?;
            let r = multiplicity(&sys, &opts)?;
            Ok(Report::json(&r)?.bounds(is_bounds(&r)))
        }
        Command::Multivar { n, .. } => {
            let m = ctx.multi(ProblemDoc::require(&d.multi, "multi")?)?;
            let seed = match &d.seed {
                Some(s) => ctx.seed(s)?,
                None => Seed::new((0..m.component_gens(ORIGIN)).map(|i| (ORIGIN, crate::fpmod::SVec::from([(i, ctx.ring.one())]))).collect()),
            };
            let n = n.or(d.n).unwrap_or(DEFAULT_N);
            let r = multivar_entropy(&m, &seed, &EntropyOptions { budget: n, ..opts })?;
            let bounds = is_bounds(&r.result);
            match cli.format.unwrap_or(Format::Json) {
                Format::Csv => {
                    #[derive(Serialize)]
                    struct Row {
                        n: usize,
                        length_exact: String,
                        length_float: f64,
                        #[serde(rename = "Ln_over_nk_float")]
                        ratio: f64,
                    }
                    let k = m.k() as i32;
                    let rows = r.lengths.iter().enumerate().map(|(i, l)| Row {
                        n: i + 1,
                        length_exact: l.to_string(),
                        length_float: l.to_f64(),
                        ratio: l.to_f64() / ((i + 1) as f64).powi(k),
                    });
                    Ok(Report { body: csv_table(rows)?, bounds_only: bounds, warning: None, failure: None })
                }
                Format::Json => Ok(Report::json(&r)?.bounds(bounds)),
            }
        }
        Command::Suite { .. } | Command::UniquenessDemo { .. } => unreachable!("handled without a document"),
    }
}

fn default_cuts() -> Vec<CutSpec> {
    ["1+1/n", "1/n", "1/2+1/(n+1)", "2/3+2/(n+2)"].iter().map(|t| CutSpec { prefix: vec![], tail: t.to_string() }).collect()
}

#[derive(Serialize)]
struct SigmaExperiment {
    cuts: CutSpec,
    /// `L(R/I_∞)`.
    limit: LengthValue,
    /// `ent(B_σ(R))`, which must equal `limit`.
    entropy: EntropyResult,
    /// `α_n = γ_{n+1}` along the generator of the first component.
    alphas_match_cuts: bool,
    seeds: Vec<SeedExperiment>,
    agrees: bool,
}

#[derive(Serialize)]
struct SeedExperiment {
    /// The seed `x^q` in the first component.
    exponent: String,
    /// `L(R/J_n)` for `n = 0..`.
    colon_lengths: Vec<LengthValue>,
    colon_matches_alpha: bool,
    /// `L(R/J_∞)`, the limit of the chain.
    limit: LengthValue,
    entropy: EntropyResult,
    agrees: bool,
}

/// `ent(B_σ(R)) = L(R/I_∞)` and, for cyclic seeds `x = x^q`,
/// `ent(T(φ, xR)) = L(R/J_∞)` with `R/J_n ≅ T_{n+1}/T_n`.
fn uniqueness_demo(cuts: &[CutSpec], n: usize, cli: &Cli) -> Result<serde_json::Value> {
    let opts = EntropyOptions { budget: cli.budget, force: cli.force };
    let mut out = Vec::new();
    for spec in cuts {
        let seq = CutSequence::try_from(spec.clone())?;
        let lim = seq.limit().clone();
        let sys = EndoSystem::from_pair(bernoulli_sigma(&Valuation, seq.clone())?, LengthFunction::Valuation)?;
        let ent = entropy(&sys, &opts)?;
        let limit = LengthValue::rational(lim.clone());
        let gen = crate::fpmod::SVec::from([(0, crate::ring::ValElement::monomial(rat(0, 1)))]);
        let a = alpha_seq(&sys, &Seed::element(ORIGIN, gen), n)?;
        let mut alphas_match = true;
        for (i, al) in a.alphas.iter().enumerate() {
            alphas_match &= *al == LengthValue::rational(seq.value(i as u64 + 2)?);
        }
        let mut seeds = Vec::new();
        for q in [rat(0, 1), lim.clone() / rat(2, 1), lim.clone()] {
            let x = crate::fpmod::SVec::from([(0, crate::ring::ValElement::monomial(q.clone()))]);
            let chain = colon_chain(&sys, ORIGIN, &x, n)?;
            let r = entropy_of(&sys, &Seed::element(ORIGIN, x), &opts)?;
            // γ_n − q tends to γ_∞ − q
            let j_lim = LengthValue::rational((lim.clone() - q.clone()).max(rat(0, 1)));
            let agrees = r.exact.as_ref() == Some(&j_lim);
            seeds.push(SeedExperiment {
                exponent: q.to_string(),
                colon_lengths: chain.quotient_lengths.clone(),
                colon_matches_alpha: chain.consistent,
                limit: j_lim,
                entropy: r,
                agrees,
            });
        }
        let agrees = ent.exact.as_ref() == Some(&limit) && alphas_match && seeds.iter().all(|s| s.agrees && s.colon_matches_alpha);
        out.push(SigmaExperiment { cuts: spec.clone(), limit, entropy: ent, alphas_match_cuts: alphas_match, seeds, agrees });
    }
    let all = out.iter().all(|e| e.agrees);
    Ok(json!({ "experiments": out, "all_agree": all }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_flags() {
        let cli = Cli::try_parse_from(["algent", "alpha", "d.json", "--n", "8", "--format", "json", "--budget", "10"]).unwrap();
        assert_eq!(cli.budget, 10);
        assert_eq!(cli.format, Some(Format::Json));
        assert!(matches!(cli.command, Command::Alpha { n: Some(8), .. }));
        assert_eq!(run(["algent", "bogus"]).code, EXIT_INVALID);
    }

    #[test]
    fn missing_doc_is_invalid() {
        let o = run(["algent", "entropy", "/nonexistent/doc.json"]);
        assert_eq!(o.code, EXIT_INVALID);
    }

    #[test]
    fn uniqueness_runs() {
        let o = run(["algent", "uniqueness-demo", "--n", "6"]);
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["all_agree"], true);
    }
}
