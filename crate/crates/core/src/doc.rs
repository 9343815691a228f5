//! The JSON problem document and its translation into library objects.
//!
//! Ring elements are JSON numbers or strings for the integer engines and
//! `[[coeff, exponent], …]` term lists (rationals as strings) for the
//! valuation engine. Matrices are lists of rows; the image of generator `j`
//! is column `j`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::{Body, Embedding, EndoSystem, MultiEndoSystem, Seed};
use crate::error::{Error, Result};
use crate::fpmod::{FPModule, Morphism, SVec};
use crate::ring::{Integers, LatticeRing, LengthFunction, Matrix, PrimeField, Valuation};
use crate::shiftmod::{
    bernoulli, bernoulli_sigma, bernoulli_sigma_ideals, grid2d, shift_endo, two_sided, BandedEndo, CutSequence, CutSpec,
    Grade, MapRule, ShiftFamily, ORIGIN,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineSpec {
    Integers,
    /// `ℤ/m`, handled as `ℤ`-modules killed by `m`.
    Modular(u64),
    PrimeField(u64),
    Valuation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub generators: usize,
    /// Relation vectors, each with one entry per generator.
    #[serde(default)]
    pub relations: Vec<Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSpec {
    #[serde(default = "one_step")]
    pub offset: Grade,
    #[serde(default)]
    pub pattern: Vec<Vec<Vec<Value>>>,
    #[serde(default)]
    pub explicit: Vec<ExplicitBlock>,
}

fn one_step() -> Grade {
    [1, 0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitBlock {
    pub grade: Grade,
    pub block: Vec<Vec<Value>>,
}

/// Replaces the constructor's own endomorphism.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndoOverride {
    Shift(Grade),
    Identity,
    Zero,
    Rules(Vec<RuleSpec>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Bernoulli {
        component: ModuleSpec,
        #[serde(default)]
        endo: Option<EndoOverride>,
    },
    TwoSided {
        component: ModuleSpec,
        #[serde(default)]
        endo: Option<EndoOverride>,
    },
    Grid2d {
        component: ModuleSpec,
        #[serde(default)]
        endo: Option<EndoOverride>,
    },
    BernoulliSigma {
        #[serde(default)]
        cuts: Option<CutSpec>,
        /// An explicit ascending chain, constant after its last entry.
        #[serde(default)]
        ideals: Option<Vec<Value>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemSpec {
    Family(FamilySpec),
    Finite { module: ModuleSpec, endo: Vec<Vec<Value>> },
    Sum { sum: Vec<SystemSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    #[serde(default)]
    pub grade: Option<Grade>,
    pub vector: Vec<Value>,
}

/// A finite-module matrix, or a grade-preserving block for families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EmbeddingSpec {
    Matrix(Vec<Vec<Value>>),
    Sum { sum: Vec<EmbeddingSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MultiSpec {
    Finite { module: ModuleSpec, endos: Vec<Vec<Vec<Value>>> },
    /// Built-in maps by name: `shift`, `x`, `y`, `identity`, `zero`.
    Family {
        #[serde(flatten)]
        family: FamilySpec,
        maps: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Alpha,
    /// The automorphism formula (falls back to α when it does not apply).
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDoc {
    pub engine: EngineSpec,
    /// Defaults to `log_card`, `dim` or `valuation` by engine.
    #[serde(default)]
    pub length: Option<LengthFunction>,
    /// For `length`.
    #[serde(default)]
    pub module: Option<ModuleSpec>,
    /// Generators of a submodule of `module`, for `length`.
    #[serde(default)]
    pub submodule: Option<Vec<Vec<Value>>>,
    /// The system (the ambient one for `at-check`).
    #[serde(default)]
    pub system: Option<SystemSpec>,
    #[serde(default)]
    pub seed: Option<Vec<ElementSpec>>,
    /// The subsystem for `at-check`.
    #[serde(default)]
    pub sub: Option<SystemSpec>,
    #[serde(default)]
    pub embedding: Option<EmbeddingSpec>,
    /// The cyclic generator for `colon-chain`.
    #[serde(default)]
    pub x: Option<ElementSpec>,
    #[serde(default)]
    pub multi: Option<MultiSpec>,
    #[serde(default)]
    pub method: Method,
    /// Quotient out the hyperkernel before computing.
    #[serde(default)]
    pub reduce_hyperkernel: bool,
    #[serde(default)]
    pub n: Option<usize>,
    /// Cut tails for `uniqueness-demo`.
    #[serde(default)]
    pub cuts: Option<Vec<CutSpec>>,
}

impl ProblemDoc {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn length_function(&self) -> LengthFunction {
        self.length.unwrap_or(match self.engine {
            EngineSpec::Integers | EngineSpec::Modular(_) => LengthFunction::LogCard,
            EngineSpec::PrimeField(_) => LengthFunction::Dim,
            EngineSpec::Valuation => LengthFunction::Valuation,
        })
    }

    pub fn require<'a, T>(field: &'a Option<T>, name: &str) -> Result<&'a T> {
        field.as_ref().ok_or_else(|| Error::Invalid(format!("the document needs a {name:?} field")))
    }
}

/// The engines a document can name, with module construction.
pub trait DocRing: LatticeRing {
    fn build_module(&self, gens: usize, rel_cols: &[Vec<Self::Elem>], modulus: Option<u64>) -> Result<FPModule<Self>> {
        if modulus.is_some() {
            return Err(Error::Invalid(format!("moduli only apply to the integers, not {}", self.name())));
        }
        FPModule::from_relations(self, gens, rel_cols)
    }
}

impl DocRing for Integers {
    fn build_module(&self, gens: usize, rel_cols: &[Vec<Self::Elem>], modulus: Option<u64>) -> Result<FPModule<Self>> {
        match modulus {
            Some(m) => FPModule::over_modular(m, gens, rel_cols),
            None => FPModule::from_relations(self, gens, rel_cols),
        }
    }
}

impl DocRing for PrimeField {}
impl DocRing for Valuation {}

/// A ring, a length function and (for `ℤ/m`) a modulus: everything needed to
/// read the rest of a document.
#[derive(Clone, Debug)]
pub struct Ctx<R: DocRing> {
    pub ring: R,
    pub modulus: Option<u64>,
    pub lf: LengthFunction,
}

impl<R: DocRing> Ctx<R> {
    pub fn new(ring: R, modulus: Option<u64>, lf: LengthFunction) -> Result<Self> {
        ring.check_length(lf)?;
        Ok(Ctx { ring, modulus, lf })
    }

    pub fn vector(&self, v: &[Value]) -> Result<Vec<R::Elem>> {
        v.iter().map(|x| self.ring.parse_elem(x)).collect()
    }

    pub fn svec(&self, v: &[Value]) -> Result<SVec<R::Elem>> {
        Ok(crate::fpmod::from_dense(&self.ring, &self.vector(v)?))
    }

    pub fn matrix(&self, rows: &[Vec<Value>]) -> Result<Matrix<R::Elem>> {
        Matrix::from_rows(rows.iter().map(|r| self.vector(r)).collect::<Result<_>>()?)
    }

    /// A `rows × cols` matrix, allowing `[]` for an empty one.
    fn sized_matrix(&self, rows: &[Vec<Value>], nrows: usize, ncols: usize) -> Result<Matrix<R::Elem>> {
        if rows.is_empty() && (nrows == 0 || ncols == 0) {
            return Ok(Matrix::zeros(&self.ring, nrows, ncols));
        }
        let m = self.matrix(rows)?;
        if (m.rows(), m.cols()) != (nrows, ncols) {
            return Err(Error::Dimension(format!("expected a {nrows}×{ncols} matrix, got {}×{}", m.rows(), m.cols())));
        }
        Ok(m)
    }

    pub fn module(&self, spec: &ModuleSpec) -> Result<FPModule<R>> {
        let rels = spec
            .relations
            .iter()
            .map(|r| {
                if r.len() != spec.generators {
                    return Err(Error::Dimension(format!("relation of length {} for {} generators", r.len(), spec.generators)));
                }
                self.vector(r)
            })
            .collect::<Result<Vec<_>>>()?;
        self.ring.build_module(spec.generators, &rels, self.modulus)
    }

    fn rules(&self, fam: &ShiftFamily<R>, specs: &[RuleSpec]) -> Result<BandedEndo<R>> {
        let rules = specs
            .iter()
            .map(|s| {
                let pattern = s.pattern.iter().map(|m| self.matrix(m)).collect::<Result<Vec<_>>>()?;
                let mut rule = MapRule::periodic(s.offset, pattern);
                for b in &s.explicit {
                    rule.explicit.insert(b.grade, self.matrix(&b.block)?);
                }
                Ok(rule)
            })
            .collect::<Result<Vec<_>>>()?;
        BandedEndo::new(fam, rules)
    }

    fn endo_override(&self, fam: &ShiftFamily<R>, o: &EndoOverride) -> Result<BandedEndo<R>> {
        match o {
            EndoOverride::Shift(g) => Ok(shift_endo(fam, *g)),
            EndoOverride::Identity => BandedEndo::identity(fam),
            EndoOverride::Zero => Ok(BandedEndo::zero()),
            EndoOverride::Rules(r) => self.rules(fam, r),
        }
    }

    /// The family with its constructor maps (two for `grid2d`).
    pub fn family(&self, spec: &FamilySpec) -> Result<(ShiftFamily<R>, Vec<BandedEndo<R>>)> {
        let (fam, maps, over) = match spec {
            FamilySpec::Bernoulli { component, endo } => {
                let (f, e) = bernoulli(self.module(component)?);
                (f, vec![e], endo)
            }
            FamilySpec::TwoSided { component, endo } => {
                let (f, e) = two_sided(self.module(component)?);
                (f, vec![e], endo)
            }
            FamilySpec::Grid2d { component, endo } => {
                let (f, x, y) = grid2d(self.module(component)?);
                (f, vec![x, y], endo)
            }
            FamilySpec::BernoulliSigma { cuts, ideals } => {
                let (f, e) = match (cuts, ideals) {
                    (Some(c), None) => bernoulli_sigma(&self.ring, CutSequence::try_from(c.clone())?)?,
                    (None, Some(i)) => bernoulli_sigma_ideals(&self.ring, &self.vector(i)?)?,
                    _ => return Err(Error::Invalid("bernoulli_sigma needs exactly one of \"cuts\" and \"ideals\"".into())),
                };
                (f, vec![e], &None)
            }
        };
        match over {
            Some(o) => {
                let e = self.endo_override(&fam, o)?;
                Ok((fam, vec![e]))
            }
            None => Ok((fam, maps)),
        }
    }

    pub fn system(&self, spec: &SystemSpec) -> Result<EndoSystem<R>> {
        match spec {
            SystemSpec::Finite { module, endo } => {
                let m = self.module(module)?;
                let a = self.sized_matrix(endo, m.gens(), m.gens())?;
                EndoSystem::from_matrix(m, &a, self.lf)
            }
            SystemSpec::Family(f) => {
                let (fam, mut maps) = self.family(f)?;
                // a single-map system on the grid uses the first coordinate shift
                EndoSystem::family(fam, maps.swap_remove(0), self.lf)
            }
            SystemSpec::Sum { sum } => EndoSystem::direct_sum(sum.iter().map(|s| self.system(s)).collect::<Result<_>>()?),
        }
    }

    pub fn element(&self, e: &ElementSpec) -> Result<(Grade, SVec<R::Elem>)> {
        Ok((e.grade.unwrap_or(ORIGIN), self.svec(&e.vector)?))
    }

    pub fn seed(&self, elems: &[ElementSpec]) -> Result<Seed<R>> {
        Ok(Seed::new(elems.iter().map(|e| self.element(e)).collect::<Result<_>>()?))
    }

    pub fn embedding(&self, spec: &EmbeddingSpec, sub: &EndoSystem<R>, amb: &EndoSystem<R>) -> Result<Embedding<R>> {
        match (spec, sub.body(), amb.body()) {
            (EmbeddingSpec::Matrix(rows), Body::Finite { module: n, .. }, Body::Finite { module: m, .. }) => {
                Ok(Embedding::Finite(Morphism::from_matrix(n, m, &self.sized_matrix(rows, m.gens(), n.gens())?)?))
            }
            (EmbeddingSpec::Matrix(rows), Body::Family { family: nf, .. }, Body::Family { family: mf, .. }) => {
                let (nr, nc) = (mf.component_gens(ORIGIN), nf.component_gens(ORIGIN));
                Ok(Embedding::Family(MapRule::periodic(ORIGIN, vec![self.sized_matrix(rows, nr, nc)?])))
            }
            (EmbeddingSpec::Sum { sum }, Body::Sum(ns), Body::Sum(ms)) if sum.len() == ns.len() && ns.len() == ms.len() => {
                Ok(Embedding::Sum(sum.iter().zip(ns).zip(ms).map(|((e, n), m)| self.embedding(e, n, m)).collect::<Result<_>>()?))
            }
            _ => Err(Error::Invalid("the embedding does not match the shapes of the two systems".into())),
        }
    }

    pub fn multi(&self, spec: &MultiSpec) -> Result<MultiEndoSystem<R>> {
        match spec {
            MultiSpec::Finite { module, endos } => {
                let m = Arc::new(self.module(module)?);
                let maps = endos
                    .iter()
                    .map(|e| Morphism::from_matrix(&m, &m, &self.sized_matrix(e, m.gens(), m.gens())?))
                    .collect::<Result<Vec<_>>>()?;
                MultiEndoSystem::finite((*m).clone(), maps, self.lf)
            }
            MultiSpec::Family { family, maps } => {
                let (fam, built) = self.family(family)?;
                let by_name: BTreeMap<&str, BandedEndo<R>> = match built.as_slice() {
                    [x, y] => [("x", x.clone()), ("y", y.clone()), ("shift", x.clone())].into(),
                    [s] => [("shift", s.clone()), ("x", s.clone())].into(),
                    _ => BTreeMap::new(),
                };
                let endos = maps
                    .iter()
                    .map(|name| match name.as_str() {
                        "identity" => BandedEndo::identity(&fam),
                        "zero" => Ok(BandedEndo::zero()),
                        other => by_name.get(other).cloned().ok_or_else(|| Error::Invalid(format!("unknown map {other:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                MultiEndoSystem::family(fam, endos, self.lf)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{entropy, EntropyOptions};
    use crate::scalars::LengthValue;

    fn int_ctx(doc: &ProblemDoc) -> Ctx<Integers> {
        let m = match doc.engine {
            EngineSpec::Modular(m) => Some(m),
            _ => None,
        };
        Ctx::new(Integers, m, doc.length_function()).unwrap()
    }

    #[test]
    fn bernoulli_doc() {
        let doc = ProblemDoc::parse(
            r#"{"engine":"integers","system":{"family":"bernoulli","component":{"generators":1,"relations":[[6]]}}}"#,
        )
        .unwrap();
        let sys = int_ctx(&doc).system(doc.system.as_ref().unwrap()).unwrap();
        assert_eq!(entropy(&sys, &EntropyOptions::default()).unwrap().exact, Some(LengthValue::log_u64(6)));
    }

    #[test]
    fn modular_and_finite_docs() {
        let doc = ProblemDoc::parse(r#"{"engine":{"modular":4},"system":{"module":{"generators":2},"endo":[[0,1],[1,0]]}}"#).unwrap();
        let sys = int_ctx(&doc).system(doc.system.as_ref().unwrap()).unwrap();
        let Body::Finite { module, .. } = sys.body() else { panic!() };
        assert_eq!(module.length(LengthFunction::LogCard).unwrap(), LengthValue::log_u64(16));
        let bad = ProblemDoc::parse(r#"{"engine":{"modular":4},"system":{"module":{"generators":2},"endo":[[0,1]]}}"#).unwrap();
        assert!(matches!(int_ctx(&bad).system(bad.system.as_ref().unwrap()), Err(Error::Dimension(_))));
        assert!(ProblemDoc::parse(r#"{"engine":"integers","typo":1}"#).is_err());
    }

    #[test]
    fn valuation_sigma_doc() {
        let doc = ProblemDoc::parse(r#"{"engine":"valuation","system":{"family":"bernoulli_sigma","cuts":{"tail":"1+1/n"}}}"#).unwrap();
        let ctx = Ctx::new(Valuation, None, doc.length_function()).unwrap();
        let sys = ctx.system(doc.system.as_ref().unwrap()).unwrap();
        assert_eq!(entropy(&sys, &EntropyOptions::default()).unwrap().exact, Some(LengthValue::integer(1)));
        let doc = ProblemDoc::parse(r#"{"engine":"valuation","system":{"family":"bernoulli_sigma","ideals":[[["1","2"]],[["1","1"]]]}}"#).unwrap();
        let sys = ctx.system(doc.system.as_ref().unwrap()).unwrap();
        assert_eq!(entropy(&sys, &EntropyOptions::default()).unwrap().exact, Some(LengthValue::integer(1)));
    }

    #[test]
    fn grid_multi_doc() {
        let doc = ProblemDoc::parse(
            r#"{"engine":"integers","multi":{"family":"grid2d","component":{"generators":1,"relations":[[2]]},"maps":["x","y"]}}"#,
        )
        .unwrap();
        let m = int_ctx(&doc).multi(doc.multi.as_ref().unwrap()).unwrap();
        assert_eq!(m.k(), 2);
    }
}
