use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("interval refinement exceeded {bits} bits")]
    PrecisionExhausted { bits: u32 },
    #[error("length function {length} does not apply to ring {ring}")]
    UnsupportedPair { length: String, ring: String },
    #[error("submodules live in different ambient modules")]
    AmbientMismatch,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix does not define a morphism: {0}")]
    NotAMorphism(String),
    #[error("seed submodule has infinite length")]
    NotLFinite,
    #[error("module is not locally L-finite")]
    NotLocallyFinite,
    #[error("endomorphism is not invertible")]
    NotInvertible,
    #[error("endomorphisms do not commute: {0}")]
    NonCommuting(String),
    #[error("embedding does not intertwine the endomorphisms: {0}")]
    NotEquivariant(String),
    #[error("ideal chain is not ascending: {0}")]
    NotAscending(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("family/endomorphism pair has no closed form")]
    NotRecognized,
    #[error("hyperkernel did not stabilise within {cap} steps")]
    CapExceeded { cap: usize },
    #[error("instance too large to enumerate ({0} elements)")]
    TooLarge(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
}
