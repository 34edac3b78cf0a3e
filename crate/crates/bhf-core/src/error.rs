//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide error type. Variants are grouped by how the CLI maps them to
/// exit codes: parse errors, resource/depth-cap errors, and everything else
/// (validation and identification failures).
#[derive(Debug, Error)]
pub enum Error {
    #[error("mixed idempotent shapes in algebra value: {0} and {1}")]
    MixedIdempotents(String, String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),

    #[error("idempotent mismatch on `{module}`: arrow {src} -> {coeff} {dst}")]
    IdempotentMismatch {
        module: String,
        src: String,
        coeff: String,
        dst: String,
    },

    #[error("structure equation fails for `{module}`: {witness}")]
    StructureEquation { module: String, witness: String },

    #[error("chain enumeration exceeded the depth cap {cap} (set BHF_DEPTH_CAP to raise it)")]
    DepthCap { cap: usize },

    #[error("depth {depth} is too shallow: required depth is {required}")]
    DepthTooShallow { depth: usize, required: usize },

    #[error(
        "cannot cancel {src} -> {dst}: need a unique idempotent-coefficient arrow between them"
    )]
    NotCancellable { src: String, dst: String },

    #[error("no canonical identification between `{a}` and `{b}`")]
    NoIdentification { a: String, b: String },

    #[error("morphism is not a chain map: {0}")]
    NotChainMap(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
