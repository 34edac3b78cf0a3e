//! Exact symbolic computation with bordered structures over the torus
//! algebra.
//!
//! Everything here is finite, deterministic linear algebra over 𝔽₂: the
//! torus algebra and its chord basis live in [`algebra`], and one-sided
//! (type D) and two-sided (type DD/DA/AA) differential structures over it
//! in [`structures`], together with validators that check the structure
//! equations by exhaustive coefficient enumeration. On top of those sit
//!
//! * [`morphism`] — morphism complexes, differentials, chain-map and
//!   homotopy checks, and homology of morphism spaces;
//! * [`tensor`] — box tensor products pairing a two-sided structure with a
//!   one-sided one, for both structures and morphisms;
//! * [`reduction`] — elimination of identity-coefficient arrows with the
//!   full homotopy equivalence data, and canonical forms for isomorphism
//!   testing;
//! * [`knot`] — bifiltered knot chain data and its compilation to type D
//!   structures at an integer framing;
//! * [`colimit`] — direct systems under iterated boundary twists, their
//!   periodicity, truncated colimit presentations, and stable parts;
//! * [`textio`] — line-based text formats for structures and knot data.
//!
//! Validators and tensor products enumerate coefficient sequences; the
//! enumeration length and the direct-system depth are both capped by
//! [`depth_cap`]. Long inner loops run in parallel when the `parallel`
//! feature (on by default) is enabled and fall back to sequential
//! iteration otherwise; results are identical either way.

pub mod algebra;
pub mod colimit;
pub mod error;
pub mod knot;
pub mod linalg;
pub mod morphism;
pub mod par;
pub mod reduction;
pub mod structures;
pub mod tensor;
pub mod textio;

/// The cap on coefficient-sequence lengths and direct-system depths, read
/// from the `BHF_DEPTH_CAP` environment variable on every call; defaults
/// to 64 when the variable is unset or malformed.
pub fn depth_cap() -> usize {
    std::env::var("BHF_DEPTH_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(64)
}
