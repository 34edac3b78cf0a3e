//! The torus algebra over F₂.
//!
//! The algebra has two idempotents ι₀, ι₁ and six chords ρ₁, ρ₂, ρ₃, ρ₁₂,
//! ρ₂₃, ρ₁₂₃. Chords are interval classes: ρ₁ = [1,2], ρ₂ = [2,3],
//! ρ₃ = [3,4], ρ₁₂ = [1,3], ρ₂₃ = [2,4], ρ₁₂₃ = [1,4]. Two chords multiply
//! to their concatenation when the first ends exactly where the second
//! begins, and to zero otherwise, so the only nonzero chord products are
//! ρ₁ρ₂ = ρ₁₂, ρ₂ρ₃ = ρ₂₃, ρ₁ρ₂₃ = ρ₁₂₃ and ρ₁₂ρ₃ = ρ₁₂₃. Idempotents act
//! as units on the matching side and annihilate otherwise. The algebra
//! differential μ₁ is identically zero; [`alg_mu1`] keeps the slot visible so
//! structure-equation code reads like the general definition.
//!
//! The same algebra appears attached to two boundary components. Elements of
//! the second copy are conventionally printed with σ/ȷ names ("sigma1", "j0",
//! ...); they are the same Rust type, and [`AlgBasisElt::flip`] implements the
//! orientation-reversing relabeling 1 ↔ 3 that relates the two copies.

use crate::error::{Error, Result};
use std::collections::BTreeSet;
use std::fmt;

/// One of the two idempotents of the torus algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Idem {
    I0,
    I1,
}

impl Idem {
    pub fn bit(self) -> u8 {
        match self {
            Idem::I0 => 0,
            Idem::I1 => 1,
        }
    }

    pub fn from_bit(b: u8) -> Result<Idem> {
        match b {
            0 => Ok(Idem::I0),
            1 => Ok(Idem::I1),
            _ => Err(Error::Invalid(format!(
                "idempotent bit must be 0 or 1, got {b}"
            ))),
        }
    }

    /// The idempotent as an algebra basis element.
    pub fn elt(self) -> AlgBasisElt {
        match self {
            Idem::I0 => AlgBasisElt::I0,
            Idem::I1 => AlgBasisElt::I1,
        }
    }

    pub fn other(self) -> Idem {
        match self {
            Idem::I0 => Idem::I1,
            Idem::I1 => Idem::I0,
        }
    }
}

impl fmt::Display for Idem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

/// A basis element of the torus algebra: an idempotent or a chord.
///
/// The declaration order fixes the deterministic ordering used everywhere
/// (arrow sets, morphism bases): idempotents first, then chords by interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlgBasisElt {
    I0,
    I1,
    R1,
    R2,
    R3,
    R12,
    R23,
    R123,
}

use AlgBasisElt::*;

/// All eight basis elements, in canonical order.
pub const BASIS: [AlgBasisElt; 8] = [I0, I1, R1, R2, R3, R12, R23, R123];

/// The six chords, in canonical order.
pub const CHORDS: [AlgBasisElt; 6] = [R1, R2, R3, R12, R23, R123];

impl AlgBasisElt {
    pub fn is_idem(self) -> bool {
        matches!(self, I0 | I1)
    }

    /// Interval endpoints (lo, hi) for chords; `None` for idempotents.
    fn interval(self) -> Option<(u8, u8)> {
        match self {
            I0 | I1 => None,
            R1 => Some((1, 2)),
            R2 => Some((2, 3)),
            R3 => Some((3, 4)),
            R12 => Some((1, 3)),
            R23 => Some((2, 4)),
            R123 => Some((1, 4)),
        }
    }

    fn from_interval(lo: u8, hi: u8) -> Option<AlgBasisElt> {
        match (lo, hi) {
            (1, 2) => Some(R1),
            (2, 3) => Some(R2),
            (3, 4) => Some(R3),
            (1, 3) => Some(R12),
            (2, 4) => Some(R23),
            (1, 4) => Some(R123),
            _ => None,
        }
    }

    /// Idempotent at which the element starts (acts on the left).
    pub fn source_idem(self) -> Idem {
        match self {
            I0 => Idem::I0,
            I1 => Idem::I1,
            _ => {
                let (lo, _) = self.interval().unwrap();
                if lo % 2 == 1 {
                    Idem::I0
                } else {
                    Idem::I1
                }
            }
        }
    }

    /// Idempotent at which the element ends (acts on the right).
    pub fn target_idem(self) -> Idem {
        match self {
            I0 => Idem::I0,
            I1 => Idem::I1,
            _ => {
                let (_, hi) = self.interval().unwrap();
                if hi % 2 == 1 {
                    Idem::I0
                } else {
                    Idem::I1
                }
            }
        }
    }

    /// The orientation-reversing relabeling between the two boundary copies:
    /// 1 ↔ 3, 2 ↔ 2, 12 ↔ 23, 123 ↔ 123; idempotents swap.
    pub fn flip(self) -> AlgBasisElt {
        match self.interval() {
            None => match self {
                I0 => I1,
                I1 => I0,
                _ => unreachable!(),
            },
            Some((lo, hi)) => AlgBasisElt::from_interval(5 - hi, 5 - lo).unwrap(),
        }
    }

    /// Name in the first-boundary (ρ) family: "i0", "i1", "rho1", ...
    pub fn rho_name(self) -> &'static str {
        match self {
            I0 => "i0",
            I1 => "i1",
            R1 => "rho1",
            R2 => "rho2",
            R3 => "rho3",
            R12 => "rho12",
            R23 => "rho23",
            R123 => "rho123",
        }
    }

    /// Name in the second-boundary (σ) family: "j0", "j1", "sigma1", ...
    pub fn sigma_name(self) -> &'static str {
        match self {
            I0 => "j0",
            I1 => "j1",
            R1 => "sigma1",
            R2 => "sigma2",
            R3 => "sigma3",
            R12 => "sigma12",
            R23 => "sigma23",
            R123 => "sigma123",
        }
    }

    /// Parse either family of names.
    pub fn from_name(s: &str) -> Option<AlgBasisElt> {
        BASIS
            .iter()
            .copied()
            .find(|e| e.rho_name() == s || e.sigma_name() == s)
    }
}

impl fmt::Display for AlgBasisElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rho_name())
    }
}

/// Product of two basis elements; `None` means zero.
///
/// This is the workhorse used throughout; [`alg_mul`] wraps it in an
/// [`AlgValue`].
pub fn mul_basis(a: AlgBasisElt, b: AlgBasisElt) -> Option<AlgBasisElt> {
    match (a.is_idem(), b.is_idem()) {
        (true, true) => (a == b).then_some(a),
        (true, false) => (b.source_idem().elt() == a).then_some(b),
        (false, true) => (a.target_idem().elt() == b).then_some(a),
        (false, false) => {
            let (alo, ahi) = a.interval().unwrap();
            let (blo, bhi) = b.interval().unwrap();
            (ahi == blo).then(|| AlgBasisElt::from_interval(alo, bhi).unwrap())
        }
    }
}

/// Product in the torus algebra, as a (zero- or one-term) value.
pub fn alg_mul(a: AlgBasisElt, b: AlgBasisElt) -> AlgValue {
    match mul_basis(a, b) {
        Some(c) => AlgValue::single(c),
        None => AlgValue::zero(),
    }
}

/// The algebra differential, identically zero for the torus algebra.
pub fn alg_mu1(_a: AlgBasisElt) -> AlgValue {
    AlgValue::zero()
}

/// An F₂ sum of basis elements, kept as a canonical sorted term set.
///
/// Nonzero values are homogeneous: all terms share source and target
/// idempotents. Mixed sums are rejected at construction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlgValue {
    terms: BTreeSet<AlgBasisElt>,
}

impl AlgValue {
    pub fn zero() -> AlgValue {
        AlgValue::default()
    }

    pub fn single(e: AlgBasisElt) -> AlgValue {
        let mut terms = BTreeSet::new();
        terms.insert(e);
        AlgValue { terms }
    }

    /// Build from terms with mod-2 cancellation; rejects mixed-idempotent sums.
    pub fn from_terms<I: IntoIterator<Item = AlgBasisElt>>(iter: I) -> Result<AlgValue> {
        let mut terms: BTreeSet<AlgBasisElt> = BTreeSet::new();
        for t in iter {
            if !terms.remove(&t) {
                terms.insert(t);
            }
        }
        if let Some(first) = terms.iter().next().copied() {
            for t in terms.iter().copied() {
                if t.source_idem() != first.source_idem() || t.target_idem() != first.target_idem()
                {
                    return Err(Error::MixedIdempotents(first.to_string(), t.to_string()));
                }
            }
        }
        Ok(AlgValue { terms })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = AlgBasisElt> + '_ {
        self.terms.iter().copied()
    }
}

impl fmt::Display for AlgValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names: Vec<&str> = self.terms.iter().map(|e| e.rho_name()).collect();
        write!(f, "{}", names.join(" + "))
    }
}

/// Sum of two values (F₂), with the same homogeneity requirement.
pub fn alg_add(a: &AlgValue, b: &AlgValue) -> Result<AlgValue> {
    AlgValue::from_terms(a.terms().chain(b.terms()))
}

/// A coefficient on an arrow of a two-boundary (DD) structure: one element
/// per boundary copy. Printed as `<rho-name> <sigma-name>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DDCoeff {
    pub rho: AlgBasisElt,
    pub sigma: AlgBasisElt,
}

impl DDCoeff {
    pub fn new(rho: AlgBasisElt, sigma: AlgBasisElt) -> DDCoeff {
        DDCoeff { rho, sigma }
    }
}

impl fmt::Display for DDCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.rho.rho_name(), self.sigma.sigma_name())
    }
}

/// Componentwise product of DD coefficients; `None` when either side vanishes.
pub fn dd_mul(c: DDCoeff, d: DDCoeff) -> Option<DDCoeff> {
    let rho = mul_basis(c.rho, d.rho)?;
    let sigma = mul_basis(c.sigma, d.sigma)?;
    Some(DDCoeff { rho, sigma })
}
