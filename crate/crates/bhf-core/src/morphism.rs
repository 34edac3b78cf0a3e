//! Morphisms of type-D and type-DD structures: component bases, the
//! morphism-space differential, chain-map checks, composition, and homotopy.
//!
//! A morphism component (x, c, y) means f(x) ∋ c ⊗ y. Morphisms are stored
//! as mod-2 component sets and do not own their endpoint structures; every
//! operation that needs idempotent or differential data takes the source
//! and target structures explicitly.
//!
//! Composition convention: maps act on the left factor of A ⊗ M by algebra
//! multiplication, and the coefficient of the first-applied map multiplies
//! on the left. Concretely, for f(x) = c ⊗ y followed by g(y) = e ⊗ z, the
//! composite (g ∘ f)(x) = (c·e) ⊗ z.

use crate::algebra::{dd_mul, mul_basis, AlgBasisElt, DDCoeff, BASIS};
use crate::error::{Error, Result};
use crate::linalg::{f2_homology, f2_solve, BitVec, F2Matrix};
use crate::structures::{TypeD, TypeDD};
use std::collections::BTreeSet;

fn toggle<T: Ord>(set: &mut BTreeSet<T>, item: T) {
    if !set.remove(&item) {
        set.insert(item);
    }
}

// ---------------------------------------------------------------------------
// Elements of A ⊗ M
// ---------------------------------------------------------------------------

/// An element of A ⊗ M for a type-D structure M, as a mod-2 set of
/// (coefficient, generator) terms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DElt {
    terms: BTreeSet<(AlgBasisElt, usize)>,
}

impl DElt {
    pub fn zero() -> DElt {
        DElt::default()
    }

    pub fn gen(m: &TypeD, i: usize) -> DElt {
        let mut e = DElt::zero();
        e.toggle(m.gens()[i].idem.elt(), i);
        e
    }

    pub fn toggle(&mut self, coeff: AlgBasisElt, gen: usize) {
        toggle(&mut self.terms, (coeff, gen));
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (AlgBasisElt, usize)> + '_ {
        self.terms.iter().copied()
    }

    pub fn add(&mut self, other: &DElt) {
        for &(c, g) in &other.terms {
            self.toggle(c, g);
        }
    }

    /// Left multiplication a · self.
    pub fn lmul(&self, a: AlgBasisElt) -> DElt {
        let mut out = DElt::zero();
        for &(c, g) in &self.terms {
            if let Some(p) = mul_basis(a, c) {
                out.toggle(p, g);
            }
        }
        out
    }
}

/// The differential of a ⊗ x in A ⊗ M (the algebra has no differential, so
/// only the module side contributes).
pub fn delta_elt(m: &TypeD, e: &DElt) -> DElt {
    let mut out = DElt::zero();
    for (a, x) in e.terms() {
        for (b, y) in m.delta(x) {
            if let Some(p) = mul_basis(a, b) {
                out.toggle(p, y);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Type-D morphisms
// ---------------------------------------------------------------------------

/// A morphism of type-D structures, as a mod-2 set of components
/// (source generator, coefficient, target generator).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DMor {
    components: BTreeSet<(usize, AlgBasisElt, usize)>,
}

impl DMor {
    pub fn zero() -> DMor {
        DMor::default()
    }

    pub fn toggle(&mut self, src: usize, coeff: AlgBasisElt, dst: usize) {
        toggle(&mut self.components, (src, coeff, dst));
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &BTreeSet<(usize, AlgBasisElt, usize)> {
        &self.components
    }

    /// Build from named components; names resolve in (source, target).
    pub fn from_named(m: &TypeD, n: &TypeD, comps: &[(&str, AlgBasisElt, &str)]) -> Result<DMor> {
        let mut f = DMor::zero();
        for &(s, c, t) in comps {
            f.toggle(m.idx(s)?, c, n.idx(t)?);
        }
        Ok(f)
    }

    /// Apply to a single generator.
    pub fn apply_gen(&self, x: usize) -> DElt {
        let mut out = DElt::zero();
        for &(s, c, t) in &self.components {
            if s == x {
                out.toggle(c, t);
            }
        }
        out
    }

    /// Apply to an element of A ⊗ M by extending over the left factor.
    pub fn apply(&self, e: &DElt) -> DElt {
        let mut out = DElt::zero();
        for (a, x) in e.terms() {
            for &(s, c, t) in &self.components {
                if s == x {
                    if let Some(p) = mul_basis(a, c) {
                        out.toggle(p, t);
                    }
                }
            }
        }
        out
    }

    pub fn add(&mut self, other: &DMor) {
        for &(s, c, t) in &other.components {
            self.toggle(s, c, t);
        }
    }

    /// Components with generator indices replaced by names.
    pub fn named(&self, m: &TypeD, n: &TypeD) -> BTreeSet<(String, AlgBasisElt, String)> {
        self.components
            .iter()
            .map(|&(s, c, t)| (m.gen_name(s).to_string(), c, n.gen_name(t).to_string()))
            .collect()
    }
}

/// The identity morphism of a type-D structure.
pub fn identity_dmor(m: &TypeD) -> DMor {
    let mut f = DMor::zero();
    for (i, g) in m.gens().iter().enumerate() {
        f.toggle(i, g.idem.elt(), i);
    }
    f
}

/// Composite g ∘ f of type-D morphisms (f applied first; its coefficient
/// multiplies on the left).
pub fn compose_d(g: &DMor, f: &DMor) -> DMor {
    let mut out = DMor::zero();
    for &(x, c1, y) in f.components() {
        for &(y2, c2, z) in g.components() {
            if y == y2 {
                if let Some(p) = mul_basis(c1, c2) {
                    out.toggle(x, p, z);
                }
            }
        }
    }
    out
}

/// The morphism-space differential ∂f = δ_N ∘ f + f ∘ δ_M.
pub fn dmor_diff(m: &TypeD, n: &TypeD, f: &DMor) -> DMor {
    let mut out = DMor::zero();
    for &(x, c, y) in f.components() {
        for (e, z) in n.delta(y) {
            if let Some(p) = mul_basis(c, e) {
                out.toggle(x, p, z);
            }
        }
    }
    for &(w, c, z) in f.components() {
        for s in 0..m.gens().len() {
            for (b, mid) in m.delta(s) {
                if mid == w {
                    if let Some(p) = mul_basis(b, c) {
                        out.toggle(s, p, z);
                    }
                }
            }
        }
    }
    out
}

/// Whether f: M → N commutes with the differentials.
pub fn is_chain_map_d(m: &TypeD, n: &TypeD, f: &DMor) -> bool {
    dmor_diff(m, n, f).is_zero()
}

/// The basis of the type-D morphism space Mor(M, N): every idempotent-
/// compatible component (x, c, y).
pub fn mor_d_basis(m: &TypeD, n: &TypeD) -> Vec<(usize, AlgBasisElt, usize)> {
    let mut basis = Vec::new();
    for (x, gx) in m.gens().iter().enumerate() {
        for (y, gy) in n.gens().iter().enumerate() {
            for &c in BASIS.iter() {
                if c.source_idem() == gx.idem && c.target_idem() == gy.idem {
                    basis.push((x, c, y));
                }
            }
        }
    }
    basis.sort();
    basis
}

/// Decide whether two chain maps f, g: M → N are chain homotopic, returning
/// a homotopy H with ∂H = f + g when one exists. Errors if either input is
/// not a chain map.
pub fn are_homotopic(m: &TypeD, n: &TypeD, f: &DMor, g: &DMor) -> Result<Option<DMor>> {
    if !is_chain_map_d(m, n, f) {
        return Err(Error::NotChainMap("first morphism".to_string()));
    }
    if !is_chain_map_d(m, n, g) {
        return Err(Error::NotChainMap("second morphism".to_string()));
    }
    let basis = mor_d_basis(m, n);
    let pos: std::collections::BTreeMap<(usize, AlgBasisElt, usize), usize> =
        basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let mut mat = F2Matrix::zeros(basis.len(), basis.len());
    for (j, &(x, c, y)) in basis.iter().enumerate() {
        let mut h = DMor::zero();
        h.toggle(x, c, y);
        for &(s, p, t) in dmor_diff(m, n, &h).components() {
            mat.toggle(pos[&(s, p, t)], j);
        }
    }
    let mut target = f.clone();
    target.add(g);
    let mut b = BitVec::zeros(basis.len());
    for &(s, c, t) in target.components() {
        b.set(pos[&(s, c, t)], true);
    }
    Ok(f2_solve(&mat, &b).map(|sol| {
        let mut h = DMor::zero();
        for i in sol.ones() {
            let (x, c, y) = basis[i];
            h.toggle(x, c, y);
        }
        h
    }))
}

// ---------------------------------------------------------------------------
// Type-DD morphisms
// ---------------------------------------------------------------------------

/// A morphism of type-DD structures, as a mod-2 set of components
/// (source generator, ρ ⊗ σ coefficient, target generator).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DDMor {
    components: BTreeSet<(usize, DDCoeff, usize)>,
}

impl DDMor {
    pub fn zero() -> DDMor {
        DDMor::default()
    }

    pub fn toggle(&mut self, src: usize, coeff: DDCoeff, dst: usize) {
        toggle(&mut self.components, (src, coeff, dst));
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &BTreeSet<(usize, DDCoeff, usize)> {
        &self.components
    }

    pub fn from_named(m: &TypeDD, n: &TypeDD, comps: &[(&str, DDCoeff, &str)]) -> Result<DDMor> {
        let mut f = DDMor::zero();
        for &(s, c, t) in comps {
            f.toggle(m.idx(s)?, c, n.idx(t)?);
        }
        Ok(f)
    }

    pub fn add(&mut self, other: &DDMor) {
        for &(s, c, t) in &other.components {
            self.toggle(s, c, t);
        }
    }

    pub fn named(&self, m: &TypeDD, n: &TypeDD) -> BTreeSet<(String, DDCoeff, String)> {
        self.components
            .iter()
            .map(|&(s, c, t)| (m.gen_name(s).to_string(), c, n.gen_name(t).to_string()))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Type-DA morphisms
// ---------------------------------------------------------------------------

/// A morphism of type-DA bimodules, as a mod-2 set of components
/// (source generator, input chords, output coefficient, target generator).
/// Like DA operations, a component consumes its inputs first-element-first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DAMor {
    components: BTreeSet<(usize, Vec<AlgBasisElt>, AlgBasisElt, usize)>,
}

impl DAMor {
    pub fn zero() -> DAMor {
        DAMor::default()
    }

    pub fn toggle(&mut self, src: usize, inputs: Vec<AlgBasisElt>, out: AlgBasisElt, dst: usize) {
        toggle(&mut self.components, (src, inputs, out, dst));
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &BTreeSet<(usize, Vec<AlgBasisElt>, AlgBasisElt, usize)> {
        &self.components
    }

    pub fn named(
        &self,
        m: &crate::structures::TypeDA,
        n: &crate::structures::TypeDA,
    ) -> BTreeSet<(String, Vec<AlgBasisElt>, AlgBasisElt, String)> {
        self.components
            .iter()
            .map(|(s, ins, out, t)| {
                (
                    m.gen_name(*s).to_string(),
                    ins.clone(),
                    *out,
                    n.gen_name(*t).to_string(),
                )
            })
            .collect()
    }
}

/// The component basis of the DD morphism space Mor(M, N): every pair of
/// generators together with every ρ ⊗ σ coefficient whose two coordinates
/// match the corresponding idempotents. Ordered by (src, dst, ρ, σ).
pub fn mor_dd_basis(m: &TypeDD, n: &TypeDD) -> Vec<(usize, usize, AlgBasisElt, AlgBasisElt)> {
    let mut basis = Vec::new();
    for (x, gx) in m.gens().iter().enumerate() {
        for (y, gy) in n.gens().iter().enumerate() {
            for &rho in BASIS.iter() {
                if rho.source_idem() != gx.left || rho.target_idem() != gy.left {
                    continue;
                }
                for &sigma in BASIS.iter() {
                    if sigma.source_idem() == gx.right && sigma.target_idem() == gy.right {
                        basis.push((x, y, rho, sigma));
                    }
                }
            }
        }
    }
    basis.sort();
    basis
}

/// The morphism-space differential ∂f = δ_N ∘ f + f ∘ δ_M, with coefficient
/// products taken componentwise in ρ ⊗ σ.
pub fn mor_dd_diff(m: &TypeDD, n: &TypeDD, f: &DDMor) -> DDMor {
    let mut out = DDMor::zero();
    for &(x, c, y) in f.components() {
        for (e, z) in n.delta(y) {
            if let Some(p) = dd_mul(c, e) {
                out.toggle(x, p, z);
            }
        }
    }
    for &(w, c, z) in f.components() {
        for s in 0..m.gens().len() {
            for (b, mid) in m.delta(s) {
                if mid == w {
                    if let Some(p) = dd_mul(b, c) {
                        out.toggle(s, p, z);
                    }
                }
            }
        }
    }
    out
}

/// Whether a DD morphism commutes with the differentials.
pub fn is_chain_map_dd(m: &TypeDD, n: &TypeDD, f: &DDMor) -> bool {
    mor_dd_diff(m, n, f).is_zero()
}

/// The matrix of [`mor_dd_diff`] on [`mor_dd_basis`]; entry (i, j) is the
/// coefficient of basis element i in the differential of basis element j.
pub fn mor_dd_diff_matrix(
    m: &TypeDD,
    n: &TypeDD,
) -> (Vec<(usize, usize, AlgBasisElt, AlgBasisElt)>, F2Matrix) {
    let basis = mor_dd_basis(m, n);
    let pos: std::collections::BTreeMap<_, usize> = basis
        .iter()
        .enumerate()
        .map(|(i, &(x, y, r, s))| ((x, r, s, y), i))
        .collect();
    let mut mat = F2Matrix::zeros(basis.len(), basis.len());
    for (j, &(x, y, rho, sigma)) in basis.iter().enumerate() {
        let mut f = DDMor::zero();
        f.toggle(x, DDCoeff::new(rho, sigma), y);
        for &(s, c, t) in mor_dd_diff(m, n, &f).components() {
            mat.toggle(pos[&(s, c.rho, c.sigma, t)], j);
        }
    }
    (basis, mat)
}

/// The homology of the DD morphism complex: its dimension over F₂ together
/// with one cycle representative per homology class.
pub fn mor_dd_homology(m: &TypeDD, n: &TypeDD) -> Result<(usize, Vec<DDMor>)> {
    let (basis, mat) = mor_dd_diff_matrix(m, n);
    let (dim, reps) = f2_homology(&mat, &mat)?;
    let reps = reps
        .into_iter()
        .map(|v| {
            let mut f = DDMor::zero();
            for i in v.ones() {
                let (x, y, rho, sigma) = basis[i];
                f.toggle(x, DDCoeff::new(rho, sigma), y);
            }
            f
        })
        .collect();
    Ok((dim, reps))
}
