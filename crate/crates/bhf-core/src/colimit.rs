//! Direct systems of type D structures under iterated boundary twists.
//!
//! A single twist step sends a type D structure `a` to `reduce(CFDA(τ) ⊠ a)`
//! together with a chain map into it, obtained by tensoring a distinguished
//! morphism CFDD(𝕀) → CFDD(τ) with the identity of `a` and conjugating by the
//! reduction equivalences. Iterating the step yields a direct system
//! A₀ → A₁ → A₂ → ⋯ whose behaviour falls into two regimes:
//!
//! * **stabilizing** — every stage is isomorphic to the base and some power
//!   of the step map is the identity after canonical identification;
//! * **growing** — each stage gains exactly one generator, and the colimit
//!   admits a finite presentation consisting of one stabilized stage plus a
//!   periodic tail of ν-generators.
//!
//! [`truncated_colimit`] materializes that presentation at a finite depth,
//! and [`stable_part`] extracts the image of the base stage modulo the
//! residue of its unstable chain — the part of the system that survives
//! every map — for complexes compiled from knot data.

use crate::algebra::AlgBasisElt::{self, I0, I1, R1, R12, R123, R2, R23, R3};
use crate::algebra::{mul_basis, DDCoeff, Idem, BASIS};
use crate::error::{Error, Result};
use crate::knot::{cfd_from_cfk, CfkMinus};
use crate::linalg::{f2_solve, BitVec, F2Matrix};
use crate::morphism::{compose_d, delta_elt, identity_dmor, DDMor, DElt, DMor};
use crate::reduction::{is_isomorphic, iso_dmor, reduce};
use crate::structures::{aa_iprime, cfda_t, cfdd_i, cfdd_t, validate_type_d, TypeD};
use crate::tensor::{box_da_d, box_damor_id, box_dd_aa, box_ddmor_aa};

/// The four distinguished morphisms CFDD(𝕀) → CFDD(τ), as explicit cycles.
/// They represent a basis of the degree-zero morphism homology; only the
/// first induces a nontrivial direct system.
pub fn twist_maps() -> [DDMor; 4] {
    let m = cfdd_i();
    let n = cfdd_t();
    let f1 = DDMor::from_named(
        &m,
        &n,
        &[
            ("x", DDCoeff::new(R3, I0), "r"),
            ("x", DDCoeff::new(I0, I0), "p"),
            ("y", DDCoeff::new(I1, R2), "r"),
            ("y", DDCoeff::new(I1, I1), "q"),
        ],
    )
    .unwrap();
    let f2 = DDMor::from_named(&m, &n, &[("x", DDCoeff::new(R3, R12), "r")]).unwrap();
    let f3 = DDMor::from_named(&m, &n, &[("x", DDCoeff::new(R1, R3), "q")]).unwrap();
    let f4 = DDMor::from_named(&m, &n, &[("x", DDCoeff::new(R3, R1), "q")]).unwrap();
    [f1, f2, f3, f4]
}

/// One step of the direct system: the next stage `reduce(CFDA(τ) ⊠ a)` and
/// the chain map into it induced by the first twist morphism.
///
/// The map is computed over the identity bimodule presentation: both sides of
/// the tensored morphism are reduced and the middle map is conjugated by the
/// reduction equivalences, then carried to `CFDA(τ) ⊠ a` itself along the
/// canonical identifications. Errors if an identification fails.
pub fn phi_step(a: &TypeD) -> Result<(TypeD, DMor)> {
    let m = cfdd_i();
    let n = cfdd_t();
    let aa = aa_iprime();
    let mbox = box_dd_aa(&m, &aa)?;
    let nbox = box_dd_aa(&n, &aa)?;
    let [f1, _, _, _] = twist_maps();
    let fda = box_ddmor_aa(&f1, &m, &n, &aa, &mbox, &nbox)?;
    let m0 = box_da_d(&mbox, a)?;
    let m1 = box_da_d(&nbox, a)?;
    let fbox = box_damor_id(&fda, &mbox, &nbox, a, &m0, &m1)?;
    let r0 = reduce(&m0)?;
    let r1 = reduce(&m1)?;
    let phi01 = compose_d(&r1.f, &compose_d(&fbox, &r0.g));
    let next = reduce(&box_da_d(&cfda_t(), a)?)?;
    let iso0 = iso_dmor(a, &r0.result)?;
    let iso1 = iso_dmor(&r1.result, &next.result)?;
    let phi = compose_d(&iso1, &compose_d(&phi01, &iso0));
    Ok((next.result, phi))
}

/// Whether the direct system induced by the combination Σ coeffs[i]·fᵢ of the
/// four twist morphisms has a nontrivial limit. High compositions of a map
/// survive exactly when some tensored component carries an idempotent output
/// coefficient, which happens precisely for combinations containing f₁.
pub fn only_f1_survives(coeffs: [bool; 4]) -> Result<bool> {
    let m = cfdd_i();
    let n = cfdd_t();
    let aa = aa_iprime();
    let mbox = box_dd_aa(&m, &aa)?;
    let nbox = box_dd_aa(&n, &aa)?;
    let mut f = DDMor::zero();
    for (&on, fi) in coeffs.iter().zip(twist_maps()) {
        if on {
            f.add(&fi);
        }
    }
    let fda = box_ddmor_aa(&f, &m, &n, &aa, &mbox, &nbox)?;
    Ok(fda.components().iter().any(|&(_, _, out, _)| out.is_idem()))
}

/// The smallest ν ≤ `max_power` with φ^ν = id, after identifying the target
/// of `phi: a → next` back with `a` along the canonical isomorphism. Errors
/// when no identification exists; returns `None` when no power within the
/// bound is the identity.
pub fn detect_periodicity(
    a: &TypeD,
    next: &TypeD,
    phi: &DMor,
    max_power: usize,
) -> Result<Option<usize>> {
    let back = iso_dmor(next, a)?;
    let endo = compose_d(&back, phi);
    let id = identity_dmor(a);
    let mut acc = endo.clone();
    for nu in 1..=max_power {
        if acc == id {
            return Ok(Some(nu));
        }
        acc = compose_d(&endo, &acc);
    }
    Ok(None)
}

/// A finite run of the direct system starting at `base`.
#[derive(Debug, Clone)]
pub struct DirectSystem {
    pub base: TypeD,
    /// `steps[i]` holds the model of stage `i + 1` together with the chain
    /// map from stage `i` into it.
    pub steps: Vec<(TypeD, DMor)>,
}

impl DirectSystem {
    /// The model of stage `i`; stage 0 is the base.
    pub fn model(&self, i: usize) -> &TypeD {
        if i == 0 {
            &self.base
        } else {
            &self.steps[i - 1].0
        }
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }
}

/// Run [`phi_step`] `depth` times from `base`.
pub fn build_system(base: &TypeD, depth: usize) -> Result<DirectSystem> {
    let cap = crate::depth_cap();
    if depth > cap {
        return Err(Error::DepthCap { cap });
    }
    let mut steps = Vec::with_capacity(depth);
    let mut stage = base.clone();
    for _ in 0..depth {
        let (next, phi) = phi_step(&stage)?;
        steps.push((next.clone(), phi));
        stage = next;
    }
    Ok(DirectSystem {
        base: base.clone(),
        steps,
    })
}

/// The periodic tail of a growing system: the ν-generators in stage order
/// and the generator every one of them hits with a ρ₂ arrow.
#[derive(Debug, Clone)]
pub struct NuTail {
    pub nus: Vec<String>,
    pub eta_bar: String,
}

/// A finite presentation of the colimit of a direct system.
#[derive(Debug, Clone)]
pub struct ColimitPresentation {
    /// Chosen representatives and the differential among them. For a
    /// stabilizing system this is (a copy of) the base; for a growing system
    /// it is one stabilized stage plus one ν-generator per deeper stage.
    pub presentation: TypeD,
    /// The tail pattern, for growing systems.
    pub tail: Option<NuTail>,
    /// For stabilizing systems, the smallest ν with φ^ν = id, when one is
    /// found within the depth cap.
    pub periodicity: Option<usize>,
}

// Columns for change-of-basis solves are ordered with chord multiples first
// so that idempotent-coefficient arrows are only used when forced.
const SOLVE_ORDER: [AlgBasisElt; 8] = [R1, R2, R3, R12, R23, R123, I0, I1];

fn alg_pos(b: AlgBasisElt) -> usize {
    BASIS.iter().position(|&x| x == b).unwrap()
}

/// Coordinates of an element of A ⊗ (stage with `ngen` generators).
fn elt_coord(e: &DElt, ngen: usize) -> BitVec {
    BitVec::from_indices(
        BASIS.len() * ngen,
        e.terms().map(|(c, g)| alg_pos(c) * ngen + g),
    )
}

/// The distinguished end of the growing chain in one stage: follow a ρ₁₂₃
/// arrow, walk forward along ρ₂₃ arrows, and accept the end of the walk when
/// it carries a ρ₂ arrow out. Exactly the chains that lengthen stage over
/// stage have this shape.
fn new_generator(stage: &TypeD) -> Result<usize> {
    let mut found: Option<usize> = None;
    for &(_, c, tgt) in stage.arrows() {
        if c != R123 {
            continue;
        }
        let mut z = tgt;
        for _ in 0..stage.gens().len() {
            match stage.delta(z).find(|&(c2, _)| c2 == R23) {
                Some((_, w)) => z = w,
                None => break,
            }
        }
        if stage.delta(z).any(|(c2, _)| c2 == R2) {
            if found.is_some_and(|old| old != z) {
                return Err(Error::Invalid(format!(
                    "stage {} has more than one candidate tail generator",
                    stage.name
                )));
            }
            found = Some(z);
        }
    }
    found.ok_or_else(|| Error::Invalid(format!("stage {} has no tail generator", stage.name)))
}

/// Express `target` as Σ b·wₕ over the images `chosen`, returning the pairs
/// (source position, coefficient). Columns are every nonzero algebra multiple
/// of a chosen image; `None` when the target is outside their span.
fn express(
    chosen: &[(AlgBasisElt, usize, BitVec)],
    target: &BitVec,
    dim: usize,
) -> Option<Vec<(AlgBasisElt, usize)>> {
    let mut mat = F2Matrix::zeros(dim, chosen.len());
    for (j, (_, _, col)) in chosen.iter().enumerate() {
        for i in col.ones() {
            mat.set(i, j, true);
        }
    }
    let sol = f2_solve(&mat, target)?;
    Some(sol.ones().map(|j| (chosen[j].0, chosen[j].1)).collect())
}

/// All nonzero algebra multiples of `w`, tagged with the factor and `pos`.
fn multiples(w: &DElt, pos: usize, ngen: usize) -> Vec<(AlgBasisElt, usize, BitVec)> {
    SOLVE_ORDER
        .iter()
        .filter_map(|&b| {
            let bw = w.lmul(b);
            if bw.is_zero() {
                None
            } else {
                Some((b, pos, elt_coord(&bw, ngen)))
            }
        })
        .collect()
}

/// A finite presentation of the colimit of the system over `base`, computed
/// from a run of `depth` steps (`depth ≥ 3`).
///
/// When the trailing stages each grow by exactly one generator, the chosen
/// representatives are the generators of the last stage before the growth run
/// plus, for each deeper stage, its new chain-end generator `nu:i`; all are
/// pushed forward to the deepest stage, where the differential is re-expressed
/// in terms of the chosen images. Otherwise the system must stabilize: the
/// deepest stage is required to be isomorphic to the base, the presentation
/// is the base itself, and the period of the step map is reported.
pub fn truncated_colimit(base: &TypeD, depth: usize) -> Result<ColimitPresentation> {
    if depth < 3 {
        return Err(Error::Invalid(format!(
            "truncated colimit needs depth at least 3, got {depth}"
        )));
    }
    let sys = build_system(base, depth)?;
    let mut run = 0;
    while run < depth
        && sys.model(depth - run).gens().len() == sys.model(depth - run - 1).gens().len() + 1
    {
        run += 1;
    }
    if run == 0 {
        if !is_isomorphic(sys.model(depth), base) {
            return Err(Error::Invalid(format!(
                "stages of {} neither stabilize nor grow a tail",
                base.name
            )));
        }
        let periodicity =
            match detect_periodicity(base, &sys.steps[0].0, &sys.steps[0].1, crate::depth_cap()) {
                Ok(v) => v,
                Err(Error::NoIdentification { .. }) => None,
                Err(e) => return Err(e),
            };
        return Ok(ColimitPresentation {
            presentation: base.clone(),
            tail: None,
            periodicity,
        });
    }
    let m0 = depth - run;
    let deep = sys.model(depth);
    let ngen = deep.gens().len();
    let dim = BASIS.len() * ngen;
    // Pushforwards Φ_{j, depth} for j = m0 ..= depth.
    let mut suffix: Vec<DMor> = vec![DMor::zero(); depth + 1];
    suffix[depth] = identity_dmor(deep);
    for j in (m0..depth).rev() {
        suffix[j] = compose_d(&suffix[j + 1], &sys.steps[j].1);
    }
    let finite = sys.model(m0);
    let mut chosen: Vec<(String, Idem, DElt)> = finite
        .gens()
        .iter()
        .enumerate()
        .map(|(i, g)| (g.name.clone(), g.idem, suffix[m0].apply_gen(i)))
        .collect();
    let mut nus = Vec::new();
    for i in 1..=run {
        let stage = sys.model(m0 + i);
        let z = new_generator(stage)?;
        let name = format!("nu:{i}");
        nus.push(name.clone());
        chosen.push((name, stage.gens()[z].idem, suffix[m0 + i].apply_gen(z)));
    }
    let mut columns = Vec::new();
    for (pos, (_, _, w)) in chosen.iter().enumerate() {
        columns.extend(multiples(w, pos, ngen));
    }
    let mut pres = TypeD::new(&format!("colim:{}", base.name));
    for (name, idem, _) in &chosen {
        pres.add_gen(name, *idem)?;
    }
    for (gi, (_, _, w)) in chosen.iter().enumerate() {
        let image = delta_elt(deep, w);
        let terms = express(&columns, &elt_coord(&image, ngen), dim).ok_or_else(|| {
            Error::Invalid(format!(
                "colimit differential of {} does not close on the chosen generators",
                base.name
            ))
        })?;
        for (b, h) in terms {
            pres.toggle_arrow_idx(gi, b, h);
        }
    }
    validate_type_d(&pres)?;
    let nu1 = pres.idx("nu:1")?;
    let mut eta = None;
    for (c, h) in pres.delta(nu1) {
        if c == R2 && eta.replace(h).is_some() {
            return Err(Error::Invalid(
                "first tail generator has more than one ρ₂ arrow".to_string(),
            ));
        }
    }
    let eta_bar = match eta {
        Some(h) => pres.gen_name(h).to_string(),
        None => {
            return Err(Error::Invalid(
                "first tail generator has no ρ₂ arrow".to_string(),
            ))
        }
    };
    Ok(ColimitPresentation {
        presentation: pres,
        tail: Some(NuTail { nus, eta_bar }),
        periodicity: None,
    })
}

/// The stable image of a compiled knot complex inside the direct system.
#[derive(Debug, Clone)]
pub struct StablePart {
    /// The compiled base stage A₀.
    pub base: TypeD,
    /// The reduced image subcomplex.
    pub complex: TypeD,
    /// The induced chain map A₀ → complex; generators whose pushforward dies
    /// in the system map to zero.
    pub projection: DMor,
}

/// Compile `c` at framing `i0` and return the image of the base stage after
/// `depth` steps, reduced.
///
/// Requires `i0 < 2τ` and `depth ≥ 2τ − i0 + 1`, the depth at which the
/// unstable chain of the base has died; errors with the required depth
/// otherwise. The pushforwards of the unstable generators span a subobject
/// closed under the differential (an unstable generator's boundary stays
/// inside the chain), and the image is taken modulo that span: this projects
/// away the two-generator ρ₁₂-residue the chain leaves behind and returns
/// the framing-independent part. The remaining generators are kept greedily —
/// one is dropped when its pushforward is zero or already an algebra
/// combination of the kept pushforwards modulo the span — and the
/// differential is re-expressed in the kept generators.
pub fn stable_part(c: &CfkMinus, i0: i64, depth: usize) -> Result<StablePart> {
    if i0 >= 2 * c.tau {
        return Err(Error::Invalid(format!(
            "stable part needs framing below 2τ = {}, got {i0}",
            2 * c.tau
        )));
    }
    let required = (2 * c.tau - i0 + 1) as usize;
    if depth < required {
        return Err(Error::DepthTooShallow { depth, required });
    }
    let a0 = cfd_from_cfk(c, i0)?;
    let sys = build_system(&a0, depth)?;
    let deep = sys.model(depth);
    let ngen = deep.gens().len();
    let dim = BASIS.len() * ngen;
    let mut phi = identity_dmor(&a0);
    for (_, step) in &sys.steps {
        phi = compose_d(step, &phi);
    }
    // Columns tagged with the sentinel are unstable-chain pushforwards;
    // expressions are taken over all columns but only the kept part is
    // recorded, so anything landing in the sentinel span is dropped.
    const RESIDUE: usize = usize::MAX;
    let is_unstable = |g: usize| a0.gens()[g].name.starts_with("mu:");
    let mut columns: Vec<(AlgBasisElt, usize, BitVec)> = Vec::new();
    for g in 0..a0.gens().len() {
        if is_unstable(g) {
            columns.extend(multiples(&phi.apply_gen(g), RESIDUE, ngen));
        }
    }
    let mut kept: Vec<usize> = Vec::new();
    let mut expr: Vec<Vec<(AlgBasisElt, usize)>> = Vec::new();
    for g in 0..a0.gens().len() {
        let w = phi.apply_gen(g);
        if is_unstable(g) || w.is_zero() {
            expr.push(Vec::new());
            continue;
        }
        if let Some(terms) = express(&columns, &elt_coord(&w, ngen), dim) {
            expr.push(terms.into_iter().filter(|&(_, p)| p != RESIDUE).collect());
            continue;
        }
        let pos = kept.len();
        kept.push(g);
        columns.extend(multiples(&w, pos, ngen));
        expr.push(vec![(a0.gens()[g].idem.elt(), pos)]);
    }
    let mut image = TypeD::new(&format!("stable:{}", a0.name));
    for &g in &kept {
        image.add_gen(&a0.gens()[g].name, a0.gens()[g].idem)?;
    }
    for (pos, &g) in kept.iter().enumerate() {
        for (b, h) in a0.delta(g) {
            for &(b2, ph) in &expr[h] {
                if let Some(p) = mul_basis(b, b2) {
                    image.toggle_arrow_idx(pos, p, ph);
                }
            }
        }
    }
    validate_type_d(&image)?;
    let r = reduce(&image)?;
    let mut projection = DMor::zero();
    for (g, terms) in expr.iter().enumerate() {
        for &(b, ph) in terms {
            for (b2, k) in r.f.apply_gen(ph).terms() {
                if let Some(p) = mul_basis(b, b2) {
                    projection.toggle(g, p, k);
                }
            }
        }
    }
    Ok(StablePart {
        base: a0,
        complex: r.result,
        projection,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knot::builtin_knot;
    use crate::morphism::{is_chain_map_d, is_chain_map_dd};
    use crate::structures::{horizontal_chain, unstable_chain, vertical_chain};

    #[test]
    fn twist_maps_are_cycles() {
        let m = cfdd_i();
        let n = cfdd_t();
        for f in twist_maps() {
            assert!(is_chain_map_dd(&m, &n, &f));
        }
    }

    #[test]
    fn survival_depends_only_on_the_first_coefficient() {
        for bits in 0u8..16 {
            let coeffs = [bits & 1 != 0, bits & 2 != 0, bits & 4 != 0, bits & 8 != 0];
            assert_eq!(only_f1_survives(coeffs).unwrap(), coeffs[0], "{coeffs:?}");
        }
    }

    #[test]
    fn one_step_on_a_horizontal_chain() {
        let a = horizontal_chain(1);
        let (next, phi) = phi_step(&a).unwrap();
        assert!(is_isomorphic(&next, &a));
        assert!(is_chain_map_d(&a, &next, &phi));
        assert_eq!(detect_periodicity(&a, &next, &phi, 8).unwrap(), Some(2));
    }

    #[test]
    fn identity_has_period_one() {
        let a = horizontal_chain(2);
        assert_eq!(
            detect_periodicity(&a, &a, &identity_dmor(&a), 4).unwrap(),
            Some(1)
        );
    }

    #[test]
    fn unstable_stages_grow_one_generator_at_a_time() {
        let base = unstable_chain(1, 0);
        let sys = build_system(&base, 4).unwrap();
        for i in 0..4 {
            assert_eq!(sys.model(i + 1).gens().len(), sys.model(i).gens().len() + 1);
            assert!(is_chain_map_d(
                sys.model(i),
                sys.model(i + 1),
                &sys.steps[i].1
            ));
        }
    }

    #[test]
    fn colimit_of_a_horizontal_chain_stabilizes() {
        let base = horizontal_chain(2);
        let p = truncated_colimit(&base, 4).unwrap();
        assert!(p.tail.is_none());
        assert!(is_isomorphic(&p.presentation, &base));
        assert!(p.periodicity.is_some());
    }

    #[test]
    fn a_twist_does_not_preserve_a_vertical_chain() {
        // A bare vertical chain has no ρ₃ source and no ρ₂ target, so the
        // ρ₂-pair spawned at each ι₀ generator by a twist survives
        // reduction: the twisted chain gains two generators and is not
        // homotopy equivalent to the original.
        let a = vertical_chain(1);
        let (next, phi) = phi_step(&a).unwrap();
        assert!(is_chain_map_d(&a, &next, &phi));
        assert_eq!(next.gens().len(), a.gens().len() + 2);
        assert!(!is_isomorphic(&next, &a));
    }

    #[test]
    fn one_step_on_a_closed_unstable_chain() {
        let a = unstable_chain(1, 0);
        let (next, phi) = phi_step(&a).unwrap();
        assert!(is_chain_map_d(&a, &next, &phi));
        assert!(is_isomorphic(&next, &unstable_chain(2, 0)));
    }

    #[test]
    fn colimit_of_an_unstable_chain_has_the_nu_tail() {
        let base = unstable_chain(1, 0);
        let p = truncated_colimit(&base, 4).unwrap();
        let tail = p.tail.expect("growing system must report a tail");
        assert_eq!(tail.nus, ["nu:1", "nu:2", "nu:3", "nu:4"]);
        assert_eq!(tail.eta_bar, "xi0");
        let pres = &p.presentation;
        let named: std::collections::BTreeSet<(String, AlgBasisElt, String)> = pres
            .arrows()
            .iter()
            .map(|&(s, c, t)| {
                (
                    pres.gen_name(s).to_string(),
                    c,
                    pres.gen_name(t).to_string(),
                )
            })
            .collect();
        let mut expected = std::collections::BTreeSet::new();
        expected.insert(("xi0".to_string(), R123, "mu:1".to_string()));
        expected.insert(("mu:1".to_string(), R2, "xi0".to_string()));
        for i in 1..=4usize {
            expected.insert((format!("nu:{i}"), R2, "xi0".to_string()));
            for k in 1..=i {
                expected.insert((format!("nu:{i}"), R23, format!("nu:{k}")));
            }
        }
        assert_eq!(named, expected);
    }

    #[test]
    fn stable_part_checks_its_preconditions() {
        let trefoil = builtin_knot("trefoil_rh").unwrap();
        assert!(matches!(
            stable_part(&trefoil, 3, 10),
            Err(Error::Invalid(_))
        ));
        assert!(matches!(
            stable_part(&trefoil, -7, 4),
            Err(Error::DepthTooShallow {
                depth: 4,
                required: 10
            })
        ));
    }
}
