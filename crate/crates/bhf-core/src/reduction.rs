//! Simplification of type-D structures by cancelling unit-coefficient
//! arrows, and canonical relabeling for isomorphism testing.
//!
//! Cancelling an arrow x₀ → y₀ with idempotent coefficient removes both
//! generators and splices every zig-zag w → y₀, x₀ → z into a direct arrow
//! w → z. The returned data (F, G, H) witness the homotopy equivalence:
//! F ∘ G = id on the reduced structure and G ∘ F + id = δH + Hδ on the
//! original one, exactly over F₂.

use crate::algebra::{mul_basis, AlgBasisElt};
use crate::error::{Error, Result};
use crate::morphism::{compose_d, dmor_diff, identity_dmor, is_chain_map_d, DMor};
use crate::structures::TypeD;
use std::collections::BTreeMap;

/// The result of simplifying `orig`: the smaller structure together with
/// the chain maps f: orig → result, g: result → orig and the homotopy
/// h: orig → orig with δh + hδ = g ∘ f + id.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub result: TypeD,
    pub f: DMor,
    pub g: DMor,
    pub h: DMor,
}

impl Reduction {
    fn identity(d: &TypeD) -> Reduction {
        Reduction {
            result: d.clone(),
            f: identity_dmor(d),
            g: identity_dmor(d),
            h: DMor::zero(),
        }
    }
}

/// Whether the arrow src → dst is a strictly cancellable unit arrow: an
/// idempotent coefficient, distinct endpoints, and no parallel arrow
/// src → dst with a different coefficient.
fn cancellable(d: &TypeD, s: usize, t: usize) -> bool {
    if s == t {
        return false;
    }
    let mut unit = false;
    let mut parallel = false;
    for &(a, c, b) in d.arrows() {
        if a == s && b == t {
            if c.is_idem() {
                unit = true;
            } else {
                parallel = true;
            }
        }
    }
    unit && !parallel
}

/// Cancel the unit-coefficient arrow src → dst.
///
/// Errors with [`Error::NotCancellable`] when no such arrow exists, when
/// src = dst, or when a parallel arrow with a chord coefficient would
/// invalidate the splicing formulas.
pub fn cancel_edge(d: &TypeD, src: &str, dst: &str) -> Result<Reduction> {
    let x0 = d.idx(src)?;
    let y0 = d.idx(dst)?;
    if !cancellable(d, x0, y0) {
        return Err(Error::NotCancellable {
            src: src.to_string(),
            dst: dst.to_string(),
        });
    }
    let mut result = TypeD::new(&d.name);
    let mut old_to_new: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, g) in d.gens().iter().enumerate() {
        if i != x0 && i != y0 {
            old_to_new.insert(i, result.add_gen(&g.name, g.idem)?);
        }
    }
    // Restricted differential plus zig-zag splices (w → y₀) · (x₀ → z).
    for &(s, c, t) in d.arrows() {
        if s == x0 || s == y0 || t == x0 || t == y0 {
            continue;
        }
        result.toggle_arrow_idx(old_to_new[&s], c, old_to_new[&t]);
    }
    for &(w, b, t1) in d.arrows() {
        if t1 != y0 || w == x0 || w == y0 {
            continue;
        }
        for &(s2, a, z) in d.arrows() {
            if s2 != x0 || z == y0 || z == x0 {
                continue;
            }
            if let Some(p) = mul_basis(b, a) {
                result.toggle_arrow_idx(old_to_new[&w], p, old_to_new[&z]);
            }
        }
    }
    // F: drop x₀; send y₀ along the outgoing arrows of x₀; keep the rest.
    let mut f = DMor::zero();
    for (&old, &new) in &old_to_new {
        f.toggle(old, d.gens()[old].idem.elt(), new);
    }
    for &(s, a, z) in d.arrows() {
        if s == x0 && z != y0 && z != x0 {
            f.toggle(y0, a, old_to_new[&z]);
        }
    }
    // G: include, correcting each v through its arrows into y₀.
    let mut g = DMor::zero();
    for (&old, &new) in &old_to_new {
        g.toggle(new, d.gens()[old].idem.elt(), old);
    }
    for &(v, b, t) in d.arrows() {
        if t == y0 && v != x0 && v != y0 {
            g.toggle(old_to_new[&v], b, x0);
        }
    }
    // H: send y₀ back to x₀.
    let mut h = DMor::zero();
    h.toggle(y0, d.gens()[x0].idem.elt(), x0);
    Ok(Reduction { result, f, g, h })
}

/// Repeatedly cancel the lexicographically first (by source name, then
/// target name) strictly cancellable unit arrow until none remains,
/// composing the equivalence data across steps.
pub fn reduce(d: &TypeD) -> Result<Reduction> {
    let mut acc = Reduction::identity(d);
    loop {
        let cur = &acc.result;
        let next = cur
            .arrows()
            .iter()
            .filter(|&&(s, c, t)| c.is_idem() && cancellable(cur, s, t))
            .map(|&(s, _, t)| (cur.gen_name(s).to_string(), cur.gen_name(t).to_string()))
            .min();
        let Some((src, dst)) = next else {
            return Ok(acc);
        };
        let step = cancel_edge(cur, &src, &dst)?;
        // F = F₂∘F₁, G = G₁∘G₂, H = H₁ + G₁∘H₂∘F₁.
        let h_extra = compose_d(&acc.g, &compose_d(&step.h, &acc.f));
        acc.h.add(&h_extra);
        acc.f = compose_d(&step.f, &acc.f);
        acc.g = compose_d(&acc.g, &step.g);
        acc.result = step.result;
    }
}

/// Check the full contract of a [`Reduction`] against the structure it was
/// computed from: f and g are chain maps, F∘G = id, and G∘F + id = δH + Hδ.
pub fn verify_reduction(orig: &TypeD, red: &Reduction) -> bool {
    if !is_chain_map_d(orig, &red.result, &red.f) {
        return false;
    }
    if !is_chain_map_d(&red.result, orig, &red.g) {
        return false;
    }
    if compose_d(&red.f, &red.g) != identity_dmor(&red.result) {
        return false;
    }
    let mut lhs = compose_d(&red.g, &red.f);
    lhs.add(&identity_dmor(orig));
    lhs == dmor_diff(orig, orig, &red.h)
}

// ---------------------------------------------------------------------------
// Canonical form
// ---------------------------------------------------------------------------

type Encoding = (Vec<u8>, Vec<(usize, AlgBasisElt, usize)>);

/// Refinement key of a generator: its current color plus the multiset of
/// (coefficient, direction, neighbor color) triples over incident arrows.
type ColorKey = (usize, Vec<(AlgBasisElt, u8, usize)>);

fn refine(d: &TypeD, colors: &mut Vec<usize>) {
    loop {
        let n = colors.len();
        let mut keys: Vec<ColorKey> = (0..n).map(|i| (colors[i], Vec::new())).collect();
        for &(s, c, t) in d.arrows() {
            keys[s].1.push((c, 0, colors[t]));
            keys[t].1.push((c, 1, colors[s]));
        }
        for k in &mut keys {
            k.1.sort();
        }
        let mut sorted: Vec<&ColorKey> = keys.iter().collect();
        sorted.sort();
        sorted.dedup();
        let rank: BTreeMap<_, usize> = sorted
            .iter()
            .enumerate()
            .map(|(r, k)| ((*k).clone(), r))
            .collect();
        let new: Vec<usize> = (0..n).map(|i| rank[&keys[i]]).collect();
        if new == *colors {
            return;
        }
        *colors = new;
    }
}

fn encode_with(d: &TypeD, colors: &[usize]) -> (Encoding, Vec<usize>) {
    let n = colors.len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by_key(|&i| (colors[i], i));
    let mut pos = vec![0usize; n];
    for (p, &orig) in perm.iter().enumerate() {
        pos[orig] = p;
    }
    let idems: Vec<u8> = perm.iter().map(|&i| d.gens()[i].idem.bit()).collect();
    let mut arrows: Vec<(usize, AlgBasisElt, usize)> = d
        .arrows()
        .iter()
        .map(|&(s, c, t)| (pos[s], c, pos[t]))
        .collect();
    arrows.sort();
    ((idems, arrows), perm)
}

fn search(d: &TypeD, colors: Vec<usize>) -> (Encoding, Vec<usize>) {
    // Individualize the first member of the first non-singleton class,
    // branching over every choice; keep the minimal encoding.
    let n = colors.len();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in &colors {
        *counts.entry(c).or_default() += 1;
    }
    let target = counts.iter().find(|(_, &k)| k > 1).map(|(&c, _)| c);
    let Some(class) = target else {
        return encode_with(d, &colors);
    };
    let mut best: Option<(Encoding, Vec<usize>)> = None;
    for i in 0..n {
        if colors[i] != class {
            continue;
        }
        let mut branch: Vec<usize> = colors.iter().map(|&c| 2 * c + 1).collect();
        branch[i] = 2 * class;
        refine(d, &mut branch);
        let cand = search(d, branch);
        if best.as_ref().is_none_or(|b| cand.0 < b.0) {
            best = Some(cand);
        }
    }
    best.unwrap()
}

fn canonical_encoding(d: &TypeD) -> (Encoding, Vec<usize>) {
    let mut colors: Vec<usize> = vec![0; d.gens().len()];
    // Initial color: idempotent only; arrow multisets are folded in by the
    // first refinement pass.
    for (i, g) in d.gens().iter().enumerate() {
        colors[i] = g.idem.bit() as usize;
    }
    refine(d, &mut colors);
    search(d, colors)
}

/// The canonically relabeled copy of a type-D structure: generators are
/// renamed g0, g1, … in a canonical order so that any two isomorphic
/// structures produce identical generator and arrow data.
pub fn canonical_form(d: &TypeD) -> TypeD {
    let ((idems, arrows), _) = canonical_encoding(d);
    let mut out = TypeD::new(&d.name);
    for (i, &b) in idems.iter().enumerate() {
        out.add_gen(&format!("g{i}"), crate::algebra::Idem::from_bit(b).unwrap())
            .unwrap();
    }
    for (s, c, t) in arrows {
        out.toggle_arrow_idx(s, c, t);
    }
    out
}

/// Whether two type-D structures are isomorphic as labeled differential
/// modules (ignoring generator names).
pub fn is_isomorphic(a: &TypeD, b: &TypeD) -> bool {
    if a.gens().len() != b.gens().len() || a.arrows().len() != b.arrows().len() {
        return false;
    }
    canonical_encoding(a).0 == canonical_encoding(b).0
}

/// An explicit isomorphism a → b as an index map, when one exists.
pub fn canonical_map(a: &TypeD, b: &TypeD) -> Option<Vec<usize>> {
    if a.gens().len() != b.gens().len() || a.arrows().len() != b.arrows().len() {
        return None;
    }
    let (ea, perm_a) = canonical_encoding(a);
    let (eb, perm_b) = canonical_encoding(b);
    if ea != eb {
        return None;
    }
    let mut map = vec![0usize; a.gens().len()];
    for (p, &ai) in perm_a.iter().enumerate() {
        map[ai] = perm_b[p];
    }
    Some(map)
}

/// The isomorphism a → b as a type-D morphism, erroring when the two
/// structures cannot be identified.
pub fn iso_dmor(a: &TypeD, b: &TypeD) -> Result<DMor> {
    let map = canonical_map(a, b).ok_or_else(|| Error::NoIdentification {
        a: a.name.clone(),
        b: b.name.clone(),
    })?;
    let mut f = DMor::zero();
    for (i, g) in a.gens().iter().enumerate() {
        f.toggle(i, g.idem.elt(), map[i]);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Idem;
    use crate::structures::{horizontal_chain, validate_type_d, vertical_chain};
    use AlgBasisElt::{I0, I1, R1, R12, R2, R23, R3};

    fn named_arrows(d: &TypeD) -> Vec<(String, AlgBasisElt, String)> {
        d.arrows()
            .iter()
            .map(|&(s, c, t)| (d.gen_name(s).to_string(), c, d.gen_name(t).to_string()))
            .collect()
    }

    #[test]
    fn cancel_a_three_generator_zigzag() {
        // a --rho1--> c <--1-- d, plus b --rho2--> a; cancelling d -> c
        // leaves b --rho2--> a and pulls the correction into g.
        let mut m = TypeD::new("m");
        m.add_gen("a", Idem::I0).unwrap();
        m.add_gen("b", Idem::I1).unwrap();
        m.add_gen("c", Idem::I1).unwrap();
        m.add_gen("d", Idem::I1).unwrap();
        m.toggle_arrow("a", R1, "c").unwrap();
        m.toggle_arrow("d", I1, "c").unwrap();
        m.toggle_arrow("b", R2, "a").unwrap();
        validate_type_d(&m).unwrap();
        let red = cancel_edge(&m, "d", "c").unwrap();
        assert_eq!(
            named_arrows(&red.result),
            vec![("b".to_string(), R2, "a".to_string())]
        );
        assert!(verify_reduction(&m, &red));
        let g_named = red.g.named(&red.result, &m);
        assert!(g_named.contains(&("a".to_string(), R1, "d".to_string())));
        let h_named = red.h.named(&m, &m);
        assert_eq!(h_named.len(), 1);
        assert!(h_named.contains(&("c".to_string(), I1, "d".to_string())));
    }

    #[test]
    fn reduce_composes_the_equivalence_data() {
        // Two cancellable pairs in sequence.
        let mut m = TypeD::new("m");
        for (n, i) in [
            ("w", Idem::I0),
            ("x", Idem::I1),
            ("y", Idem::I1),
            ("z", Idem::I0),
            ("u", Idem::I0),
        ] {
            m.add_gen(n, i).unwrap();
        }
        m.toggle_arrow("w", R1, "x").unwrap();
        m.toggle_arrow("y", I1, "x").unwrap();
        m.toggle_arrow("y", R2, "z").unwrap();
        m.toggle_arrow("u", I0, "z").unwrap();
        validate_type_d(&m).unwrap();
        let red = reduce(&m).unwrap();
        assert!(verify_reduction(&m, &red));
        // w --rho1--> x, then x is hit by y whose rho2 lands on the
        // cancelled z: the splice chain w -> x -> (y) -> z -> (u) empties.
        assert_eq!(red.result.gens().len(), 1);
        assert_eq!(red.result.gens()[0].name, "w");
        assert!(red.result.arrows().is_empty());
    }

    #[test]
    fn not_cancellable_cases() {
        let mut m = TypeD::new("m");
        m.add_gen("a", Idem::I0).unwrap();
        m.add_gen("b", Idem::I0).unwrap();
        m.toggle_arrow("a", I0, "b").unwrap();
        m.toggle_arrow("a", R12, "b").unwrap();
        assert!(matches!(
            cancel_edge(&m, "a", "b"),
            Err(Error::NotCancellable { .. })
        ));
        assert!(cancel_edge(&m, "b", "a").is_err());
        // reduce skips the blocked edge and leaves the structure alone.
        let red = reduce(&m).unwrap();
        assert_eq!(red.result.gens().len(), 2);
        assert_eq!(red.result.arrows().len(), 2);
    }

    #[test]
    fn acyclic_pair_reduces_to_nothing() {
        let mut m = TypeD::new("m");
        m.add_gen("x", Idem::I1).unwrap();
        m.add_gen("y", Idem::I1).unwrap();
        m.toggle_arrow("x", I1, "y").unwrap();
        let red = reduce(&m).unwrap();
        assert!(red.result.gens().is_empty());
        assert!(red.result.arrows().is_empty());
        assert!(verify_reduction(&m, &red));
    }

    #[test]
    fn canonical_form_separates_and_identifies() {
        // Same chain with scrambled generator names and insertion order.
        let h = horizontal_chain(2);
        let mut h2 = TypeD::new("other");
        h2.add_gen("m2", Idem::I1).unwrap();
        h2.add_gen("end", Idem::I0).unwrap();
        h2.add_gen("m1", Idem::I1).unwrap();
        h2.add_gen("start", Idem::I0).unwrap();
        h2.toggle_arrow("start", R3, "m1").unwrap();
        h2.toggle_arrow("m1", R23, "m2").unwrap();
        h2.toggle_arrow("m2", R2, "end").unwrap();
        assert!(is_isomorphic(&h, &h2));
        assert!(canonical_form(&h).same_presentation(&canonical_form(&h2)));
        let map = canonical_map(&h, &h2).unwrap();
        // The map must carry arrows to arrows.
        for &(s, c, t) in h.arrows() {
            assert!(h2.arrows().contains(&(map[s], c, map[t])));
        }
        let iso = iso_dmor(&h, &h2).unwrap();
        assert!(crate::morphism::is_chain_map_d(&h, &h2, &iso));
        // Different chains are told apart.
        assert!(!is_isomorphic(&horizontal_chain(2), &vertical_chain(2)));
        assert!(!is_isomorphic(&horizontal_chain(2), &horizontal_chain(3)));
        assert!(iso_dmor(&horizontal_chain(2), &vertical_chain(2)).is_err());
    }

    #[test]
    fn canonical_form_handles_symmetry() {
        // Two disjoint identical arrows force individualization.
        let mut m = TypeD::new("sym");
        m.add_gen("a1", Idem::I0).unwrap();
        m.add_gen("b1", Idem::I1).unwrap();
        m.add_gen("a2", Idem::I0).unwrap();
        m.add_gen("b2", Idem::I1).unwrap();
        m.toggle_arrow("a1", R1, "b1").unwrap();
        m.toggle_arrow("a2", R1, "b2").unwrap();
        let mut swapped = TypeD::new("sym");
        swapped.add_gen("b2", Idem::I1).unwrap();
        swapped.add_gen("a1", Idem::I0).unwrap();
        swapped.add_gen("b1", Idem::I1).unwrap();
        swapped.add_gen("a2", Idem::I0).unwrap();
        swapped.toggle_arrow("a1", R1, "b2").unwrap();
        swapped.toggle_arrow("a2", R1, "b1").unwrap();
        assert!(is_isomorphic(&m, &swapped));
        let map = canonical_map(&m, &swapped).unwrap();
        for &(s, c, t) in m.arrows() {
            assert!(swapped.arrows().contains(&(map[s], c, map[t])));
        }
    }
}
