//! Reduced CFK⁻ staircase data for knots and its compilation into the
//! bordered invariant of the framed knot complement.
//!
//! A [`CfkMinus`] records generators, the concordance invariant tau, and
//! vertical/horizontal arrows with positive lengths. Compilation replaces
//! every arrow by a coefficient chain and joins the two distinguished
//! generators by the unstable chain determined by the framing.

use crate::algebra::{AlgBasisElt, Idem};
use crate::error::{Error, Result};
use crate::structures::{add_unstable_arrows, TypeD};
use std::collections::BTreeMap;

/// Reduced staircase model of knot Floer data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfkMinus {
    pub name: String,
    pub tau: i64,
    gens: Vec<String>,
    index: BTreeMap<String, usize>,
    vert: Vec<(usize, usize, usize)>,
    horiz: Vec<(usize, usize, usize)>,
}

impl CfkMinus {
    pub fn new(name: &str, tau: i64) -> CfkMinus {
        CfkMinus {
            name: name.to_string(),
            tau,
            gens: Vec::new(),
            index: BTreeMap::new(),
            vert: Vec::new(),
            horiz: Vec::new(),
        }
    }

    pub fn add_gen(&mut self, name: &str) -> Result<usize> {
        if self
            .index
            .insert(name.to_string(), self.gens.len())
            .is_some()
        {
            return Err(Error::DuplicateGenerator(name.to_string()));
        }
        self.gens.push(name.to_string());
        Ok(self.gens.len() - 1)
    }

    pub fn idx(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn add_vert(&mut self, src: &str, dst: &str, len: usize) -> Result<()> {
        let s = self.idx(src)?;
        let t = self.idx(dst)?;
        self.vert.push((s, t, len));
        Ok(())
    }

    pub fn add_horiz(&mut self, src: &str, dst: &str, len: usize) -> Result<()> {
        let s = self.idx(src)?;
        let t = self.idx(dst)?;
        self.horiz.push((s, t, len));
        Ok(())
    }

    pub fn gens(&self) -> &[String] {
        &self.gens
    }

    pub fn vert(&self) -> &[(usize, usize, usize)] {
        &self.vert
    }

    pub fn horiz(&self) -> &[(usize, usize, usize)] {
        &self.horiz
    }
}

fn distinguished_of(kind: &str, n_gens: usize, arrows: &[(usize, usize, usize)]) -> Result<usize> {
    let mut touched = vec![false; n_gens];
    for &(s, t, _) in arrows {
        touched[s] = true;
        touched[t] = true;
    }
    let mut it = (0..n_gens).filter(|&i| !touched[i]);
    match (it.next(), it.next()) {
        (Some(g), None) => Ok(g),
        (None, _) => Err(Error::Invalid(format!(
            "no generator untouched by {kind} arrows"
        ))),
        (Some(_), Some(_)) => Err(Error::Invalid(format!(
            "more than one generator untouched by {kind} arrows"
        ))),
    }
}

/// Check the staircase shape: positive arrow lengths, distinct endpoints,
/// at most one incoming and one outgoing arrow of each kind per generator,
/// and exactly one generator untouched by each kind.
pub fn validate_cfk(c: &CfkMinus) -> Result<()> {
    if c.gens.is_empty() {
        return Err(Error::Invalid("no generators".to_string()));
    }
    for (kind, arrows) in [("vertical", &c.vert), ("horizontal", &c.horiz)] {
        let mut outs = vec![0usize; c.gens.len()];
        let mut ins = vec![0usize; c.gens.len()];
        for &(s, t, len) in arrows.iter() {
            if len == 0 {
                return Err(Error::Invalid(format!("{kind} arrow with length 0")));
            }
            if s == t {
                return Err(Error::Invalid(format!(
                    "{kind} arrow from {0} to itself",
                    c.gens[s]
                )));
            }
            outs[s] += 1;
            ins[t] += 1;
        }
        for i in 0..c.gens.len() {
            if outs[i] > 1 || ins[i] > 1 {
                return Err(Error::Invalid(format!(
                    "generator {} has multiple {kind} arrows on one side",
                    c.gens[i]
                )));
            }
        }
        distinguished_of(kind, c.gens.len(), arrows)?;
    }
    Ok(())
}

/// The two distinguished generators: (vertically untouched, horizontally
/// untouched). They may coincide.
pub fn distinguished(c: &CfkMinus) -> Result<(usize, usize)> {
    Ok((
        distinguished_of("vertical", c.gens.len(), &c.vert)?,
        distinguished_of("horizontal", c.gens.len(), &c.horiz)?,
    ))
}

/// Compile the staircase data into the type-D invariant of the complement
/// with the given framing.
///
/// Every staircase generator becomes an ι₀ generator. A vertical arrow of
/// length l contributes a kappa chain s →ρ₁ κ₁ ←ρ₂₃ … ←ρ₂₃ κ_l ←ρ₁₂₃ t;
/// a horizontal arrow contributes a lambda chain s →ρ₃ λ₁ →ρ₂₃ … →ρ₂₃ λ_l
/// →ρ₂ t; the unstable chain joins the two distinguished generators.
pub fn cfd_from_cfk(c: &CfkMinus, framing: i64) -> Result<TypeD> {
    validate_cfk(c)?;
    let (xi0, eta0) = distinguished(c)?;
    let mut d = TypeD::new(&format!("{}:{}", c.name, framing));
    for g in &c.gens {
        d.add_gen(g, Idem::I0)?;
    }
    use AlgBasisElt::{R1, R123, R2, R23, R3};
    for (v, &(s, t, l)) in c.vert.iter().enumerate() {
        for j in 1..=l {
            d.add_gen(&format!("kappa:{v}:{j}"), Idem::I1)?;
        }
        d.toggle_arrow(&c.gens[s], R1, &format!("kappa:{v}:1"))?;
        for j in 1..l {
            d.toggle_arrow(
                &format!("kappa:{v}:{}", j + 1),
                R23,
                &format!("kappa:{v}:{j}"),
            )?;
        }
        d.toggle_arrow(&c.gens[t], R123, &format!("kappa:{v}:{l}"))?;
    }
    for (h, &(s, t, l)) in c.horiz.iter().enumerate() {
        for k in 1..=l {
            d.add_gen(&format!("lambda:{h}:{k}"), Idem::I1)?;
        }
        d.toggle_arrow(&c.gens[s], R3, &format!("lambda:{h}:1"))?;
        for k in 1..l {
            d.toggle_arrow(
                &format!("lambda:{h}:{k}"),
                R23,
                &format!("lambda:{h}:{}", k + 1),
            )?;
        }
        d.toggle_arrow(&format!("lambda:{h}:{l}"), R2, &c.gens[t])?;
    }
    add_unstable_arrows(&mut d, &c.gens[xi0], &c.gens[eta0], framing, c.tau)?;
    Ok(d)
}

/// Built-in staircase models.
pub fn builtin_knot(name: &str) -> Result<CfkMinus> {
    match name {
        "unknot" => {
            let mut c = CfkMinus::new("unknot", 0);
            c.add_gen("a")?;
            Ok(c)
        }
        "trefoil_rh" => {
            let mut c = CfkMinus::new("trefoil_rh", 1);
            for g in ["a", "b", "c"] {
                c.add_gen(g)?;
            }
            c.add_vert("b", "c", 1)?;
            c.add_horiz("b", "a", 1)?;
            Ok(c)
        }
        "figure_eight" => {
            let mut c = CfkMinus::new("figure_eight", 0);
            for g in ["a", "b", "c", "d", "e"] {
                c.add_gen(g)?;
            }
            c.add_vert("a", "c", 1)?;
            c.add_vert("b", "d", 1)?;
            c.add_horiz("b", "a", 1)?;
            c.add_horiz("d", "c", 1)?;
            Ok(c)
        }
        _ => Err(Error::Invalid(format!("unknown knot `{name}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::validate_type_d;
    use AlgBasisElt::{R1, R12, R123, R2, R23, R3};

    #[test]
    fn builtin_knots_validate_and_compile() {
        for name in ["unknot", "trefoil_rh", "figure_eight"] {
            let c = builtin_knot(name).unwrap();
            validate_cfk(&c).unwrap();
            for n in -3..=3 {
                let d = cfd_from_cfk(&c, n).unwrap();
                validate_type_d(&d).unwrap();
            }
        }
    }

    #[test]
    fn generator_counts() {
        let fig8 = builtin_knot("figure_eight").unwrap();
        // 5 staircase + 2 kappa + 2 lambda + 7 mu.
        assert_eq!(cfd_from_cfk(&fig8, 7).unwrap().gens().len(), 16);
        let unknot = builtin_knot("unknot").unwrap();
        assert_eq!(cfd_from_cfk(&unknot, 3).unwrap().gens().len(), 4);
        assert_eq!(cfd_from_cfk(&unknot, -3).unwrap().gens().len(), 4);
        assert_eq!(cfd_from_cfk(&unknot, 0).unwrap().gens().len(), 1);
    }

    #[test]
    fn distinguished_generators() {
        let tre = builtin_knot("trefoil_rh").unwrap();
        let (xi0, eta0) = distinguished(&tre).unwrap();
        assert_eq!(tre.gens()[xi0], "a");
        assert_eq!(tre.gens()[eta0], "c");
        let fig8 = builtin_knot("figure_eight").unwrap();
        let (xi0, eta0) = distinguished(&fig8).unwrap();
        assert_eq!(xi0, eta0);
        assert_eq!(fig8.gens()[xi0], "e");
    }

    #[test]
    fn trefoil_at_twice_tau_has_the_length_zero_chain() {
        let tre = builtin_knot("trefoil_rh").unwrap();
        let d = cfd_from_cfk(&tre, 2).unwrap();
        let a = d.idx("a").unwrap();
        let c = d.idx("c").unwrap();
        assert!(d.arrows().contains(&(a, R12, c)));
        // 3 staircase + 1 kappa + 1 lambda, no mu.
        assert_eq!(d.gens().len(), 5);
    }

    #[test]
    fn unknot_framing_zero_is_the_single_self_arrow() {
        let unknot = builtin_knot("unknot").unwrap();
        let d = cfd_from_cfk(&unknot, 0).unwrap();
        let a = d.idx("a").unwrap();
        assert_eq!(
            d.arrows().iter().copied().collect::<Vec<_>>(),
            vec![(a, R12, a)]
        );
    }

    #[test]
    fn chain_shapes_in_the_compiled_module() {
        let tre = builtin_knot("trefoil_rh").unwrap();
        let d = cfd_from_cfk(&tre, -1).unwrap();
        let b = d.idx("b").unwrap();
        let c = d.idx("c").unwrap();
        let a = d.idx("a").unwrap();
        let k1 = d.idx("kappa:0:1").unwrap();
        let l1 = d.idx("lambda:0:1").unwrap();
        // Vertical chain b -> c of length 1.
        assert!(d.arrows().contains(&(b, R1, k1)));
        assert!(d.arrows().contains(&(c, R123, k1)));
        // Horizontal chain b -> a of length 1.
        assert!(d.arrows().contains(&(b, R3, l1)));
        assert!(d.arrows().contains(&(l1, R2, a)));
        // Unstable chain xi0 = a to eta0 = c with m = 2·1 − (−1) = 3.
        let m1 = d.idx("mu:1").unwrap();
        let m3 = d.idx("mu:3").unwrap();
        assert!(d.arrows().contains(&(a, R1, m1)));
        assert!(d.arrows().contains(&(c, R3, m3)));
        let m2 = d.idx("mu:2").unwrap();
        assert!(d.arrows().contains(&(m2, R23, m1)));
    }

    #[test]
    fn validator_rejects_bad_staircases() {
        let mut c = CfkMinus::new("bad", 0);
        c.add_gen("a").unwrap();
        c.add_gen("b").unwrap();
        c.add_gen("c").unwrap();
        c.add_vert("a", "b", 1).unwrap();
        c.add_vert("a", "c", 1).unwrap();
        assert!(validate_cfk(&c).is_err()); // two vertical arrows out of a

        let mut c = CfkMinus::new("bad2", 0);
        c.add_gen("a").unwrap();
        c.add_gen("b").unwrap();
        c.add_vert("a", "b", 0).unwrap();
        assert!(validate_cfk(&c).is_err()); // zero length

        let mut c = CfkMinus::new("bad3", 0);
        c.add_gen("a").unwrap();
        c.add_gen("b").unwrap();
        c.add_vert("a", "b", 1).unwrap();
        // every generator touched by vertical arrows
        assert!(validate_cfk(&c).is_err());
    }
}
