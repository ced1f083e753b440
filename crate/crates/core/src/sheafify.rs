//! The plus construction and the associated sheaf `a(P) = P⁺⁺`.
//!
//! Over a finite site the covering sieves on an object are closed under
//! intersection, so there is a least one, `L`. Every matching family on a
//! covering sieve restricts to `L`, and two families are identified exactly
//! when they agree on `L`. Classes are therefore keyed by their restriction
//! to `L`; [`plus_equivalent`] decides the same relation by searching for a
//! common covering refinement.

use std::collections::HashMap;

use crate::cat::{FinCategory, Obj};
use crate::error::{Error, Result};
use crate::presheaf::{NatTrans, Presheaf};
use crate::site::{matching_families, restrict_to, Sieve, Topology};

#[derive(Debug, Clone)]
pub struct Plus {
    pub presheaf: Presheaf,
    /// `P -> P⁺`.
    pub unit: NatTrans,
    least: Vec<Sieve>,
    families: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

impl Plus {
    pub fn least_cover(&self, a: Obj) -> &Sieve {
        &self.least[a.0]
    }

    /// The matching family on the least cover representing a section.
    pub fn family(&self, a: Obj, x: usize) -> &[usize] {
        &self.families[a.0][x]
    }

    pub fn section_of(&self, a: Obj, family: &[usize]) -> Option<usize> {
        self.index[a.0].get(family).copied()
    }
}

pub fn plus(c: &FinCategory, p: &Presheaf, j: &Topology) -> Result<Plus> {
    let least: Vec<Sieve> = c.objects().map(|a| j.least_cover(a)).collect::<Result<_>>()?;
    let families: Vec<Vec<Vec<usize>>> = c.objects().map(|a| matching_families(c, p, &least[a.0])).collect();
    let index: Vec<HashMap<Vec<usize>, usize>> = families
        .iter()
        .map(|fs| fs.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect())
        .collect();
    let action = c
        .morphisms()
        .map(|f| {
            let (a, b) = (c.src(f), c.tgt(f));
            let (la, lb) = (&least[a.0], &least[b.0]);
            families[b.0]
                .iter()
                .map(|x| {
                    let y: Vec<usize> = la
                        .members
                        .iter()
                        .map(|&m| {
                            let k = lb
                                .members
                                .binary_search(&c.comp(f, m))
                                .map_err(|_| Error::invariant("least cover is not stable under pullback"))?;
                            Ok(x[k])
                        })
                        .collect::<Result<_>>()?;
                    index[a.0].get(&y).copied().ok_or_else(|| Error::invariant("restricted family is not matching"))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let sizes = families.iter().map(|f| f.len()).collect();
    let presheaf = Presheaf::new(c, sizes, action)?;
    let unit = NatTrans {
        components: c
            .objects()
            .map(|a| (0..p.size(a)).map(|x| index[a.0][&restrict_to(p, &least[a.0], x)]).collect())
            .collect(),
    };
    Ok(Plus { presheaf, unit, least, families, index })
}

/// `α⁺ : P⁺ -> Q⁺`.
pub fn plus_map(c: &FinCategory, pp: &Plus, qp: &Plus, alpha: &NatTrans) -> Result<NatTrans> {
    let components = c
        .objects()
        .map(|a| {
            let l = pp.least_cover(a);
            if l != qp.least_cover(a) {
                return Err(Error::invariant("plus constructions over different topologies"));
            }
            (0..pp.presheaf.size(a))
                .map(|x| {
                    let fam: Vec<usize> = l
                        .members
                        .iter()
                        .zip(pp.family(a, x))
                        .map(|(&m, &v)| alpha.at(c.src(m), v))
                        .collect();
                    qp.section_of(a, &fam).ok_or_else(|| Error::invariant("image family is not matching"))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NatTrans { components })
}

/// Do `(s, x)` and `(t, y)` agree on some covering sieve inside `s ∩ t`?
pub fn plus_equivalent(j: &Topology, s: &Sieve, x: &[usize], t: &Sieve, y: &[usize]) -> bool {
    let meet = s.intersect(t);
    let value = |sieve: &Sieve, fam: &[usize], m| fam[sieve.members.binary_search(&m).expect("member")];
    j.covers(s.object)
        .filter(|r| r.is_subset(&meet))
        .any(|r| r.members.iter().all(|&m| value(s, x, m) == value(t, y, m)))
}

#[derive(Debug, Clone)]
pub struct Sheafified {
    pub sheaf: Presheaf,
    /// `P -> a(P)`.
    pub unit: NatTrans,
    pub first: Plus,
    pub second: Plus,
}

pub fn sheafify(c: &FinCategory, p: &Presheaf, j: &Topology) -> Result<Sheafified> {
    let first = plus(c, p, j)?;
    let second = plus(c, &first.presheaf, j)?;
    let unit = first.unit.then(&second.unit);
    Ok(Sheafified { sheaf: second.presheaf.clone(), unit, first, second })
}

/// `a(α) : a(P) -> a(Q)`.
pub fn sheafify_map(c: &FinCategory, sp: &Sheafified, sq: &Sheafified, alpha: &NatTrans) -> Result<NatTrans> {
    let once = plus_map(c, &sp.first, &sq.first, alpha)?;
    plus_map(c, &sp.second, &sq.second, &once)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{build_finset_mcat, MonicClass};
    use crate::site::{generate_topology, is_sheaf};

    #[test]
    fn constant_presheaf_sheafifies_to_a_sheaf() {
        let fx = build_finset_mcat(2, MonicClass::Inj);
        let c = fx.cat();
        let j = generate_topology(&fx.mc).unwrap();
        let two = Presheaf::constant(c, 2);
        assert!(!is_sheaf(c, &two, &j));
        let a = sheafify(c, &two, &j).unwrap();
        a.sheaf.check_functorial(c).unwrap();
        assert!(is_sheaf(c, &a.sheaf, &j));
        // the empty set has one section, a k-set 2^k
        assert_eq!(a.sheaf.sizes(), &[1, 2, 4]);
    }
}
