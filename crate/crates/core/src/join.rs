//! Joins of compatible families, the join axioms, and join preservation.

use std::collections::HashMap;

use crate::cat::{Mor, Obj};
use crate::error::{Error, Result};
use crate::functor::Functor;
use crate::report::{LawReport, Violation};
use crate::restriction::RestrictionCategory;

/// A pairwise compatible set of parallel morphisms `A -> B`, stored sorted
/// and without repetition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompatibleFamily {
    src: Obj,
    tgt: Obj,
    members: Vec<Mor>,
}

impl CompatibleFamily {
    pub fn new(x: &RestrictionCategory, src: Obj, tgt: Obj, members: &[Mor]) -> Result<Self> {
        let c = x.cat();
        c.check_obj(src)?;
        c.check_obj(tgt)?;
        let mut members = members.to_vec();
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            c.check_mor(m)?;
            if c.src(m) != src || c.tgt(m) != tgt {
                return Err(Error::IllFormed(format!("{} is not in the family's hom-set", c.name(m))));
            }
        }
        for (i, &f) in members.iter().enumerate() {
            for &g in &members[i + 1..] {
                if !x.compatible_unchecked(f, g) {
                    return Err(Error::IncompatibleFamily(f.0, g.0));
                }
            }
        }
        Ok(CompatibleFamily { src, tgt, members })
    }

    pub fn src(&self) -> Obj {
        self.src
    }

    pub fn tgt(&self) -> Obj {
        self.tgt
    }

    pub fn members(&self) -> &[Mor] {
        &self.members
    }

    pub fn ids(&self) -> Vec<usize> {
        self.members.iter().map(|m| m.0).collect()
    }
}

/// All common upper bounds of the members within `hom(A, B)`.
pub fn upper_bounds(x: &RestrictionCategory, fam: &CompatibleFamily) -> Vec<Mor> {
    x.cat()
        .hom(fam.src, fam.tgt)
        .iter()
        .copied()
        .filter(|&u| fam.members.iter().all(|&s| x.leq_unchecked(s, u)))
        .collect()
}

/// Least upper bound of the family in the hom-order, found by scanning.
pub fn join(x: &RestrictionCategory, fam: &CompatibleFamily) -> Option<Mor> {
    lub(x, fam.src, fam.tgt, &fam.members)
}

pub(crate) fn lub(x: &RestrictionCategory, a: Obj, b: Obj, members: &[Mor]) -> Option<Mor> {
    let ups: Vec<Mor> = x
        .cat()
        .hom(a, b)
        .iter()
        .copied()
        .filter(|&u| members.iter().all(|&s| x.leq_unchecked(s, u)))
        .collect();
    ups.iter().copied().find(|&u| ups.iter().all(|&v| x.leq_unchecked(u, v)))
}

/// Which compatible families a check ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FamilyScope {
    #[default]
    All,
    NonEmpty,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FamilyBound {
    pub max_size: Option<usize>,
    pub scope: FamilyScope,
}

impl FamilyBound {
    fn admits(&self, len: usize) -> bool {
        !(self.scope == FamilyScope::NonEmpty && len == 0)
    }
}

/// Every compatible family (as a sorted set) in `hom(a, b)`, including the
/// empty family, in lexicographic order.
pub fn compatible_families(
    x: &RestrictionCategory,
    a: Obj,
    b: Obj,
    max_size: Option<usize>,
) -> Vec<Vec<Mor>> {
    let hom = x.cat().hom(a, b);
    cliques(hom.len(), |i, j| x.compatible_unchecked(hom[i], hom[j]), max_size)
        .into_iter()
        .map(|fam| fam.into_iter().map(|i| hom[i]).collect())
        .collect()
}

/// All sets of indices in `0..n` that are pairwise related (each member also
/// related to itself), in lexicographic order, the empty set first.
pub(crate) fn cliques(n: usize, related: impl Fn(usize, usize) -> bool, max: Option<usize>) -> Vec<Vec<usize>> {
    let rel: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| related(i, j)).collect()).collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn grow(start: usize, rel: &[Vec<bool>], max: Option<usize>, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(current.clone());
        if max.is_some_and(|m| current.len() >= m) {
            return;
        }
        for i in start..rel.len() {
            if rel[i][i] && current.iter().all(|&j| rel[i][j] && rel[j][i]) {
                current.push(i);
                grow(i + 1, rel, max, current, out);
                current.pop();
            }
        }
    }
    grow(0, &rel, max, &mut current, &mut out);
    out
}

struct JoinCache<'a> {
    x: &'a RestrictionCategory,
    memo: HashMap<(Obj, Obj, Vec<Mor>), Option<Mor>>,
}

impl<'a> JoinCache<'a> {
    fn new(x: &'a RestrictionCategory) -> Self {
        JoinCache { x, memo: HashMap::new() }
    }

    fn join(&mut self, a: Obj, b: Obj, mut members: Vec<Mor>) -> Option<Mor> {
        members.sort_unstable();
        members.dedup();
        let x = self.x;
        *self.memo.entry((a, b, members)).or_insert_with_key(|k| lub(x, k.0, k.1, &k.2))
    }
}

/// Existence of joins, J1, J2 and post-composition over compatible families.
///
/// Tags: `JOIN` (no least upper bound), `J1`, `J2` (family then `g`),
/// `JPOST` (family then `f`). A `JPOST` violation alongside clean `J1`/`J2`
/// points at a bug rather than at the fixture.
pub fn check_join_axioms(x: &RestrictionCategory, bound: FamilyBound) -> LawReport {
    let c = x.cat();
    let mut report = LawReport::new();
    let mut cache = JoinCache::new(x);
    for a in c.objects() {
        for b in c.objects() {
            for fam in compatible_families(x, a, b, bound.max_size) {
                if !bound.admits(fam.len()) {
                    continue;
                }
                let ids: Vec<usize> = fam.iter().map(|m| m.0).collect();
                let Some(j) = cache.join(a, b, fam.clone()) else {
                    report.push(
                        Violation::new("JOIN", ids.clone())
                            .with_note(format!("hom({}, {})", c.object_name(a), c.object_name(b))),
                    );
                    continue;
                };
                // J1: bar(∨S) = ∨ bar(s)
                let bars: Vec<Mor> = fam.iter().map(|&s| x.bar(s)).collect();
                if cache.join(a, a, bars) != Some(x.bar(j)) {
                    report.push(Violation::new("J1", ids.clone()));
                }
                // J2: (∨S) ∘ g = ∨ (s ∘ g)
                for &g in &c.into_object(a) {
                    let comp: Vec<Mor> = fam.iter().map(|&s| c.comp(s, g)).collect();
                    if cache.join(c.src(g), b, comp) != Some(c.comp(j, g)) {
                        let mut t = ids.clone();
                        t.push(g.0);
                        report.push(Violation::new("J2", t));
                    }
                }
                // f ∘ (∨S) = ∨ (f ∘ s)
                for &f in &c.out_of_object(b) {
                    let comp: Vec<Mor> = fam.iter().map(|&s| c.comp(f, s)).collect();
                    if cache.join(a, c.tgt(f), comp) != Some(c.comp(f, j)) {
                        let mut t = ids.clone();
                        t.push(f.0);
                        report.push(Violation::new("JPOST", t));
                    }
                }
            }
        }
    }
    report
}

/// Compatible families in `x` that have no join.
pub fn joinless_families(x: &RestrictionCategory, bound: FamilyBound) -> Vec<(Obj, Obj, Vec<Mor>)> {
    let c = x.cat();
    let mut out = Vec::new();
    for a in c.objects() {
        for b in c.objects() {
            for fam in compatible_families(x, a, b, bound.max_size) {
                if bound.admits(fam.len()) && lub(x, a, b, &fam).is_none() {
                    out.push((a, b, fam));
                }
            }
        }
    }
    out
}

/// Does the restriction functor `f : x -> y` send joins to joins? Families
/// without a join in `x` are skipped.
pub fn is_join_restriction_functor(
    f: &Functor,
    x: &RestrictionCategory,
    y: &RestrictionCategory,
    bound: FamilyBound,
) -> Result<bool> {
    f.check_restriction(x, y)?;
    let c = x.cat();
    let mut cache = JoinCache::new(y);
    for a in c.objects() {
        for b in c.objects() {
            for fam in compatible_families(x, a, b, bound.max_size) {
                if !bound.admits(fam.len()) {
                    continue;
                }
                let Some(j) = lub(x, a, b, &fam) else { continue };
                let image: Vec<Mor> = fam.iter().map(|&s| f.apply(s)).collect();
                if cache.join(f.apply_obj(a), f.apply_obj(b), image) != Some(f.apply(j)) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat::{FinCategory, MorphismData};

    /// Partial identities on {0,1}, a join restriction monoid.
    fn partial_identities() -> RestrictionCategory {
        let masks = [0b11u8, 0b01, 0b10, 0b00];
        let morphisms = ["1", "e0", "e1", "z"]
            .iter()
            .map(|n| MorphismData::new(*n, Obj(0), Obj(0)))
            .collect();
        let cat = FinCategory::from_fn(vec!["A".into()], morphisms, vec![Mor(0)], |g, f| {
            let m = masks[g.0] & masks[f.0];
            masks.iter().position(|&x| x == m).map(Mor)
        })
        .unwrap();
        RestrictionCategory::new(cat, (0..4).map(Mor).collect()).unwrap()
    }

    #[test]
    fn joins_of_partial_identities() {
        let x = partial_identities();
        let fam = CompatibleFamily::new(&x, Obj(0), Obj(0), &[Mor(1), Mor(2)]).unwrap();
        assert_eq!(join(&x, &fam), Some(Mor(0)));
        let single = CompatibleFamily::new(&x, Obj(0), Obj(0), &[Mor(2)]).unwrap();
        assert_eq!(join(&x, &single), Some(Mor(2)));
        let empty = CompatibleFamily::new(&x, Obj(0), Obj(0), &[]).unwrap();
        assert_eq!(join(&x, &empty), Some(Mor(3)));
        assert!(check_join_axioms(&x, FamilyBound::default()).is_empty());
        // every subset of restriction idempotents is compatible
        assert_eq!(compatible_families(&x, Obj(0), Obj(0), None).len(), 16);
        assert_eq!(compatible_families(&x, Obj(0), Obj(0), Some(1)).len(), 5);
    }

    #[test]
    fn identity_functor_preserves_joins() {
        let x = partial_identities();
        let id = Functor::identity(x.cat());
        assert!(is_join_restriction_functor(&id, &x, &x, FamilyBound::default()).unwrap());
    }

    #[test]
    fn trivial_restriction_lacks_empty_join() {
        // with all maps total only singletons are compatible and the empty
        // family has a join only in one-element hom-sets
        let x = partial_identities();
        let t = RestrictionCategory::trivial(x.cat().clone());
        let report = check_join_axioms(&t, FamilyBound::default());
        assert_eq!(report.lines(), vec!["JOIN -- hom(A, A)".to_string()]);
        let nonempty = FamilyBound { max_size: None, scope: FamilyScope::NonEmpty };
        assert!(check_join_axioms(&t, nonempty).is_empty());
    }
}
