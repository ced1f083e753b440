//! Restriction presheaves and join restriction presheaves over a finite
//! restriction category.

use std::collections::HashMap;

use crate::cat::{FinCategory, Mor, MorphismData, Obj};
use crate::error::{Error, Result};
use crate::join::{self, cliques, compatible_families, FamilyBound};
use crate::presheaf::{check_natural, nat_transformations, NatTrans, Presheaf};
use crate::report::{LawReport, Violation};
use crate::restriction::RestrictionCategory;

/// A presheaf with an element restriction `x ↦ x̄ ∈ X(A, A)` for `x ∈ P(A)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionPresheaf {
    pub presheaf: Presheaf,
    bar: Vec<Vec<Mor>>,
}

impl RestrictionPresheaf {
    pub fn new(x: &RestrictionCategory, presheaf: Presheaf, bar: Vec<Vec<Mor>>) -> Result<Self> {
        let c = x.cat();
        if bar.len() != c.num_objects() {
            return Err(Error::IllFormed("element restriction table has the wrong number of objects".into()));
        }
        for a in c.objects() {
            if bar[a.0].len() != presheaf.size(a) {
                return Err(Error::IllFormed(format!("element restriction at {} is not total", c.object_name(a))));
            }
            for &e in &bar[a.0] {
                c.check_mor(e)?;
                if c.src(e) != a || c.tgt(e) != a {
                    return Err(Error::IllFormed(format!(
                        "element restriction at {} is not an endomorphism",
                        c.object_name(a)
                    )));
                }
            }
        }
        Ok(RestrictionPresheaf { presheaf, bar })
    }

    /// Representable `X(-, a)` with `h̄` from the base.
    pub fn representable(x: &RestrictionCategory, a: Obj) -> Self {
        let c = x.cat();
        let presheaf = Presheaf::representable(c, a);
        let bar = c.objects().map(|b| c.hom(b, a).iter().map(|&h| x.bar(h)).collect()).collect();
        RestrictionPresheaf { presheaf, bar }
    }

    /// Every element total.
    pub fn total(c: &FinCategory, presheaf: Presheaf) -> Self {
        let bar = c.objects().map(|a| vec![c.id(a); presheaf.size(a)]).collect();
        RestrictionPresheaf { presheaf, bar }
    }

    pub fn size(&self, a: Obj) -> usize {
        self.presheaf.size(a)
    }

    pub fn act(&self, f: Mor, x: usize) -> usize {
        self.presheaf.act(f, x)
    }

    /// `x̄`.
    pub fn bar(&self, a: Obj, x: usize) -> Mor {
        self.bar[a.0][x]
    }

    pub fn bar_table(&self) -> &[Vec<Mor>] {
        &self.bar
    }

    /// Copy with one element restriction replaced.
    pub fn with_bar(&self, a: Obj, x: usize, e: Mor) -> Self {
        let mut out = self.clone();
        out.bar[a.0][x] = e;
        out
    }

    pub(crate) fn leq_unchecked(&self, a: Obj, u: usize, v: usize) -> bool {
        u == self.act(self.bar(a, u), v)
    }

    pub(crate) fn compatible_unchecked(&self, a: Obj, u: usize, v: usize) -> bool {
        self.act(self.bar(a, v), u) == self.act(self.bar(a, u), v)
    }
}

/// RP1–RP3, idempotence of element restrictions, and the two derived
/// identities `ḡ ∘ (x·g)‾ = (x·g)‾` and `(x̄ ∘ g)‾ = (x·g)‾`.
///
/// Tags `RP-IDEM`, `RP1` (object, element), `RP2` (object, element, `f`),
/// `RP3`, `RP-LEMMA-A`, `RP-LEMMA-B` (object, element, `g`).
pub fn check_rp_axioms(x: &RestrictionCategory, p: &RestrictionPresheaf) -> LawReport {
    let c = x.cat();
    let mut report = LawReport::new();
    for a in c.objects() {
        for u in 0..p.size(a) {
            let ub = p.bar(a, u);
            if x.bar(ub) != ub {
                report.push(Violation::new("RP-IDEM", vec![a.0, u]));
            }
            // RP1: x · x̄ = x
            if p.act(ub, u) != u {
                report.push(Violation::new("RP1", vec![a.0, u]));
            }
            // RP2: (x · f̄)‾ = x̄ ∘ f̄
            for &f in &c.out_of_object(a) {
                let fb = x.bar(f);
                if p.bar(a, p.act(fb, u)) != c.comp(ub, fb) {
                    report.push(Violation::new("RP2", vec![a.0, u, f.0]));
                }
            }
            // RP3: x̄ ∘ g = g ∘ (x · g)‾
            for &g in &c.into_object(a) {
                let b = c.src(g);
                let xg = p.bar(b, p.act(g, u));
                if c.comp(ub, g) != c.comp(g, xg) {
                    report.push(Violation::new("RP3", vec![a.0, u, g.0]));
                }
                if c.comp(x.bar(g), xg) != xg {
                    report.push(Violation::new("RP-LEMMA-A", vec![a.0, u, g.0]));
                }
                if x.bar(c.comp(ub, g)) != xg {
                    report.push(Violation::new("RP-LEMMA-B", vec![a.0, u, g.0]));
                }
            }
        }
    }
    report
}

fn same_object(a: Obj, b: Obj) -> Result<()> {
    if a != b {
        return Err(Error::IllFormed(format!("elements live over different objects {a} and {b}")));
    }
    Ok(())
}

/// `u ≤ v` iff `u = v · ū`.
pub fn element_leq(p: &RestrictionPresheaf, (a, u): (Obj, usize), (b, v): (Obj, usize)) -> Result<bool> {
    same_object(a, b)?;
    Ok(p.leq_unchecked(a, u, v))
}

/// `u ⌣ v` iff `u · v̄ = v · ū`.
pub fn element_compatible(p: &RestrictionPresheaf, (a, u): (Obj, usize), (b, v): (Obj, usize)) -> Result<bool> {
    same_object(a, b)?;
    Ok(p.compatible_unchecked(a, u, v))
}

/// Compatible families of elements of `P(a)` as sorted index sets.
pub fn compatible_element_families(p: &RestrictionPresheaf, a: Obj, max: Option<usize>) -> Vec<Vec<usize>> {
    cliques(p.size(a), |u, v| p.compatible_unchecked(a, u, v), max)
}

/// Least upper bound in the element order by scanning `P(a)`.
pub fn element_lub(p: &RestrictionPresheaf, a: Obj, family: &[usize]) -> Option<usize> {
    let ups: Vec<usize> =
        (0..p.size(a)).filter(|&v| family.iter().all(|&u| p.leq_unchecked(a, u, v))).collect();
    ups.iter().copied().find(|&u| ups.iter().all(|&v| p.leq_unchecked(a, u, v)))
}

/// Where joins of elements come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JoinSource {
    /// Located by scanning the element order.
    Search,
    /// Stored per object, keyed by sorted compatible family.
    Table(Vec<HashMap<Vec<usize>, usize>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinRestrictionPresheaf {
    pub rp: RestrictionPresheaf,
    pub joins: JoinSource,
}

impl JoinRestrictionPresheaf {
    pub fn by_search(rp: RestrictionPresheaf) -> Self {
        JoinRestrictionPresheaf { rp, joins: JoinSource::Search }
    }

    pub fn join(&self, a: Obj, family: &[usize]) -> Option<usize> {
        let mut fam = family.to_vec();
        fam.sort_unstable();
        fam.dedup();
        match &self.joins {
            JoinSource::Search => element_lub(&self.rp, a, &fam),
            JoinSource::Table(t) => t[a.0].get(&fam).copied(),
        }
    }
}

/// Joins exist and are lubs, JRP1, JRP2, and `x · (∨T) = ∨(x · t)` as a
/// derived sanity check.
///
/// Tags `JOIN`, `JLUB` (object then family), `JRP1`, `JRP2` (object, family,
/// `g`), `JRPPOST` (object, element, then the family `T` of base maps).
pub fn check_jrp_axioms(x: &RestrictionCategory, p: &JoinRestrictionPresheaf, bound: FamilyBound) -> LawReport {
    let c = x.cat();
    let rp = &p.rp;
    let mut report = LawReport::new();
    for a in c.objects() {
        for fam in compatible_element_families(rp, a, bound.max_size) {
            if bound.scope == join::FamilyScope::NonEmpty && fam.is_empty() {
                continue;
            }
            let mut ids = vec![a.0];
            ids.extend(&fam);
            let Some(j) = p.join(a, &fam) else {
                report.push(Violation::new("JOIN", ids));
                continue;
            };
            if matches!(p.joins, JoinSource::Table(_)) && element_lub(rp, a, &fam) != Some(j) {
                report.push(Violation::new("JLUB", ids.clone()));
            }
            // JRP1: (∨S)‾ = ∨ s̄
            let bars: Vec<Mor> = fam.iter().map(|&s| rp.bar(a, s)).collect();
            if join::lub(x, a, a, &bars) != Some(rp.bar(a, j)) {
                report.push(Violation::new("JRP1", ids.clone()));
            }
            // JRP2: (∨S) · g = ∨ (s · g)
            for &g in &c.into_object(a) {
                let acted: Vec<usize> = fam.iter().map(|&s| rp.act(g, s)).collect();
                if p.join(c.src(g), &acted) != Some(rp.act(g, j)) {
                    let mut t = ids.clone();
                    t.push(g.0);
                    report.push(Violation::new("JRP2", t));
                }
            }
        }
        // x · (∨T) = ∨ (x · t) for compatible T ⊆ X(B, A)
        for b in c.objects() {
            for fam in compatible_families(x, b, a, bound.max_size) {
                let Some(jt) = join::lub(x, b, a, &fam) else { continue };
                for u in 0..rp.size(a) {
                    let acted: Vec<usize> = fam.iter().map(|&t| rp.act(t, u)).collect();
                    if p.join(b, &acted) != Some(rp.act(jt, u)) {
                        let mut t = vec![a.0, u];
                        t.extend(fam.iter().map(|m| m.0));
                        report.push(Violation::new("JRPPOST", t));
                    }
                }
            }
        }
    }
    report
}

/// The category with one extra object `⋆` receiving `P(A)` as maps `A -> ⋆`.
/// Morphisms of `x` keep their ids; the element maps follow, then `1_⋆`.
pub fn collage(x: &RestrictionCategory, p: &RestrictionPresheaf) -> Result<RestrictionCategory> {
    let c = x.cat();
    let n = c.num_morphisms();
    let star = Obj(c.num_objects());
    let mut names = c.object_names().to_vec();
    names.push("*".into());
    let mut morphisms: Vec<MorphismData> = c.morphisms().map(|f| c.morphism_data(f).clone()).collect();
    let mut element: Vec<(Obj, usize)> = Vec::new();
    let mut offset = vec![0; c.num_objects()];
    for a in c.objects() {
        offset[a.0] = n + element.len();
        for u in 0..p.size(a) {
            morphisms.push(MorphismData::new(
                format!("{}@{}", p.presheaf.label(a, u), c.object_name(a)),
                a,
                star,
            ));
            element.push((a, u));
        }
    }
    let id_star = Mor(morphisms.len());
    morphisms.push(MorphismData::new("1_*", star, star));
    let mut identity: Vec<Mor> = c.objects().map(|a| c.id(a)).collect();
    identity.push(id_star);
    let cat = FinCategory::from_fn(names, morphisms, identity, |g, f| {
        if g == id_star {
            return Some(f);
        }
        if f.0 < n && g.0 < n {
            return c.compose(g, f);
        }
        if f.0 < n && g.0 >= n && g != id_star {
            let (a, u) = element[g.0 - n];
            if c.tgt(f) != a {
                return None;
            }
            let b = c.src(f);
            return Some(Mor(offset[b.0] + p.act(f, u)));
        }
        None
    })?;
    let mut bar: Vec<Mor> = c.morphisms().map(|f| x.bar(f)).collect();
    bar.extend(element.iter().map(|&(a, u)| p.bar(a, u)));
    bar.push(id_star);
    RestrictionCategory::new(cat, bar)
}

/// `ᾱ_A(x) = x · (α_A(x))‾`, an endo-transformation of the source.
pub fn hom_restriction(
    x: &RestrictionCategory,
    p: &RestrictionPresheaf,
    q: &RestrictionPresheaf,
    alpha: &NatTrans,
) -> Result<NatTrans> {
    let c = x.cat();
    check_natural(c, &p.presheaf, &q.presheaf, alpha)?;
    Ok(NatTrans {
        components: c
            .objects()
            .map(|a| (0..p.size(a)).map(|u| p.act(q.bar(a, alpha.at(a, u)), u)).collect())
            .collect(),
    })
}

fn restricted_unchecked(p: &RestrictionPresheaf, q: &RestrictionPresheaf, c: &FinCategory, alpha: &NatTrans) -> NatTrans {
    NatTrans {
        components: c
            .objects()
            .map(|a| (0..p.size(a)).map(|u| p.act(q.bar(a, alpha.at(a, u)), u)).collect())
            .collect(),
    }
}

/// `α ⌣ β` iff `α ∘ β̄ = β ∘ ᾱ`.
pub fn nat_compatible(c: &FinCategory, p: &RestrictionPresheaf, q: &RestrictionPresheaf, alpha: &NatTrans, beta: &NatTrans) -> bool {
    let ab = restricted_unchecked(p, q, c, alpha);
    let bb = restricted_unchecked(p, q, c, beta);
    bb.then(alpha) == ab.then(beta)
}

/// `α ≤ β` iff `α = β ∘ ᾱ`.
pub fn nat_leq(c: &FinCategory, p: &RestrictionPresheaf, q: &RestrictionPresheaf, alpha: &NatTrans, beta: &NatTrans) -> bool {
    restricted_unchecked(p, q, c, alpha).then(beta) == *alpha
}

/// Componentwise join of a compatible set of transformations `P ⇒ Q`.
pub fn nat_join(
    x: &RestrictionCategory,
    p: &JoinRestrictionPresheaf,
    q: &JoinRestrictionPresheaf,
    family: &[NatTrans],
) -> Result<NatTrans> {
    let c = x.cat();
    for alpha in family {
        check_natural(c, &p.rp.presheaf, &q.rp.presheaf, alpha)?;
    }
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate().skip(i + 1) {
            if !nat_compatible(c, &p.rp, &q.rp, a, b) {
                return Err(Error::IncompatibleFamily(i, j));
            }
        }
    }
    let components = c
        .objects()
        .map(|a| {
            (0..p.rp.size(a))
                .map(|u| {
                    let vals: Vec<usize> = family.iter().map(|al| al.at(a, u)).collect();
                    q.join(a, &vals).ok_or_else(|| {
                        Error::NotRestrictionPresheaf(format!("no join of {vals:?} at {}", c.object_name(a)))
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let out = NatTrans { components };
    check_natural(c, &p.rp.presheaf, &q.rp.presheaf, &out)
        .map_err(|e| Error::invariant(format!("componentwise join is not natural: {e}")))?;
    Ok(out)
}

/// A finite full subcategory of restriction presheaves: the listed presheaves
/// and every natural transformation between them, with `ᾱ` as restriction.
#[derive(Debug, Clone)]
pub struct PshCategory {
    pub rc: RestrictionCategory,
    pub transformations: Vec<NatTrans>,
}

pub fn psh_category(x: &RestrictionCategory, objects: &[RestrictionPresheaf]) -> Result<PshCategory> {
    let c = x.cat();
    let mut morphisms = Vec::new();
    let mut transformations = Vec::new();
    let mut index: HashMap<(usize, usize, NatTrans), Mor> = HashMap::new();
    for (i, p) in objects.iter().enumerate() {
        for (j, q) in objects.iter().enumerate() {
            for alpha in nat_transformations(c, &p.presheaf, &q.presheaf, None, None) {
                let id = Mor(morphisms.len());
                morphisms.push(MorphismData::new(format!("a{}", id.0), Obj(i), Obj(j)));
                index.insert((i, j, alpha.clone()), id);
                transformations.push(alpha);
            }
        }
    }
    let identity = objects
        .iter()
        .enumerate()
        .map(|(i, p)| index[&(i, i, NatTrans::identity(&p.presheaf))])
        .collect();
    let ends: Vec<(usize, usize)> = morphisms.iter().map(|m| (m.src.0, m.tgt.0)).collect();
    let names = (0..objects.len()).map(|i| format!("P{i}")).collect();
    let cat = FinCategory::from_fn(names, morphisms, identity, |g, f| {
        let composite = transformations[f.0].then(&transformations[g.0]);
        index.get(&(ends[f.0].0, ends[g.0].1, composite)).copied()
    })?;
    let bar = cat
        .morphisms()
        .map(|m| {
            let (i, j) = ends[m.0];
            let r = restricted_unchecked(&objects[i], &objects[j], c, &transformations[m.0]);
            index.get(&(i, i, r)).copied().ok_or_else(|| Error::invariant("restriction of a transformation is not natural"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PshCategory { rc: RestrictionCategory::new(cat, bar)?, transformations })
}

/// `X(-, a)` with element restrictions and joins from the base.
pub fn yoneda_jr(x: &RestrictionCategory, a: Obj) -> JoinRestrictionPresheaf {
    JoinRestrictionPresheaf::by_search(RestrictionPresheaf::representable(x, a))
}

/// `y(f) : X(-, a) ⇒ X(-, b)`, postcomposition with `f : a -> b`.
pub fn yoneda_map(c: &FinCategory, f: Mor) -> NatTrans {
    let a = c.src(f);
    NatTrans {
        components: c
            .objects()
            .map(|d| c.hom(d, a).iter().map(|&h| c.local_index(c.comp(f, h))).collect())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::build_finset_p;
    use crate::restriction::check_restriction_axioms;

    #[test]
    fn representables_pass_rp_axioms() {
        let fp = build_finset_p(1);
        for a in fp.cat().objects() {
            let y = RestrictionPresheaf::representable(&fp.rc, a);
            assert!(check_rp_axioms(&fp.rc, &y).is_empty());
            let col = collage(&fp.rc, &y).unwrap();
            assert!(check_restriction_axioms(&col).is_empty());
        }
    }

    #[test]
    fn total_elements_over_trivial_restriction() {
        let fp = build_finset_p(1);
        let t = RestrictionCategory::trivial(fp.cat().clone());
        let p = RestrictionPresheaf::total(fp.cat(), Presheaf::terminal(fp.cat()));
        assert!(check_rp_axioms(&t, &p).is_empty());
    }

    #[test]
    fn mutant_element_bar_is_reported() {
        let fp = build_finset_p(1);
        let y = RestrictionPresheaf::representable(&fp.rc, Obj(1));
        // the identity of 1 has restriction 1; claim it is nowhere defined
        let c = fp.cat();
        let k = c.local_index(c.id(Obj(1)));
        let nowhere = c.hom(Obj(1), Obj(1))[0];
        let bad = y.with_bar(Obj(1), k, nowhere);
        assert!(!check_rp_axioms(&fp.rc, &bad).is_empty());
        assert!(!check_restriction_axioms(&collage(&fp.rc, &bad).unwrap()).is_empty());
    }

    #[test]
    fn elements_from_different_objects_are_rejected() {
        let fp = build_finset_p(1);
        let y = RestrictionPresheaf::representable(&fp.rc, Obj(1));
        assert!(element_leq(&y, (Obj(0), 0), (Obj(1), 0)).is_err());
        assert!(element_leq(&y, (Obj(1), 0), (Obj(1), 0)).unwrap());
    }

    #[test]
    fn representables_are_join_restriction_presheaves() {
        let fp = build_finset_p(2);
        for a in fp.cat().objects() {
            let y = yoneda_jr(&fp.rc, a);
            assert!(check_jrp_axioms(&fp.rc, &y, FamilyBound::default()).is_empty());
        }
    }

    #[test]
    fn hom_restriction_of_identity_is_identity() {
        let fp = build_finset_p(1);
        let y = RestrictionPresheaf::representable(&fp.rc, Obj(1));
        let id = NatTrans::identity(&y.presheaf);
        assert_eq!(hom_restriction(&fp.rc, &y, &y, &id).unwrap(), id);
    }

    #[test]
    fn presheaf_category_is_a_join_restriction_category() {
        let fp = build_finset_p(1);
        let objs: Vec<RestrictionPresheaf> =
            fp.cat().objects().map(|a| RestrictionPresheaf::representable(&fp.rc, a)).collect();
        let psh = psh_category(&fp.rc, &objs).unwrap();
        assert!(check_restriction_axioms(&psh.rc).is_empty());
        assert!(join::check_join_axioms(&psh.rc, FamilyBound::default()).is_empty());
    }
}
