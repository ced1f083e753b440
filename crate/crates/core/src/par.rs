//! Partial-map categories `Par(C, M)`, total maps with restriction monics,
//! and splitting of restriction idempotents.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::cat::{FinCategory, Mor, MorphismData, Obj, SubCategory};
use crate::error::{Error, Result};
use crate::functor::Functor;
use crate::limits;
use crate::mcat::{matching_colimit, matching_diagram, MCategory};
use crate::restriction::{total_subcategory, RestrictionCategory};

/// A span `A <-m- D -f-> B` with `m ∈ M`, stored as the representative of its
/// iso class minimising `(D, m, f)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ParMorphism {
    pub src: Obj,
    pub tgt: Obj,
    pub m: Mor,
    pub f: Mor,
}

/// Canonical representative of the span `(m, f)`.
pub fn canonical_span(mc: &MCategory, m: Mor, f: Mor) -> ParMorphism {
    let c = mc.cat();
    let d = c.src(m);
    let mut best = (d, m, f);
    for phi in c.isos_into(d) {
        let cand = (c.src(phi), c.comp(m, phi), c.comp(f, phi));
        if cand < best {
            best = cand;
        }
    }
    ParMorphism { src: c.tgt(m), tgt: c.tgt(f), m: best.1, f: best.2 }
}

/// `Par(C, M)` with the span behind each morphism.
#[derive(Debug, Clone)]
pub struct Par {
    pub rc: RestrictionCategory,
    spans: Vec<ParMorphism>,
    index: HashMap<(Mor, Mor), Mor>,
}

impl Par {
    pub fn cat(&self) -> &FinCategory {
        self.rc.cat()
    }

    pub fn span(&self, x: Mor) -> ParMorphism {
        self.spans[x.0]
    }

    pub fn spans(&self) -> &[ParMorphism] {
        &self.spans
    }

    /// The morphism for an arbitrary span `(m, f)`.
    pub fn lookup(&self, mc: &MCategory, m: Mor, f: Mor) -> Option<Mor> {
        let s = canonical_span(mc, m, f);
        self.index.get(&(s.m, s.f)).copied()
    }

    /// The total map `(1, f)`.
    pub fn total(&self, mc: &MCategory, f: Mor) -> Mor {
        let c = mc.cat();
        self.lookup(mc, c.id(c.src(f)), f).expect("every (1, f) is a span")
    }
}

pub fn par(mc: &MCategory) -> Result<Par> {
    let c = mc.cat();
    let mut set = BTreeSet::new();
    for m in mc.monics() {
        for &f in &c.out_of_object(c.src(m)) {
            set.insert(canonical_span(mc, m, f));
        }
    }
    let mut spans: Vec<ParMorphism> = set.into_iter().collect();
    spans.sort_by_key(|s| (s.src, s.tgt, s.m, s.f));
    let index: HashMap<(Mor, Mor), Mor> =
        spans.iter().enumerate().map(|(i, s)| ((s.m, s.f), Mor(i))).collect();
    let lookup = |m: Mor, f: Mor| -> Option<Mor> {
        let s = canonical_span(mc, m, f);
        index.get(&(s.m, s.f)).copied()
    };
    let identity = c
        .objects()
        .map(|a| lookup(c.id(a), c.id(a)).ok_or_else(|| Error::NotGeometric("identity is not in M".into())))
        .collect::<Result<Vec<_>>>()?;
    let morphisms = spans
        .iter()
        .map(|s| MorphismData::new(format!("({},{})", c.name(s.m), c.name(s.f)), s.src, s.tgt))
        .collect();
    let cat = FinCategory::from_fn(c.object_names().to_vec(), morphisms, identity, |y, x| {
        let (sx, sy) = (spans[x.0], spans[y.0]);
        // (n, g) ∘ (m, f): pull n back along f
        let cone = mc.pullback_of(sy.m, sx.f)?;
        let (p, q) = (cone.legs[0], cone.legs[1]);
        lookup(c.comp(sx.m, q), c.comp(sy.f, p))
    })?;
    let bar = spans
        .iter()
        .map(|s| lookup(s.m, s.m).ok_or_else(|| Error::invariant("(m, m) is not a span")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Par { rc: RestrictionCategory::new(cat, bar)?, spans, index })
}

/// All `φ` with `n ∘ φ = m` and `g ∘ φ = f`, for parallel `x = (m, f)` and
/// `y = (n, g)`. At most one for a mono `n`.
pub fn par_leq_mediators(mc: &MCategory, p: &Par, x: Mor, y: Mor) -> Result<Vec<Mor>> {
    p.cat().check_mor(x)?;
    p.cat().check_mor(y)?;
    if !p.cat().parallel(x, y) {
        return Err(Error::NotParallel(x, y));
    }
    let c = mc.cat();
    let (sx, sy) = (p.span(x), p.span(y));
    Ok(c.hom(c.src(sx.m), c.src(sy.m))
        .iter()
        .copied()
        .filter(|&phi| c.comp(sy.m, phi) == sx.m && c.comp(sy.f, phi) == sx.f)
        .collect())
}

/// `(m, f) ≤ (n, g)` decided by a mediating arrow.
pub fn par_leq_oracle(mc: &MCategory, p: &Par, x: Mor, y: Mor) -> Result<bool> {
    Ok(!par_leq_mediators(mc, p, x, y)?.is_empty())
}

/// The join of a compatible family of `Par` morphisms `A -> B` built from the
/// matching colimit: `(μ, γ)` where `μ` is the induced map into `A` and `γ`
/// the map out of the colimit induced by the `f_i`. `None` when the colimit
/// is missing, `μ ∉ M`, or the `f_i` do not form a cocone.
pub fn join_by_construction(mc: &MCategory, p: &Par, family: &[Mor]) -> Result<Option<Mor>> {
    let Some(&first) = family.first() else {
        return Err(Error::IllFormed("the construction needs the endpoints of a family; use join_at".into()));
    };
    let s = p.span(first);
    join_at(mc, p, s.src, s.tgt, family)
}

/// As [`join_by_construction`], with explicit endpoints so the empty family
/// is allowed.
pub fn join_at(mc: &MCategory, p: &Par, a: Obj, b: Obj, family: &[Mor]) -> Result<Option<Mor>> {
    let c = mc.cat();
    let spans: Vec<ParMorphism> = family.iter().map(|&x| p.span(x)).collect();
    if spans.iter().any(|s| s.src != a || s.tgt != b) {
        return Err(Error::IllFormed("family members are not all in one hom-set".into()));
    }
    let ms: Vec<Mor> = spans.iter().map(|s| s.m).collect();
    let md = matching_diagram(mc, a, &ms)?;
    let Some(mcol) = matching_colimit(mc, &md)? else {
        return Ok(None);
    };
    if !mc.in_m(mcol.induced) {
        return Ok(None);
    }
    let k = spans.len();
    let mut legs: Vec<Mor> = spans.iter().map(|s| s.f).collect();
    for (t, &(i, _)) in md.pairs.iter().enumerate() {
        legs.push(c.comp(spans[i].f, md.diagram.morphisms[md.diagram.objects.len() + 2 * t]));
    }
    debug_assert_eq!(legs.len(), k + md.pairs.len());
    let target = limits::Cocone { apex: b, legs };
    if !limits::is_cocone(c, &md.diagram, &target) {
        return Ok(None);
    }
    let Some(gamma) = limits::mediating_map(c, &mcol.colimit, &target) else {
        return Ok(None);
    };
    Ok(p.lookup(mc, mcol.induced, gamma))
}

/// Total maps of a split restriction category with the restriction monics.
#[derive(Debug, Clone)]
pub struct MTotal {
    pub mc: MCategory,
    pub sub: SubCategory,
}

/// A total `m` is a restriction monic when some `r` has `r ∘ m = 1` and
/// `m ∘ r = r̄`.
pub fn is_restriction_monic(x: &RestrictionCategory, m: Mor) -> bool {
    let c = x.cat();
    x.bar(m) == c.id(c.src(m))
        && c.hom(c.tgt(m), c.src(m))
            .iter()
            .any(|&r| c.comp(r, m) == c.id(c.src(m)) && c.comp(m, r) == x.bar(r))
}

pub fn mtotal(x: &RestrictionCategory) -> Result<MTotal> {
    if let Some(&e) = x.unsplit_idempotents().first() {
        return Err(Error::UnsplitIdempotent(e));
    }
    let sub = total_subcategory(x)?;
    let monics: Vec<Mor> = x
        .cat()
        .morphisms()
        .filter(|&m| is_restriction_monic(x, m))
        .map(|m| sub.mor_from_parent[m.0].expect("restriction monics are total"))
        .collect();
    let mc = MCategory::new(sub.cat.clone(), &monics)?;
    Ok(MTotal { mc, sub })
}

/// The comparison `x -> Par(MTotal(x))`, `f ↦ (m, f ∘ m)` where `m` is the
/// section of a splitting of `f̄`.
pub fn comparison(x: &RestrictionCategory, mt: &MTotal, p: &Par) -> Result<Functor> {
    let c = x.cat();
    let objects: Vec<Obj> = c.objects().map(|a| mt.sub.obj_from_parent[a.0].expect("wide")).collect();
    let morphisms = c
        .morphisms()
        .map(|f| {
            let split = c
                .split_idempotent(x.bar(f))
                .ok_or(Error::UnsplitIdempotent(x.bar(f)))?;
            let m = split.section;
            let fm = c.comp(f, m);
            let (Some(tm), Some(tfm)) = (mt.sub.mor_from_parent[m.0], mt.sub.mor_from_parent[fm.0]) else {
                return Err(Error::invariant(format!("splitting of the restriction of {} is not total", c.name(f))));
            };
            p.lookup(&mt.mc, tm, tfm)
                .ok_or_else(|| Error::invariant(format!("span for {} is not in Par", c.name(f))))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Functor { objects, morphisms })
}

/// `K_r(x)`: objects are pairs `(A, e)` with `e` a restriction idempotent.
#[derive(Debug, Clone)]
pub struct Karoubi {
    pub rc: RestrictionCategory,
    pub objects: Vec<(Obj, Mor)>,
    /// Underlying morphism of `x` for each morphism of `K_r(x)`.
    pub underlying: Vec<Mor>,
    /// `A ↦ (A, 1)`.
    pub embedding: Functor,
}

pub fn karoubi_r(x: &RestrictionCategory) -> Result<Karoubi> {
    let c = x.cat();
    let objects: Vec<(Obj, Mor)> =
        c.objects().flat_map(|a| x.restriction_idempotents(a).into_iter().map(move |e| (a, e))).collect();
    let mut morphisms = Vec::new();
    let mut underlying = Vec::new();
    let mut index = HashMap::new();
    let name = |(a, e): (Obj, Mor)| format!("({},{})", c.object_name(a), c.name(e));
    for (i, &(a, e)) in objects.iter().enumerate() {
        for (j, &(b, e2)) in objects.iter().enumerate() {
            for &f in c.hom(a, b) {
                if c.comp(f, e) == f && c.comp(e2, f) == f {
                    index.insert((i, j, f), Mor(morphisms.len()));
                    morphisms.push(MorphismData::new(
                        format!("{}:{}->{}", c.name(f), name((a, e)), name((b, e2))),
                        Obj(i),
                        Obj(j),
                    ));
                    underlying.push(f);
                }
            }
        }
    }
    let identity = objects
        .iter()
        .enumerate()
        .map(|(i, &(_, e))| index[&(i, i, e)])
        .collect();
    let names = objects.iter().map(|&o| name(o)).collect();
    let md: Vec<(usize, usize)> = morphisms.iter().map(|m| (m.src.0, m.tgt.0)).collect();
    let cat = FinCategory::from_fn(names, morphisms, identity, |g, f| {
        index.get(&(md[f.0].0, md[g.0].1, c.comp(underlying[g.0], underlying[f.0]))).copied()
    })?;
    let bar = cat
        .morphisms()
        .map(|f| {
            let (i, _) = md[f.0];
            index
                .get(&(i, i, x.bar(underlying[f.0])))
                .copied()
                .ok_or_else(|| Error::invariant("restriction leaves the splitting"))
        })
        .collect::<Result<Vec<_>>>()?;
    let obj_of = |a: Obj| -> Obj {
        Obj(objects.iter().position(|&(b, e)| b == a && e == c.id(a)).expect("identity idempotent"))
    };
    let embedding = Functor {
        objects: c.objects().map(obj_of).collect(),
        morphisms: c
            .morphisms()
            .map(|f| index[&(obj_of(c.src(f)).0, obj_of(c.tgt(f)).0, f)])
            .collect(),
    };
    Ok(Karoubi { rc: RestrictionCategory::new(cat, bar)?, objects, underlying, embedding })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{build_finset_mcat, MonicClass};
    use crate::restriction::check_restriction_axioms;

    #[test]
    fn par_of_finset_one() {
        let fx = build_finset_mcat(1, MonicClass::Inj);
        let p = par(&fx.mc).unwrap();
        // partial functions on sets of size <= 1: 1 + 1 + 1 + 2
        assert_eq!(p.cat().num_morphisms(), 5);
        assert!(check_restriction_axioms(&p.rc).is_empty());
        assert!(p.rc.is_split());
    }

    #[test]
    fn bar_of_total_is_identity() {
        let fx = build_finset_mcat(2, MonicClass::Inj);
        let p = par(&fx.mc).unwrap();
        for f in fx.cat().morphisms() {
            let t = p.total(&fx.mc, f);
            assert!(p.rc.is_total(t).unwrap());
        }
        let totals = p.cat().morphisms().filter(|&x| p.rc.is_total(x).unwrap()).count();
        assert_eq!(totals, fx.cat().num_morphisms());
    }
}
