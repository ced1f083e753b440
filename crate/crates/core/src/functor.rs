//! Functors between finite categories and isomorphism search.

use std::ops::ControlFlow;

use crate::cat::{FinCategory, Mor, Obj};
use crate::error::{Error, Result};
use crate::restriction::RestrictionCategory;
use crate::solve::Search;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Functor {
    pub objects: Vec<Obj>,
    pub morphisms: Vec<Mor>,
}

impl Functor {
    pub fn identity(c: &FinCategory) -> Self {
        Functor { objects: c.objects().collect(), morphisms: c.morphisms().collect() }
    }

    pub fn apply(&self, m: Mor) -> Mor {
        self.morphisms[m.0]
    }

    pub fn apply_obj(&self, a: Obj) -> Obj {
        self.objects[a.0]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Functor) -> Functor {
        Functor {
            objects: self.objects.iter().map(|a| other.objects[a.0]).collect(),
            morphisms: self.morphisms.iter().map(|m| other.morphisms[m.0]).collect(),
        }
    }

    pub fn check(&self, src: &FinCategory, tgt: &FinCategory) -> Result<()> {
        if self.objects.len() != src.num_objects() || self.morphisms.len() != src.num_morphisms() {
            return Err(Error::NotAFunctor("assignment sizes do not match the source".into()));
        }
        for &a in &self.objects {
            tgt.check_obj(a).map_err(|e| Error::NotAFunctor(e.to_string()))?;
        }
        for f in src.morphisms() {
            let ff = self.apply(f);
            tgt.check_mor(ff).map_err(|e| Error::NotAFunctor(e.to_string()))?;
            if tgt.src(ff) != self.apply_obj(src.src(f)) || tgt.tgt(ff) != self.apply_obj(src.tgt(f)) {
                return Err(Error::NotAFunctor(format!("{} is sent to a mistyped morphism", src.name(f))));
            }
        }
        for a in src.objects() {
            if self.apply(src.id(a)) != tgt.id(self.apply_obj(a)) {
                return Err(Error::NotAFunctor(format!(
                    "identity of {} not preserved",
                    src.object_name(a)
                )));
            }
        }
        for f in src.morphisms() {
            for &g in &src.out_of_object(src.tgt(f)) {
                if self.apply(src.comp(g, f)) != tgt.comp(self.apply(g), self.apply(f)) {
                    return Err(Error::NotAFunctor(format!(
                        "composite {} o {} not preserved",
                        src.name(g),
                        src.name(f)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Functor that also preserves restriction.
    pub fn check_restriction(&self, src: &RestrictionCategory, tgt: &RestrictionCategory) -> Result<()> {
        self.check(src.cat(), tgt.cat())?;
        for f in src.cat().morphisms() {
            if self.apply(src.bar(f)) != tgt.bar(self.apply(f)) {
                return Err(Error::NotRestrictionFunctor(f));
            }
        }
        Ok(())
    }

    pub fn is_full_and_faithful(&self, src: &FinCategory, tgt: &FinCategory) -> bool {
        src.objects().all(|a| {
            src.objects().all(|b| {
                let hom = src.hom(a, b);
                let image = tgt.hom(self.apply_obj(a), self.apply_obj(b));
                let mut hit = vec![false; image.len()];
                for &f in hom {
                    let k = tgt.local_index(self.apply(f));
                    if hit[k] {
                        return false;
                    }
                    hit[k] = true;
                }
                hit.iter().all(|&h| h)
            })
        })
    }

    pub fn is_bijective(&self, src: &FinCategory, tgt: &FinCategory) -> bool {
        if src.num_objects() != tgt.num_objects() || src.num_morphisms() != tgt.num_morphisms() {
            return false;
        }
        let mut seen_o = vec![false; tgt.num_objects()];
        let mut seen_m = vec![false; tgt.num_morphisms()];
        self.objects.iter().all(|a| !std::mem::replace(&mut seen_o[a.0], true))
            && self.morphisms.iter().all(|m| !std::mem::replace(&mut seen_m[m.0], true))
    }

    /// Inverse of a bijective functor.
    pub fn inverse(&self, tgt: &FinCategory) -> Functor {
        let mut objects = vec![Obj(0); tgt.num_objects()];
        let mut morphisms = vec![Mor(0); tgt.num_morphisms()];
        for (i, a) in self.objects.iter().enumerate() {
            objects[a.0] = Obj(i);
        }
        for (i, m) in self.morphisms.iter().enumerate() {
            morphisms[m.0] = Mor(i);
        }
        Functor { objects, morphisms }
    }
}

/// Extra structure an isomorphism has to respect.
#[derive(Debug, Clone, Copy, Default)]
pub struct IsoConstraints<'a> {
    /// Restriction tables of source and target.
    pub bar: Option<(&'a [Mor], &'a [Mor])>,
    /// A distinguished class of morphisms on each side (e.g. the monics `M`).
    pub marked: Option<(&'a [bool], &'a [bool])>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct MorSig {
    identity: bool,
    iso: bool,
    mono: bool,
    epi: bool,
    idempotent: bool,
    hom: usize,
    back: usize,
    endo_src: usize,
    endo_tgt: usize,
    left_fix: usize,
    right_fix: usize,
    total: Option<bool>,
    ridem: Option<bool>,
    marked: Option<bool>,
}

fn mor_sigs(c: &FinCategory, bar: Option<&[Mor]>, marked: Option<&[bool]>) -> Vec<MorSig> {
    c.morphisms()
        .map(|m| {
            let (a, b) = (c.src(m), c.tgt(m));
            MorSig {
                identity: c.is_identity(m),
                iso: c.is_iso(m),
                mono: c.is_mono(m).unwrap_or(false),
                epi: c.is_epi(m).unwrap_or(false),
                idempotent: c.is_idempotent(m),
                hom: c.hom(a, b).len(),
                back: c.hom(b, a).len(),
                endo_src: c.hom(a, a).len(),
                endo_tgt: c.hom(b, b).len(),
                left_fix: c.hom(b, b).iter().filter(|&&g| c.comp(g, m) == m).count(),
                right_fix: c.hom(a, a).iter().filter(|&&g| c.comp(m, g) == m).count(),
                total: bar.map(|t| t[m.0] == c.id(a)),
                ridem: bar.map(|t| t[m.0] == m),
                marked: marked.map(|k| k[m.0]),
            }
        })
        .collect()
}

fn obj_sig(c: &FinCategory, a: Obj) -> (usize, Vec<usize>, Vec<usize>) {
    let mut out: Vec<usize> = c.objects().map(|b| c.hom(a, b).len()).collect();
    let mut inc: Vec<usize> = c.objects().map(|b| c.hom(b, a).len()).collect();
    out.sort_unstable();
    inc.sort_unstable();
    (c.hom(a, a).len(), out, inc)
}

/// Searches for an isomorphism of categories `c -> d` respecting the given
/// constraints. Objects are matched first, then morphisms are assigned with
/// propagation through composition and restriction.
pub fn find_isomorphism(c: &FinCategory, d: &FinCategory, cons: IsoConstraints<'_>) -> Option<Functor> {
    if c.num_objects() != d.num_objects() || c.num_morphisms() != d.num_morphisms() {
        return None;
    }
    let sig_c = mor_sigs(c, cons.bar.map(|b| b.0), cons.marked.map(|m| m.0));
    let sig_d = mor_sigs(d, cons.bar.map(|b| b.1), cons.marked.map(|m| m.1));
    {
        let (mut a, mut b) = (sig_c.clone(), sig_d.clone());
        a.sort();
        b.sort();
        if a != b {
            return None;
        }
    }
    let osig_d: Vec<_> = d.objects().map(|a| obj_sig(d, a)).collect();
    let mut objs = Search::new(vec![d.num_objects(); c.num_objects()]);
    let g = objs.new_group(d.num_objects());
    for a in c.objects() {
        let s = obj_sig(c, a);
        objs.set_group(a.0, g);
        objs.restrict(a.0, osig_d.iter().map(|t| *t == s).collect());
    }
    let mut result = None;
    objs.for_each(|assign| {
        let objects: Vec<Obj> = assign.iter().map(|&b| Obj(b)).collect();
        let mut st = MorAssign {
            c,
            d,
            objects: &objects,
            sig_c: &sig_c,
            sig_d: &sig_d,
            bar: cons.bar,
            assign: vec![None; c.num_morphisms()],
            used: vec![false; d.num_morphisms()],
            trail: Vec::new(),
        };
        let seeds: Vec<(Mor, Mor)> = c.objects().map(|a| (c.id(a), d.id(objects[a.0]))).collect();
        if !seeds.into_iter().all(|(m, v)| st.assign(m, v)) {
            return ControlFlow::Continue(());
        }
        if st.dfs(0) {
            let morphisms = st.assign.iter().map(|m| m.expect("complete")).collect();
            result = Some(Functor { objects, morphisms });
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    result
}

struct MorAssign<'a> {
    c: &'a FinCategory,
    d: &'a FinCategory,
    objects: &'a [Obj],
    sig_c: &'a [MorSig],
    sig_d: &'a [MorSig],
    bar: Option<(&'a [Mor], &'a [Mor])>,
    assign: Vec<Option<Mor>>,
    used: Vec<bool>,
    trail: Vec<Mor>,
}

impl MorAssign<'_> {
    fn fits(&self, m: Mor, v: Mor) -> bool {
        self.d.src(v) == self.objects[self.c.src(m).0]
            && self.d.tgt(v) == self.objects[self.c.tgt(m).0]
            && self.sig_c[m.0] == self.sig_d[v.0]
    }

    fn assign(&mut self, m: Mor, v: Mor) -> bool {
        let mut queue = vec![(m, v)];
        while let Some((m, v)) = queue.pop() {
            if let Some(cur) = self.assign[m.0] {
                if cur != v {
                    return false;
                }
                continue;
            }
            if self.used[v.0] || !self.fits(m, v) {
                return false;
            }
            self.assign[m.0] = Some(v);
            self.used[v.0] = true;
            self.trail.push(m);
            let (c, d) = (self.c, self.d);
            for &k in &c.into_object(c.src(m)) {
                if let Some(fk) = self.assign[k.0] {
                    queue.push((c.comp(m, k), d.comp(v, fk)));
                }
            }
            for &k in &c.out_of_object(c.tgt(m)) {
                if let Some(fk) = self.assign[k.0] {
                    queue.push((c.comp(k, m), d.comp(fk, v)));
                }
            }
            if let Some((bc, bd)) = self.bar {
                queue.push((bc[m.0], bd[v.0]));
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let m = self.trail.pop().expect("trail");
            let v = self.assign[m.0].take().expect("assigned");
            self.used[v.0] = false;
        }
    }

    fn dfs(&mut self, mut next: usize) -> bool {
        while next < self.c.num_morphisms() && self.assign[next].is_some() {
            next += 1;
        }
        if next == self.c.num_morphisms() {
            return true;
        }
        let m = Mor(next);
        let a = self.objects[self.c.src(m).0];
        let b = self.objects[self.c.tgt(m).0];
        let candidates: Vec<Mor> = self.d.hom(a, b).to_vec();
        for v in candidates {
            if self.used[v.0] || !self.fits(m, v) {
                continue;
            }
            let mark = self.trail.len();
            if self.assign(m, v) && self.dfs(next + 1) {
                return true;
            }
            self.undo(mark);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat::MorphismData;

    fn arrow_category(names: [&str; 3]) -> FinCategory {
        crate::cat::from_triples(
            vec!["a".into(), "b".into()],
            vec![
                MorphismData::new(names[0], Obj(0), Obj(0)),
                MorphismData::new(names[1], Obj(1), Obj(1)),
                MorphismData::new(names[2], Obj(0), Obj(1)),
            ],
            vec![Mor(0), Mor(1)],
            &[],
        )
        .unwrap()
    }

    #[test]
    fn identity_functor_checks() {
        let c = arrow_category(["1a", "1b", "f"]);
        let id = Functor::identity(&c);
        id.check(&c, &c).unwrap();
        assert!(id.is_full_and_faithful(&c, &c));
        assert!(id.is_bijective(&c, &c));
    }

    #[test]
    fn iso_search_finds_renaming() {
        let c = arrow_category(["1a", "1b", "f"]);
        let d = crate::cat::from_triples(
            vec!["y".into(), "x".into()],
            vec![
                MorphismData::new("g", Obj(1), Obj(0)),
                MorphismData::new("1y", Obj(0), Obj(0)),
                MorphismData::new("1x", Obj(1), Obj(1)),
            ],
            vec![Mor(1), Mor(2)],
            &[],
        )
        .unwrap();
        let f = find_isomorphism(&c, &d, IsoConstraints::default()).unwrap();
        f.check(&c, &d).unwrap();
        assert_eq!(f.objects, vec![Obj(1), Obj(0)]);
        assert_eq!(f.apply(Mor(2)), Mor(0));
    }

    #[test]
    fn non_functor_is_rejected() {
        let c = arrow_category(["1a", "1b", "f"]);
        let bad = Functor { objects: vec![Obj(0), Obj(0)], morphisms: vec![Mor(0), Mor(0), Mor(2)] };
        assert!(matches!(bad.check(&c, &c), Err(Error::NotAFunctor(_))));
    }
}
