//! Finite categories stored as explicit composition tables.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::{LawReport, Violation};

/// Dense object id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Obj(pub usize);

/// Dense morphism id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Mor(pub usize);

impl Obj {
    pub fn idx(self) -> usize {
        self.0
    }
}

impl Mor {
    pub fn idx(self) -> usize {
        self.0
    }
}

impl fmt::Display for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0)
    }
}

impl fmt::Display for Mor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}", self.0)
    }
}

const UNDEFINED: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismData {
    pub name: String,
    pub src: Obj,
    pub tgt: Obj,
}

impl MorphismData {
    pub fn new(name: impl Into<String>, src: Obj, tgt: Obj) -> Self {
        MorphismData { name: name.into(), src, tgt }
    }
}

/// A finite category: objects, typed morphisms, identities and a composition
/// table defined exactly on composable pairs.
///
/// Construction only checks typing and totality of the table; the identity
/// and associativity laws are reported by [`validate_category`] so that
/// deliberately broken fixtures can still be loaded and diagnosed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<MorphismData>,
    identity: Vec<Mor>,
    comp: Vec<usize>,
    homs: Vec<Vec<Mor>>,
    local: Vec<usize>,
    inverse: Vec<Option<Mor>>,
}

impl FinCategory {
    /// Builds a category, asking `compose(g, f)` for `g ∘ f` on every
    /// composable pair.
    pub fn from_fn(
        objects: Vec<String>,
        morphisms: Vec<MorphismData>,
        identity: Vec<Mor>,
        mut compose: impl FnMut(Mor, Mor) -> Option<Mor>,
    ) -> Result<Self> {
        let n_obj = objects.len();
        let n_mor = morphisms.len();
        for (i, m) in morphisms.iter().enumerate() {
            if m.src.0 >= n_obj || m.tgt.0 >= n_obj {
                return Err(Error::IllFormed(format!("morphism {i} has a dangling endpoint")));
            }
        }
        if identity.len() != n_obj {
            return Err(Error::IllFormed("identity map is not total on objects".into()));
        }
        for (a, id) in identity.iter().enumerate() {
            let d = morphisms.get(id.0).ok_or(Error::UnknownMorphism(id.0))?;
            if d.src.0 != a || d.tgt.0 != a {
                return Err(Error::IllFormed(format!(
                    "identity {} of object {a} is not an endomorphism of it",
                    d.name
                )));
            }
        }
        let mut homs = vec![Vec::new(); n_obj * n_obj];
        let mut local = vec![0; n_mor];
        for (i, m) in morphisms.iter().enumerate() {
            let h = &mut homs[m.src.0 * n_obj + m.tgt.0];
            local[i] = h.len();
            h.push(Mor(i));
        }
        let mut comp = vec![UNDEFINED; n_mor * n_mor];
        for g in 0..n_mor {
            for f in 0..n_mor {
                if morphisms[f].tgt != morphisms[g].src {
                    continue;
                }
                let gf = compose(Mor(g), Mor(f)).ok_or_else(|| {
                    Error::IllFormed(format!(
                        "composite {} o {} is missing",
                        morphisms[g].name, morphisms[f].name
                    ))
                })?;
                let d = morphisms.get(gf.0).ok_or(Error::UnknownMorphism(gf.0))?;
                if d.src != morphisms[f].src || d.tgt != morphisms[g].tgt {
                    return Err(Error::IllFormed(format!(
                        "composite {} o {} = {} has the wrong type",
                        morphisms[g].name, morphisms[f].name, d.name
                    )));
                }
                comp[g * n_mor + f] = gf.0;
            }
        }
        let mut cat = FinCategory {
            objects,
            morphisms,
            identity,
            comp,
            homs,
            local,
            inverse: Vec::new(),
        };
        cat.inverse = (0..n_mor).map(|m| cat.find_inverse(Mor(m))).collect();
        Ok(cat)
    }

    fn find_inverse(&self, m: Mor) -> Option<Mor> {
        let (a, b) = (self.src(m), self.tgt(m));
        self.hom(b, a)
            .iter()
            .copied()
            .find(|&n| self.comp(n, m) == self.id(a) && self.comp(m, n) == self.id(b))
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = Obj> + Clone {
        (0..self.objects.len()).map(Obj)
    }

    pub fn morphisms(&self) -> impl Iterator<Item = Mor> + Clone {
        (0..self.morphisms.len()).map(Mor)
    }

    pub fn object_name(&self, a: Obj) -> &str {
        &self.objects[a.0]
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn morphism_data(&self, m: Mor) -> &MorphismData {
        &self.morphisms[m.0]
    }

    pub fn name(&self, m: Mor) -> &str {
        &self.morphisms[m.0].name
    }

    pub fn object_by_name(&self, name: &str) -> Option<Obj> {
        self.objects.iter().position(|o| o == name).map(Obj)
    }

    pub fn morphism_by_name(&self, name: &str) -> Option<Mor> {
        self.morphisms.iter().position(|m| m.name == name).map(Mor)
    }

    pub fn check_obj(&self, a: Obj) -> Result<()> {
        if a.0 < self.objects.len() {
            Ok(())
        } else {
            Err(Error::UnknownObject(a.0))
        }
    }

    pub fn check_mor(&self, m: Mor) -> Result<()> {
        if m.0 < self.morphisms.len() {
            Ok(())
        } else {
            Err(Error::UnknownMorphism(m.0))
        }
    }

    pub fn src(&self, m: Mor) -> Obj {
        self.morphisms[m.0].src
    }

    pub fn tgt(&self, m: Mor) -> Obj {
        self.morphisms[m.0].tgt
    }

    pub fn id(&self, a: Obj) -> Mor {
        self.identity[a.0]
    }

    pub fn is_identity(&self, m: Mor) -> bool {
        self.identity[self.src(m).0] == m
    }

    pub fn parallel(&self, f: Mor, g: Mor) -> bool {
        self.src(f) == self.src(g) && self.tgt(f) == self.tgt(g)
    }

    /// `g ∘ f`, if `tgt f = src g`.
    pub fn compose(&self, g: Mor, f: Mor) -> Option<Mor> {
        let r = *self.comp.get(g.0 * self.morphisms.len() + f.0)?;
        (r != UNDEFINED).then_some(Mor(r))
    }

    /// `g ∘ f`; panics when the pair is not composable.
    pub fn comp(&self, g: Mor, f: Mor) -> Mor {
        self.compose(g, f).unwrap_or_else(|| {
            panic!("{} o {} is not composable", self.name(g), self.name(f))
        })
    }

    /// Composite of a path given in diagrammatic-reverse order: `comps(&[h, g, f]) = h ∘ g ∘ f`.
    pub fn comps(&self, path: &[Mor]) -> Mor {
        let (last, rest) = path.split_last().expect("empty path");
        rest.iter().rev().fold(*last, |acc, &m| self.comp(m, acc))
    }

    pub fn hom(&self, a: Obj, b: Obj) -> &[Mor] {
        &self.homs[a.0 * self.objects.len() + b.0]
    }

    /// Position of `m` inside its hom-set.
    pub fn local_index(&self, m: Mor) -> usize {
        self.local[m.0]
    }

    pub fn into_object(&self, b: Obj) -> Vec<Mor> {
        self.objects().flat_map(|a| self.hom(a, b).iter().copied()).collect()
    }

    pub fn out_of_object(&self, a: Obj) -> Vec<Mor> {
        self.objects().flat_map(|b| self.hom(a, b).iter().copied()).collect()
    }

    pub fn inverse(&self, m: Mor) -> Option<Mor> {
        self.inverse[m.0]
    }

    pub fn is_iso(&self, m: Mor) -> bool {
        self.inverse[m.0].is_some()
    }

    /// Isomorphisms with target `b`, in id order.
    pub fn isos_into(&self, b: Obj) -> Vec<Mor> {
        self.into_object(b).into_iter().filter(|&m| self.is_iso(m)).collect()
    }

    pub fn is_idempotent(&self, e: Mor) -> bool {
        self.src(e) == self.tgt(e) && self.comp(e, e) == e
    }

    pub fn is_mono(&self, m: Mor) -> Result<bool> {
        self.check_mor(m)?;
        let a = self.src(m);
        for q in self.objects() {
            let mut seen = vec![false; self.num_morphisms()];
            for &u in self.hom(q, a) {
                let mu = self.comp(m, u);
                if seen[mu.0] {
                    return Ok(false);
                }
                seen[mu.0] = true;
            }
        }
        Ok(true)
    }

    pub fn is_epi(&self, m: Mor) -> Result<bool> {
        self.check_mor(m)?;
        let b = self.tgt(m);
        for q in self.objects() {
            let mut seen = vec![false; self.num_morphisms()];
            for &u in self.hom(b, q) {
                let um = self.comp(u, m);
                if seen[um.0] {
                    return Ok(false);
                }
                seen[um.0] = true;
            }
        }
        Ok(true)
    }

    /// A splitting `e = s ∘ r`, `r ∘ s = 1` of an idempotent, chosen with the
    /// smallest (object, s, r) ids.
    pub fn split_idempotent(&self, e: Mor) -> Option<Splitting> {
        let a = self.src(e);
        for b in self.objects() {
            for &s in self.hom(b, a) {
                for &r in self.hom(a, b) {
                    if self.comp(s, r) == e && self.comp(r, s) == self.id(b) {
                        return Some(Splitting { object: b, section: s, retraction: r });
                    }
                }
            }
        }
        None
    }

    /// Sub-category on the kept objects and morphisms. Fails if the kept
    /// morphisms are not closed under identities and composition.
    pub fn subcategory(&self, keep_obj: &[bool], keep_mor: &[bool]) -> Result<SubCategory> {
        let obj_to_parent: Vec<Obj> = self.objects().filter(|a| keep_obj[a.0]).collect();
        let mut obj_from_parent = vec![None; self.num_objects()];
        for (i, a) in obj_to_parent.iter().enumerate() {
            obj_from_parent[a.0] = Some(Obj(i));
        }
        let mor_to_parent: Vec<Mor> = self
            .morphisms()
            .filter(|m| {
                keep_mor[m.0] && keep_obj[self.src(*m).0] && keep_obj[self.tgt(*m).0]
            })
            .collect();
        let mut mor_from_parent = vec![None; self.num_morphisms()];
        for (i, m) in mor_to_parent.iter().enumerate() {
            mor_from_parent[m.0] = Some(Mor(i));
        }
        let morphisms = mor_to_parent
            .iter()
            .map(|&m| {
                let d = self.morphism_data(m);
                MorphismData::new(
                    d.name.clone(),
                    obj_from_parent[d.src.0].expect("kept"),
                    obj_from_parent[d.tgt.0].expect("kept"),
                )
            })
            .collect();
        let identity = obj_to_parent
            .iter()
            .map(|&a| {
                mor_from_parent[self.id(a).0].ok_or_else(|| {
                    Error::IllFormed(format!("identity of {} not kept", self.object_name(a)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let cat = FinCategory::from_fn(
            obj_to_parent.iter().map(|&a| self.object_name(a).to_string()).collect(),
            morphisms,
            identity,
            |g, f| mor_from_parent[self.comp(mor_to_parent[g.0], mor_to_parent[f.0]).0],
        )?;
        Ok(SubCategory { cat, obj_to_parent, obj_from_parent, mor_to_parent, mor_from_parent })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Splitting {
    pub object: Obj,
    /// `s : B -> A`
    pub section: Mor,
    /// `r : A -> B`
    pub retraction: Mor,
}

#[derive(Debug, Clone)]
pub struct SubCategory {
    pub cat: FinCategory,
    pub obj_to_parent: Vec<Obj>,
    pub obj_from_parent: Vec<Option<Obj>>,
    pub mor_to_parent: Vec<Mor>,
    pub mor_from_parent: Vec<Option<Mor>>,
}

/// Lists every violated identity and associativity instance.
pub fn validate_category(c: &FinCategory) -> LawReport {
    let mut report = LawReport::new();
    for f in c.morphisms() {
        if c.comp(c.id(c.tgt(f)), f) != f {
            report.push(Violation::new("IDL", vec![f.0]).with_note(format!(
                "id o {} != {}",
                c.name(f),
                c.name(f)
            )));
        }
        if c.comp(f, c.id(c.src(f))) != f {
            report.push(Violation::new("IDR", vec![f.0]).with_note(format!(
                "{} o id != {}",
                c.name(f),
                c.name(f)
            )));
        }
    }
    for f in c.morphisms() {
        for &g in &c.out_of_object(c.tgt(f)) {
            let gf = c.comp(g, f);
            for &h in &c.out_of_object(c.tgt(g)) {
                if c.comp(h, gf) != c.comp(c.comp(h, g), f) {
                    report.push(Violation::new("ASSOC", vec![h.0, g.0, f.0]));
                }
            }
        }
    }
    report
}

/// Builds a category from explicit composite triples `(g, f, g∘f)`, filling
/// in composites with identities when they are not listed.
pub fn from_triples(
    objects: Vec<String>,
    morphisms: Vec<MorphismData>,
    identity: Vec<Mor>,
    triples: &[(Mor, Mor, Mor)],
) -> Result<FinCategory> {
    let n = morphisms.len();
    let mut table = vec![None; n * n];
    for &(g, f, gf) in triples {
        if g.0 >= n || f.0 >= n {
            return Err(Error::UnknownMorphism(g.0.max(f.0)));
        }
        table[g.0 * n + f.0] = Some(gf);
    }
    let is_id = |m: Mor| identity.iter().any(|&i| i == m);
    FinCategory::from_fn(objects, morphisms.clone(), identity.clone(), |g, f| {
        table[g.0 * n + f.0].or_else(|| {
            if is_id(g) {
                Some(f)
            } else if is_id(f) {
                Some(g)
            } else {
                None
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Objects a, b; morphisms 1a, 1b, f, g : a -> b.
    fn two_parallel(bad: bool) -> FinCategory {
        let objects = vec!["a".to_string(), "b".to_string()];
        let morphisms = vec![
            MorphismData::new("1a", Obj(0), Obj(0)),
            MorphismData::new("1b", Obj(1), Obj(1)),
            MorphismData::new("f", Obj(0), Obj(1)),
            MorphismData::new("g", Obj(0), Obj(1)),
        ];
        let mut triples = vec![];
        if bad {
            triples.push((Mor(1), Mor(2), Mor(3)));
        }
        from_triples(objects, morphisms, vec![Mor(0), Mor(1)], &triples).unwrap()
    }

    #[test]
    fn terminal_category_is_valid() {
        let c = FinCategory::from_fn(
            vec!["*".into()],
            vec![MorphismData::new("1", Obj(0), Obj(0))],
            vec![Mor(0)],
            |_, _| Some(Mor(0)),
        )
        .unwrap();
        assert!(validate_category(&c).is_empty());
        assert!(c.is_mono(Mor(0)).unwrap());
        assert!(c.is_iso(Mor(0)));
    }

    #[test]
    fn mis_set_identity_composite_is_reported() {
        let good = two_parallel(false);
        assert!(validate_category(&good).is_empty());
        let bad = two_parallel(true);
        let report = validate_category(&bad);
        let idl: Vec<_> = report.with_tag("IDL").collect();
        assert_eq!(idl.len(), 1);
        assert_eq!(idl[0].ids, vec![2]);
    }

    #[test]
    fn structural_errors_are_rejected() {
        let err = FinCategory::from_fn(
            vec!["a".into()],
            vec![MorphismData::new("1", Obj(0), Obj(1))],
            vec![Mor(0)],
            |_, _| Some(Mor(0)),
        );
        assert!(matches!(err, Err(Error::IllFormed(_))));
        let missing = from_triples(
            vec!["a".into()],
            vec![MorphismData::new("1", Obj(0), Obj(0)), MorphismData::new("e", Obj(0), Obj(0))],
            vec![Mor(0)],
            &[],
        );
        assert!(missing.is_err());
    }

    #[test]
    fn unknown_ids_are_errors() {
        let c = two_parallel(false);
        assert!(matches!(c.is_mono(Mor(9)), Err(Error::UnknownMorphism(9))));
    }
}
