//! Diagrams, cones and cocones, with pullbacks and colimits found by
//! exhaustive search and certified by checking the universal property against
//! every (co)cone.

use std::collections::HashSet;
use std::ops::ControlFlow;

use crate::cat::{FinCategory, Mor, Obj};
use crate::error::{Error, Result};
use crate::solve::Search;

/// A functor from a finite shape into a target category.
#[derive(Debug, Clone)]
pub struct Diagram {
    pub shape: FinCategory,
    pub objects: Vec<Obj>,
    pub morphisms: Vec<Mor>,
}

impl Diagram {
    pub fn new(shape: FinCategory, objects: Vec<Obj>, morphisms: Vec<Mor>) -> Self {
        Diagram { shape, objects, morphisms }
    }

    /// Empty shape.
    pub fn empty() -> Self {
        let shape = FinCategory::from_fn(vec![], vec![], vec![], |_, _| None)
            .expect("empty category is well formed");
        Diagram { shape, objects: vec![], morphisms: vec![] }
    }

    pub fn validate(&self, c: &FinCategory) -> Result<()> {
        let s = &self.shape;
        if self.objects.len() != s.num_objects() || self.morphisms.len() != s.num_morphisms() {
            return Err(Error::InvalidDiagram("assignment sizes do not match the shape".into()));
        }
        for &a in &self.objects {
            c.check_obj(a)?;
        }
        for u in s.morphisms() {
            let m = self.morphisms[u.0];
            c.check_mor(m)?;
            if c.src(m) != self.objects[s.src(u).0] || c.tgt(m) != self.objects[s.tgt(u).0] {
                return Err(Error::InvalidDiagram(format!("{} is sent to a mistyped morphism", s.name(u))));
            }
        }
        for a in s.objects() {
            if self.morphisms[s.id(a).0] != c.id(self.objects[a.0]) {
                return Err(Error::InvalidDiagram(format!(
                    "identity of {} not preserved",
                    s.object_name(a)
                )));
            }
        }
        for u in s.morphisms() {
            for &v in &s.out_of_object(s.tgt(u)) {
                let lhs = self.morphisms[s.comp(v, u).0];
                let rhs = c.comp(self.morphisms[v.0], self.morphisms[u.0]);
                if lhs != rhs {
                    return Err(Error::InvalidDiagram(format!(
                        "composite {} o {} not preserved",
                        s.name(v),
                        s.name(u)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A cone over a cospan `(f, g)`: `legs = [p, q]` with `f∘p = g∘q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cone {
    pub apex: Obj,
    pub legs: Vec<Mor>,
}

/// A cocone under a diagram: one leg per shape object.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cocone {
    pub apex: Obj,
    pub legs: Vec<Mor>,
}

fn cospan(c: &FinCategory, f: Mor, g: Mor) -> Result<(Obj, Obj)> {
    c.check_mor(f)?;
    c.check_mor(g)?;
    if c.tgt(f) != c.tgt(g) {
        return Err(Error::NotCospan(f, g));
    }
    Ok((c.src(f), c.src(g)))
}

fn commuting_pairs(c: &FinCategory, f: Mor, g: Mor, x: Obj, y: Obj, q: Obj) -> usize {
    let mut n = 0;
    for &a in c.hom(q, x) {
        let fa = c.comp(f, a);
        n += c.hom(q, y).iter().filter(|&&b| c.comp(g, b) == fa).count();
    }
    n
}

fn cone_is_terminal(c: &FinCategory, apex: Obj, p: Mor, q: Mor, counts: &[usize]) -> bool {
    c.objects().all(|o| {
        let hom = c.hom(o, apex);
        if hom.len() != counts[o.0] {
            return false;
        }
        let mut seen = HashSet::with_capacity(hom.len());
        hom.iter().all(|&u| seen.insert((c.comp(p, u), c.comp(q, u))))
    })
}

/// Is `cone` a pullback of the cospan `(f, g)`?
pub fn is_pullback(c: &FinCategory, f: Mor, g: Mor, cone: &Cone) -> Result<bool> {
    let (x, y) = cospan(c, f, g)?;
    let [p, q] = cone.legs[..] else {
        return Ok(false);
    };
    if c.src(p) != cone.apex || c.tgt(p) != x || c.src(q) != cone.apex || c.tgt(q) != y {
        return Ok(false);
    }
    if c.comp(f, p) != c.comp(g, q) {
        return Ok(false);
    }
    let counts: Vec<usize> = c.objects().map(|o| commuting_pairs(c, f, g, x, y, o)).collect();
    Ok(cone_is_terminal(c, cone.apex, p, q, &counts))
}

/// Terminal cone over the cospan `f : X -> Z <- Y : g`, choosing the smallest
/// apex id and then the smallest leg ids.
pub fn pullback(c: &FinCategory, f: Mor, g: Mor) -> Result<Option<Cone>> {
    let (x, y) = cospan(c, f, g)?;
    let counts: Vec<usize> = c.objects().map(|o| commuting_pairs(c, f, g, x, y, o)).collect();
    for apex in c.objects() {
        if c.objects().any(|o| c.hom(o, apex).len() != counts[o.0]) {
            continue;
        }
        for &p in c.hom(apex, x) {
            let fp = c.comp(f, p);
            for &q in c.hom(apex, y) {
                if c.comp(g, q) == fp && cone_is_terminal(c, apex, p, q, &counts) {
                    return Ok(Some(Cone { apex, legs: vec![p, q] }));
                }
            }
        }
    }
    Ok(None)
}

fn cocone_search(c: &FinCategory, d: &Diagram, apex: Obj) -> Search {
    let s = &d.shape;
    let mut search =
        Search::new(s.objects().map(|i| c.hom(d.objects[i.0], apex).len()).collect());
    for u in s.morphisms() {
        if s.is_identity(u) {
            continue;
        }
        let (i, j) = (s.src(u), s.tgt(u));
        let du = d.morphisms[u.0];
        // leg_j ∘ D(u) = leg_i
        let map = c
            .hom(d.objects[j.0], apex)
            .iter()
            .map(|&leg| c.local_index(c.comp(leg, du)))
            .collect();
        let map = search.add_map(map);
        search.add_edge(j.0, i.0, map);
    }
    search
}

fn legs_from_local(c: &FinCategory, d: &Diagram, apex: Obj, local: &[usize]) -> Vec<Mor> {
    local
        .iter()
        .enumerate()
        .map(|(i, &k)| c.hom(d.objects[i], apex)[k])
        .collect()
}

/// All cocones under `d` with the given apex, in lexicographic leg order.
pub fn cocones(c: &FinCategory, d: &Diagram, apex: Obj) -> Vec<Cocone> {
    cocone_search(c, d, apex)
        .collect(None)
        .into_iter()
        .map(|local| Cocone { apex, legs: legs_from_local(c, d, apex, &local) })
        .collect()
}

pub fn is_cocone(c: &FinCategory, d: &Diagram, cocone: &Cocone) -> bool {
    let s = &d.shape;
    if cocone.legs.len() != s.num_objects() {
        return false;
    }
    for (i, &leg) in cocone.legs.iter().enumerate() {
        if c.src(leg) != d.objects[i] || c.tgt(leg) != cocone.apex {
            return false;
        }
    }
    s.morphisms().all(|u| {
        c.comp(cocone.legs[s.tgt(u).0], d.morphisms[u.0]) == cocone.legs[s.src(u).0]
    })
}

fn cocone_is_initial(c: &FinCategory, cocone: &Cocone, counts: &[usize]) -> bool {
    c.objects().all(|q| {
        let hom = c.hom(cocone.apex, q);
        if hom.len() != counts[q.0] {
            return false;
        }
        let mut seen = HashSet::with_capacity(hom.len());
        hom.iter().all(|&u| {
            seen.insert(cocone.legs.iter().map(|&l| c.comp(u, l)).collect::<Vec<_>>())
        })
    })
}

pub fn is_colimit(c: &FinCategory, d: &Diagram, cocone: &Cocone) -> Result<bool> {
    d.validate(c)?;
    if !is_cocone(c, d, cocone) {
        return Ok(false);
    }
    let counts: Vec<usize> = c.objects().map(|q| cocone_search(c, d, q).count()).collect();
    Ok(cocone_is_initial(c, cocone, &counts))
}

/// Initial cocone under `d`, choosing the smallest apex id and then the
/// lexicographically smallest legs.
pub fn colimit(c: &FinCategory, d: &Diagram) -> Result<Option<Cocone>> {
    d.validate(c)?;
    let counts: Vec<usize> = c.objects().map(|q| cocone_search(c, d, q).count()).collect();
    for apex in c.objects() {
        if c.objects().any(|q| c.hom(apex, q).len() != counts[q.0]) {
            continue;
        }
        let mut found = None;
        cocone_search(c, d, apex).for_each(|local| {
            let cand = Cocone { apex, legs: legs_from_local(c, d, apex, local) };
            if cocone_is_initial(c, &cand, &counts) {
                found = Some(cand);
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// The morphisms `u : colim.apex -> target.apex` with `u ∘ colim_i = target_i`
/// for all `i`. Exactly one when `colim` is a colimit.
pub fn mediating_maps(c: &FinCategory, colim: &Cocone, target: &Cocone) -> Vec<Mor> {
    c.hom(colim.apex, target.apex)
        .iter()
        .copied()
        .filter(|&u| {
            colim.legs.iter().zip(&target.legs).all(|(&l, &t)| c.comp(u, l) == t)
        })
        .collect()
}

/// The unique mediating map out of a colimit, if there is exactly one.
pub fn mediating_map(c: &FinCategory, colim: &Cocone, target: &Cocone) -> Option<Mor> {
    match mediating_maps(c, colim, target)[..] {
        [u] => Some(u),
        _ => None,
    }
}

/// A shape with the given number of objects and the listed non-identity
/// arrows, none of which are composable with each other.
pub fn free_shape(num_objects: usize, arrows: &[(usize, usize)]) -> Result<FinCategory> {
    use crate::cat::MorphismData;
    let mut morphisms: Vec<MorphismData> = (0..num_objects)
        .map(|i| MorphismData::new(format!("1_{i}"), Obj(i), Obj(i)))
        .collect();
    for (k, &(a, b)) in arrows.iter().enumerate() {
        if a == b {
            return Err(Error::InvalidDiagram("free shape arrows must not be loops".into()));
        }
        morphisms.push(MorphismData::new(format!("u{k}"), Obj(a), Obj(b)));
    }
    let identity = (0..num_objects).map(Mor).collect::<Vec<_>>();
    let id2 = identity.clone();
    FinCategory::from_fn(
        (0..num_objects).map(|i| format!("s{i}")).collect(),
        morphisms,
        identity,
        move |g, f| {
            if id2.contains(&g) {
                Some(f)
            } else if id2.contains(&f) {
                Some(g)
            } else {
                None
            }
        },
    )
}
