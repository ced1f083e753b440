//! Categories with a stable system of monics, M-subobject posets, matching
//! diagrams and the geometric criterion.

use std::collections::HashMap;

use crate::cat::{FinCategory, Mor, Obj};
use crate::error::{Error, Result};
use crate::limits::{self, Cocone, Cone, Diagram};
use crate::report::{LawReport, Violation};

#[derive(Debug, Clone)]
pub struct MCategory {
    cat: FinCategory,
    monic: Vec<bool>,
    /// Pullback of `m ∈ M` along every `f` into `tgt(m)`.
    pullbacks: HashMap<(Mor, Mor), Option<Cone>>,
    canon: Vec<Mor>,
}

impl MCategory {
    pub fn new(cat: FinCategory, monics: &[Mor]) -> Result<Self> {
        let mut monic = vec![false; cat.num_morphisms()];
        for &m in monics {
            cat.check_mor(m)?;
            monic[m.0] = true;
        }
        let mut pullbacks = HashMap::new();
        for m in cat.morphisms().filter(|m| monic[m.0]) {
            for &f in &cat.into_object(cat.tgt(m)) {
                pullbacks.insert((m, f), limits::pullback(&cat, m, f)?);
            }
        }
        let canon = cat
            .morphisms()
            .map(|m| {
                if !monic[m.0] {
                    return m;
                }
                cat.into_object(cat.tgt(m))
                    .into_iter()
                    .filter(|n| monic[n.0])
                    .find(|&n| {
                        cat.hom(cat.src(m), cat.src(n))
                            .iter()
                            .any(|&phi| cat.is_iso(phi) && cat.comp(n, phi) == m)
                    })
                    .unwrap_or(m)
            })
            .collect();
        Ok(MCategory { cat, monic, pullbacks, canon })
    }

    pub fn cat(&self) -> &FinCategory {
        &self.cat
    }

    pub fn in_m(&self, m: Mor) -> bool {
        self.monic[m.0]
    }

    pub fn monic_table(&self) -> &[bool] {
        &self.monic
    }

    pub fn monics(&self) -> Vec<Mor> {
        self.cat.morphisms().filter(|m| self.monic[m.0]).collect()
    }

    /// Pullback of `m ∈ M` along `f`, legs `[p : P -> src m, q : P -> src f]`.
    /// `q` is the pulled-back monic `f*m`.
    pub fn pullback_of(&self, m: Mor, f: Mor) -> Option<&Cone> {
        self.pullbacks.get(&(m, f)).and_then(|c| c.as_ref())
    }

    /// `f*m`, the monic opposite `m` in its pullback along `f`.
    pub fn pull(&self, m: Mor, f: Mor) -> Option<Mor> {
        self.pullback_of(m, f).map(|c| c.legs[1])
    }

    /// Smallest-id monic in the iso class of `m` (identity on non-members).
    pub fn canonical(&self, m: Mor) -> Mor {
        self.canon[m.0]
    }

    /// `m ≤ n` as subobjects: `m = n ∘ φ` for some `φ`.
    pub fn factors_through(&self, m: Mor, n: Mor) -> bool {
        let c = &self.cat;
        c.tgt(m) == c.tgt(n) && c.hom(c.src(m), c.src(n)).iter().any(|&phi| c.comp(n, phi) == m)
    }

    /// Canonical representatives of `Sub_M(a)`, ascending.
    pub fn subobjects(&self, a: Obj) -> Vec<Mor> {
        let mut out: Vec<Mor> = self
            .cat
            .into_object(a)
            .into_iter()
            .filter(|&m| self.monic[m.0] && self.canon[m.0] == m)
            .collect();
        out.sort_unstable();
        out
    }
}

/// The three stable-system conditions plus monicity.
///
/// Tags: `MONO` (member not monic), `ISO` (iso missing), `COMP` (composite
/// missing), `PB` (pullback missing or its leg outside `M`).
pub fn check_m_system(mc: &MCategory) -> LawReport {
    let c = mc.cat();
    let mut report = LawReport::new();
    for m in c.morphisms() {
        if mc.in_m(m) && !c.is_mono(m).unwrap_or(false) {
            report.push(Violation::new("MONO", vec![m.0]));
        }
        if c.is_iso(m) && !mc.in_m(m) {
            report.push(Violation::new("ISO", vec![m.0]));
        }
    }
    for f in mc.monics() {
        for &g in &c.out_of_object(c.tgt(f)) {
            if mc.in_m(g) && !mc.in_m(c.comp(g, f)) {
                report.push(Violation::new("COMP", vec![g.0, f.0]));
            }
        }
        for &h in &c.into_object(c.tgt(f)) {
            match mc.pull(f, h) {
                None => report.push(Violation::new("PB", vec![f.0, h.0]).with_note("no pullback")),
                Some(q) if !mc.in_m(q) => {
                    report.push(Violation::new("PB", vec![f.0, h.0]).with_note("pulled-back leg not in M"))
                }
                Some(_) => {}
            }
        }
    }
    report
}

/// `Sub_M(C)` with its order and binary meets.
#[derive(Debug, Clone)]
pub struct SubMPoset {
    pub object: Obj,
    pub elements: Vec<Mor>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<Option<usize>>>,
}

impl SubMPoset {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, m: Mor) -> Option<usize> {
        self.elements.iter().position(|&e| e == m)
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn meet(&self, i: usize, j: usize) -> Option<usize> {
        self.meet[i][j]
    }

    pub fn top(&self) -> Option<usize> {
        (0..self.len()).find(|&t| (0..self.len()).all(|i| self.leq[i][t]))
    }

    /// Least upper bound by scanning the order.
    pub fn lub(&self, family: &[usize]) -> Option<usize> {
        let ups: Vec<usize> =
            (0..self.len()).filter(|&u| family.iter().all(|&i| self.leq[i][u])).collect();
        ups.iter().copied().find(|&u| ups.iter().all(|&v| self.leq[u][v]))
    }
}

pub fn sub_m(mc: &MCategory, a: Obj) -> Result<SubMPoset> {
    mc.cat().check_obj(a)?;
    let elements = mc.subobjects(a);
    let leq = elements
        .iter()
        .map(|&m| elements.iter().map(|&n| mc.factors_through(m, n)).collect())
        .collect();
    let c = mc.cat();
    let meet = elements
        .iter()
        .map(|&m| {
            elements
                .iter()
                .map(|&n| {
                    // m ∧ n = n ∘ (n*m)
                    let k = mc.pull(m, n)?;
                    let rep = mc.canonical(c.comp(n, k));
                    elements.iter().position(|&e| e == rep)
                })
                .collect()
        })
        .collect();
    Ok(SubMPoset { object: a, elements, leq, meet })
}

/// The pairwise pullbacks of a family of M-subobjects of one object.
///
/// Shape objects `0..k` are the members' domains; each unordered pair `i < j`
/// adds one object mapped to both.
#[derive(Debug, Clone)]
pub struct MatchingDiagram {
    pub target: Obj,
    pub family: Vec<Mor>,
    pub pairs: Vec<(usize, usize)>,
    pub diagram: Diagram,
}

impl MatchingDiagram {
    /// The cocone into the common target formed by the members.
    pub fn target_cocone(&self, c: &FinCategory) -> Cocone {
        let mut legs = self.family.clone();
        for (p, &(i, _)) in self.pairs.iter().enumerate() {
            legs.push(c.comp(self.family[i], self.diagram.morphisms[self.diagram.objects.len() + 2 * p]));
        }
        Cocone { apex: self.target, legs }
    }
}

pub fn matching_diagram(mc: &MCategory, target: Obj, family: &[Mor]) -> Result<MatchingDiagram> {
    let c = mc.cat();
    c.check_obj(target)?;
    for &m in family {
        c.check_mor(m)?;
        if !mc.in_m(m) || c.tgt(m) != target {
            return Err(Error::InvalidDiagram(format!(
                "{} is not an M-subobject of {}",
                c.name(m),
                c.object_name(target)
            )));
        }
    }
    let k = family.len();
    let mut pairs = Vec::new();
    let mut objects: Vec<Obj> = family.iter().map(|&m| c.src(m)).collect();
    let mut legs = Vec::new();
    let mut arrows = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let cone = mc.pullback_of(family[j], family[i]).ok_or_else(|| {
                Error::InvalidDiagram(format!("no pullback of {} and {}", c.name(family[i]), c.name(family[j])))
            })?;
            // legs [p : P -> A_j, q : P -> A_i]
            let node = k + pairs.len();
            pairs.push((i, j));
            objects.push(cone.apex);
            arrows.push((node, i));
            arrows.push((node, j));
            legs.push(cone.legs[1]);
            legs.push(cone.legs[0]);
        }
    }
    let shape = limits::free_shape(objects.len(), &arrows)?;
    let mut morphisms: Vec<Mor> = objects.iter().map(|&o| c.id(o)).collect();
    morphisms.extend(legs);
    let diagram = Diagram::new(shape, objects, morphisms);
    Ok(MatchingDiagram { target, family: family.to_vec(), pairs, diagram })
}

/// Colimit of a matching diagram together with the induced map into the
/// common target.
#[derive(Debug, Clone)]
pub struct MatchingColimit {
    pub colimit: Cocone,
    pub induced: Mor,
}

pub fn matching_colimit(mc: &MCategory, md: &MatchingDiagram) -> Result<Option<MatchingColimit>> {
    let c = mc.cat();
    let Some(colimit) = limits::colimit(c, &md.diagram)? else {
        return Ok(None);
    };
    let target = md.target_cocone(c);
    let induced = limits::mediating_map(c, &colimit, &target)
        .ok_or_else(|| Error::invariant("colimit has no unique mediating map to the target"))?;
    Ok(Some(MatchingColimit { colimit, induced }))
}

/// Join in `Sub_M(a)` as the map induced out of the matching colimit, when it
/// exists and lies in `M`; canonical representative.
pub fn sub_join(mc: &MCategory, a: Obj, family: &[Mor]) -> Result<Option<Mor>> {
    let md = matching_diagram(mc, a, family)?;
    Ok(matching_colimit(mc, &md)?
        .filter(|mcol| mc.in_m(mcol.induced))
        .map(|mcol| mc.canonical(mcol.induced)))
}

fn families_of(elements: &[Mor], max: Option<usize>) -> Vec<Vec<Mor>> {
    let n = elements.len();
    let mut out: Vec<Vec<Mor>> = (0u64..1 << n)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| elements[i]).collect::<Vec<_>>())
        .filter(|f: &Vec<Mor>| max.map_or(true, |m| f.len() <= m))
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Every set of M-subobjects of `a` (by canonical representative), smallest
/// first.
pub fn subobject_families(mc: &MCategory, a: Obj, max: Option<usize>) -> Vec<Vec<Mor>> {
    families_of(&mc.subobjects(a), max)
}

/// The geometric criterion on every family of M-subobjects of every object.
///
/// Tags: `GEO1` (no matching colimit), `GEO2` (induced map not in `M`),
/// `GEO3` (not stable under pullback along the noted morphism). Ids are the
/// family members; only the first failing family of each object is listed.
pub fn is_geometric(mc: &MCategory, max_family: Option<usize>) -> Result<LawReport> {
    let c = mc.cat();
    let mut report = LawReport::new();
    for a in c.objects() {
        for fam in subobject_families(mc, a, max_family) {
            if let Some(v) = geometric_failure(mc, a, &fam)? {
                report.push(v);
                break;
            }
        }
    }
    Ok(report)
}

fn describe(c: &FinCategory, a: Obj, fam: &[Mor]) -> String {
    if fam.is_empty() {
        format!("empty family at {}", c.object_name(a))
    } else {
        format!("family at {}", c.object_name(a))
    }
}

fn geometric_failure(mc: &MCategory, a: Obj, fam: &[Mor]) -> Result<Option<Violation>> {
    let c = mc.cat();
    let ids: Vec<usize> = fam.iter().map(|m| m.0).collect();
    let md = matching_diagram(mc, a, fam)?;
    let Some(mcol) = matching_colimit(mc, &md)? else {
        return Ok(Some(Violation::new("GEO1", ids).with_note(describe(c, a, fam))));
    };
    if !mc.in_m(mcol.induced) {
        return Ok(Some(Violation::new("GEO2", ids).with_note(format!(
            "{}; induced {} not in M",
            describe(c, a, fam),
            c.name(mcol.induced)
        ))));
    }
    let mu = mcol.induced;
    for &f in &c.into_object(a) {
        let pulled: Option<Vec<Mor>> = fam.iter().map(|&m| mc.pull(m, f).map(|q| mc.canonical(q))).collect();
        let mut pulled = pulled.ok_or_else(|| Error::invariant("missing pullback of a monic"))?;
        pulled.sort_unstable();
        pulled.dedup();
        let lhs = mc.pull(mu, f).map(|q| mc.canonical(q));
        let rhs = sub_join(mc, c.src(f), &pulled)?;
        if lhs.is_none() || lhs != rhs {
            return Ok(Some(Violation::new("GEO3", ids).with_note(format!(
                "{}; along {}",
                describe(c, a, fam),
                c.name(f)
            ))));
        }
    }
    Ok(None)
}

/// Distributivity `m ∧ ∨N = ∨(m ∧ n)` over all families, with the joins taken
/// from matching colimits. Tags: `HEY-JOIN` (join missing), `HEY-LUB` (join
/// is not the order-theoretic lub), `HEY-DIST`.
pub fn heyting_check(mc: &MCategory, a: Obj) -> Result<LawReport> {
    let poset = sub_m(mc, a)?;
    let mut report = LawReport::new();
    let fams = families_of(&poset.elements, None);
    let mut joins: HashMap<Vec<Mor>, Option<Mor>> = HashMap::new();
    for fam in &fams {
        let j = sub_join(mc, a, fam)?;
        let idx: Vec<usize> = fam.iter().map(|&m| poset.index_of(m).expect("element")).collect();
        match j {
            None => report.push(Violation::new("HEY-JOIN", ids(fam))),
            Some(j) if poset.index_of(j) != poset.lub(&idx) => {
                report.push(Violation::new("HEY-LUB", ids(fam)))
            }
            _ => {}
        }
        joins.insert(fam.clone(), j);
    }
    for (mi, &m) in poset.elements.iter().enumerate() {
        for fam in &fams {
            let Some(Some(j)) = joins.get(fam) else { continue };
            let lhs = poset.index_of(*j).and_then(|ji| poset.meet(mi, ji));
            let mut meets: Vec<Mor> = fam
                .iter()
                .filter_map(|&n| poset.meet(mi, poset.index_of(n).expect("element")))
                .map(|k| poset.elements[k])
                .collect();
            meets.sort_unstable();
            meets.dedup();
            let rhs = joins.get(&meets).copied().flatten().and_then(|r| poset.index_of(r));
            if lhs.is_none() || lhs != rhs {
                let mut t = vec![m.0];
                t.extend(ids(fam));
                report.push(Violation::new("HEY-DIST", t));
            }
        }
    }
    Ok(report)
}

fn ids(fam: &[Mor]) -> Vec<usize> {
    fam.iter().map(|m| m.0).collect()
}

/// `f*(∨N) = ∨ f*(N)` for every family `N` of subobjects of `tgt(f)`.
/// Tag `PB-JOIN`.
pub fn pullback_preserves_joins(mc: &MCategory, f: Mor) -> Result<LawReport> {
    let c = mc.cat();
    c.check_mor(f)?;
    let mut report = LawReport::new();
    for fam in subobject_families(mc, c.tgt(f), None) {
        let Some(j) = sub_join(mc, c.tgt(f), &fam)? else { continue };
        let lhs = mc.pull(j, f).map(|q| mc.canonical(q));
        let mut pulled: Vec<Mor> =
            fam.iter().filter_map(|&m| mc.pull(m, f)).map(|q| mc.canonical(q)).collect();
        pulled.sort_unstable();
        pulled.dedup();
        let rhs = sub_join(mc, c.src(f), &pulled)?;
        if lhs.is_none() || lhs != rhs {
            let mut t = vec![f.0];
            t.extend(ids(&fam));
            report.push(Violation::new("PB-JOIN", t));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat::MorphismData;

    fn one_object() -> FinCategory {
        FinCategory::from_fn(
            vec!["*".into()],
            vec![MorphismData::new("1", Obj(0), Obj(0))],
            vec![Mor(0)],
            |_, _| Some(Mor(0)),
        )
        .unwrap()
    }

    #[test]
    fn trivial_category_is_geometric() {
        let mc = MCategory::new(one_object(), &[Mor(0)]).unwrap();
        assert!(check_m_system(&mc).is_empty());
        assert!(is_geometric(&mc, None).unwrap().is_empty());
        let p = sub_m(&mc, Obj(0)).unwrap();
        assert_eq!(p.len(), 1);
        assert!(heyting_check(&mc, Obj(0)).unwrap().is_empty());
    }

    #[test]
    fn missing_identity_is_reported() {
        let mc = MCategory::new(one_object(), &[]).unwrap();
        assert!(check_m_system(&mc).has_tag("ISO"));
    }
}
