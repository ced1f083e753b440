//! Sieves, the topology generated by covering families of M-subobjects, and
//! the sheaf condition.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::ops::ControlFlow;

use crate::cat::{FinCategory, Mor, Obj};
use crate::error::{Error, Result};
use crate::mcat::{is_geometric, sub_join, subobject_families, MCategory};
use crate::presheaf::{NatTrans, Presheaf};
use crate::report::{LawReport, Violation};
use crate::solve::{Search, FREE};

/// A set of morphisms into `object` closed under precomposition, stored
/// sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sieve {
    pub object: Obj,
    pub members: Vec<Mor>,
}

impl Sieve {
    pub fn contains(&self, m: Mor) -> bool {
        self.members.binary_search(&m).is_ok()
    }

    pub fn maximal(c: &FinCategory, a: Obj) -> Sieve {
        let mut members = c.into_object(a);
        members.sort_unstable();
        Sieve { object: a, members }
    }

    /// The sieve generated by a family of morphisms into `a`.
    pub fn generated(c: &FinCategory, a: Obj, family: &[Mor]) -> Sieve {
        let mut set = BTreeSet::new();
        for &m in family {
            for &h in &c.into_object(c.src(m)) {
                set.insert(c.comp(m, h));
            }
        }
        Sieve { object: a, members: set.into_iter().collect() }
    }

    /// `f*S = {h : f ∘ h ∈ S}`.
    pub fn pullback(&self, c: &FinCategory, f: Mor) -> Sieve {
        let mut members: Vec<Mor> =
            c.into_object(c.src(f)).into_iter().filter(|&h| self.contains(c.comp(f, h))).collect();
        members.sort_unstable();
        Sieve { object: c.src(f), members }
    }

    pub fn intersect(&self, other: &Sieve) -> Sieve {
        Sieve {
            object: self.object,
            members: self.members.iter().copied().filter(|&m| other.contains(m)).collect(),
        }
    }

    pub fn is_subset(&self, other: &Sieve) -> bool {
        self.members.iter().all(|&m| other.contains(m))
    }

    pub fn is_closed(&self, c: &FinCategory) -> bool {
        self.members.iter().all(|&s| {
            c.tgt(s) == self.object && c.into_object(c.src(s)).iter().all(|&h| self.contains(c.comp(s, h)))
        })
    }

    pub fn ids(&self) -> Vec<usize> {
        self.members.iter().map(|m| m.0).collect()
    }

    /// The sieve as a sub-presheaf of the representable on its object:
    /// the presheaf and the inclusion.
    pub fn as_presheaf(&self, c: &FinCategory) -> Result<(Presheaf, NatTrans)> {
        let y = Presheaf::representable(c, self.object);
        let keep: Vec<Vec<bool>> =
            c.objects().map(|a| c.hom(a, self.object).iter().map(|&m| self.contains(m)).collect()).collect();
        y.sub(c, &keep)
    }
}

/// All sieves on `a`, in lexicographic order of membership.
pub fn all_sieves(c: &FinCategory, a: Obj) -> Vec<Sieve> {
    let into = {
        let mut v = c.into_object(a);
        v.sort_unstable();
        v
    };
    let pos: HashMap<Mor, usize> = into.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut search = Search::new(vec![2; into.len()]);
    let keep = search.add_map(vec![FREE, 1]);
    for (i, &s) in into.iter().enumerate() {
        for &h in &c.into_object(c.src(s)) {
            let j = pos[&c.comp(s, h)];
            if j != i {
                search.add_edge(i, j, keep);
            }
        }
    }
    let mut out = Vec::new();
    search.for_each(|flat| {
        out.push(Sieve {
            object: a,
            members: into.iter().zip(flat).filter(|(_, &v)| v == 1).map(|(&m, _)| m).collect(),
        });
        ControlFlow::Continue(())
    });
    out
}

/// Covering sieves per object, stored extensionally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    covers: Vec<BTreeSet<Sieve>>,
}

impl Topology {
    /// Only maximal sieves cover.
    pub fn minimal(c: &FinCategory) -> Self {
        Topology { covers: c.objects().map(|a| std::iter::once(Sieve::maximal(c, a)).collect()).collect() }
    }

    pub fn from_covers(covers: Vec<BTreeSet<Sieve>>) -> Self {
        Topology { covers }
    }

    pub fn covers(&self, a: Obj) -> impl Iterator<Item = &Sieve> {
        self.covers[a.0].iter()
    }

    pub fn is_covering(&self, s: &Sieve) -> bool {
        self.covers[s.object.0].contains(s)
    }

    pub fn num_covers(&self) -> usize {
        self.covers.iter().map(|c| c.len()).sum()
    }

    /// The intersection of every covering sieve on `a`.
    pub fn least_cover(&self, a: Obj) -> Result<Sieve> {
        let mut it = self.covers[a.0].iter();
        let first = it.next().ok_or_else(|| Error::invariant("object without covering sieves"))?.clone();
        let least = it.fold(first, |acc, s| acc.intersect(s));
        if !self.is_covering(&least) {
            return Err(Error::invariant("covering sieves are not closed under intersection"));
        }
        Ok(least)
    }

    /// Sorted morphism-id lists per object.
    pub fn dump(&self) -> Vec<Vec<Vec<usize>>> {
        self.covers.iter().map(|cs| cs.iter().map(|s| s.ids()).collect()).collect()
    }
}

/// Maximality, stability and transitivity, checked over all sieves.
/// Tags `TOP-MAX`, `TOP-STAB` (sieve then morphism), `TOP-TRANS`.
pub fn check_topology(c: &FinCategory, j: &Topology) -> LawReport {
    let mut report = LawReport::new();
    for a in c.objects() {
        if !j.is_covering(&Sieve::maximal(c, a)) {
            report.push(Violation::new("TOP-MAX", vec![a.0]));
        }
        for s in j.covers(a) {
            for &f in &c.into_object(a) {
                if !j.is_covering(&s.pullback(c, f)) {
                    let mut t = s.ids();
                    t.push(f.0);
                    report.push(Violation::new("TOP-STAB", t));
                }
            }
        }
        for r in all_sieves(c, a) {
            if j.is_covering(&r) {
                continue;
            }
            if j.covers(a).any(|s| s.members.iter().all(|&m| j.is_covering(&r.pullback(c, m)))) {
                report.push(Violation::new("TOP-TRANS", r.ids()));
            }
        }
    }
    report
}

/// Families of M-subobjects of each object whose join is the top element.
pub fn basis_covers(mc: &MCategory) -> Result<Vec<Vec<Vec<Mor>>>> {
    let report = is_geometric(mc, None)?;
    if !report.is_empty() {
        return Err(Error::NotGeometric(report.lines().join("; ")));
    }
    let c = mc.cat();
    c.objects()
        .map(|a| {
            let top = mc.canonical(c.id(a));
            let mut out = Vec::new();
            for fam in subobject_families(mc, a, None) {
                if sub_join(mc, a, &fam)? == Some(top) {
                    out.push(fam);
                }
            }
            Ok(out)
        })
        .collect()
}

/// Smallest topology in which every sieve generated by a basic cover covers:
/// saturate under enlargement, pullback and transitivity until nothing
/// changes, then re-check the axioms.
pub fn generate_topology(mc: &MCategory) -> Result<Topology> {
    let c = mc.cat();
    let basis = basis_covers(mc)?;
    let generators: Vec<Vec<Sieve>> = c
        .objects()
        .map(|a| basis[a.0].iter().map(|fam| Sieve::generated(c, a, fam)).collect())
        .collect();
    let j = saturate(c, &generators);
    let report = check_topology(c, &j);
    if !report.is_empty() {
        return Err(Error::invariant(format!("saturated topology fails its axioms: {report}")));
    }
    Ok(j)
}

/// Closure of the given sieves under the topology axioms.
pub fn saturate(c: &FinCategory, generators: &[Vec<Sieve>]) -> Topology {
    let sieves: Vec<Vec<Sieve>> = c.objects().map(|a| all_sieves(c, a)).collect();
    let mut covering: Vec<HashSet<Sieve>> = c
        .objects()
        .map(|a| {
            let mut set: HashSet<Sieve> = HashSet::new();
            set.insert(Sieve::maximal(c, a));
            for g in &generators[a.0] {
                for s in &sieves[a.0] {
                    if g.is_subset(s) {
                        set.insert(s.clone());
                    }
                }
            }
            set
        })
        .collect();
    loop {
        let mut grew = false;
        for a in c.objects() {
            let current: Vec<Sieve> = covering[a.0].iter().cloned().collect();
            for s in &current {
                for &f in &c.into_object(a) {
                    grew |= covering[c.src(f).0].insert(s.pullback(c, f));
                }
            }
        }
        for a in c.objects() {
            for r in &sieves[a.0] {
                if covering[a.0].contains(r) {
                    continue;
                }
                let local = covering[a.0]
                    .iter()
                    .any(|s| s.members.iter().all(|&m| covering[c.src(m).0].contains(&r.pullback(c, m))));
                let above = covering[a.0].iter().any(|s| s.is_subset(r));
                if local || above {
                    covering[a.0].insert(r.clone());
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    Topology { covers: covering.into_iter().map(|s| s.into_iter().collect()).collect() }
}

/// Search over matching families for `s`: one node per member.
fn family_search(c: &FinCategory, p: &Presheaf, s: &Sieve) -> Search {
    let pos: HashMap<Mor, usize> = s.members.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut search = Search::new(s.members.iter().map(|&m| p.size(c.src(m))).collect());
    let mut maps: HashMap<Mor, usize> = HashMap::new();
    for (i, &m) in s.members.iter().enumerate() {
        for &h in &c.into_object(c.src(m)) {
            if c.is_identity(h) {
                continue;
            }
            let map = *maps.entry(h).or_insert_with(|| search.add_map(p.action_table(h).to_vec()));
            search.add_edge(i, pos[&c.comp(m, h)], map);
        }
    }
    search
}

/// All matching families for `s`: value per member, in member order.
pub fn matching_families(c: &FinCategory, p: &Presheaf, s: &Sieve) -> Vec<Vec<usize>> {
    family_search(c, p, s).collect(None)
}

pub fn count_matching_families(c: &FinCategory, p: &Presheaf, s: &Sieve) -> usize {
    family_search(c, p, s).count()
}

pub fn is_matching_family(c: &FinCategory, p: &Presheaf, s: &Sieve, family: &[usize]) -> bool {
    s.members.iter().enumerate().all(|(i, &m)| {
        c.into_object(c.src(m)).iter().all(|&h| {
            let j = s.members.binary_search(&c.comp(m, h)).expect("closed sieve");
            family[j] == p.act(h, family[i])
        })
    })
}

/// The family `(x · s)_s`.
pub fn restrict_to(p: &Presheaf, s: &Sieve, x: usize) -> Vec<usize> {
    s.members.iter().map(|&m| p.act(m, x)).collect()
}

/// Sections whose restriction is the given family.
pub fn amalgamations(p: &Presheaf, s: &Sieve, family: &[usize]) -> Vec<usize> {
    (0..p.size(s.object)).filter(|&x| restrict_to(p, s, x) == family).collect()
}

/// Sheaf condition failures. Tags `SHEAF-EXIST` (a matching family without
/// amalgamation) and `SHEAF-UNIQUE` (two amalgamations); ids are the sieve
/// members, the note gives the family.
pub fn sheaf_report(c: &FinCategory, p: &Presheaf, j: &Topology, separated_only: bool) -> LawReport {
    let mut report = LawReport::new();
    for a in c.objects() {
        for s in j.covers(a) {
            let images: Vec<Vec<usize>> = (0..p.size(a)).map(|x| restrict_to(p, s, x)).collect();
            let distinct: HashSet<&Vec<usize>> = images.iter().collect();
            if distinct.len() < images.len() {
                let dup = images
                    .iter()
                    .enumerate()
                    .find(|(i, v)| images[..*i].contains(v))
                    .map(|(_, v)| v.clone())
                    .expect("duplicate");
                report.push(
                    Violation::new("SHEAF-UNIQUE", s.ids()).with_note(format!("family {dup:?} at {}", c.object_name(a))),
                );
            }
            if separated_only {
                continue;
            }
            let search = family_search(c, p, s);
            let mut missing = None;
            search.for_each(|fam| {
                if distinct.contains(&fam.to_vec()) {
                    ControlFlow::Continue(())
                } else {
                    missing = Some(fam.to_vec());
                    ControlFlow::Break(())
                }
            });
            if let Some(fam) = missing {
                report.push(
                    Violation::new("SHEAF-EXIST", s.ids()).with_note(format!("family {fam:?} at {}", c.object_name(a))),
                );
            }
        }
    }
    report
}

pub fn is_sheaf(c: &FinCategory, p: &Presheaf, j: &Topology) -> bool {
    sheaf_report(c, p, j, false).is_empty()
}

pub fn is_separated(c: &FinCategory, p: &Presheaf, j: &Topology) -> bool {
    sheaf_report(c, p, j, true).is_empty()
}
