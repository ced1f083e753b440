//! Sheaves on the site of M-subobjects versus join restriction presheaves on
//! `Par(C, M)`, checked object by object.
//!
//! A presheaf `P` on `C` becomes `P̃` on `Par(C, M)` with sections over `X`
//! the pairs `(m, s)`, `m : D ↣ X` in `M` and `s ∈ P(D)`, up to isomorphism
//! of `D`. Going back, a restriction presheaf keeps only its total sections.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::cat::{Mor, Obj};
use crate::classifier::m_psh_member;
use crate::error::{Error, Result};
use crate::functor::Functor;
use crate::join::FamilyBound;
use crate::mcat::{matching_colimit, matching_diagram, MCategory};
use crate::par::{comparison, karoubi_r, mtotal, par, Par};
use crate::presheaf::{check_natural, find_natural_iso, subpresheaves, NatTrans, Presheaf};
use crate::report::{LawReport, Violation};
use crate::restriction::RestrictionCategory;
use crate::rpsh::{
    check_jrp_axioms, compatible_element_families, hom_restriction, yoneda_jr, JoinRestrictionPresheaf, JoinSource,
    RestrictionPresheaf,
};
use crate::site::{generate_topology, is_sheaf, matching_families, sheaf_report, Topology};

/// Representative of `(m, s)` minimising `(dom m, m, s)` over isos into the
/// domain.
pub fn canonical_element(mc: &MCategory, p: &Presheaf, m: Mor, s: usize) -> (Mor, usize) {
    let c = mc.cat();
    let d = c.src(m);
    let mut best = (d, m, s);
    for phi in c.isos_into(d) {
        let cand = (c.src(phi), c.comp(m, phi), p.act(phi, s));
        if cand < best {
            best = cand;
        }
    }
    (best.1, best.2)
}

/// `P̃` together with the pair behind each section.
#[derive(Debug, Clone)]
pub struct Tilde {
    pub rp: RestrictionPresheaf,
    pub source: Presheaf,
    pub elements: Vec<Vec<(Mor, usize)>>,
    index: Vec<HashMap<(Mor, usize), usize>>,
}

impl Tilde {
    /// Section of `P̃(tgt m)` for an arbitrary pair.
    pub fn element_of(&self, mc: &MCategory, m: Mor, s: usize) -> Option<usize> {
        let key = canonical_element(mc, &self.source, m, s);
        self.index[mc.cat().tgt(m).0].get(&key).copied()
    }
}

pub fn f_tilde(mc: &MCategory, par: &Par, p: &Presheaf) -> Result<Tilde> {
    let c = mc.cat();
    let mut sets: Vec<BTreeSet<(Mor, usize)>> = vec![BTreeSet::new(); c.num_objects()];
    for m in mc.monics() {
        for s in 0..p.size(c.src(m)) {
            sets[c.tgt(m).0].insert(canonical_element(mc, p, m, s));
        }
    }
    let elements: Vec<Vec<(Mor, usize)>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
    let index: Vec<HashMap<(Mor, usize), usize>> =
        elements.iter().map(|es| es.iter().enumerate().map(|(i, &e)| (e, i)).collect()).collect();
    let pc = par.cat();
    // (m, s) · (n, g): pull m back along g
    let action = pc
        .morphisms()
        .map(|y| {
            let span = par.span(y);
            elements[span.tgt.0]
                .iter()
                .map(|&(m, s)| {
                    let cone = mc.pullback_of(m, span.f).ok_or_else(|| Error::invariant("missing pullback"))?;
                    let (pl, q) = (cone.legs[0], cone.legs[1]);
                    let key = canonical_element(mc, p, c.comp(span.m, q), p.act(pl, s));
                    index[span.src.0].get(&key).copied().ok_or_else(|| Error::invariant("pulled pair is not a section"))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = elements
        .iter()
        .map(|es| es.iter().map(|&(m, s)| format!("({},{})", c.name(m), p.label(c.src(m), s))).collect())
        .collect();
    let presheaf = Presheaf::new(pc, elements.iter().map(|e| e.len()).collect(), action)?.with_labels(labels);
    let bar = elements
        .iter()
        .map(|es| {
            es.iter()
                .map(|&(m, _)| par.lookup(mc, m, m).ok_or_else(|| Error::invariant("(m, m) is not a span")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let rp = RestrictionPresheaf::new(&par.rc, presheaf, bar)?;
    Ok(Tilde { rp, source: p.clone(), elements, index })
}

/// `α̃ : P̃ -> Q̃`, `(m, s) ↦ (m, α(s))`.
pub fn f_tilde_map(mc: &MCategory, tp: &Tilde, tq: &Tilde, alpha: &NatTrans) -> Result<NatTrans> {
    let c = mc.cat();
    let components = tp
        .elements
        .iter()
        .map(|es| {
            es.iter()
                .map(|&(m, s)| {
                    tq.element_of(mc, m, alpha.at(c.src(m), s)).ok_or_else(|| Error::invariant("image pair missing"))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NatTrans { components })
}

/// The presheaf of total sections of a restriction presheaf on `Par(C, M)`,
/// with `f` acting as `(1, f)`.
#[derive(Debug, Clone)]
pub struct Dot {
    pub presheaf: Presheaf,
    /// Index in the restriction presheaf of each total section.
    pub total: Vec<Vec<usize>>,
}

pub fn g_dot(mc: &MCategory, par: &Par, p: &RestrictionPresheaf) -> Result<Dot> {
    let c = mc.cat();
    let pc = par.cat();
    let total: Vec<Vec<usize>> =
        c.objects().map(|a| (0..p.size(a)).filter(|&x| p.bar(a, x) == pc.id(a)).collect()).collect();
    let position: Vec<HashMap<usize, usize>> =
        total.iter().map(|t| t.iter().enumerate().map(|(i, &x)| (x, i)).collect()).collect();
    let action = c
        .morphisms()
        .map(|f| {
            let tf = par.total(mc, f);
            total[c.tgt(f).0]
                .iter()
                .map(|&x| {
                    position[c.src(f).0]
                        .get(&p.act(tf, x))
                        .copied()
                        .ok_or_else(|| Error::NotRestrictionPresheaf("a total map sends a total section to a partial one".into()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = total
        .iter()
        .enumerate()
        .map(|(a, t)| t.iter().map(|&x| p.presheaf.label(Obj(a), x)).collect())
        .collect();
    let presheaf = Presheaf::new(c, total.iter().map(|t| t.len()).collect(), action)?.with_labels(labels);
    Ok(Dot { presheaf, total })
}

/// `P̃` with joins stored by the colimit recipe.
#[derive(Debug, Clone)]
pub struct Transferred {
    pub tilde: Tilde,
    pub jrp: JoinRestrictionPresheaf,
}

/// Joins in `P̃` for a sheaf `P`: for a compatible family `(m_i, s_i)` take
/// the matching colimit `a_i : D_i -> U`, the induced `μ : U -> X`, the
/// unique `γ ∈ P(U)` with `γ · a_i = s_i`, and return `(μ, γ)`.
pub fn sheaf_to_jrp(mc: &MCategory, par: &Par, j: &Topology, p: &Presheaf) -> Result<Transferred> {
    let c = mc.cat();
    if let Some(v) = sheaf_report(c, p, j, false).violations.first() {
        return Err(Error::NotASheaf(v.to_string()));
    }
    let tilde = f_tilde(mc, par, p)?;
    let mut tables = Vec::with_capacity(c.num_objects());
    for x in c.objects() {
        let mut table = HashMap::new();
        for fam in compatible_element_families(&tilde.rp, x, None) {
            let pairs: Vec<(Mor, usize)> = fam.iter().map(|&e| tilde.elements[x.0][e]).collect();
            let ms: Vec<Mor> = pairs.iter().map(|&(m, _)| m).collect();
            let md = matching_diagram(mc, x, &ms)?;
            let mcol = matching_colimit(mc, &md)?
                .ok_or_else(|| Error::NotGeometric(format!("matching diagram of {ms:?} has no colimit")))?;
            if !mc.in_m(mcol.induced) {
                return Err(Error::NotGeometric(format!("induced map of {ms:?} is not in M")));
            }
            let u = mcol.colimit.apex;
            let gammas: Vec<usize> = (0..p.size(u))
                .filter(|&g| pairs.iter().enumerate().all(|(i, &(_, s))| p.act(mcol.colimit.legs[i], g) == s))
                .collect();
            let [gamma] = gammas[..] else {
                return Err(Error::NotASheaf(format!(
                    "{} amalgamations of {fam:?} over the matching colimit at {}",
                    gammas.len(),
                    c.object_name(x)
                )));
            };
            let joined = tilde
                .element_of(mc, mcol.induced, gamma)
                .ok_or_else(|| Error::invariant("joined pair is not a section"))?;
            table.insert(fam, joined);
        }
        tables.push(table);
    }
    let jrp = JoinRestrictionPresheaf { rp: tilde.rp.clone(), joins: JoinSource::Table(tables) };
    Ok(Transferred { tilde, jrp })
}

/// `Ġ(P)` with every amalgamation computed as `∨ f_i · (a_i, 1)` over the
/// sieve members in `M`.
#[derive(Debug, Clone)]
pub struct SheafCertificate {
    pub dot: Dot,
    /// Tags `AMALG-JOIN`, `AMALG-TOTAL`, `AMALG-RESTRICT`, `AMALG-UNIQUE`
    /// (ids the sieve members, note the family), plus the sheaf condition.
    pub report: LawReport,
    pub families_checked: usize,
}

pub fn jrp_to_sheaf(
    mc: &MCategory,
    par: &Par,
    j: &Topology,
    jp: &JoinRestrictionPresheaf,
) -> Result<SheafCertificate> {
    let c = mc.cat();
    let pc = par.cat();
    let dot = g_dot(mc, par, &jp.rp)?;
    let q = &dot.presheaf;
    let mut report = LawReport::new();
    let mut families_checked = 0;
    for x in c.objects() {
        for s in j.covers(x) {
            for fam in matching_families(c, q, s) {
                families_checked += 1;
                let tag = |t: &str| {
                    Violation::new(t, s.ids()).with_note(format!("family {fam:?} at {}", c.object_name(x)))
                };
                let pieces: Vec<usize> = s
                    .members
                    .iter()
                    .zip(&fam)
                    .filter(|(&a, _)| mc.in_m(a))
                    .map(|(&a, &f)| {
                        let back = par.lookup(mc, a, c.id(c.src(a))).expect("(a, 1) is a span");
                        jp.rp.act(back, dot.total[c.src(a).0][f])
                    })
                    .collect();
                let Some(joined) = jp.join(x, &pieces) else {
                    report.push(tag("AMALG-JOIN"));
                    continue;
                };
                if jp.rp.bar(x, joined) != pc.id(x) {
                    report.push(tag("AMALG-TOTAL"));
                    continue;
                }
                let amal = dot.total[x.0].iter().position(|&t| t == joined).expect("total section");
                if s.members.iter().zip(&fam).any(|(&a, &f)| q.act(a, amal) != f) {
                    report.push(tag("AMALG-RESTRICT"));
                }
                let all: Vec<usize> = (0..q.size(x))
                    .filter(|&y| s.members.iter().zip(&fam).all(|(&a, &f)| q.act(a, y) == f))
                    .collect();
                if all != [amal] {
                    report.push(tag("AMALG-UNIQUE"));
                }
            }
        }
    }
    report.extend(sheaf_report(c, q, j, false));
    Ok(SheafCertificate { dot, report, families_checked })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    ToJrp,
    ToSheaf,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferCheck {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Mutually inverse components.
#[derive(Debug, Clone, Serialize)]
pub struct IsoWitness {
    pub forward: Vec<Vec<usize>>,
    pub backward: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferReport {
    pub direction: Direction,
    pub input: String,
    pub checks: Vec<TransferCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<IsoWitness>,
}

impl TransferReport {
    fn new(direction: Direction, input: &str) -> Self {
        TransferReport { direction, input: input.to_string(), checks: Vec::new(), witness: None }
    }

    fn check(&mut self, name: &str, passed: bool, detail: Option<String>) {
        self.checks.push(TransferCheck { name: name.to_string(), passed, detail });
    }

    fn check_report(&mut self, name: &str, report: &LawReport) {
        let detail = report.lines().into_iter().next();
        self.check(name, report.is_empty(), detail);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&TransferCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn witness(q: &Presheaf, iso: NatTrans) -> Result<IsoWitness> {
    let back = iso.inverse(q).ok_or_else(|| Error::invariant("found iso has no inverse"))?;
    Ok(IsoWitness { forward: iso.components, backward: back.components })
}

/// Every `M_PSh`-subobject of `q` is a sheaf, when `q` is.
fn msub_sheaf_report(mc: &MCategory, j: &Topology, q: &Presheaf) -> Result<LawReport> {
    let c = mc.cat();
    let mut report = LawReport::new();
    for (i, keep) in subpresheaves(c, q, None).into_iter().enumerate() {
        let (sub, mu) = q.sub(c, &keep)?;
        if m_psh_member(mc, &sub, q, &mu)? && !is_sheaf(c, &sub, j) {
            report.push(Violation::new("MSUB-SHEAF", vec![i]));
        }
    }
    Ok(report)
}

/// The input to a round trip.
#[derive(Debug, Clone, Copy)]
pub enum RoundtripInput<'a> {
    Sheaf(&'a Presheaf),
    Jrp(&'a JoinRestrictionPresheaf),
}

/// Transfers, transfers back, and looks for a natural isomorphism with the
/// input. Failures are report entries, errors only for malformed input.
pub fn roundtrip_report(
    mc: &MCategory,
    par: &Par,
    j: &Topology,
    name: &str,
    input: RoundtripInput<'_>,
) -> Result<TransferReport> {
    let c = mc.cat();
    match input {
        RoundtripInput::Sheaf(p) => {
            let mut r = TransferReport::new(Direction::ToJrp, name);
            let sr = sheaf_report(c, p, j, false);
            r.check_report("input-sheaf", &sr);
            if !sr.is_empty() {
                return Ok(r);
            }
            let t = sheaf_to_jrp(mc, par, j, p)?;
            r.check_report("jrp-axioms", &check_jrp_axioms(&par.rc, &t.jrp, FamilyBound::default()));
            let cert = jrp_to_sheaf(mc, par, j, &t.jrp)?;
            r.check_report("back-to-sheaf", &cert.report);
            let q = &cert.dot.presheaf;
            // s ↦ (1, s), the expected iso
            let explicit = NatTrans {
                components: c
                    .objects()
                    .map(|a| {
                        (0..p.size(a))
                            .map(|s| {
                                let e = t.tilde.element_of(mc, c.id(a), s).expect("identity pair");
                                cert.dot.total[a.0].iter().position(|&x| x == e).expect("identity pair is total")
                            })
                            .collect()
                    })
                    .collect(),
            };
            r.check(
                "identity-pairs-iso",
                check_natural(c, p, q, &explicit).is_ok() && explicit.inverse(q).is_some(),
                None,
            );
            match find_natural_iso(c, p, q, None) {
                Some(iso) => {
                    r.check("roundtrip-iso", true, None);
                    r.witness = Some(witness(q, iso)?);
                }
                None => r.check("roundtrip-iso", false, Some("no natural isomorphism".into())),
            }
            r.check_report("msub-sheaves", &msub_sheaf_report(mc, j, p)?);
            Ok(r)
        }
        RoundtripInput::Jrp(jp) => {
            let mut r = TransferReport::new(Direction::ToSheaf, name);
            let pc = par.cat();
            r.check_report("input-jrp", &check_jrp_axioms(&par.rc, jp, FamilyBound::default()));
            let cert = jrp_to_sheaf(mc, par, j, jp)?;
            r.check_report("sheaf", &cert.report);
            if !cert.report.is_empty() {
                return Ok(r);
            }
            let t = sheaf_to_jrp(mc, par, j, &cert.dot.presheaf)?;
            r.check_report("back-to-jrp", &check_jrp_axioms(&par.rc, &t.jrp, FamilyBound::default()));
            let (p, q) = (&jp.rp, &t.jrp.rp);
            let same_bar = |a: Obj, x: usize, y: usize| p.bar(a, x) == q.bar(a, y);
            match find_natural_iso(pc, &p.presheaf, &q.presheaf, Some(&same_bar)) {
                Some(iso) => {
                    let restricted = hom_restriction(&par.rc, p, q, &iso)?;
                    r.check("iso-total", restricted == NatTrans::identity(&p.presheaf), None);
                    let joins = pc.objects().all(|a| {
                        compatible_element_families(p, a, None).iter().all(|fam| {
                            let image: Vec<usize> = fam.iter().map(|&x| iso.at(a, x)).collect();
                            jp.join(a, fam).map(|x| iso.at(a, x)) == t.jrp.join(a, &image)
                        })
                    });
                    r.check("iso-joins", joins, None);
                    r.check("roundtrip-iso", true, None);
                    r.witness = Some(witness(&q.presheaf, iso)?);
                }
                None => r.check("roundtrip-iso", false, Some("no bar-preserving natural isomorphism".into())),
            }
            r.check_report("msub-sheaves", &msub_sheaf_report(mc, j, &cert.dot.presheaf)?);
            Ok(r)
        }
    }
}

/// One object of the unit comparison.
#[derive(Debug, Clone)]
pub struct UnitEntry {
    pub object: Obj,
    /// The composite route, restricted back to `x`.
    pub route: JoinRestrictionPresheaf,
    /// `h ↦ ` the span of the image of `h`.
    pub explicit: NatTrans,
    /// An iso found by blind search, when one exists.
    pub searched: Option<NatTrans>,
}

#[derive(Debug, Clone)]
pub struct UnitReport {
    pub entries: Vec<UnitEntry>,
    /// Tags `UNIT-SHEAF`, `UNIT-ISO`, `UNIT-SEARCH`, `UNIT-JRP`, `UNIT-JOIN`
    /// (ids the object) and `UNIT-NAT` (ids the total map).
    pub report: LawReport,
}

/// `x -> K_r(x) -> Par(MTotal(K_r(x)))` followed by representable sheaves and
/// the transfer to join restriction presheaves, compared object by object
/// with `X(-, A)`.
pub fn cocompletion_unit(x: &RestrictionCategory) -> Result<UnitReport> {
    let c = x.cat();
    let k = karoubi_r(x)?;
    let mt = mtotal(&k.rc)?;
    let mc = &mt.mc;
    let p = par(mc)?;
    let j = generate_topology(mc)?;
    let cmp = comparison(&k.rc, &mt, &p)?;
    let f: Functor = k.embedding.then(&cmp);
    let back: HashMap<Mor, Mor> = c.morphisms().map(|m| (f.apply(m), m)).collect();
    let mut report = LawReport::new();
    let mut entries = Vec::new();
    let mut transfers = Vec::new();
    for a in c.objects() {
        let fa = f.apply_obj(a);
        let ya = Presheaf::representable(mc.cat(), fa);
        if !is_sheaf(mc.cat(), &ya, &j) {
            report.push(Violation::new("UNIT-SHEAF", vec![a.0]));
            return Ok(UnitReport { entries, report });
        }
        let t = sheaf_to_jrp(mc, &p, &j, &ya)?;
        let bar = c
            .objects()
            .map(|b| {
                (0..t.tilde.rp.size(f.apply_obj(b)))
                    .map(|u| {
                        back.get(&t.tilde.rp.bar(f.apply_obj(b), u))
                            .copied()
                            .ok_or_else(|| Error::invariant("element restriction outside the image of x"))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let rp = RestrictionPresheaf::new(x, t.tilde.rp.presheaf.restrict_along(&f, c), bar)?;
        let JoinSource::Table(tables) = &t.jrp.joins else { unreachable!("transfer stores joins") };
        let route = JoinRestrictionPresheaf {
            rp,
            joins: JoinSource::Table(c.objects().map(|b| tables[f.apply_obj(b).0].clone()).collect()),
        };
        if !check_jrp_axioms(x, &route, FamilyBound::default()).is_empty() {
            report.push(Violation::new("UNIT-JRP", vec![a.0]));
        }
        let direct = yoneda_jr(x, a);
        let explicit = NatTrans {
            components: c
                .objects()
                .map(|b| {
                    c.hom(b, a)
                        .iter()
                        .map(|&h| {
                            let s = p.span(f.apply(h));
                            t.tilde.element_of(mc, s.m, mc.cat().local_index(s.f)).ok_or_else(|| {
                                Error::invariant(format!("span of {} is not a section", c.name(h)))
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let iso_ok = check_natural(c, &direct.rp.presheaf, &route.rp.presheaf, &explicit).is_ok()
            && explicit.inverse(&route.rp.presheaf).is_some()
            && c.objects().all(|b| {
                (0..direct.rp.size(b)).all(|u| direct.rp.bar(b, u) == route.rp.bar(b, explicit.at(b, u)))
            });
        if !iso_ok {
            report.push(Violation::new("UNIT-ISO", vec![a.0]));
        } else {
            let joins = c.objects().all(|b| {
                compatible_element_families(&direct.rp, b, None).iter().all(|fam| {
                    let image: Vec<usize> = fam.iter().map(|&u| explicit.at(b, u)).collect();
                    direct.join(b, fam).map(|u| explicit.at(b, u)) == route.join(b, &image)
                })
            });
            if !joins {
                report.push(Violation::new("UNIT-JOIN", vec![a.0]));
            }
        }
        let same_bar = |b: Obj, u: usize, v: usize| direct.rp.bar(b, u) == route.rp.bar(b, v);
        let searched = find_natural_iso(c, &direct.rp.presheaf, &route.rp.presheaf, Some(&same_bar));
        if searched.is_none() {
            report.push(Violation::new("UNIT-SEARCH", vec![a.0]));
        }
        transfers.push(t);
        entries.push(UnitEntry { object: a, route, explicit, searched });
    }
    // naturality in total maps g : a -> b
    for g in c.morphisms().filter(|&g| x.bar(g) == c.id(c.src(g))) {
        let (a, b) = (c.src(g), c.tgt(g));
        let fg = p.span(f.apply(g));
        let yg = NatTrans {
            components: mc
                .cat()
                .objects()
                .map(|d| {
                    mc.cat().hom(d, fg.src).iter().map(|&h| mc.cat().local_index(mc.cat().comp(fg.f, h))).collect()
                })
                .collect(),
        };
        let routed = f_tilde_map(mc, &transfers[a.0].tilde, &transfers[b.0].tilde, &yg)?;
        let natural = c.objects().all(|d| {
            c.hom(d, a).iter().enumerate().all(|(u, &h)| {
                let direct = entries[b.0].explicit.at(d, c.local_index(c.comp(g, h)));
                direct == routed.at(f.apply_obj(d), entries[a.0].explicit.at(d, u))
            })
        });
        if !natural {
            report.push(Violation::new("UNIT-NAT", vec![g.0]));
        }
    }
    Ok(UnitReport { entries, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{build_finset_mcat, MonicClass};
    use crate::rpsh::check_rp_axioms;

    #[test]
    fn tilde_of_a_representable_is_the_par_representable() {
        let fx = build_finset_mcat(2, MonicClass::Inj);
        let p = par(&fx.mc).unwrap();
        for d in fx.cat().objects() {
            let t = f_tilde(&fx.mc, &p, &Presheaf::representable(fx.cat(), d)).unwrap();
            t.rp.presheaf.check_functorial(p.cat()).unwrap();
            assert!(check_rp_axioms(&p.rc, &t.rp).is_empty());
            for a in p.cat().objects() {
                assert_eq!(t.rp.size(a), p.cat().hom(a, d).len());
            }
        }
    }

    #[test]
    fn empty_family_joins_to_the_empty_pair() {
        let fx = build_finset_mcat(2, MonicClass::Inj);
        let p = par(&fx.mc).unwrap();
        let j = generate_topology(&fx.mc).unwrap();
        let y = Presheaf::representable(fx.cat(), Obj(1));
        let t = sheaf_to_jrp(&fx.mc, &p, &j, &y).unwrap();
        let bottom = t.jrp.join(Obj(2), &[]).unwrap();
        let (m, _) = t.tilde.elements[2][bottom];
        assert_eq!(fx.cat().src(m), Obj(0));
    }

    #[test]
    fn non_sheaf_is_refused() {
        let fx = build_finset_mcat(2, MonicClass::Inj);
        let p = par(&fx.mc).unwrap();
        let j = generate_topology(&fx.mc).unwrap();
        let two = Presheaf::constant(fx.cat(), 2);
        assert!(matches!(sheaf_to_jrp(&fx.mc, &p, &j, &two), Err(Error::NotASheaf(_))));
    }
}
