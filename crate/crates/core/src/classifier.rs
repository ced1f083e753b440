//! Monos of presheaves that are locally M-subobjects, and the presheaf of
//! M-subobjects as their classifier.

use std::collections::HashSet;

use crate::cat::{FinCategory, Mor, Obj};
use crate::error::{Error, Result};
use crate::mcat::MCategory;
use crate::presheaf::{check_natural, NatSearch, NatTrans, Presheaf};
use crate::sheafify::{sheafify, sheafify_map};
use crate::site::{is_sheaf, Sieve, Topology};

fn check_mono(c: &FinCategory, p: &Presheaf, q: &Presheaf, mu: &NatTrans) -> Result<()> {
    check_natural(c, p, q, mu)?;
    for a in c.objects() {
        let mut seen = HashSet::new();
        if !mu.components[a.0].iter().all(|y| seen.insert(*y)) {
            return Err(Error::NotMono(a));
        }
    }
    Ok(())
}

fn image(mu: &NatTrans) -> Vec<HashSet<usize>> {
    mu.components.iter().map(|comp| comp.iter().copied().collect()).collect()
}

/// `{h : A -> D | y · h ∈ im μ}`: the pullback of `μ` along the map
/// `yD -> Q` picking out `y ∈ Q(D)`, as a sieve on `D`.
pub fn classifying_sieve(c: &FinCategory, q: &Presheaf, mu: &NatTrans, d: Obj, y: usize) -> Sieve {
    let im = image(mu);
    let mut members: Vec<Mor> =
        c.into_object(d).into_iter().filter(|&h| im[c.src(h).0].contains(&q.act(h, y))).collect();
    members.sort_unstable();
    Sieve { object: d, members }
}

/// The M-subobject of `D` whose principal sieve is `s`, if any.
pub fn principal_generator(mc: &MCategory, s: &Sieve) -> Option<Mor> {
    let c = mc.cat();
    mc.subobjects(s.object).into_iter().find(|&m| &Sieve::generated(c, s.object, &[m]) == s)
}

/// Every pullback of `μ : P ↣ Q` along a map out of a representable is the
/// image of `y(m)` for some `m ∈ M`.
pub fn m_psh_member(mc: &MCategory, p: &Presheaf, q: &Presheaf, mu: &NatTrans) -> Result<bool> {
    let c = mc.cat();
    check_mono(c, p, q, mu)?;
    Ok(c.objects().all(|d| {
        (0..q.size(d)).all(|y| principal_generator(mc, &classifying_sieve(c, q, mu, d, y)).is_some())
    }))
}

/// As [`m_psh_member`] with sheafified representables, among sheaves: both
/// ends must be sheaves, and every pullback of `μ` along a map `a(yD) -> Q`
/// must be the image of `a(y(m))` for some `m ∈ M`.
pub fn m_sh_member(mc: &MCategory, j: &Topology, p: &Presheaf, q: &Presheaf, mu: &NatTrans) -> Result<bool> {
    let c = mc.cat();
    check_mono(c, p, q, mu)?;
    if !is_sheaf(c, p, j) || !is_sheaf(c, q, j) {
        return Ok(false);
    }
    let im = image(mu);
    for d in c.objects() {
        let yd = Presheaf::representable(c, d);
        let ayd = sheafify(c, &yd, j)?;
        // images of a(y(m)) for every M-subobject m of d
        let mut images = Vec::new();
        for m in mc.subobjects(d) {
            let ya = Presheaf::representable(c, c.src(m));
            let aya = sheafify(c, &ya, j)?;
            let ym = NatTrans {
                components: c
                    .objects()
                    .map(|b| c.hom(b, c.src(m)).iter().map(|&h| c.local_index(c.comp(m, h))).collect())
                    .collect(),
            };
            let aym = sheafify_map(c, &aya, &ayd, &ym)?;
            images.push(image(&aym));
        }
        let ns = NatSearch::new(c, &ayd.sheaf, q);
        let mut ok = true;
        ns.search.for_each(|flat| {
            let beta = ns.decode(c, &ayd.sheaf, flat);
            let pulled: Vec<HashSet<usize>> = c
                .objects()
                .map(|b| (0..ayd.sheaf.size(b)).filter(|&z| im[b.0].contains(&beta.at(b, z))).collect())
                .collect();
            if images.contains(&pulled) {
                std::ops::ControlFlow::Continue(())
            } else {
                ok = false;
                std::ops::ControlFlow::Break(())
            }
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `C ↦ Sub_M(C)`, `f ↦ f*`, with the top element at each object.
#[derive(Debug, Clone)]
pub struct Sigma {
    pub presheaf: Presheaf,
    /// Canonical representatives of the sections at each object.
    pub elements: Vec<Vec<Mor>>,
    /// Section index of `1_C`.
    pub top: Vec<usize>,
}

impl Sigma {
    pub fn section_of(&self, a: Obj, m: Mor) -> Option<usize> {
        self.elements[a.0].iter().position(|&e| e == m)
    }
}

pub fn sigma_classifier(mc: &MCategory) -> Result<Sigma> {
    let c = mc.cat();
    let elements: Vec<Vec<Mor>> = c.objects().map(|a| mc.subobjects(a)).collect();
    let position = |a: Obj, m: Mor| elements[a.0].iter().position(|&e| e == m);
    let action = c
        .morphisms()
        .map(|f| {
            elements[c.tgt(f).0]
                .iter()
                .map(|&m| {
                    let pulled = mc.pull(m, f).ok_or_else(|| Error::invariant("missing pullback"))?;
                    position(c.src(f), mc.canonical(pulled)).ok_or_else(|| Error::invariant("pullback left M"))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let top = c
        .objects()
        .map(|a| position(a, mc.canonical(c.id(a))).ok_or_else(|| Error::invariant("identity not in M")))
        .collect::<Result<Vec<_>>>()?;
    let labels = elements.iter().map(|es| es.iter().map(|&m| c.name(m).to_string()).collect()).collect();
    let presheaf = Presheaf::new(c, elements.iter().map(|e| e.len()).collect(), action)?.with_labels(labels);
    Ok(Sigma { presheaf, elements, top })
}

/// All `χ : Q -> Σ` whose pullback of the top element is exactly the image
/// of `μ`. A classifier admits exactly one.
pub fn characteristic_maps(
    c: &FinCategory,
    sigma: &Sigma,
    p: &Presheaf,
    q: &Presheaf,
    mu: &NatTrans,
) -> Result<Vec<NatTrans>> {
    check_mono(c, p, q, mu)?;
    let im = image(mu);
    let mut ns = NatSearch::new(c, q, &sigma.presheaf);
    for a in c.objects() {
        for x in 0..q.size(a) {
            let inside = im[a.0].contains(&x);
            let mask = (0..sigma.presheaf.size(a)).map(|s| (s == sigma.top[a.0]) == inside).collect();
            ns.search.restrict(ns.node(a, x), mask);
        }
    }
    Ok(ns.search.collect(None).iter().map(|flat| ns.decode(c, q, flat)).collect())
}
