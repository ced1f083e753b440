use jrcat::classifier::{characteristic_maps, m_psh_member, m_sh_member, sigma_classifier};
use jrcat::fixtures::{build_finset_mcat, MonicClass};
use jrcat::mcat::sub_join;
use jrcat::presheaf::{subpresheaves, NatTrans, Presheaf};
use jrcat::sheafify::{plus, plus_equivalent, sheafify, sheafify_map};
use jrcat::site::{
    amalgamations, basis_covers, check_topology, generate_topology, is_separated, is_sheaf, matching_families,
    restrict_to, saturate, sheaf_report, Sieve,
};
use jrcat::{Mor, Obj};

fn bijective(alpha: &NatTrans) -> bool {
    alpha.components.iter().all(|comp| {
        let mut v = comp.clone();
        v.sort_unstable();
        v.iter().enumerate().all(|(i, &x)| i == x)
    })
}

#[test]
fn topology_is_a_saturated_fixpoint() {
    let fx = build_finset_mcat(2, MonicClass::Inj);
    let c = fx.cat();
    let j = generate_topology(&fx.mc).unwrap();
    assert!(check_topology(c, &j).is_empty());
    let again: Vec<Vec<Sieve>> = c.objects().map(|a| j.covers(a).cloned().collect()).collect();
    assert_eq!(saturate(c, &again), j);
    // the empty sieve covers the empty set
    assert!(j.is_covering(&Sieve { object: Obj(0), members: vec![] }));
    // the injections from singletons into a 2-set cover it
    let points: Vec<Mor> = c.hom(Obj(1), Obj(2)).iter().copied().filter(|&m| fx.mc.in_m(m)).collect();
    assert_eq!(points.len(), 2);
    assert!(j.is_covering(&Sieve::generated(c, Obj(2), &points)));
    assert!(!j.is_covering(&Sieve::generated(c, Obj(2), &points[..1])));
}

#[test]
fn basic_covers_of_a_two_set() {
    let fx = build_finset_mcat(2, MonicClass::Inj);
    let basis = basis_covers(&fx.mc).unwrap();
    let c = fx.cat();
    let id = c.id(Obj(2));
    assert!(basis[2].contains(&vec![id]));
    let singletons: Vec<Mor> = fx.mc.subobjects(Obj(2)).into_iter().filter(|&m| c.src(m) == Obj(1)).collect();
    assert!(basis[2].contains(&singletons));
    assert!(!basis[2].contains(&vec![singletons[0]]));
    assert!(basis[0].contains(&vec![]));
}

#[test]
fn representables_are_sheaves() {
    let fx = build_finset_mcat(2, MonicClass::Inj);
    let c = fx.cat();
    let j = generate_topology(&fx.mc).unwrap();
    for d in c.objects() {
        let y = Presheaf::representable(c, d);
        assert!(is_sheaf(c, &y, &j));
        let a = sheafify(c, &y, &j).unwrap();
        assert!(bijective(&a.unit));
    }
}

#[test]
fn constant_presheaf_fails_at_the_empty_cover() {
    let fx = build_finset_mcat(2, MonicClass::Inj);
    let c = fx.cat();
    let j = generate_topology(&fx.mc).unwrap();
    let two = Presheaf::constant(c, 2);
    let report = sheaf_report(c, &two, &j, false);
    assert!(report
        .violations
        .iter()
        .any(|v| v.tag == "SHEAF-UNIQUE" && v.ids.is_empty() && v.note.as_deref().unwrap().ends_with("at 0")));
}

#[test]
fn sheafify_inverts_covering_sieves() {
    let fx = build_finset_mcat(2, MonicClass::Inj);
    let c = fx.cat();
    let j = generate_topology(&fx.mc).unwrap();
    for d in c.objects() {
        let yd = Presheaf::representable(c, d);
        let ayd = sheafify(c, &yd, &j).unwrap();
        for s in j.covers(d) {
            let (r, incl) = s.as_presheaf(c).unwrap();
            let ar = sheafify(c, &r, &j).unwrap();
            let map = sheafify_map(c, &ar, &ayd, &incl).unwrap();
            assert!(bijective(&map), "cover {:?}", s.ids());
        }
    }
}

#[test]
fn separated_presheaf_needs_one_plus() {
    let fx = build_finset_mcat(2, MonicClass::Inj);
    let c = fx.cat();
    let j = generate_topology(&fx.mc).unwrap();
    let points: Vec<Mor> = fx.mc.subobjects(Obj(2)).into_iter().filter(|&m| c.src(m) == Obj(1)).collect();
    let (r, _) = Sieve::generated(c, Obj(2), &points).as_presheaf(c).unwrap();
    assert!(is_separated(c, &r, &j));
    assert!(!is_sheaf(c, &r, &j));
    let once = plus(c, &r, &j).unwrap();
    assert!(is_sheaf(c, &once.presheaf, &j));
    let twice = plus(c, &once.presheaf, &j).unwrap();
    assert!(bijective(&twice.unit));
}

#[test]
fn plus_classes_match_common_refinement() {
    let fx = build_finset_mcat(2, MonicClass::Inj);
    let c = fx.cat();
    let j = generate_topology(&fx.mc).unwrap();
    let two = Presheaf::constant(c, 2);
    for a in c.objects() {
        let least = j.least_cover(a).unwrap();
        let pairs: Vec<(Sieve, Vec<usize>)> = j
            .covers(a)
            .flat_map(|s| matching_families(c, &two, s).into_iter().map(move |f| (s.clone(), f)))
            .collect();
        let key = |s: &Sieve, f: &[usize]| -> Vec<usize> {
            least.members.iter().map(|m| f[s.members.binary_search(m).unwrap()]).collect()
        };
        for (s, x) in &pairs {
            for (t, y) in &pairs {
                assert_eq!(plus_equivalent(&j, s, x, t, y), key(s, x) == key(t, y));
            }
        }
    }
}

#[test]
fn sigma_is_a_separated_sheaf() {
    let fx = build_finset_mcat(2, MonicClass::Inj);
    let c = fx.cat();
    let j = generate_topology(&fx.mc).unwrap();
    let sigma = sigma_classifier(&fx.mc).unwrap();
    assert!(is_separated(c, &sigma.presheaf, &j));
    assert!(is_sheaf(c, &sigma.presheaf, &j));
}

#[test]
fn sigma_amalgamates_by_joins() {
    let fx = build_finset_mcat(2, MonicClass::Inj);
    let c = fx.cat();
    let sigma = sigma_classifier(&fx.mc).unwrap();
    let basis = basis_covers(&fx.mc).unwrap();
    for a in c.objects() {
        for cover in &basis[a.0] {
            let s = Sieve::generated(c, a, cover);
            for fam in matching_families(c, &sigma.presheaf, &s) {
                let amal = amalgamations(&sigma.presheaf, &s, &fam);
                assert_eq!(amal.len(), 1);
                let mut parts: Vec<Mor> = cover
                    .iter()
                    .map(|&ai| {
                        let k = s.members.binary_search(&ai).unwrap();
                        let mi = sigma.elements[c.src(ai).0][fam[k]];
                        fx.mc.canonical(c.comp(ai, mi))
                    })
                    .collect();
                parts.sort_unstable();
                parts.dedup();
                let joined = sub_join(&fx.mc, a, &parts).unwrap().unwrap();
                assert_eq!(sigma.elements[a.0][amal[0]], joined);
                assert_eq!(restrict_to(&sigma.presheaf, &s, amal[0]), fam);
            }
        }
    }
}

#[test]
fn sigma_classifies_members() {
    let fx = build_finset_mcat(2, MonicClass::Inj);
    let c = fx.cat();
    let j = generate_topology(&fx.mc).unwrap();
    let sigma = sigma_classifier(&fx.mc).unwrap();
    let mut targets: Vec<Presheaf> = c.objects().map(|d| Presheaf::representable(c, d)).collect();
    targets.push(Presheaf::terminal(c));
    targets.push(sigma.presheaf.clone());
    let mut members = 0;
    let mut non_members = 0;
    for q in &targets {
        for keep in subpresheaves(c, q, None) {
            let (p, mu) = q.sub(c, &keep).unwrap();
            let member = m_psh_member(&fx.mc, &p, q, &mu).unwrap();
            let sheaves = is_sheaf(c, &p, &j) && is_sheaf(c, q, &j);
            assert_eq!(m_sh_member(&fx.mc, &j, &p, q, &mu).unwrap(), member && sheaves);
            if member {
                members += 1;
                assert_eq!(characteristic_maps(c, &sigma, &p, q, &mu).unwrap().len(), 1);
            } else {
                non_members += 1;
            }
        }
    }
    assert!(members > 0 && non_members > 0);
}

#[test]
fn yoneda_images_of_m_are_members() {
    for (class, expected) in [(MonicClass::Inj, true), (MonicClass::Iso, false)] {
        let fx = build_finset_mcat(2, class);
        let c = fx.cat();
        let inj = build_finset_mcat(2, MonicClass::Inj);
        let m = inj.morphism(Obj(1), Obj(2), &[0]).unwrap();
        let (a, d) = (c.src(m), c.tgt(m));
        let ya = Presheaf::representable(c, a);
        let yd = Presheaf::representable(c, d);
        let ym = NatTrans {
            components: c
                .objects()
                .map(|b| c.hom(b, a).iter().map(|&h| c.local_index(c.comp(m, h))).collect())
                .collect(),
        };
        assert_eq!(m_psh_member(&fx.mc, &ya, &yd, &ym).unwrap(), expected);
    }
}
