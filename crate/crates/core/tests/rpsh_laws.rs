use jrcat::bridge::f_tilde;
use jrcat::classifier::sigma_classifier;
use jrcat::fixtures::{build_finset_mcat, build_finset_p, MonicClass};
use jrcat::join::{self, check_join_axioms, FamilyBound};
use jrcat::par::par;
use jrcat::presheaf::{count_nat_transformations, nat_transformations, NatTrans, Presheaf};
use jrcat::restriction::check_restriction_axioms;
use jrcat::rpsh::{
    check_rp_axioms, collage, compatible_element_families, element_compatible, element_leq, hom_restriction,
    nat_join, nat_leq, psh_category, yoneda_jr, yoneda_map, JoinRestrictionPresheaf, RestrictionPresheaf,
};
use jrcat::{Obj, RestrictionCategory};

/// Restriction presheaves that should pass, each with its base.
fn positive_fixtures() -> Vec<(RestrictionCategory, RestrictionPresheaf)> {
    let mut out = Vec::new();
    let fp = build_finset_p(2);
    for a in fp.cat().objects() {
        out.push((fp.rc.clone(), RestrictionPresheaf::representable(&fp.rc, a)));
    }
    let trivial = RestrictionCategory::trivial(fp.cat().clone());
    out.push((trivial.clone(), RestrictionPresheaf::total(fp.cat(), Presheaf::terminal(fp.cat()))));
    out.push((trivial, RestrictionPresheaf::total(fp.cat(), Presheaf::constant(fp.cat(), 2))));
    let fx = build_finset_mcat(2, MonicClass::Inj);
    let p = par(&fx.mc).unwrap();
    for d in fx.cat().objects() {
        out.push((p.rc.clone(), RestrictionPresheaf::representable(&p.rc, d)));
        let yd = Presheaf::representable(fx.cat(), d);
        out.push((p.rc.clone(), f_tilde(&fx.mc, &p, &yd).unwrap().rp));
    }
    let sigma = sigma_classifier(&fx.mc).unwrap();
    out.push((p.rc.clone(), f_tilde(&fx.mc, &p, &sigma.presheaf).unwrap().rp));
    out.push((p.rc.clone(), f_tilde(&fx.mc, &p, &Presheaf::terminal(fx.cat())).unwrap().rp));
    out
}

/// Each element restriction replaced by the first other endomorphism.
fn mutants(x: &RestrictionCategory, p: &RestrictionPresheaf, limit: usize) -> Vec<RestrictionPresheaf> {
    let c = x.cat();
    let mut out = Vec::new();
    for a in c.objects() {
        for u in 0..p.size(a) {
            if let Some(&e) = c.hom(a, a).iter().find(|&&e| e != p.bar(a, u)) {
                out.push(p.with_bar(a, u, e));
                if out.len() == limit {
                    return out;
                }
            }
        }
    }
    out
}

#[test]
fn collage_is_a_restriction_category_exactly_for_restriction_presheaves() {
    let fixtures = positive_fixtures();
    assert!(fixtures.len() >= 10);
    let (mut positives, mut failing_mutants) = (0, 0);
    for (x, p) in &fixtures {
        let rp_ok = check_rp_axioms(x, p).is_empty();
        assert!(rp_ok);
        assert_eq!(check_restriction_axioms(&collage(x, p).unwrap()).is_empty(), rp_ok);
        positives += 1;
        for m in mutants(x, p, 3) {
            let rp_ok = check_rp_axioms(x, &m).is_empty();
            let col_ok = check_restriction_axioms(&collage(x, &m).unwrap()).is_empty();
            assert_eq!(rp_ok, col_ok);
            if !rp_ok {
                failing_mutants += 1;
            }
        }
    }
    assert!(positives >= 10 && failing_mutants >= 10);
}

#[test]
fn collage_of_empty_presheaf_adds_an_isolated_object() {
    let fp = build_finset_p(1);
    let c = fp.cat();
    let empty = RestrictionPresheaf::total(c, Presheaf::constant(c, 0));
    let col = collage(&fp.rc, &empty).unwrap();
    assert_eq!(col.cat().num_objects(), c.num_objects() + 1);
    assert_eq!(col.cat().num_morphisms(), c.num_morphisms() + 1);
    assert!(check_restriction_axioms(&col).is_empty());
}

#[test]
fn element_order_facts() {
    for (x, p) in positive_fixtures() {
        for a in x.cat().objects() {
            for u in 0..p.size(a) {
                assert!(element_leq(&p, (a, u), (a, u)).unwrap());
                for v in 0..p.size(a) {
                    let compatible = element_compatible(&p, (a, u), (a, v)).unwrap();
                    if element_leq(&p, (a, u), (a, v)).unwrap() {
                        assert!(compatible);
                    }
                    if compatible && p.bar(a, u) == p.bar(a, v) {
                        assert_eq!(u, v);
                    }
                }
            }
        }
    }
}

#[test]
fn incomparable_partial_maps_are_incompatible() {
    let fp = build_finset_p(2);
    let y = RestrictionPresheaf::representable(&fp.rc, Obj(2));
    let c = fp.cat();
    let f = fp.morphism(Obj(2), Obj(2), &[Some(0), None]).unwrap();
    let g = fp.morphism(Obj(2), Obj(2), &[Some(1), None]).unwrap();
    let (u, v) = (c.local_index(f), c.local_index(g));
    assert!(!element_compatible(&y, (Obj(2), u), (Obj(2), v)).unwrap());
}

#[test]
fn representables_are_join_restriction_presheaves_with_base_joins() {
    let fp = build_finset_p(2);
    let c = fp.cat();
    for a in c.objects() {
        let y = yoneda_jr(&fp.rc, a);
        assert!(jrcat::rpsh::check_jrp_axioms(&fp.rc, &y, FamilyBound::default()).is_empty());
        for b in c.objects() {
            for fam in join::compatible_families(&fp.rc, b, a, None) {
                let members: Vec<usize> = fam.iter().map(|&m| c.local_index(m)).collect();
                let expected = join::join(&fp.rc, &join::CompatibleFamily::new(&fp.rc, b, a, &fam).unwrap());
                assert_eq!(y.join(b, &members), expected.map(|m| c.local_index(m)));
            }
        }
    }
}

#[test]
fn transformations_preserve_order_compatibility_and_joins() {
    let fp = build_finset_p(2);
    let c = fp.cat();
    let ys: Vec<JoinRestrictionPresheaf> = c.objects().map(|a| yoneda_jr(&fp.rc, a)).collect();
    for p in &ys {
        for q in &ys {
            for alpha in nat_transformations(c, &p.rp.presheaf, &q.rp.presheaf, None, None) {
                for a in c.objects() {
                    for fam in compatible_element_families(&p.rp, a, None) {
                        let image: Vec<usize> = fam.iter().map(|&u| alpha.at(a, u)).collect();
                        for &u in &image {
                            for &v in &image {
                                assert!(element_compatible(&q.rp, (a, u), (a, v)).unwrap());
                            }
                        }
                        let j = p.join(a, &fam).unwrap();
                        assert_eq!(q.join(a, &image), Some(alpha.at(a, j)));
                    }
                    for u in 0..p.rp.size(a) {
                        for v in 0..p.rp.size(a) {
                            if element_leq(&p.rp, (a, u), (a, v)).unwrap() {
                                assert!(element_leq(&q.rp, (a, alpha.at(a, u)), (a, alpha.at(a, v))).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn hom_restriction_of_a_yoneda_map_is_the_yoneda_map_of_its_restriction() {
    let fp = build_finset_p(2);
    let c = fp.cat();
    for f in c.morphisms() {
        let (a, b) = (c.src(f), c.tgt(f));
        let ya = RestrictionPresheaf::representable(&fp.rc, a);
        let yb = RestrictionPresheaf::representable(&fp.rc, b);
        let alpha = yoneda_map(c, f);
        assert_eq!(hom_restriction(&fp.rc, &ya, &yb, &alpha).unwrap(), yoneda_map(c, fp.rc.bar(f)));
        if fp.rc.bar(f) == c.id(a) {
            assert_eq!(hom_restriction(&fp.rc, &ya, &yb, &alpha).unwrap(), NatTrans::identity(&ya.presheaf));
        }
    }
    // a family of maps that is not natural is refused
    let ya = RestrictionPresheaf::representable(&fp.rc, Obj(1));
    let mut bad = NatTrans::identity(&ya.presheaf);
    bad.components[1].swap(0, 1);
    assert!(hom_restriction(&fp.rc, &ya, &ya, &bad).is_err());
}

#[test]
fn nat_join_is_componentwise() {
    let fp = build_finset_p(2);
    let c = fp.cat();
    let (a, b) = (Obj(2), Obj(2));
    let ya = yoneda_jr(&fp.rc, a);
    let yb = yoneda_jr(&fp.rc, b);
    let f0 = fp.morphism(a, b, &[Some(1), None]).unwrap();
    let f1 = fp.morphism(a, b, &[None, Some(0)]).unwrap();
    let whole = fp.morphism(a, b, &[Some(1), Some(0)]).unwrap();
    let fam = [yoneda_map(c, f0), yoneda_map(c, f1)];
    let joined = nat_join(&fp.rc, &ya, &yb, &fam).unwrap();
    assert_eq!(joined, yoneda_map(c, whole));
    for t in &fam {
        assert!(nat_leq(c, &ya.rp, &yb.rp, t, &joined));
    }
    assert_eq!(nat_join(&fp.rc, &ya, &yb, &fam[..1]).unwrap(), fam[0]);
    let nowhere = fp.morphism(a, b, &[None, None]).unwrap();
    assert_eq!(nat_join(&fp.rc, &ya, &yb, &[]).unwrap(), yoneda_map(c, nowhere));
    let clash = fp.morphism(a, b, &[Some(0), None]).unwrap();
    assert!(nat_join(&fp.rc, &ya, &yb, &[yoneda_map(c, f0), yoneda_map(c, clash)]).is_err());
}

#[test]
fn presheaves_and_transformations_form_a_join_restriction_category() {
    let fp = build_finset_p(2);
    let objs: Vec<RestrictionPresheaf> =
        fp.cat().objects().map(|a| RestrictionPresheaf::representable(&fp.rc, a)).collect();
    let psh = psh_category(&fp.rc, &objs).unwrap();
    assert!(check_restriction_axioms(&psh.rc).is_empty());
    assert!(check_join_axioms(&psh.rc, FamilyBound::default()).is_empty());
}

#[test]
fn yoneda_is_full_and_faithful() {
    let fp = build_finset_p(2);
    let c = fp.cat();
    for a in c.objects() {
        for b in c.objects() {
            let ya = Presheaf::representable(c, a);
            let yb = Presheaf::representable(c, b);
            let maps: std::collections::HashSet<NatTrans> = c.hom(a, b).iter().map(|&f| yoneda_map(c, f)).collect();
            assert_eq!(maps.len(), c.hom(a, b).len());
            assert_eq!(count_nat_transformations(c, &ya, &yb), maps.len());
        }
    }
    // one object, one morphism: the representable is terminal
    let zero = build_finset_p(0);
    let y = yoneda_jr(&zero.rc, Obj(0));
    assert_eq!(y.rp.presheaf.sizes(), &[1]);
}
