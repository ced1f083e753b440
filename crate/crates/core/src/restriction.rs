//! Restriction structure on a finite category.

use crate::cat::{FinCategory, Mor, Obj, SubCategory};
use crate::error::{Error, Result};
use crate::report::{LawReport, Violation};

/// A finite category with a restriction assignment `f ↦ f̄` stored as a
/// total table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionCategory {
    cat: FinCategory,
    bar: Vec<Mor>,
}

impl RestrictionCategory {
    /// Only the typing of `bar` is checked here (`f̄ : A -> A` for
    /// `f : A -> B`); the axioms are checked by [`check_restriction_axioms`].
    pub fn new(cat: FinCategory, bar: Vec<Mor>) -> Result<Self> {
        if bar.len() != cat.num_morphisms() {
            return Err(Error::IllFormed("restriction table is not total".into()));
        }
        for f in cat.morphisms() {
            let b = bar[f.0];
            cat.check_mor(b)?;
            if cat.src(b) != cat.src(f) || cat.tgt(b) != cat.src(f) {
                return Err(Error::IllFormed(format!(
                    "restriction of {} is not an endomorphism of its source",
                    cat.name(f)
                )));
            }
        }
        Ok(RestrictionCategory { cat, bar })
    }

    /// Every map total: `f̄ = 1`.
    pub fn trivial(cat: FinCategory) -> Self {
        let bar = cat.morphisms().map(|f| cat.id(cat.src(f))).collect();
        RestrictionCategory { cat, bar }
    }

    pub fn cat(&self) -> &FinCategory {
        &self.cat
    }

    pub fn bar(&self, f: Mor) -> Mor {
        self.bar[f.0]
    }

    pub fn bar_table(&self) -> &[Mor] {
        &self.bar
    }

    fn parallel(&self, f: Mor, g: Mor) -> Result<()> {
        self.cat.check_mor(f)?;
        self.cat.check_mor(g)?;
        if !self.cat.parallel(f, g) {
            return Err(Error::NotParallel(f, g));
        }
        Ok(())
    }

    /// `f ≤ g` iff `f = g ∘ f̄`.
    pub fn leq(&self, f: Mor, g: Mor) -> Result<bool> {
        self.parallel(f, g)?;
        Ok(self.leq_unchecked(f, g))
    }

    pub(crate) fn leq_unchecked(&self, f: Mor, g: Mor) -> bool {
        f == self.cat.comp(g, self.bar(f))
    }

    /// `f ⌣ g` iff `f ∘ ḡ = g ∘ f̄`.
    pub fn compatible(&self, f: Mor, g: Mor) -> Result<bool> {
        self.parallel(f, g)?;
        Ok(self.compatible_unchecked(f, g))
    }

    pub(crate) fn compatible_unchecked(&self, f: Mor, g: Mor) -> bool {
        self.cat.comp(f, self.bar(g)) == self.cat.comp(g, self.bar(f))
    }

    pub fn is_total(&self, f: Mor) -> Result<bool> {
        self.cat.check_mor(f)?;
        Ok(self.bar(f) == self.cat.id(self.cat.src(f)))
    }

    pub fn is_restriction_idempotent(&self, e: Mor) -> Result<bool> {
        self.cat.check_mor(e)?;
        Ok(self.bar(e) == e)
    }

    pub fn restriction_idempotents(&self, a: Obj) -> Vec<Mor> {
        self.cat.hom(a, a).iter().copied().filter(|&e| self.bar(e) == e).collect()
    }

    /// Restriction idempotents that do not split.
    pub fn unsplit_idempotents(&self) -> Vec<Mor> {
        self.cat
            .objects()
            .flat_map(|a| self.restriction_idempotents(a))
            .filter(|&e| self.cat.split_idempotent(e).is_none())
            .collect()
    }

    pub fn is_split(&self) -> bool {
        self.unsplit_idempotents().is_empty()
    }
}

/// Exhaustive check of R1–R4 over all composable tuples.
pub fn check_restriction_axioms(x: &RestrictionCategory) -> LawReport {
    let c = x.cat();
    let mut report = LawReport::new();
    for f in c.morphisms() {
        // R1: f ∘ f̄ = f
        if c.comp(f, x.bar(f)) != f {
            report.push(Violation::new("R1", vec![f.0]));
        }
    }
    for a in c.objects() {
        let out = c.out_of_object(a);
        for &f in &out {
            for &g in &out {
                let (bf, bg) = (x.bar(f), x.bar(g));
                // R2: ḡ ∘ f̄ = f̄ ∘ ḡ
                if f < g && c.comp(bg, bf) != c.comp(bf, bg) {
                    report.push(Violation::new("R2", vec![g.0, f.0]));
                }
                // R3: (g ∘ f̄)‾ = ḡ ∘ f̄
                if x.bar(c.comp(g, bf)) != c.comp(bg, bf) {
                    report.push(Violation::new("R3", vec![g.0, f.0]));
                }
            }
        }
    }
    for f in c.morphisms() {
        for &h in &c.out_of_object(c.tgt(f)) {
            // R4: h̄ ∘ f = f ∘ (h ∘ f)‾
            if c.comp(x.bar(h), f) != c.comp(f, x.bar(c.comp(h, f))) {
                report.push(Violation::new("R4", vec![h.0, f.0]));
            }
        }
    }
    report
}

/// Reflexivity, antisymmetry and transitivity of `≤` on every hom-set.
pub fn check_hom_order(x: &RestrictionCategory) -> LawReport {
    let c = x.cat();
    let mut report = LawReport::new();
    for a in c.objects() {
        for b in c.objects() {
            let hom = c.hom(a, b);
            for &f in hom {
                if !x.leq_unchecked(f, f) {
                    report.push(Violation::new("ORD-REFL", vec![f.0]));
                }
                for &g in hom {
                    let fg = x.leq_unchecked(f, g);
                    if fg && f != g && x.leq_unchecked(g, f) {
                        report.push(Violation::new("ORD-ANTISYM", vec![f.0, g.0]));
                    }
                    if !fg {
                        continue;
                    }
                    for &h in hom {
                        if x.leq_unchecked(g, h) && !x.leq_unchecked(f, h) {
                            report.push(Violation::new("ORD-TRANS", vec![f.0, g.0, h.0]));
                        }
                    }
                }
            }
        }
    }
    report
}

/// The wide subcategory of total maps.
pub fn total_subcategory(x: &RestrictionCategory) -> Result<SubCategory> {
    let c = x.cat();
    let keep_obj = vec![true; c.num_objects()];
    let keep_mor: Vec<bool> = c.morphisms().map(|f| x.bar(f) == c.id(c.src(f))).collect();
    c.subcategory(&keep_obj, &keep_mor)
        .map_err(|e| Error::invariant(format!("total maps are not closed under composition: {e}")))
}
