//! Finite presheaves, natural transformations and their enumeration.

use std::ops::ControlFlow;

use crate::cat::{FinCategory, Mor, Obj};
use crate::error::{Error, Result};
use crate::functor::Functor;
use crate::solve::{Search, FREE};

/// A presheaf on a finite category. Sections over each object are
/// `0..size`; `action[f][x]` is `x · f` for `f : A -> B` and `x ∈ P(B)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presheaf {
    sizes: Vec<usize>,
    action: Vec<Vec<usize>>,
    labels: Option<Vec<Vec<String>>>,
}

impl Presheaf {
    /// Checks shapes and ranges against `c`; functoriality is checked by
    /// [`Presheaf::check_functorial`].
    pub fn new(c: &FinCategory, sizes: Vec<usize>, action: Vec<Vec<usize>>) -> Result<Self> {
        if sizes.len() != c.num_objects() || action.len() != c.num_morphisms() {
            return Err(Error::IllFormed("presheaf tables do not match the category".into()));
        }
        for f in c.morphisms() {
            let row = &action[f.0];
            if row.len() != sizes[c.tgt(f).0] || row.iter().any(|&y| y >= sizes[c.src(f).0]) {
                return Err(Error::IllFormed(format!("action of {} is mistyped", c.name(f))));
            }
        }
        Ok(Presheaf { sizes, action, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn labels(&self) -> Option<&[Vec<String>]> {
        self.labels.as_deref()
    }

    pub fn label(&self, a: Obj, x: usize) -> String {
        self.labels.as_ref().map_or_else(|| x.to_string(), |l| l[a.0][x].clone())
    }

    pub fn check_functorial(&self, c: &FinCategory) -> Result<()> {
        for a in c.objects() {
            let id = &self.action[c.id(a).0];
            if id.iter().enumerate().any(|(x, &y)| x != y) {
                return Err(Error::NotAFunctor(format!("identity of {} acts non-trivially", c.object_name(a))));
            }
        }
        for f in c.morphisms() {
            for &g in &c.out_of_object(c.tgt(f)) {
                let gf = c.comp(g, f);
                for x in 0..self.size(c.tgt(g)) {
                    if self.act(gf, x) != self.act(f, self.act(g, x)) {
                        return Err(Error::NotAFunctor(format!(
                            "action of {} o {} differs from the composite action",
                            c.name(g),
                            c.name(f)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, a: Obj) -> usize {
        self.sizes[a.0]
    }

    /// `x · f`.
    pub fn act(&self, f: Mor, x: usize) -> usize {
        self.action[f.0][x]
    }

    pub fn action_table(&self, f: Mor) -> &[usize] {
        &self.action[f.0]
    }

    pub fn total_size(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// `C(-, d)`; sections over `A` are indexed as in `hom(A, d)`.
    pub fn representable(c: &FinCategory, d: Obj) -> Self {
        let sizes = c.objects().map(|a| c.hom(a, d).len()).collect();
        let action = c
            .morphisms()
            .map(|f| c.hom(c.tgt(f), d).iter().map(|&x| c.local_index(c.comp(x, f))).collect())
            .collect();
        let labels = c.objects().map(|a| c.hom(a, d).iter().map(|&x| c.name(x).to_string()).collect()).collect();
        Presheaf { sizes, action, labels: Some(labels) }
    }

    pub fn constant(c: &FinCategory, k: usize) -> Self {
        let sizes = vec![k; c.num_objects()];
        let action = c.morphisms().map(|_| (0..k).collect()).collect();
        Presheaf { sizes, action, labels: None }
    }

    pub fn terminal(c: &FinCategory) -> Self {
        Self::constant(c, 1)
    }

    /// Sub-presheaf given by membership masks (assumed closed under the
    /// action), re-indexed densely. Also returns the inclusion.
    pub fn sub(&self, c: &FinCategory, keep: &[Vec<bool>]) -> Result<(Presheaf, NatTrans)> {
        let mut new_index: Vec<Vec<usize>> = Vec::new();
        let mut components = Vec::new();
        for a in c.objects() {
            let mut idx = vec![FREE; self.size(a)];
            let mut comp = Vec::new();
            for x in 0..self.size(a) {
                if keep[a.0][x] {
                    idx[x] = comp.len();
                    comp.push(x);
                }
            }
            new_index.push(idx);
            components.push(comp);
        }
        let sizes = components.iter().map(|v| v.len()).collect();
        let action = c
            .morphisms()
            .map(|f| {
                components[c.tgt(f).0]
                    .iter()
                    .map(|&x| {
                        let y = new_index[c.src(f).0][self.act(f, x)];
                        if y == FREE {
                            Err(Error::IllFormed("sub-presheaf is not closed under the action".into()))
                        } else {
                            Ok(y)
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let labels = self.labels.as_ref().map(|l| {
            components.iter().enumerate().map(|(a, comp)| comp.iter().map(|&x| l[a][x].clone()).collect()).collect()
        });
        Ok((Presheaf { sizes, action, labels }, NatTrans { components }))
    }

    /// `P ∘ F` for a functor `F : D -> C`.
    pub fn restrict_along(&self, f: &Functor, d: &FinCategory) -> Presheaf {
        Presheaf {
            sizes: d.objects().map(|a| self.size(f.apply_obj(a))).collect(),
            action: d.morphisms().map(|m| self.action[f.apply(m).0].clone()).collect(),
            labels: self.labels.as_ref().map(|l| d.objects().map(|a| l[f.apply_obj(a).0].clone()).collect()),
        }
    }
}

/// A natural transformation given by its components.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NatTrans {
    pub components: Vec<Vec<usize>>,
}

impl NatTrans {
    pub fn identity(p: &Presheaf) -> Self {
        NatTrans { components: p.sizes().iter().map(|&n| (0..n).collect()).collect() }
    }

    pub fn at(&self, a: Obj, x: usize) -> usize {
        self.components[a.0][x]
    }

    /// `self` then `other`.
    pub fn then(&self, other: &NatTrans) -> NatTrans {
        NatTrans {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(f, g)| f.iter().map(|&x| g[x]).collect())
                .collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        self.components.iter().all(|comp| {
            let mut seen = std::collections::HashSet::new();
            comp.iter().all(|x| seen.insert(*x))
        })
    }

    /// Inverse of a componentwise bijection onto `q`.
    pub fn inverse(&self, q: &Presheaf) -> Option<NatTrans> {
        let mut components = Vec::new();
        for (a, comp) in self.components.iter().enumerate() {
            if comp.len() != q.sizes()[a] {
                return None;
            }
            let mut inv = vec![FREE; comp.len()];
            for (x, &y) in comp.iter().enumerate() {
                if inv[y] != FREE {
                    return None;
                }
                inv[y] = x;
            }
            components.push(inv);
        }
        Some(NatTrans { components })
    }
}

pub fn check_natural(c: &FinCategory, p: &Presheaf, q: &Presheaf, alpha: &NatTrans) -> Result<()> {
    if alpha.components.len() != c.num_objects() {
        return Err(Error::NotNatural("wrong number of components".into()));
    }
    for a in c.objects() {
        let comp = &alpha.components[a.0];
        if comp.len() != p.size(a) || comp.iter().any(|&y| y >= q.size(a)) {
            return Err(Error::NotNatural(format!("component at {} is mistyped", c.object_name(a))));
        }
    }
    for f in c.morphisms() {
        let (a, b) = (c.src(f), c.tgt(f));
        for x in 0..p.size(b) {
            if alpha.at(a, p.act(f, x)) != q.act(f, alpha.at(b, x)) {
                return Err(Error::NotNatural(format!("square at {} fails", c.name(f))));
            }
        }
    }
    Ok(())
}

pub fn is_natural(c: &FinCategory, p: &Presheaf, q: &Presheaf, alpha: &NatTrans) -> bool {
    check_natural(c, p, q, alpha).is_ok()
}

/// One search node per section of `p`, valued in `q`.
pub(crate) struct NatSearch {
    pub search: Search,
    pub offsets: Vec<usize>,
}

impl NatSearch {
    pub(crate) fn new(c: &FinCategory, p: &Presheaf, q: &Presheaf) -> Self {
        let mut offsets = Vec::with_capacity(c.num_objects());
        let mut universe = Vec::new();
        for a in c.objects() {
            offsets.push(universe.len());
            universe.extend(std::iter::repeat(q.size(a)).take(p.size(a)));
        }
        let mut search = Search::new(universe);
        for f in c.morphisms() {
            if c.is_identity(f) {
                continue;
            }
            let (a, b) = (c.src(f), c.tgt(f));
            if p.size(b) == 0 {
                continue;
            }
            let map = search.add_map(q.action_table(f).to_vec());
            for x in 0..p.size(b) {
                search.add_edge(offsets[b.0] + x, offsets[a.0] + p.act(f, x), map);
            }
        }
        NatSearch { search, offsets }
    }

    pub(crate) fn node(&self, a: Obj, x: usize) -> usize {
        self.offsets[a.0] + x
    }

    pub(crate) fn decode(&self, c: &FinCategory, p: &Presheaf, flat: &[usize]) -> NatTrans {
        NatTrans {
            components: c
                .objects()
                .map(|a| flat[self.offsets[a.0]..self.offsets[a.0] + p.size(a)].to_vec())
                .collect(),
        }
    }

    /// Components bijective.
    pub(crate) fn bijective(&mut self, c: &FinCategory, p: &Presheaf) {
        for a in c.objects() {
            let g = self.search.new_group(p.size(a));
            for x in 0..p.size(a) {
                self.search.set_group(self.node(a, x), g);
            }
        }
    }
}

/// Natural transformations `p ⇒ q` in lexicographic order, at most `limit`;
/// with a seed, a deterministic pseudo-random sample instead.
pub fn nat_transformations(
    c: &FinCategory,
    p: &Presheaf,
    q: &Presheaf,
    limit: Option<usize>,
    seed: Option<u64>,
) -> Vec<NatTrans> {
    let ns = NatSearch::new(c, p, q);
    let search = match seed {
        Some(s) => ns.search.clone().shuffled(s),
        None => ns.search.clone(),
    };
    search.collect(limit).iter().map(|flat| ns.decode(c, p, flat)).collect()
}

pub fn count_nat_transformations(c: &FinCategory, p: &Presheaf, q: &Presheaf) -> usize {
    NatSearch::new(c, p, q).search.count()
}

/// A natural isomorphism `p ≅ q`; `allowed(a, x, y)` may forbid sending
/// `x ∈ P(a)` to `y ∈ Q(a)`.
pub fn find_natural_iso(
    c: &FinCategory,
    p: &Presheaf,
    q: &Presheaf,
    allowed: Option<&dyn Fn(Obj, usize, usize) -> bool>,
) -> Option<NatTrans> {
    if c.objects().any(|a| p.size(a) != q.size(a)) {
        return None;
    }
    let mut ns = NatSearch::new(c, p, q);
    ns.bijective(c, p);
    if let Some(ok) = allowed {
        for a in c.objects() {
            for x in 0..p.size(a) {
                let mask = (0..q.size(a)).map(|y| ok(a, x, y)).collect();
                ns.search.restrict(ns.node(a, x), mask);
            }
        }
    }
    ns.search.first().map(|flat| ns.decode(c, p, &flat))
}

/// All sub-presheaves of `p` as membership masks.
pub fn subpresheaves(c: &FinCategory, p: &Presheaf, limit: Option<usize>) -> Vec<Vec<Vec<bool>>> {
    let mut offsets = Vec::new();
    let mut n = 0;
    for a in c.objects() {
        offsets.push(n);
        n += p.size(a);
    }
    let mut search = Search::new(vec![2; n]);
    let keep = search.add_map(vec![FREE, 1]);
    for f in c.morphisms() {
        let (a, b) = (c.src(f), c.tgt(f));
        for x in 0..p.size(b) {
            search.add_edge(offsets[b.0] + x, offsets[a.0] + p.act(f, x), keep);
        }
    }
    let mut out = Vec::new();
    search.for_each(|flat| {
        out.push(c.objects().map(|a| (0..p.size(a)).map(|x| flat[offsets[a.0] + x] == 1).collect()).collect());
        match limit {
            Some(l) if out.len() >= l => ControlFlow::Break(()),
            _ => ControlFlow::Continue(()),
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::build_finset;

    #[test]
    fn representables_are_functorial() {
        let c = build_finset(2);
        for d in c.objects() {
            let y = Presheaf::representable(&c, d);
            y.check_functorial(&c).unwrap();
        }
        Presheaf::constant(&c, 2).check_functorial(&c).unwrap();
    }

    #[test]
    fn yoneda_count() {
        // Nat(yD, P) ≅ P(D)
        let c = build_finset(2);
        let p = Presheaf::representable(&c, Obj(1));
        for d in c.objects() {
            let yd = Presheaf::representable(&c, d);
            assert_eq!(count_nat_transformations(&c, &yd, &p), p.size(d));
        }
    }

    #[test]
    fn iso_search_and_inverse() {
        let c = build_finset(1);
        let y = Presheaf::representable(&c, Obj(1));
        let alpha = find_natural_iso(&c, &y, &y, None).unwrap();
        check_natural(&c, &y, &y, &alpha).unwrap();
        let inv = alpha.inverse(&y).unwrap();
        assert_eq!(alpha.then(&inv), NatTrans::identity(&y));
    }

    #[test]
    fn terminal_has_two_subpresheaves_per_shape() {
        let c = build_finset(1);
        let t = Presheaf::terminal(&c);
        // sieves on the terminal presheaf: closed upward along maps 0 -> 1
        let subs = subpresheaves(&c, &t, None);
        assert_eq!(subs.len(), 3);
    }

    #[test]
    fn non_natural_is_rejected() {
        let c = build_finset(1);
        let t = Presheaf::terminal(&c);
        let two = Presheaf::constant(&c, 2);
        let bad = NatTrans { components: vec![vec![0], vec![1]] };
        assert!(matches!(check_natural(&c, &t, &two, &bad), Err(Error::NotNatural(_))));
    }
}
