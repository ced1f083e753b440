//! Finite sets and (partial) functions, plus hand-built negative controls.
//!
//! Carriers are initial segments `{0, .., k-1}`. A morphism is stored as its
//! graph: one optional image per source element. Within a hom-set morphisms
//! are ordered by graph, with undefined sorting first, so the nowhere-defined
//! map always has the smallest id.

use std::collections::{BTreeSet, HashMap};

use crate::cat::{FinCategory, Mor, MorphismData, Obj};
use crate::error::{Error, Result};
use crate::mcat::MCategory;
use crate::restriction::RestrictionCategory;

pub type Graph = Vec<Option<usize>>;

fn encode(img: &[Option<usize>]) -> String {
    img.iter()
        .map(|v| match v {
            Some(y) => y.to_string(),
            None => "-".to_string(),
        })
        .collect()
}

fn compose(g: &[Option<usize>], f: &[Option<usize>]) -> Graph {
    f.iter().map(|v| v.and_then(|y| g[y])).collect()
}

fn domain_identity(f: &[Option<usize>]) -> Graph {
    f.iter().enumerate().map(|(x, v)| v.map(|_| x)).collect()
}

/// A category of finite sets and partial functions given by an explicit list
/// of graphs, with restriction = partial identity on the domain of
/// definition.
#[derive(Debug, Clone)]
pub struct PartialFunctions {
    pub rc: RestrictionCategory,
    sizes: Vec<usize>,
    graphs: Vec<Graph>,
    index: HashMap<(Obj, Obj, Graph), Mor>,
}

impl PartialFunctions {
    /// `names[i]` names a set of `sizes[i]` elements; `maps` lists
    /// `(src, tgt, graph)` and is sorted into canonical order first.
    pub fn from_graphs(names: Vec<String>, sizes: Vec<usize>, maps: Vec<(Obj, Obj, Graph)>) -> Result<Self> {
        let mut maps = maps;
        maps.sort();
        maps.dedup();
        let mut index = HashMap::new();
        for (i, (a, b, g)) in maps.iter().enumerate() {
            if g.len() != sizes[a.0] || g.iter().flatten().any(|&y| y >= sizes[b.0]) {
                return Err(Error::IllFormed(format!("graph {} does not fit its endpoints", encode(g))));
            }
            index.insert((*a, *b, g.clone()), Mor(i));
        }
        let lookup = |a: Obj, b: Obj, g: &Graph| -> Result<Mor> {
            index.get(&(a, b, g.clone())).copied().ok_or_else(|| {
                Error::IllFormed(format!("{} is missing from the list of maps", encode(g)))
            })
        };
        let identity = (0..sizes.len())
            .map(|a| lookup(Obj(a), Obj(a), &(0..sizes[a]).map(Some).collect()))
            .collect::<Result<Vec<_>>>()?;
        let bar = maps
            .iter()
            .map(|(a, _, g)| lookup(*a, *a, &domain_identity(g)))
            .collect::<Result<Vec<_>>>()?;
        let morphisms = maps
            .iter()
            .map(|(a, b, g)| MorphismData::new(format!("{}>{}:{}", names[a.0], names[b.0], encode(g)), *a, *b))
            .collect();
        let cat = FinCategory::from_fn(names, morphisms, identity, |g, f| {
            let (a, _, gf) = &maps[f.0];
            let (_, c, gg) = &maps[g.0];
            index.get(&(*a, *c, compose(gg, gf))).copied()
        })?;
        let graphs = maps.into_iter().map(|(_, _, g)| g).collect();
        Ok(PartialFunctions { rc: RestrictionCategory::new(cat, bar)?, sizes, graphs, index })
    }

    /// Closes the given maps (and all identities) under composition and
    /// restriction.
    pub fn generated_by(names: Vec<String>, sizes: Vec<usize>, generators: &[(Obj, Obj, Graph)]) -> Result<Self> {
        let mut set: BTreeSet<(Obj, Obj, Graph)> = generators.iter().cloned().collect();
        for (a, &k) in sizes.iter().enumerate() {
            set.insert((Obj(a), Obj(a), (0..k).map(Some).collect()));
        }
        loop {
            let current: Vec<_> = set.iter().cloned().collect();
            let mut grew = false;
            for (a, b, f) in &current {
                grew |= set.insert((*a, *a, domain_identity(f)));
                for (b2, c, g) in &current {
                    if b2 == b {
                        grew |= set.insert((*a, *c, compose(g, f)));
                    }
                }
            }
            if !grew {
                break;
            }
        }
        Self::from_graphs(names, sizes, set.into_iter().collect())
    }

    pub fn cat(&self) -> &FinCategory {
        self.rc.cat()
    }

    pub fn size(&self, a: Obj) -> usize {
        self.sizes[a.0]
    }

    pub fn graph(&self, m: Mor) -> &[Option<usize>] {
        &self.graphs[m.0]
    }

    pub fn morphism(&self, a: Obj, b: Obj, graph: &[Option<usize>]) -> Option<Mor> {
        self.index.get(&(a, b, graph.to_vec())).copied()
    }

    /// Graph inclusion.
    pub fn graph_leq(&self, f: Mor, g: Mor) -> bool {
        self.graph(f).iter().zip(self.graph(g)).all(|(x, y)| x.is_none() || x == y)
    }

    /// Agreement wherever both are defined.
    pub fn graphs_agree(&self, f: Mor, g: Mor) -> bool {
        self.graph(f).iter().zip(self.graph(g)).all(|(x, y)| x.is_none() || y.is_none() || x == y)
    }

    /// Union of graphs of parallel maps in `a -> b`, if they agree pairwise
    /// and the union is present.
    pub fn union_join(&self, a: Obj, b: Obj, members: &[Mor]) -> Option<Mor> {
        let mut img: Graph = vec![None; self.size(a)];
        for &m in members {
            for (x, v) in self.graph(m).iter().enumerate() {
                match (img[x], v) {
                    (_, None) => {}
                    (None, Some(y)) => img[x] = Some(*y),
                    (Some(u), Some(y)) if u == *y => {}
                    _ => return None,
                }
            }
        }
        self.morphism(a, b, &img)
    }
}

fn all_graphs(k: usize, size: usize, partial: bool) -> Vec<Graph> {
    let options: Vec<Option<usize>> =
        if partial { std::iter::once(None).chain((0..size).map(Some)).collect() } else { (0..size).map(Some).collect() };
    let mut out: Vec<Graph> = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|g| {
                options.iter().map(move |&o| {
                    let mut g = g.clone();
                    g.push(o);
                    g
                })
            })
            .collect();
    }
    out
}

fn size_names(n: usize) -> Vec<String> {
    (0..=n).map(|k| k.to_string()).collect()
}

fn all_maps(n: usize, partial: bool) -> Vec<(Obj, Obj, Graph)> {
    let mut maps = Vec::new();
    for a in 0..=n {
        for b in 0..=n {
            for g in all_graphs(a, b, partial) {
                maps.push((Obj(a), Obj(b), g));
            }
        }
    }
    maps
}

/// Finite sets of size `0..=n` and all partial functions between them.
pub fn build_finset_p(n: usize) -> PartialFunctions {
    PartialFunctions::from_graphs(size_names(n), (0..=n).collect(), all_maps(n, true))
        .expect("partial functions are closed under composition")
}

/// Which monics form `M` in a finite-set fixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonicClass {
    Inj,
    Iso,
}

/// Finite sets of size `0..=n` with all total functions, and a chosen class
/// of monics.
#[derive(Debug, Clone)]
pub struct FinSetFixture {
    pub mc: MCategory,
    graphs: Vec<Vec<usize>>,
    index: HashMap<(Obj, Obj, Vec<usize>), Mor>,
}

impl FinSetFixture {
    pub fn cat(&self) -> &FinCategory {
        self.mc.cat()
    }

    pub fn graph(&self, m: Mor) -> &[usize] {
        &self.graphs[m.0]
    }

    pub fn morphism(&self, a: Obj, b: Obj, graph: &[usize]) -> Option<Mor> {
        self.index.get(&(a, b, graph.to_vec())).copied()
    }

    /// Image of a morphism as a set of target elements.
    pub fn image(&self, m: Mor) -> BTreeSet<usize> {
        self.graph(m).iter().copied().collect()
    }

    pub fn is_injective(&self, m: Mor) -> bool {
        self.image(m).len() == self.graph(m).len()
    }
}

pub fn build_finset(n: usize) -> FinCategory {
    build_finset_mcat(n, MonicClass::Iso).mc.cat().clone()
}

pub fn build_finset_mcat(n: usize, class: MonicClass) -> FinSetFixture {
    let maps = all_maps(n, false);
    let total: Vec<Vec<usize>> =
        maps.iter().map(|(_, _, g)| g.iter().map(|v| v.expect("total")).collect()).collect();
    let index: HashMap<(Obj, Obj, Vec<usize>), Mor> =
        maps.iter().zip(&total).enumerate().map(|(i, ((a, b, _), g))| ((*a, *b, g.clone()), Mor(i))).collect();
    let morphisms = maps
        .iter()
        .map(|(a, b, g)| MorphismData::new(format!("{}>{}:{}", a.0, b.0, encode(g)), *a, *b))
        .collect();
    let identity = (0..=n).map(|a| index[&(Obj(a), Obj(a), (0..a).collect())]).collect();
    let cat = FinCategory::from_fn(size_names(n), morphisms, identity, |g, f| {
        let (a, _, _) = &maps[f.0];
        let (_, c, _) = &maps[g.0];
        let img: Vec<usize> = total[f.0].iter().map(|&y| total[g.0][y]).collect();
        index.get(&(*a, *c, img)).copied()
    })
    .expect("functions compose");
    let monics: Vec<Mor> = cat
        .morphisms()
        .filter(|&m| {
            let g = &total[m.0];
            let injective = g.iter().collect::<BTreeSet<_>>().len() == g.len();
            match class {
                MonicClass::Inj => injective,
                MonicClass::Iso => injective && maps[m.0].0 == maps[m.0].1,
            }
        })
        .collect();
    let mc = MCategory::new(cat, &monics).expect("valid monic ids");
    FinSetFixture { mc, graphs: total, index }
}

/// A restriction category with a compatible pair that has no upper bound.
///
/// Objects `A = {0,1}` and `B = {0}`. The maps `A -> B` are the nowhere
/// defined map and the two maps defined at exactly one point; the total map
/// `A -> B` is left out, so those two compatible maps have no join. The only
/// map `B -> A` is nowhere defined, which keeps the empty family joinable.
pub struct NoJoinFixture {
    pub pf: PartialFunctions,
    pub pair: (Mor, Mor),
}

pub fn build_nojoin_fixture() -> NoJoinFixture {
    let (a, b) = (Obj(0), Obj(1));
    let generators = vec![
        (a, a, vec![Some(0), None]),
        (a, a, vec![None, Some(1)]),
        (b, b, vec![None]),
        (b, a, vec![None]),
        (a, b, vec![Some(0), None]),
        (a, b, vec![None, Some(0)]),
    ];
    let pf = PartialFunctions::generated_by(vec!["A".into(), "B".into()], vec![2, 1], &generators)
        .expect("closure of partial functions");
    let f1 = pf.morphism(a, b, &[Some(0), None]).expect("present");
    let f2 = pf.morphism(a, b, &[None, Some(0)]).expect("present");
    NoJoinFixture { pf, pair: (f1, f2) }
}
