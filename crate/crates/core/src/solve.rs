//! Backtracking search with forward propagation along functional constraints.
//!
//! Nodes take values in `0..universe[node]`. An edge `n -> t` with map `m`
//! forces `t = m[v]` whenever `n = v` (unless `m[v] == FREE`). Nodes may belong
//! to an all-different group. Branching always picks the lowest-index
//! unassigned node and tries candidate values in ascending order (or in a
//! seeded shuffled order), so enumeration is lexicographic and deterministic.
//!
//! Matching families, natural transformations, cocones, sieves and
//! sub-presheaves are all enumerated through this engine.

use std::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const FREE: usize = usize::MAX;

#[derive(Debug, Clone, Copy)]
struct Edge {
    to: usize,
    map: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Search {
    universe: Vec<usize>,
    allowed: Vec<Option<Vec<bool>>>,
    edges: Vec<Vec<Edge>>,
    maps: Vec<Vec<usize>>,
    group: Vec<Option<usize>>,
    group_size: Vec<usize>,
    seed: Option<u64>,
}

impl Search {
    pub(crate) fn new(universe: Vec<usize>) -> Self {
        let n = universe.len();
        Search {
            universe,
            allowed: vec![None; n],
            edges: vec![Vec::new(); n],
            maps: Vec::new(),
            group: vec![None; n],
            group_size: Vec::new(),
            seed: None,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.universe.len()
    }

    /// Registers a value map; edges refer to it by the returned handle.
    pub(crate) fn add_map(&mut self, map: Vec<usize>) -> usize {
        self.maps.push(map);
        self.maps.len() - 1
    }

    pub(crate) fn add_edge(&mut self, from: usize, to: usize, map: usize) {
        debug_assert_eq!(self.maps[map].len(), self.universe[from]);
        self.edges[from].push(Edge { to, map });
    }

    pub(crate) fn restrict(&mut self, node: usize, allowed: Vec<bool>) {
        debug_assert_eq!(allowed.len(), self.universe[node]);
        self.allowed[node] = Some(allowed);
    }

    pub(crate) fn new_group(&mut self, size: usize) -> usize {
        self.group_size.push(size);
        self.group_size.len() - 1
    }

    pub(crate) fn set_group(&mut self, node: usize, group: usize) {
        self.group[node] = Some(group);
    }

    pub(crate) fn shuffled(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub(crate) fn for_each(&self, mut visit: impl FnMut(&[usize]) -> ControlFlow<()>) {
        let mut state = State {
            assign: vec![FREE; self.len()],
            used: self.group_size.iter().map(|&s| vec![false; s]).collect(),
            trail: Vec::new(),
            rng: self.seed.map(ChaCha8Rng::seed_from_u64),
        };
        let _ = self.dfs(&mut state, 0, &mut visit);
    }

    pub(crate) fn first(&self) -> Option<Vec<usize>> {
        let mut out = None;
        self.for_each(|s| {
            out = Some(s.to_vec());
            ControlFlow::Break(())
        });
        out
    }

    pub(crate) fn collect(&self, limit: Option<usize>) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.for_each(|s| {
            out.push(s.to_vec());
            match limit {
                Some(l) if out.len() >= l => ControlFlow::Break(()),
                _ => ControlFlow::Continue(()),
            }
        });
        out
    }

    pub(crate) fn count(&self) -> usize {
        let mut n = 0;
        self.for_each(|_| {
            n += 1;
            ControlFlow::Continue(())
        });
        n
    }

    fn permitted(&self, node: usize, value: usize) -> bool {
        value < self.universe[node] && self.allowed[node].as_ref().map_or(true, |a| a[value])
    }

    fn assign(&self, st: &mut State, node: usize, value: usize) -> bool {
        let mut queue = vec![(node, value)];
        while let Some((n, v)) = queue.pop() {
            let cur = st.assign[n];
            if cur != FREE {
                if cur != v {
                    return false;
                }
                continue;
            }
            if !self.permitted(n, v) {
                return false;
            }
            if let Some(g) = self.group[n] {
                if st.used[g][v] {
                    return false;
                }
                st.used[g][v] = true;
            }
            st.assign[n] = v;
            st.trail.push(n);
            for e in &self.edges[n] {
                let t = self.maps[e.map][v];
                if t != FREE {
                    queue.push((e.to, t));
                }
            }
        }
        true
    }

    fn undo(&self, st: &mut State, mark: usize) {
        while st.trail.len() > mark {
            let n = st.trail.pop().expect("trail underflow");
            if let Some(g) = self.group[n] {
                st.used[g][st.assign[n]] = false;
            }
            st.assign[n] = FREE;
        }
    }

    fn dfs(
        &self,
        st: &mut State,
        mut next: usize,
        visit: &mut impl FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        while next < self.len() && st.assign[next] != FREE {
            next += 1;
        }
        if next == self.len() {
            return visit(&st.assign);
        }
        let mut values: Vec<usize> =
            (0..self.universe[next]).filter(|&v| self.permitted(next, v)).collect();
        if let Some(rng) = st.rng.as_mut() {
            values.shuffle(rng);
        }
        for v in values {
            let mark = st.trail.len();
            if self.assign(st, next, v) {
                self.dfs(st, next + 1, visit)?;
            }
            self.undo(st, mark);
        }
        ControlFlow::Continue(())
    }
}

struct State {
    assign: Vec<usize>,
    used: Vec<Vec<bool>>,
    trail: Vec<usize>,
    rng: Option<ChaCha8Rng>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_nodes_enumerate_product() {
        let s = Search::new(vec![2, 3]);
        assert_eq!(s.count(), 6);
        assert_eq!(s.first(), Some(vec![0, 0]));
    }

    #[test]
    fn edges_force_values() {
        let mut s = Search::new(vec![3, 3]);
        let m = s.add_map(vec![2, 1, 0]);
        s.add_edge(0, 1, m);
        let all = s.collect(None);
        assert_eq!(all, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn groups_are_all_different() {
        let mut s = Search::new(vec![3, 3, 3]);
        let g = s.new_group(3);
        for n in 0..3 {
            s.set_group(n, g);
        }
        assert_eq!(s.count(), 6);
    }

    #[test]
    fn restrictions_and_conflicts() {
        let mut s = Search::new(vec![2, 2]);
        let m = s.add_map(vec![1, FREE]);
        s.add_edge(0, 1, m);
        s.restrict(1, vec![true, false]);
        // node 0 = 0 would force node 1 = 1, which is not allowed
        assert_eq!(s.collect(None), vec![vec![1, 0]]);
    }

    #[test]
    fn shuffled_search_is_deterministic() {
        let s = Search::new(vec![4, 4]).shuffled(7);
        let a = s.collect(Some(5));
        let b = s.collect(Some(5));
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
    }
}
