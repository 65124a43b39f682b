//! Stallings folding for finitely generated subgroups of free groups.

use crate::error::{Error, Result};
use crate::group::{Element, GroupModel, Letter};

/// Folded, deterministic automaton recognising a subgroup `H ≤ F_k`. State 0
/// is the basepoint; `h ∈ H` iff the normal form of `h` reads a loop there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupAutomaton {
    /// `transitions[state][letter]`.
    transitions: Vec<Vec<Option<u32>>>,
    inverse: Vec<Letter>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    /// Merges keeping the smaller representative, so the basepoint stays 0.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        self.0[hi] = lo;
        true
    }
}

impl SubgroupAutomaton {
    /// Folds the bouquet of generator loops.
    pub fn build(model: &GroupModel, generators: &[Element]) -> Result<Self> {
        if !model.is_free() {
            return Err(Error::Unsupported(
                "subgroup automata are only built for free groups".into(),
            ));
        }
        let k = model.alphabet_len();
        let mut edges: Vec<(usize, Letter, usize)> = Vec::new();
        let mut states = 1usize;
        for g in generators {
            let w = g.word();
            if w.is_empty() {
                continue;
            }
            let mut cur = 0usize;
            for (i, &x) in w.iter().enumerate() {
                let next = if i + 1 == w.len() {
                    0
                } else {
                    states += 1;
                    states - 1
                };
                edges.push((cur, x, next));
                cur = next;
            }
        }
        let mut uf = UnionFind((0..states).collect());
        // Fold until no state has two equally labelled outgoing edges.
        loop {
            let mut table: Vec<Vec<Option<usize>>> = vec![vec![None; k]; states];
            let mut changed = false;
            for &(u, x, v) in &edges {
                let (u, v) = (uf.find(u), uf.find(v));
                for (src, lab, dst) in [(u, x, v), (v, model.inverse(x), u)] {
                    match table[src][lab.index()] {
                        None => table[src][lab.index()] = Some(dst),
                        Some(t) => {
                            let t = uf.find(t);
                            if t != uf.find(dst) {
                                uf.union(t, dst);
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut index = vec![usize::MAX; states];
        let mut count = 0usize;
        for s in 0..states {
            let r = uf.find(s);
            if index[r] == usize::MAX {
                index[r] = count;
                count += 1;
            }
        }
        let mut transitions = vec![vec![None; k]; count];
        for &(u, x, v) in &edges {
            let (u, v) = (index[uf.find(u)] as u32, index[uf.find(v)] as u32);
            transitions[u as usize][x.index()] = Some(v);
            transitions[v as usize][model.inverse(x).index()] = Some(u);
        }
        Ok(SubgroupAutomaton {
            transitions,
            inverse: model.alphabet().map(|x| model.inverse(x)).collect(),
        })
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    #[inline]
    pub fn step(&self, state: u32, x: Letter) -> Option<u32> {
        self.transitions[state as usize][x.index()]
    }

    /// State reached by reading `word` from the basepoint.
    pub fn read(&self, word: &[Letter]) -> Option<u32> {
        word.iter().try_fold(0u32, |s, &x| self.step(s, x))
    }

    pub fn contains(&self, h: &Element) -> bool {
        self.contains_word(h.word())
    }

    pub fn contains_word(&self, word: &[Letter]) -> bool {
        self.read(word) == Some(0)
    }

    /// True iff every edge `s -x-> t` is matched by `t -x⁻¹-> s`. A table
    /// with one target per label cannot hold two equally labelled edges, so
    /// this is the remaining folding invariant.
    pub fn is_folded(&self) -> bool {
        self.transitions.iter().enumerate().all(|(s, row)| {
            row.iter().enumerate().all(|(x, t)| match t {
                None => true,
                Some(t) => self.transitions[*t as usize][self.inverse[x].index()] == Some(s as u32),
            })
        })
    }
}
