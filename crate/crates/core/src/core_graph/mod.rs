// SPDX-License-Identifier: Apache-2.0

//! Stallings core graphs.
//!
//! A [`CoreGraph`] is a finite, connected, pointed graph with edges labeled
//! by generators `1..=k`. It is *folded* (at most one outgoing and one
//! incoming edge of each label at every vertex) and *core* (no hanging
//! trees away from the basepoint). Every value is kept in canonical form:
//! vertices are numbered in the order of a fixed breadth-first traversal
//! from the basepoint, so two graphs are isomorphic exactly when they are
//! equal, and equal graphs have identical serializations.

mod fold;
mod morphism;
mod quotient;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use fold::PreGraph;
pub use morphism::{morphism, GraphMorphism};
pub use quotient::Partition;

use crate::error::{Error, Result};
use crate::words::{Letter, Word};

/// A directed labeled edge. Labels are generator indices, starting at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub origin: usize,
    pub terminus: usize,
    pub label: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoreGraph {
    rank: u32,
    vertex_count: usize,
    /// Sorted by `(origin, label)`.
    edges: Vec<Edge>,
    out: Vec<Option<usize>>,
    inc: Vec<Option<usize>>,
}

impl CoreGraph {
    /// The basepoint is always vertex 0.
    pub const BASEPOINT: usize = 0;

    pub fn bouquet(rank: u32) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidRank);
        }
        let edges = (1..=rank)
            .map(|label| Edge {
                origin: 0,
                terminus: 0,
                label,
            })
            .collect();
        Ok(Self::canonical(rank, 1, 0, edges))
    }

    /// The single-vertex graph of the trivial subgroup.
    pub fn trivial(rank: u32) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidRank);
        }
        Ok(Self::canonical(rank, 1, 0, Vec::new()))
    }

    /// `Γ(⟨gens⟩)`: wedge of generator loops, folded and pruned.
    pub fn from_generators(rank: u32, gens: &[Word]) -> Result<Self> {
        let mut pre = PreGraph::new(rank)?;
        for g in gens {
            if g.rank() != rank {
                return Err(Error::RankMismatch {
                    left: rank,
                    right: g.rank(),
                });
            }
            pre.add_loop(g);
        }
        Ok(pre.fold())
    }

    pub fn from_words(rank: u32, gens: &[&str]) -> Result<Self> {
        let words = gens
            .iter()
            .map(|t| Word::parse(t, rank))
            .collect::<Result<Vec<_>>>()?;
        Self::from_generators(rank, &words)
    }

    /// Renumbers a folded, pruned, connected graph into canonical form.
    pub(crate) fn canonical(rank: u32, vertex_count: usize, basepoint: usize, edges: Vec<Edge>) -> Self {
        let k = rank as usize;
        let mut out = vec![None; vertex_count * k];
        let mut inc = vec![None; vertex_count * k];
        for (i, e) in edges.iter().enumerate() {
            let l = e.label as usize - 1;
            debug_assert!(out[e.origin * k + l].is_none(), "graph is not folded");
            debug_assert!(inc[e.terminus * k + l].is_none(), "graph is not folded");
            out[e.origin * k + l] = Some(i);
            inc[e.terminus * k + l] = Some(i);
        }

        let mut order = vec![usize::MAX; vertex_count];
        let mut queue = VecDeque::from([basepoint]);
        order[basepoint] = 0;
        let mut next = 1;
        while let Some(v) = queue.pop_front() {
            for l in 0..k {
                let neighbours = [
                    out[v * k + l].map(|i| edges[i].terminus),
                    inc[v * k + l].map(|i| edges[i].origin),
                ];
                for u in neighbours.into_iter().flatten() {
                    if order[u] == usize::MAX {
                        order[u] = next;
                        next += 1;
                        queue.push_back(u);
                    }
                }
            }
        }
        assert_eq!(next, vertex_count, "graph is not connected");

        let mut renamed: Vec<Edge> = edges
            .iter()
            .map(|e| Edge {
                origin: order[e.origin],
                terminus: order[e.terminus],
                label: e.label,
            })
            .collect();
        renamed.sort_unstable_by_key(|e| (e.origin, e.label));

        let mut out = vec![None; vertex_count * k];
        let mut inc = vec![None; vertex_count * k];
        for (i, e) in renamed.iter().enumerate() {
            let l = e.label as usize - 1;
            out[e.origin * k + l] = Some(i);
            inc[e.terminus * k + l] = Some(i);
        }
        CoreGraph {
            rank,
            vertex_count,
            edges: renamed,
            out,
            inc,
        }
    }

    pub fn rank_of_ambient(&self) -> u32 {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> Edge {
        self.edges[index]
    }

    /// Index of the `label`-edge leaving `v`.
    pub fn out_edge(&self, v: usize, label: u32) -> Option<usize> {
        self.out[v * self.rank as usize + label as usize - 1]
    }

    /// Index of the `label`-edge entering `v`.
    pub fn in_edge(&self, v: usize, label: u32) -> Option<usize> {
        self.inc[v * self.rank as usize + label as usize - 1]
    }

    /// Follows one letter from `v`: forward along an edge for `x_i`,
    /// backward for `X_i`.
    pub fn step(&self, v: usize, letter: Letter) -> Option<usize> {
        if letter.generator() > self.rank {
            return None;
        }
        if letter.is_inverse() {
            self.in_edge(v, letter.generator()).map(|i| self.edges[i].origin)
        } else {
            self.out_edge(v, letter.generator()).map(|i| self.edges[i].terminus)
        }
    }

    pub fn trace(&self, start: usize, word: &Word) -> Option<usize> {
        word.letters().iter().try_fold(start, |v, &l| self.step(v, l))
    }

    /// Vertex reached by reading `word` from the basepoint.
    pub fn endpoint(&self, word: &Word) -> Option<usize> {
        self.trace(Self::BASEPOINT, word)
    }

    /// Membership: `w` labels a closed path at the basepoint.
    pub fn contains(&self, word: &Word) -> bool {
        word.rank() == self.rank && self.endpoint(word) == Some(Self::BASEPOINT)
    }

    /// `|E| - |V|`, i.e. `rk(H) - 1`; `-1` for the trivial subgroup.
    pub fn reduced_rank(&self) -> i64 {
        self.edges.len() as i64 - self.vertex_count as i64
    }

    /// Rank of the subgroup; 0 for the trivial subgroup.
    pub fn rank(&self) -> u32 {
        (self.reduced_rank() + 1) as u32
    }

    pub fn is_trivial(&self) -> bool {
        self.edges.is_empty()
    }

    /// True for the bouquet of all `k` loops, i.e. the whole free group.
    pub fn is_whole_group(&self) -> bool {
        self.vertex_count == 1 && self.edges.len() == self.rank as usize
    }

    /// At most one outgoing and one incoming edge per label at each vertex.
    pub fn is_folded(&self) -> bool {
        let k = self.rank as usize;
        let mut out = vec![false; self.vertex_count * k];
        let mut inc = vec![false; self.vertex_count * k];
        for e in &self.edges {
            let l = e.label as usize - 1;
            if std::mem::replace(&mut out[e.origin * k + l], true)
                || std::mem::replace(&mut inc[e.terminus * k + l], true)
            {
                return false;
            }
        }
        true
    }

    /// Every non-basepoint vertex has degree at least 2 (loops count twice).
    pub fn is_core(&self) -> bool {
        let mut degree = vec![0usize; self.vertex_count];
        for e in &self.edges {
            degree[e.origin] += 1;
            degree[e.terminus] += 1;
        }
        degree.iter().skip(1).all(|&d| d >= 2)
    }

    /// Labels used by edges, ascending.
    pub fn labels(&self) -> Vec<u32> {
        let mut labels: Vec<u32> = self.edges.iter().map(|e| e.label).collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    /// Breadth-first spanning tree: for every vertex, the word read along the
    /// tree path from the basepoint, and for every edge whether it is a tree edge.
    fn spanning_tree(&self) -> (Vec<Word>, Vec<bool>) {
        let k = self.rank;
        let mut path: Vec<Option<Word>> = vec![None; self.vertex_count];
        let mut tree = vec![false; self.edges.len()];
        path[Self::BASEPOINT] = Some(Word::identity(k));
        let mut queue = VecDeque::from([Self::BASEPOINT]);
        while let Some(v) = queue.pop_front() {
            let pv = path[v].clone().expect("queued vertices have paths");
            for label in 1..=k {
                for letter in [Letter::pos(label), Letter::neg(label)] {
                    let edge = if letter.is_inverse() {
                        self.in_edge(v, label)
                    } else {
                        self.out_edge(v, label)
                    };
                    let Some(i) = edge else { continue };
                    let u = self.step(v, letter).expect("edge exists");
                    if path[u].is_none() {
                        tree[i] = true;
                        path[u] = Some(Word::from_letters(pv.letters().iter().copied().chain([letter]), k)
                            .expect("labels are within rank"));
                        queue.push_back(u);
                    }
                }
            }
        }
        (path.into_iter().map(|p| p.expect("graph is connected")).collect(), tree)
    }

    /// One generator per non-tree edge of a breadth-first spanning tree.
    pub fn spanning_basis(&self) -> Vec<Word> {
        let (path, tree) = self.spanning_tree();
        self.edges
            .iter()
            .zip(&tree)
            .filter(|(_, &t)| !t)
            .map(|(e, _)| {
                let middle = Word::from_letters([Letter::pos(e.label)], self.rank).expect("label within rank");
                &(&path[e.origin] * &middle) * &path[e.terminus].inverse()
            })
            .collect()
    }

    /// For each edge, the index of the basis word it carries in
    /// [`spanning_basis`](Self::spanning_basis), or `None` for tree edges.
    pub fn basis_edges(&self) -> Vec<Option<usize>> {
        let (_, tree) = self.spanning_tree();
        let mut next = 0;
        tree.iter()
            .map(|&t| {
                if t {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect()
    }

    /// Short human-readable name: `F_k` for the whole group, else `<basis>`.
    pub fn describe(&self) -> String {
        if self.is_whole_group() {
            return format!("F_{}", self.rank);
        }
        let basis: Vec<String> = self.spanning_basis().iter().map(|w| w.to_string()).collect();
        format!("<{}>", basis.join(", "))
    }

    /// Text serialization: `v <count> basepoint=0` followed by one
    /// `e <origin> <terminus> <label>` line per edge in canonical order.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parses [`to_text`](Self::to_text) output. The input is folded and
    /// canonicalized, so any description of the same graph parses equal.
    pub fn from_text(text: &str, rank: u32) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let bad = |line: usize, reason: &str| Error::GraphFormat {
            line,
            reason: reason.to_string(),
        };
        let (hline, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let count: usize = match fields.as_slice() {
            ["v", count, "basepoint=0"] => count.parse().map_err(|_| bad(hline, "bad vertex count"))?,
            _ => return Err(bad(hline, "expected `v <count> basepoint=0`")),
        };
        if count == 0 {
            return Err(bad(hline, "a graph needs at least the basepoint"));
        }
        let mut pre = PreGraph::new(rank)?;
        for _ in 1..count {
            pre.add_vertex();
        }
        for (line, text) in lines {
            let fields: Vec<&str> = text.split_whitespace().collect();
            let ["e", o, t, l] = fields.as_slice() else {
                return Err(bad(line, "expected `e <origin> <terminus> <label>`"));
            };
            let parse = |s: &str| s.parse::<usize>().map_err(|_| bad(line, "bad integer"));
            let (o, t, l) = (parse(o)?, parse(t)?, parse(l)?);
            if o >= count || t >= count {
                return Err(bad(line, "vertex out of range"));
            }
            if l == 0 || l > rank as usize {
                return Err(Error::GeneratorOutOfRange { index: l as u32, rank });
            }
            pre.add_edge(o, t, l as u32);
        }
        Ok(pre.fold())
    }
}

impl fmt::Display for CoreGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "v {} basepoint=0", self.vertex_count)?;
        for e in &self.edges {
            writeln!(f, "e {} {} {}", e.origin, e.terminus, e.label)?;
        }
        Ok(())
    }
}
