// SPDX-License-Identifier: Apache-2.0

//! Stallings folding.
//!
//! Vertices live in a union-find forest. Each class keeps, per label, the
//! target of its outgoing edge and the source of its incoming edge. Adding an
//! edge whose slot is already taken, or merging two classes whose slots
//! collide, queues a further merge; the queue drains to the folded graph.
//! Pruning then strips hanging trees.

use rand::Rng;

use super::{CoreGraph, Edge};
use crate::error::{Error, Result};
use crate::words::Word;

/// A finite pointed labeled graph that need not be folded or core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreGraph {
    rank: u32,
    vertex_count: usize,
    basepoint: usize,
    edges: Vec<Edge>,
}

impl PreGraph {
    /// A single basepoint, no edges.
    pub fn new(rank: u32) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidRank);
        }
        Ok(PreGraph {
            rank,
            vertex_count: 1,
            basepoint: 0,
            edges: Vec::new(),
        })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn set_basepoint(&mut self, v: usize) {
        assert!(v < self.vertex_count);
        self.basepoint = v;
    }

    pub fn add_vertex(&mut self) -> usize {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    pub fn add_edge(&mut self, origin: usize, terminus: usize, label: u32) {
        assert!(origin < self.vertex_count && terminus < self.vertex_count);
        assert!((1..=self.rank).contains(&label), "label out of range");
        self.edges.push(Edge {
            origin,
            terminus,
            label,
        });
    }

    /// Adds a path spelling `word` from `start`, ending at `end` when given,
    /// otherwise at a fresh vertex. Returns the final vertex.
    pub fn add_path(&mut self, start: usize, word: &Word, end: Option<usize>) -> usize {
        let letters = word.letters();
        let mut v = start;
        for (i, l) in letters.iter().enumerate() {
            let u = match end {
                Some(end) if i + 1 == letters.len() => end,
                _ => self.add_vertex(),
            };
            if l.is_inverse() {
                self.add_edge(u, v, l.generator());
            } else {
                self.add_edge(v, u, l.generator());
            }
            v = u;
        }
        v
    }

    /// A closed path at the basepoint spelling `word`; identity words are skipped.
    pub fn add_loop(&mut self, word: &Word) {
        if !word.is_identity() {
            let bp = self.basepoint;
            self.add_path(bp, word, Some(bp));
        }
    }

    /// Folds in insertion order, then prunes.
    pub fn fold(&self) -> CoreGraph {
        let mut folder = Folder::new(self.rank as usize, self.vertex_count);
        for e in &self.edges {
            folder.insert(e);
            folder.drain(|_| 0);
        }
        folder.finish(self.rank, self.basepoint)
    }

    /// Folds with edge insertions and pending merges taken in random order.
    /// The result does not depend on the order.
    pub fn fold_shuffled<R: Rng + ?Sized>(&self, rng: &mut R) -> CoreGraph {
        let mut folder = Folder::new(self.rank as usize, self.vertex_count);
        let mut edges = self.edges.clone();
        for i in (1..edges.len()).rev() {
            edges.swap(i, rng.random_range(0..=i));
        }
        for e in &edges {
            folder.insert(e);
            if rng.random_bool(0.5) {
                folder.drain(|len| rng.random_range(0..len));
            }
        }
        folder.drain(|len| rng.random_range(0..len));
        folder.finish(self.rank, self.basepoint)
    }
}

struct Folder {
    k: usize,
    parent: Vec<usize>,
    size: Vec<usize>,
    out: Vec<Option<usize>>,
    inc: Vec<Option<usize>>,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    fn new(k: usize, n: usize) -> Self {
        Folder {
            k,
            parent: (0..n).collect(),
            size: vec![1; n],
            out: vec![None; n * k],
            inc: vec![None; n * k],
            pending: Vec::new(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn insert(&mut self, e: &Edge) {
        let o = self.find(e.origin);
        let t = self.find(e.terminus);
        let l = e.label as usize - 1;
        match self.out[o * self.k + l] {
            Some(t2) => self.pending.push((t, t2)),
            None => self.out[o * self.k + l] = Some(t),
        }
        match self.inc[t * self.k + l] {
            Some(o2) => self.pending.push((o, o2)),
            None => self.inc[t * self.k + l] = Some(o),
        }
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        let (keep, gone) = if self.size[a] >= self.size[b] { (a, b) } else { (b, a) };
        self.parent[gone] = keep;
        self.size[keep] += self.size[gone];
        for l in 0..self.k {
            if let Some(t) = self.out[gone * self.k + l].take() {
                match self.out[keep * self.k + l] {
                    Some(t2) => self.pending.push((t, t2)),
                    None => self.out[keep * self.k + l] = Some(t),
                }
            }
            if let Some(o) = self.inc[gone * self.k + l].take() {
                match self.inc[keep * self.k + l] {
                    Some(o2) => self.pending.push((o, o2)),
                    None => self.inc[keep * self.k + l] = Some(o),
                }
            }
        }
    }

    fn drain(&mut self, mut choose: impl FnMut(usize) -> usize) {
        while !self.pending.is_empty() {
            let i = choose(self.pending.len());
            let (a, b) = self.pending.swap_remove(i);
            self.merge(a, b);
        }
    }

    fn finish(mut self, rank: u32, basepoint: usize) -> CoreGraph {
        let n = self.parent.len();
        let mut id = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for v in 0..n {
            if self.find(v) == v {
                id[v] = reps.len();
                reps.push(v);
            }
        }
        let mut edges = Vec::new();
        for &v in &reps {
            for l in 0..self.k {
                if let Some(t) = self.out[v * self.k + l] {
                    let t = self.find(t);
                    edges.push(Edge {
                        origin: id[v],
                        terminus: id[t],
                        label: l as u32 + 1,
                    });
                }
            }
        }
        let bp = id[self.find(basepoint)];
        prune(rank, reps.len(), bp, edges)
    }
}

/// Keeps the basepoint component and repeatedly removes non-basepoint
/// vertices of degree at most one.
fn prune(rank: u32, n: usize, basepoint: usize, edges: Vec<Edge>) -> CoreGraph {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in edges.iter().enumerate() {
        incident[e.origin].push(i);
        incident[e.terminus].push(i);
    }

    let mut reached = vec![false; n];
    reached[basepoint] = true;
    let mut stack = vec![basepoint];
    while let Some(v) = stack.pop() {
        for &i in &incident[v] {
            let e = edges[i];
            for u in [e.origin, e.terminus] {
                if !reached[u] {
                    reached[u] = true;
                    stack.push(u);
                }
            }
        }
    }

    let mut alive_edge: Vec<bool> = edges.iter().map(|e| reached[e.origin]).collect();
    let mut alive_vertex = reached;
    let mut degree: Vec<usize> = incident.iter().map(Vec::len).collect();
    let mut stack: Vec<usize> = (0..n)
        .filter(|&v| v != basepoint && alive_vertex[v] && degree[v] <= 1)
        .collect();
    while let Some(v) = stack.pop() {
        if !alive_vertex[v] {
            continue;
        }
        alive_vertex[v] = false;
        for &i in &incident[v] {
            if !alive_edge[i] {
                continue;
            }
            alive_edge[i] = false;
            let e = edges[i];
            let u = if e.origin == v { e.terminus } else { e.origin };
            degree[u] -= 1;
            if u != basepoint && alive_vertex[u] && degree[u] <= 1 {
                stack.push(u);
            }
        }
    }

    let mut id = vec![usize::MAX; n];
    let mut count = 0;
    for v in 0..n {
        if alive_vertex[v] {
            id[v] = count;
            count += 1;
        }
    }
    let kept = edges
        .iter()
        .zip(&alive_edge)
        .filter(|(_, &a)| a)
        .map(|(e, _)| Edge {
            origin: id[e.origin],
            terminus: id[e.terminus],
            label: e.label,
        })
        .collect();
    CoreGraph::canonical(rank, count, id[basepoint], kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn wedge_folds_to_four_vertices() {
        let mut pre = PreGraph::new(2).unwrap();
        pre.add_loop(&Word::parse("x1 x2 X1 X1 X1", 2).unwrap());
        pre.add_loop(&Word::parse("x1 x1 x2 X1 X1", 2).unwrap());
        assert_eq!(pre.vertex_count(), 9);
        let folded = pre.fold();
        assert_eq!((folded.vertex_count(), folded.edge_count()), (4, 5));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            assert_eq!(pre.fold_shuffled(&mut rng), folded);
        }
    }

    #[test]
    fn hanging_tree_is_pruned() {
        let mut pre = PreGraph::new(2).unwrap();
        let a = pre.add_vertex();
        let b = pre.add_vertex();
        pre.add_edge(0, 0, 1);
        pre.add_edge(0, a, 2);
        pre.add_edge(a, b, 1);
        let c = pre.add_vertex();
        pre.add_edge(c, c, 2);
        assert_eq!(pre.fold(), CoreGraph::from_words(2, &["x1"]).unwrap());
    }

    #[test]
    fn tree_collapses_to_trivial() {
        let mut pre = PreGraph::new(1).unwrap();
        let a = pre.add_vertex();
        pre.add_edge(0, a, 1);
        assert!(pre.fold().is_trivial());
    }

    #[test]
    fn nonzero_basepoint() {
        let mut pre = PreGraph::new(2).unwrap();
        let a = pre.add_vertex();
        pre.add_edge(0, a, 1);
        pre.add_edge(a, a, 2);
        pre.set_basepoint(a);
        let g = pre.fold();
        assert_eq!(g, CoreGraph::from_words(2, &["x2"]).unwrap());
    }
}
