// SPDX-License-Identifier: Apache-2.0

//! The fringe of a subgroup: every quotient of its core graph, ordered by
//! covering, with distances, free factors, algebraic extensions and the
//! primitivity rank.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::core_graph::{morphism, CoreGraph};
use crate::error::{Error, Result};
use crate::words::Word;

/// All graphs obtained from `g` by identifying one pair of vertices and
/// folding, deduplicated, in canonical order.
pub fn immediate_quotients(g: &CoreGraph) -> Vec<CoreGraph> {
    let n = g.vertex_count();
    let mut out: Vec<CoreGraph> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .map(|(u, v)| g.identify(u, v).expect("vertices in range"))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// The fringe of `root` as a DAG of immediate quotients.
///
/// Nodes are stored in breadth-first order from the root, so `nodes()[0]` is
/// the root and distances are nondecreasing along the list.
#[derive(Debug, Clone)]
pub struct FringePoset {
    nodes: Vec<CoreGraph>,
    index: HashMap<CoreGraph, usize>,
    dist: Vec<usize>,
    immediate: Vec<Vec<usize>>,
    covers: Vec<Vec<bool>>,
}

/// Breadth-first closure of `root` under immediate quotients.
pub fn fringe(root: &CoreGraph) -> Result<FringePoset> {
    if root.is_trivial() {
        return Err(Error::TrivialSubgroup);
    }
    let mut nodes = vec![root.clone()];
    let mut index = HashMap::from([(root.clone(), 0)]);
    let mut dist = vec![0];
    let mut immediate: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier = vec![0];
    let mut depth = 0;
    while !frontier.is_empty() {
        depth += 1;
        let expanded: Vec<Vec<CoreGraph>> = frontier
            .par_iter()
            .map(|&i| immediate_quotients(&nodes[i]))
            .collect();
        let mut next = Vec::new();
        for (&i, quotients) in frontier.iter().zip(expanded) {
            for q in quotients {
                let j = match index.get(&q) {
                    Some(&j) => j,
                    None => {
                        let j = nodes.len();
                        index.insert(q.clone(), j);
                        nodes.push(q);
                        dist.push(depth);
                        immediate.push(Vec::new());
                        next.push(j);
                        j
                    }
                };
                immediate[i].push(j);
            }
        }
        frontier = next;
    }
    let covers = nodes
        .par_iter()
        .map(|a| {
            nodes
                .iter()
                .map(|b| morphism(a, b).is_some_and(|m| m.is_surjective()))
                .collect()
        })
        .collect();
    Ok(FringePoset {
        nodes,
        index,
        dist,
        immediate,
        covers,
    })
}

impl FringePoset {
    pub fn root(&self) -> &CoreGraph {
        &self.nodes[0]
    }

    pub fn nodes(&self) -> &[CoreGraph] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &CoreGraph {
        &self.nodes[i]
    }

    pub fn index_of(&self, g: &CoreGraph) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// Indices of the immediate quotients of node `i`.
    pub fn immediate(&self, i: usize) -> &[usize] {
        &self.immediate[i]
    }

    /// Distance from the root to node `i`.
    pub fn dist(&self, i: usize) -> usize {
        self.dist[i]
    }

    /// Distance from the root to `target`.
    pub fn distance(&self, target: &CoreGraph) -> Result<usize> {
        self.index_of(target).map(|i| self.dist[i]).ok_or(Error::NotInFringe)
    }

    /// Whether node `a` covers node `b` (reflexive).
    pub fn covers(&self, a: usize, b: usize) -> bool {
        self.covers[a][b]
    }

    /// Distances from node `from` to every node, `None` where unreachable.
    pub fn distances_from(&self, from: usize) -> Vec<Option<usize>> {
        let mut d = vec![None; self.nodes.len()];
        d[from] = Some(0);
        let mut queue = VecDeque::from([from]);
        while let Some(i) = queue.pop_front() {
            for &j in &self.immediate[i] {
                if d[j].is_none() {
                    d[j] = Some(d[i].unwrap() + 1);
                    queue.push_back(j);
                }
            }
        }
        d
    }

    /// The nodes between `bottom` and `top`: those covered by `bottom` that
    /// cover `top`, in fringe order.
    pub fn interval(&self, bottom: usize, top: usize) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&c| self.covers[bottom][c] && self.covers[c][top])
            .collect()
    }

    /// Membership flags for the algebraic extensions of the root.
    pub fn algebraic_flags(&self) -> Vec<bool> {
        let mut flags = vec![true; self.nodes.len()];
        for (l, targets) in self.immediate.iter().enumerate() {
            let rl = self.nodes[l].reduced_rank();
            for &j in targets {
                if rl < self.nodes[j].reduced_rank() {
                    flags[j] = false;
                }
            }
        }
        flags
    }

    /// The primitivity profile of the root.
    pub fn profile(&self) -> AlgebraicProfile {
        let flags = self.algebraic_flags();
        let algebraic: Vec<usize> = (0..self.nodes.len()).filter(|&i| flags[i]).collect();
        let min = algebraic.iter().skip(1).map(|&i| self.nodes[i].rank()).min();
        let critical: Vec<usize> = match min {
            Some(r) => algebraic
                .iter()
                .skip(1)
                .copied()
                .filter(|&i| self.nodes[i].rank() == r)
                .collect(),
            None => Vec::new(),
        };
        AlgebraicProfile {
            subject: self.root().clone(),
            algebraic_extensions: algebraic.iter().map(|&i| self.nodes[i].clone()).collect(),
            primitivity_rank: min.map_or(PrimitivityRank::Infinite, PrimitivityRank::Finite),
            critical: critical.iter().map(|&i| self.nodes[i].clone()).collect(),
        }
    }

    /// One summary per node, in fringe order.
    pub fn report(&self) -> Vec<NodeReport> {
        let flags = self.algebraic_flags();
        let profile = self.profile();
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, g)| NodeReport {
                index: i,
                rank: g.rank(),
                distance: self.dist[i],
                vertices: g.vertex_count(),
                edges: g.edge_count(),
                algebraic: flags[i],
                critical: profile.critical.contains(g),
                subgroup: g.describe(),
                graph: g.to_text(),
            })
            .collect()
    }
}

/// Per-node line of a fringe report.
#[derive(Debug, Clone, Serialize)]
pub struct NodeReport {
    pub index: usize,
    pub rank: u32,
    pub distance: usize,
    pub vertices: usize,
    pub edges: usize,
    pub algebraic: bool,
    pub critical: bool,
    pub subgroup: String,
    pub graph: String,
}

impl fmt::Display for NodeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "node {} rank={} dist={} vertices={} edges={}",
            self.index, self.rank, self.distance, self.vertices, self.edges
        )?;
        if self.algebraic {
            f.write_str(" algebraic")?;
        }
        if self.critical {
            f.write_str(" critical")?;
        }
        writeln!(f, " {}", self.subgroup)?;
        f.write_str(&self.graph)
    }
}

/// An element of `{0, 1, ..., k} ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrimitivityRank {
    Finite(u32),
    Infinite,
}

impl PrimitivityRank {
    pub fn finite(self) -> Option<u32> {
        match self {
            PrimitivityRank::Finite(r) => Some(r),
            PrimitivityRank::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == PrimitivityRank::Infinite
    }
}

impl fmt::Display for PrimitivityRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimitivityRank::Finite(r) => write!(f, "{r}"),
            PrimitivityRank::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraicProfile {
    pub subject: CoreGraph,
    /// The subject first, then the rest in fringe order.
    pub algebraic_extensions: Vec<CoreGraph>,
    pub primitivity_rank: PrimitivityRank,
    pub critical: Vec<CoreGraph>,
}

impl AlgebraicProfile {
    /// `π - 1`, or `None` when `π = ∞`.
    pub fn reduced_primitivity_rank(&self) -> Option<i64> {
        self.primitivity_rank.finite().map(|r| r as i64 - 1)
    }
}

impl fmt::Display for AlgebraicProfile {
    /// `pi=2; crit=[F_2]; ae=[<x2 x1 X2 X1>, F_2]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |gs: &[CoreGraph]| gs.iter().map(CoreGraph::describe).collect::<Vec<_>>().join(", ");
        write!(
            f,
            "pi={}; crit=[{}]; ae=[{}]",
            self.primitivity_rank,
            list(&self.critical),
            list(&self.algebraic_extensions)
        )
    }
}

/// Distance from `root` to a graph it covers, searching only quotients that
/// still map onto `target`.
pub fn distance_to(root: &CoreGraph, target: &CoreGraph) -> Result<usize> {
    if !morphism(root, target).is_some_and(|m| m.is_surjective()) {
        return Err(Error::NotInFringe);
    }
    let mut seen = HashMap::from([(root.clone(), 0usize)]);
    let mut queue = VecDeque::from([root.clone()]);
    while let Some(g) = queue.pop_front() {
        let d = seen[&g];
        if &g == target {
            return Ok(d);
        }
        for q in immediate_quotients(&g) {
            if !seen.contains_key(&q) && morphism(&q, target).is_some() {
                seen.insert(q.clone(), d + 1);
                queue.push_back(q);
            }
        }
    }
    unreachable!("a covered graph is a quotient")
}

/// Whether `h` is a free factor of `j`.
pub fn is_free_factor(h: &CoreGraph, j: &CoreGraph) -> Result<bool> {
    let m = morphism(h, j).ok_or(Error::NotSubgroup)?;
    if h.is_trivial() {
        return Ok(true);
    }
    let image = m.image();
    let d = distance_to(h, &image)? as i64;
    Ok(d == image.reduced_rank() - h.reduced_rank())
}

/// The algebraic extensions of `root`, root first.
pub fn algebraic_extensions(root: &CoreGraph) -> Result<Vec<CoreGraph>> {
    Ok(primitivity_profile(root)?.algebraic_extensions)
}

pub fn primitivity_profile(root: &CoreGraph) -> Result<AlgebraicProfile> {
    Ok(fringe(root)?.profile())
}

/// Whether the word is part of some basis of the ambient free group.
pub fn is_primitive(w: &Word) -> Result<bool> {
    if w.is_identity() {
        return Err(Error::IdentityWord);
    }
    let g = CoreGraph::from_generators(w.rank(), std::slice::from_ref(w))?;
    Ok(primitivity_profile(&g)?.primitivity_rank.is_infinite())
}
