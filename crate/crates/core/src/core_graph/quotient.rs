// SPDX-License-Identifier: Apache-2.0

use super::{CoreGraph, PreGraph};
use crate::error::{Error, Result};

/// A partition of a graph's vertex set, optionally with identified edge pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    /// Block index of each vertex.
    block_of: Vec<usize>,
    block_count: usize,
    edge_pairs: Vec<(usize, usize)>,
}

impl Partition {
    /// Every vertex in its own block.
    pub fn discrete(vertex_count: usize) -> Self {
        Partition {
            block_of: (0..vertex_count).collect(),
            block_count: vertex_count,
            edge_pairs: Vec::new(),
        }
    }

    /// Blocks listed explicitly; vertices not mentioned become singletons.
    pub fn from_blocks(vertex_count: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut block_of = vec![usize::MAX; vertex_count];
        let mut count = 0;
        for block in blocks.iter().filter(|b| !b.is_empty()) {
            for &v in block {
                if v >= vertex_count {
                    return Err(Error::VertexOutOfRange {
                        vertex: v,
                        count: vertex_count,
                    });
                }
                if block_of[v] != usize::MAX {
                    return Err(Error::OutOfRange {
                        what: "vertex listed in two blocks",
                    });
                }
                block_of[v] = count;
            }
            count += 1;
        }
        for b in block_of.iter_mut().filter(|b| **b == usize::MAX) {
            *b = count;
            count += 1;
        }
        Ok(Partition {
            block_of,
            block_count: count,
            edge_pairs: Vec::new(),
        })
    }

    /// Labels need not be contiguous; equal labels share a block.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut remap = std::collections::HashMap::new();
        let block_of = labels
            .iter()
            .map(|&l| {
                let next = remap.len();
                *remap.entry(l).or_insert(next)
            })
            .collect();
        Partition {
            block_of,
            block_count: remap.len(),
            edge_pairs: Vec::new(),
        }
    }

    /// A single pair identified, everything else discrete.
    pub fn pair(vertex_count: usize, u: usize, v: usize) -> Result<Self> {
        Self::from_blocks(vertex_count, &[vec![u, v]])
    }

    /// Also identify two edges. Equivalent to identifying their origins and
    /// termini; the labels must agree.
    pub fn with_edge_pair(mut self, a: usize, b: usize) -> Self {
        self.edge_pairs.push((a, b));
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.block_of[v]
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count];
        for (v, &b) in self.block_of.iter().enumerate() {
            blocks[b].push(v);
        }
        blocks
    }

    /// `‖P‖ = |set| - |blocks|` (vertex part only).
    pub fn norm(&self) -> usize {
        self.block_of.len() - self.block_count
    }
}

impl CoreGraph {
    /// The core graph generated by `p`: merge blocks, then fold.
    pub fn quotient(&self, p: &Partition) -> Result<CoreGraph> {
        if p.vertex_count() != self.vertex_count() {
            return Err(Error::VertexOutOfRange {
                vertex: p.vertex_count(),
                count: self.vertex_count(),
            });
        }
        let mut pre = PreGraph::new(self.rank_of_ambient())?;
        for _ in 1..p.block_count() {
            pre.add_vertex();
        }
        pre.set_basepoint(p.block_of(CoreGraph::BASEPOINT));
        for e in self.edges() {
            pre.add_edge(p.block_of(e.origin), p.block_of(e.terminus), e.label);
        }
        for &(a, b) in &p.edge_pairs {
            if a >= self.edge_count() || b >= self.edge_count() {
                return Err(Error::OutOfRange { what: "edge index" });
            }
            let (ea, eb) = (self.edge(a), self.edge(b));
            if ea.label != eb.label {
                return Err(Error::EdgeLabelMismatch);
            }
            // Shares its origin with `eb` and its terminus with `ea`, so the
            // folder merges both endpoint pairs.
            pre.add_edge(p.block_of(eb.origin), p.block_of(ea.terminus), ea.label);
        }
        Ok(pre.fold())
    }

    /// The immediate quotient obtained by identifying `u` and `v`.
    pub fn identify(&self, u: usize, v: usize) -> Result<CoreGraph> {
        self.quotient(&Partition::pair(self.vertex_count(), u, v)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_graph::morphism;
    use crate::words::Word;

    fn w(t: &str) -> Word {
        Word::parse(t, 2).unwrap()
    }

    #[test]
    fn identity_partition() {
        let h = CoreGraph::from_words(2, &["x1 x2 X1 X2"]).unwrap();
        assert_eq!(h.quotient(&Partition::discrete(h.vertex_count())).unwrap(), h);
    }

    #[test]
    fn quotient_needing_extra_folds() {
        let h = CoreGraph::from_words(2, &["x1 x2 X1 X1 X1", "x1 x1 x2 X1 X1"]).unwrap();
        let v1 = h.endpoint(&w("")).unwrap();
        let v2 = h.endpoint(&w("x1")).unwrap();
        let v3 = h.endpoint(&w("x1 x2")).unwrap();
        let v4 = h.endpoint(&w("x1 x1")).unwrap();
        assert_eq!(h.step(v4, crate::words::Letter::pos(1)), Some(v3));
        let p = Partition::from_blocks(4, &[vec![v1, v4], vec![v2], vec![v3]]).unwrap();
        assert_eq!(p.norm(), 1);
        let q = h.quotient(&p).unwrap();
        assert_eq!(q.vertex_count(), 2);
        // The fibers of the quotient morphism are {v1, v4} and {v2, v3}.
        let m = morphism(&h, &q).unwrap();
        assert!(m.is_surjective());
        let map = m.vertex_map();
        assert_eq!(map[v1], map[v4]);
        assert_eq!(map[v2], map[v3]);
        assert_ne!(map[v1], map[v2]);
        assert_eq!(q, CoreGraph::from_words(2, &["x2", "x1 x1", "x1 x2 x1"]).unwrap());
    }

    #[test]
    fn merging_path_endpoints() {
        let h = CoreGraph::from_words(2, &["x1 x2"]).unwrap();
        assert_eq!(h.identify(0, 1).unwrap(), CoreGraph::bouquet(2).unwrap());
    }

    #[test]
    fn edge_identification() {
        // ⟨x1 x1⟩: identifying its two 1-edges gives ⟨x1⟩.
        let h = CoreGraph::from_words(1, &["x1 x1"]).unwrap();
        let p = Partition::discrete(2).with_edge_pair(0, 1);
        assert_eq!(h.quotient(&p).unwrap(), CoreGraph::bouquet(1).unwrap());

        let c = CoreGraph::from_words(2, &["x1 x2 X1 X2"]).unwrap();
        let (a, b) = (c.out_edge(0, 1).unwrap(), c.out_edge(0, 2).unwrap());
        let p = Partition::discrete(4).with_edge_pair(a, b);
        assert!(matches!(c.quotient(&p), Err(Error::EdgeLabelMismatch)));
    }

    #[test]
    fn partition_bookkeeping() {
        let p = Partition::from_blocks(5, &[vec![0, 3], vec![1, 4]]).unwrap();
        assert_eq!(p.block_count(), 3);
        assert_eq!(p.norm(), 2);
        assert_eq!(p.blocks(), vec![vec![0, 3], vec![1, 4], vec![2]]);
        assert!(Partition::from_blocks(2, &[vec![0, 2]]).is_err());
        assert!(Partition::from_blocks(3, &[vec![0, 1], vec![1, 2]]).is_err());
        assert_eq!(Partition::from_labels(&[7, 7, 3]).blocks(), vec![vec![0, 1], vec![2]]);
    }
}
