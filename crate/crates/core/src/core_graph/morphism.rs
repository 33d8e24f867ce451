// SPDX-License-Identifier: Apache-2.0

use std::collections::VecDeque;

use super::CoreGraph;
use crate::words::Letter;

/// The unique basepoint-preserving, label-preserving map between two core
/// graphs. It exists exactly when the domain subgroup is contained in the
/// codomain subgroup.
#[derive(Debug, Clone)]
pub struct GraphMorphism<'a> {
    domain: &'a CoreGraph,
    codomain: &'a CoreGraph,
    vertex_map: Vec<usize>,
    edge_map: Vec<usize>,
}

/// Builds the morphism by simultaneous traversal from both basepoints.
pub fn morphism<'a>(domain: &'a CoreGraph, codomain: &'a CoreGraph) -> Option<GraphMorphism<'a>> {
    if domain.rank_of_ambient() != codomain.rank_of_ambient() {
        return None;
    }
    let k = domain.rank_of_ambient();
    let mut vertex_map = vec![usize::MAX; domain.vertex_count()];
    vertex_map[CoreGraph::BASEPOINT] = CoreGraph::BASEPOINT;
    let mut queue = VecDeque::from([CoreGraph::BASEPOINT]);
    while let Some(v) = queue.pop_front() {
        for label in 1..=k {
            for letter in [Letter::pos(label), Letter::neg(label)] {
                let Some(u) = domain.step(v, letter) else { continue };
                let image = codomain.step(vertex_map[v], letter)?;
                if vertex_map[u] == usize::MAX {
                    vertex_map[u] = image;
                    queue.push_back(u);
                } else if vertex_map[u] != image {
                    return None;
                }
            }
        }
    }
    let edge_map = domain
        .edges()
        .iter()
        .map(|e| codomain.out_edge(vertex_map[e.origin], e.label))
        .collect::<Option<Vec<_>>>()?;
    Some(GraphMorphism {
        domain,
        codomain,
        vertex_map,
        edge_map,
    })
}

impl<'a> GraphMorphism<'a> {
    pub fn domain(&self) -> &'a CoreGraph {
        self.domain
    }

    pub fn codomain(&self) -> &'a CoreGraph {
        self.codomain
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    pub fn edge_map(&self) -> &[usize] {
        &self.edge_map
    }

    /// `|η⁻¹(v)|` for every codomain vertex.
    pub fn vertex_fibers(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.codomain.vertex_count()];
        for &v in &self.vertex_map {
            sizes[v] += 1;
        }
        sizes
    }

    /// `|η⁻¹(e)|` for every codomain edge.
    pub fn edge_fibers(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.codomain.edge_count()];
        for &e in &self.edge_map {
            sizes[e] += 1;
        }
        sizes
    }

    /// Surjective on vertices and edges: the domain X-covers the codomain.
    pub fn is_surjective(&self) -> bool {
        self.vertex_fibers().iter().all(|&s| s > 0) && self.edge_fibers().iter().all(|&s| s > 0)
    }

    pub fn is_injective(&self) -> bool {
        self.vertex_fibers().iter().all(|&s| s <= 1) && self.edge_fibers().iter().all(|&s| s <= 1)
    }

    /// The image as a core graph in its own right (a subgraph of the codomain).
    pub fn image(&self) -> CoreGraph {
        let mut keep_v = vec![false; self.codomain.vertex_count()];
        for &v in &self.vertex_map {
            keep_v[v] = true;
        }
        let mut id = vec![usize::MAX; keep_v.len()];
        let mut count = 0;
        for (v, &keep) in keep_v.iter().enumerate() {
            if keep {
                id[v] = count;
                count += 1;
            }
        }
        let mut edges: Vec<usize> = self.edge_map.clone();
        edges.sort_unstable();
        edges.dedup();
        let edges = edges
            .into_iter()
            .map(|i| {
                let e = self.codomain.edge(i);
                super::Edge {
                    origin: id[e.origin],
                    terminus: id[e.terminus],
                    label: e.label,
                }
            })
            .collect();
        CoreGraph::canonical(self.codomain.rank_of_ambient(), count, id[CoreGraph::BASEPOINT], edges)
    }

    /// `self` followed by `next`.
    pub fn compose<'b>(&self, next: &GraphMorphism<'b>) -> Option<GraphMorphism<'a>>
    where
        'b: 'a,
    {
        if !std::ptr::eq(self.codomain, next.domain) && self.codomain != next.domain {
            return None;
        }
        Some(GraphMorphism {
            domain: self.domain,
            codomain: next.codomain,
            vertex_map: self.vertex_map.iter().map(|&v| next.vertex_map[v]).collect(),
            edge_map: self.edge_map.iter().map(|&e| next.edge_map[e]).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Word;
    use proptest::prelude::*;

    fn g(k: u32, gens: &[&str]) -> CoreGraph {
        CoreGraph::from_words(k, gens).unwrap()
    }

    #[test]
    fn loop_into_bouquet() {
        let h = g(2, &["x1"]);
        let f2 = CoreGraph::bouquet(2).unwrap();
        let m = morphism(&h, &f2).unwrap();
        assert!(m.is_injective());
        assert!(!m.is_surjective());
        assert_eq!(m.image(), h);
    }

    #[test]
    fn absent_when_not_contained() {
        assert!(morphism(&g(2, &["x2"]), &g(2, &["x1"])).is_none());
        assert!(morphism(&g(2, &["x1"]), &CoreGraph::bouquet(3).unwrap()).is_none());
    }

    #[test]
    fn x_covering_example() {
        let h = g(2, &["x1 x2 X1 X1 X1", "x1 x1 x2 X1 X1"]);
        let j = g(2, &["x2", "x1 x1", "x1 x2 x1"]);
        let m = morphism(&h, &j).unwrap();
        assert!(m.is_surjective());
        assert_eq!(j.vertex_count(), 2);
    }

    #[test]
    fn positive_powers_need_not_embed() {
        // ⟨x1 x2 x2⟩ is a free factor of F2, but its morphism is not injective.
        let h = g(2, &["x1 x2 x2"]);
        let f2 = CoreGraph::bouquet(2).unwrap();
        let m = morphism(&h, &f2).unwrap();
        assert!(!m.is_injective());
        assert!(m.is_surjective());
    }

    fn word(k: u32) -> impl Strategy<Value = Word> {
        prop::collection::vec((1..=k, any::<bool>()), 1..6).prop_map(move |v| {
            Word::from_letters(v.into_iter().map(|(g, i)| Letter::new(g, i)), k).unwrap()
        })
    }

    proptest! {
        #[test]
        fn morphisms_compose(a in prop::collection::vec(word(2), 1..3), b in prop::collection::vec(word(2), 0..2)) {
            // A ≤ B ≤ C by construction.
            let mut gb = a.clone();
            gb.extend(b.iter().cloned());
            let ga = CoreGraph::from_generators(2, &a).unwrap();
            let gbb = CoreGraph::from_generators(2, &gb).unwrap();
            let gc = CoreGraph::bouquet(2).unwrap();
            let ab = morphism(&ga, &gbb).unwrap();
            let bc = morphism(&gbb, &gc).unwrap();
            let ac = morphism(&ga, &gc).unwrap();
            let composed = ab.compose(&bc).unwrap();
            prop_assert_eq!(composed.vertex_map(), ac.vertex_map());
            prop_assert_eq!(composed.edge_map(), ac.edge_map());
        }
    }
}
