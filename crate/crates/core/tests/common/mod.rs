// SPDX-License-Identifier: Apache-2.0

//! Independent oracles: brute-force enumeration over symmetric groups and
//! over vertex partitions.

#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use stallings::{CoreGraph, Partition, Word};

pub fn g(k: u32, gens: &[&str]) -> CoreGraph {
    CoreGraph::from_words(k, gens).unwrap()
}

pub fn w(text: &str, k: u32) -> Word {
    Word::parse(text, k).unwrap()
}

/// All permutations of `0..n` as image tables.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// Follows a sequence of signed generator indices (1-based) from `point`.
fn act(seq: &[(usize, bool)], perms: &[Vec<usize>], invs: &[Vec<usize>], point: usize) -> usize {
    seq.iter().fold(point, |x, &(i, inv)| if inv { invs[i][x] } else { perms[i][x] })
}

/// Every tuple of `count` permutations of `0..n`, visited in turn.
fn for_each_tuple(n: usize, count: usize, mut f: impl FnMut(&[Vec<usize>], &[Vec<usize>])) {
    let all = permutations(n);
    let inv: Vec<Vec<usize>> = all.iter().map(|p| inverse(p)).collect();
    let mut idx = vec![0usize; count];
    loop {
        let perms: Vec<Vec<usize>> = idx.iter().map(|&i| all[i].clone()).collect();
        let invs: Vec<Vec<usize>> = idx.iter().map(|&i| inv[i].clone()).collect();
        f(&perms, &invs);
        let mut d = 0;
        loop {
            if d == count {
                return;
            }
            idx[d] += 1;
            if idx[d] < all.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::from(1), |a, i| a * i)
}

/// `E[#fix(w)]` over all of `Hom(F_k, S_n)`.
pub fn brute_fixed_points(word: &Word, n: usize) -> BigRational {
    let k = word.rank() as usize;
    let seq: Vec<(usize, bool)> = word
        .letters()
        .iter()
        .map(|l| (l.generator() as usize - 1, l.is_inverse()))
        .collect();
    let mut total = 0u64;
    for_each_tuple(n, k, |perms, invs| {
        total += (0..n).filter(|&x| act(&seq, perms, invs, x) == x).count() as u64;
    });
    BigRational::new(BigInt::from(total), factorial(n).pow(k as u32))
}

/// Rewrites each generator of `h` in a free basis of `j` read off a
/// breadth-first spanning tree of `Γ(j)`.
fn rewrite(h_gens: &[Word], j: &CoreGraph) -> (usize, Vec<Vec<(usize, bool)>>) {
    let mut seen = vec![false; j.vertex_count()];
    let mut tree = vec![false; j.edge_count()];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for (i, e) in j.edges().iter().enumerate() {
            for (a, b) in [(e.origin, e.terminus), (e.terminus, e.origin)] {
                if a == v && !seen[b] {
                    seen[b] = true;
                    tree[i] = true;
                    queue.push_back(b);
                }
            }
        }
    }
    let mut basis_index = vec![usize::MAX; j.edge_count()];
    let mut rank = 0;
    for i in 0..j.edge_count() {
        if !tree[i] {
            basis_index[i] = rank;
            rank += 1;
        }
    }
    let seqs = h_gens
        .iter()
        .map(|word| {
            let mut v = 0;
            let mut seq = Vec::new();
            for l in word.letters() {
                let (i, e) = j
                    .edges()
                    .iter()
                    .enumerate()
                    .find(|(_, e)| e.label == l.generator() && if l.is_inverse() { e.terminus == v } else { e.origin == v })
                    .expect("H is contained in J");
                v = if l.is_inverse() { e.origin } else { e.terminus };
                if !tree[i] {
                    seq.push((basis_index[i], l.is_inverse()));
                }
            }
            assert_eq!(v, 0);
            seq
        })
        .collect();
    (rank, seqs)
}

/// `E[#common fixed points of H]` over all of `Hom(J, S_n)`.
pub fn brute_phi(h_gens: &[Word], j: &CoreGraph, n: usize) -> BigRational {
    let (rank, seqs) = rewrite(h_gens, j);
    let mut total = 0u64;
    for_each_tuple(n, rank, |perms, invs| {
        total += (0..n)
            .filter(|&x| seqs.iter().all(|s| act(s, perms, invs, x) == x))
            .count() as u64;
    });
    BigRational::new(BigInt::from(total), factorial(n).pow(rank as u32))
}

/// Exact distribution of the number of fixed points of a uniform element of `S_n`.
pub fn fixed_point_distribution(n: usize) -> Vec<f64> {
    let all = permutations(n);
    let mut counts = vec![0usize; n + 1];
    for p in &all {
        counts[(0..n).filter(|&i| p[i] == i).count()] += 1;
    }
    counts.iter().map(|&c| c as f64 / all.len() as f64).collect()
}

/// Every set partition of `0..n` as a restricted growth string.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for b in 0..=max + 1 {
            prefix.push(b);
            go(prefix, max.max(b), n, out);
            prefix.pop();
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut prefix = vec![0];
    go(&mut prefix, 0, n, &mut out);
    out
}

/// `min ‖P‖` over vertex partitions `P` of `Γ(root)` generating each quotient.
pub fn partition_distances(root: &CoreGraph) -> HashMap<CoreGraph, usize> {
    let n = root.vertex_count();
    let mut best: HashMap<CoreGraph, usize> = HashMap::new();
    for labels in set_partitions(n) {
        let p = Partition::from_labels(&labels);
        let q = root.quotient(&p).unwrap();
        let norm = n - p.block_count();
        best.entry(q).and_modify(|d| *d = (*d).min(norm)).or_insert(norm);
    }
    best
}

/// Twenty words of F_2 with varied primitivity ranks.
pub fn corpus_words() -> Vec<Word> {
    [
        "x1", "x1 x2", "x1 x1", "x1 x1 x1", "x1 x2 X1 X2", "x1 x1 x2 x2", "x1 x2 x2", "x1 X2",
        "x1 x1 X2", "x1 x2 X1 x2", "x1 x1 x2 X1 x2", "x1 x2 x1 x2", "x1 x1 x1 x1", "x1 x2 x1 X2",
        "x1 x1 x2 X1 X1 X2", "x2 x2 x2", "x1 x2 x2 x2 X1", "x1 x1 x2 x1 x1 X2", "X1 x2 x2 x1 x2", "x1 x2 X1 X2 x1 x2",
    ]
    .iter()
    .map(|t| w(t, 2))
    .collect()
}

/// Subgroups whose fringes are used for the derivation identities.
pub fn derivation_corpus() -> Vec<CoreGraph> {
    vec![
        g(2, &["x1 x2 X1 X2"]),
        g(2, &["x1 x1 x2 x2"]),
        g(2, &["x1 x2 X1 X1 X1", "x1 x1 x2 X1 X1"]),
        g(2, &["x1 x1"]),
        g(2, &["x1 x1 x1 x1 x1 x1"]),
        g(2, &["x1 x2 x1 X2"]),
    ]
}

/// The substitution `x1 ↦ x1 x2`, others fixed.
pub fn transvection(word: &Word) -> Word {
    let k = word.rank();
    let mut images: Vec<Word> = (1..=k).map(|i| Word::from_signed(&[i as i32], k).unwrap()).collect();
    images[0] = Word::from_signed(&[1, 2], k).unwrap();
    word.substitute(&images).unwrap()
}

pub fn apply_transvection(h: &CoreGraph) -> CoreGraph {
    let gens: Vec<Word> = h.spanning_basis().iter().map(transvection).collect();
    CoreGraph::from_generators(h.rank_of_ambient(), &gens).unwrap()
}
