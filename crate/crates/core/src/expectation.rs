// SPDX-License-Identifier: Apache-2.0

//! Expected numbers of common fixed points as exact rational functions of
//! `n`, their Möbius derivations over the covering order, and asymptotics.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::core_graph::{morphism, CoreGraph};
use crate::error::{Error, Result};
use crate::poset::{fringe, AlgebraicProfile, FringePoset};
use crate::words::Word;

pub use crate::poly::{falling_factorial, LaurentSeries, Polynomial, RationalFunction};

/// Unsigned Stirling number `[r]_j`: permutations of `r` points that are a
/// product of `j` transpositions and no fewer.
pub fn stirling_unsigned(r: usize, j: usize) -> Result<BigInt> {
    if j > r.saturating_sub(1) {
        return Err(Error::OutOfRange {
            what: "stirling index",
        });
    }
    // c[m][c] = permutations of m points with c cycles.
    let mut row = vec![BigInt::one()];
    for m in 1..=r {
        let mut next = vec![BigInt::zero(); m + 1];
        for c in 1..=m {
            let from_prev = if c - 1 < row.len() { row[c - 1].clone() } else { BigInt::zero() };
            let stay = if c < row.len() { &row[c] * (m - 1) } else { BigInt::zero() };
            next[c] = from_prev + stay;
        }
        row = next;
    }
    Ok(row[r - j].clone())
}

/// `∏_v (n)_{|η⁻¹(v)|} / ∏_e (n)_{|η⁻¹(e)|}` for the morphism `m → j`: the
/// expected number of injective lifts of it to a random `n`-covering.
pub fn l_value(m: &CoreGraph, j: &CoreGraph) -> Result<RationalFunction> {
    let eta = morphism(m, j).ok_or(Error::NotSubgroup)?;
    let product = |sizes: Vec<usize>| {
        sizes
            .into_iter()
            .fold(Polynomial::one(), |acc, s| &acc * &falling_factorial(s))
    };
    let edge_fibers = eta.edge_fibers();
    let threshold = edge_fibers.iter().copied().max().unwrap_or(1) as u64;
    Ok(RationalFunction::new(
        product(eta.vertex_fibers()),
        product(edge_fibers),
        threshold,
    ))
}

fn max_edge_fiber(h: &CoreGraph, j: &CoreGraph) -> Result<u64> {
    let eta = morphism(h, j).ok_or(Error::NotSubgroup)?;
    Ok(eta.edge_fibers().into_iter().max().unwrap_or(1).max(1) as u64)
}

/// Expected number of common fixed points of `h` under a uniformly random
/// homomorphism `j → S_n`.
pub fn phi(h: &CoreGraph, j: &CoreGraph) -> Result<RationalFunction> {
    let threshold = max_edge_fiber(h, j)?;
    let poset = fringe(h)?;
    phi_in(&poset, j).map(|f| f.with_threshold(threshold))
}

/// `Φ` for the root of `poset`, summing over fringe nodes that embed in `j`.
fn phi_in(poset: &FringePoset, j: &CoreGraph) -> Result<RationalFunction> {
    let terms: Vec<RationalFunction> = poset
        .nodes()
        .par_iter()
        .filter(|m| morphism(m, j).is_some())
        .map(|m| l_value(m, j))
        .collect::<Result<_>>()?;
    Ok(terms
        .iter()
        .fold(RationalFunction::zero(), |acc, t| &acc + t))
}

/// Zeta and Möbius functions on an interval of the covering order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobiusTable {
    /// Nodes in nonincreasing vertex count, so both matrices are upper triangular.
    pub interval: Vec<CoreGraph>,
    pub zeta: Vec<Vec<i64>>,
    pub mu: Vec<Vec<i64>>,
}

impl MobiusTable {
    /// Builds both matrices for the given nodes of `poset`.
    fn over(poset: &FringePoset, nodes: &[usize]) -> Self {
        let mut order = nodes.to_vec();
        order.sort_by_key(|&i| std::cmp::Reverse(poset.node(i).vertex_count()));
        let zeta: Vec<Vec<i64>> = order
            .iter()
            .map(|&a| order.iter().map(|&b| poset.covers(a, b) as i64).collect())
            .collect();
        let mu = mobius_inverse(&zeta);
        MobiusTable {
            interval: order.iter().map(|&i| poset.node(i).clone()).collect(),
            zeta,
            mu,
        }
    }

    /// Whether `ζμ = μζ = δ`.
    pub fn verify(&self) -> bool {
        let n = self.zeta.len();
        let prod = |a: &[Vec<i64>], b: &[Vec<i64>]| -> Vec<Vec<i64>> {
            (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|c| a[i][c] * b[c][j]).sum()).collect())
                .collect()
        };
        let id: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
        prod(&self.zeta, &self.mu) == id && prod(&self.mu, &self.zeta) == id
    }
}

/// Inverse of an upper unitriangular 0/1 incidence matrix by the recursion
/// `μ(a,b) = -Σ_{a ≤ c < b} μ(a,c)`.
fn mobius_inverse(zeta: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = zeta.len();
    let mut mu = vec![vec![0i64; n]; n];
    for a in 0..n {
        mu[a][a] = 1;
        for b in a + 1..n {
            if zeta[a][b] == 0 {
                continue;
            }
            mu[a][b] = -(a..b).filter(|&c| zeta[c][b] != 0).map(|c| mu[a][c]).sum::<i64>();
        }
    }
    mu
}

/// The Möbius table on the interval from the root of `poset` up to `top`.
pub fn mobius_table(poset: &FringePoset, top: &CoreGraph) -> Result<MobiusTable> {
    let t = poset.index_of(top).ok_or(Error::NotInFringe)?;
    Ok(MobiusTable::over(poset, &poset.interval(0, t)))
}

/// The Möbius table on the interval between two comparable fringe nodes.
pub fn mobius_interval(poset: &FringePoset, bottom: &CoreGraph, top: &CoreGraph) -> Result<MobiusTable> {
    let (b, t) = fringe_pair(poset, bottom, top)?;
    Ok(MobiusTable::over(poset, &poset.interval(b, t)))
}

/// `L`, `Φ`, `R = Φμ` and `C = μΦμ` for every comparable pair of nodes of a
/// fringe, indexed by fringe position. Entries for incomparable pairs are `None`.
#[derive(Debug, Clone)]
pub struct Derivations {
    pub mu: Vec<Vec<i64>>,
    pub l: Vec<Vec<Option<RationalFunction>>>,
    pub phi: Vec<Vec<Option<RationalFunction>>>,
    pub r: Vec<Vec<Option<RationalFunction>>>,
    pub c: Vec<Vec<Option<RationalFunction>>>,
}

type Matrix = Vec<Vec<Option<RationalFunction>>>;

impl Derivations {
    pub fn compute(poset: &FringePoset) -> Self {
        let n = poset.len();
        let all: Vec<usize> = (0..n).collect();
        let table = MobiusTable::over(poset, &all);
        // `table` is in sorted order; map back to fringe indices.
        let mut order = all.clone();
        order.sort_by_key(|&i| std::cmp::Reverse(poset.node(i).vertex_count()));
        let mut mu = vec![vec![0i64; n]; n];
        for (x, &a) in order.iter().enumerate() {
            for (y, &b) in order.iter().enumerate() {
                mu[a][b] = table.mu[x][y];
            }
        }

        let l: Matrix = (0..n)
            .into_par_iter()
            .map(|a| {
                (0..n)
                    .map(|b| {
                        poset
                            .covers(a, b)
                            .then(|| l_value(poset.node(a), poset.node(b)).expect("covering implies a morphism"))
                    })
                    .collect()
            })
            .collect();
        let between = |a: usize, b: usize| (0..n).filter(move |&c| poset.covers(a, c) && poset.covers(c, b));

        let phi: Matrix = (0..n)
            .into_par_iter()
            .map(|a| {
                (0..n)
                    .map(|b| {
                        poset.covers(a, b).then(|| {
                            between(a, b).fold(RationalFunction::zero(), |acc, c| &acc + l[c][b].as_ref().unwrap())
                        })
                    })
                    .collect()
            })
            .collect();
        let convolve = |left: &dyn Fn(usize, usize) -> RationalFunction, right: &dyn Fn(usize, usize) -> RationalFunction| -> Matrix {
            (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| {
                            poset.covers(a, b).then(|| {
                                between(a, b).fold(RationalFunction::zero(), |acc, c| &acc + &(&left(a, c) * &right(c, b)))
                            })
                        })
                        .collect()
                })
                .collect()
        };
        let mu_fn = |a: usize, b: usize| RationalFunction::constant(mu[a][b]);
        let r = convolve(&|a, c| phi[a][c].clone().unwrap(), &mu_fn);
        let c = convolve(&mu_fn, &|a, b| r[a][b].clone().unwrap());
        Derivations { mu, l, phi, r, c }
    }

    /// `μ ∗ Φ`, which should reproduce `l`.
    pub fn l_from_phi(&self, poset: &FringePoset) -> Matrix {
        let n = poset.len();
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        poset.covers(a, b).then(|| {
                            (0..n)
                                .filter(|&c| poset.covers(a, c) && poset.covers(c, b))
                                .fold(RationalFunction::zero(), |acc, c| {
                                    &acc + &self.phi[c][b].as_ref().unwrap().scale(self.mu[a][c])
                                })
                        })
                    })
                    .collect()
            })
            .collect()
    }
}

fn fringe_pair(poset: &FringePoset, a: &CoreGraph, b: &CoreGraph) -> Result<(usize, usize)> {
    let i = poset.index_of(a).ok_or(Error::NotInFringe)?;
    let j = poset.index_of(b).ok_or(Error::NotInFringe)?;
    if !poset.covers(i, j) {
        return Err(Error::NotComparable);
    }
    Ok((i, j))
}

/// `R_{H,N} = (Φ ∗ μ)(H, N)` over the fringe of `h`.
pub fn r_value(h: &CoreGraph, n: &CoreGraph) -> Result<RationalFunction> {
    let poset = fringe(h)?;
    let (i, j) = fringe_pair(&poset, h, n)?;
    Ok(Derivations::compute(&poset).r[i][j].clone().expect("comparable pair"))
}

/// `C_{M,N} = (μ ∗ Φ ∗ μ)(M, N)` within `poset`.
pub fn c_value(m: &CoreGraph, n: &CoreGraph, poset: &FringePoset) -> Result<RationalFunction> {
    let (i, j) = fringe_pair(poset, m, n)?;
    Ok(Derivations::compute(poset).c[i][j].clone().expect("comparable pair"))
}

/// Expansion in powers of `1/n`.
pub fn laurent_expand(f: &RationalFunction, order: usize) -> LaurentSeries {
    LaurentSeries::expand(f, order)
}

/// `Φ_{H,F_k}`, its expansion and the primitivity profile of `H`.
#[derive(Debug, Clone)]
pub struct Asymptotics {
    pub phi: RationalFunction,
    pub series: LaurentSeries,
    pub profile: AlgebraicProfile,
}

/// Default truncation: two terms past the critical one.
pub fn default_order(reduced_rank: i64, profile: &AlgebraicProfile) -> usize {
    let top = profile.reduced_primitivity_rank().unwrap_or(reduced_rank).max(reduced_rank);
    (top - reduced_rank + 2) as usize
}

/// Computes the asymptotics of a nontrivial subgroup and checks them against
/// its profile: `n^(-rk̃) + |Crit| n^(-π̃) + O(n^(-π̃-1))`, or exactly
/// `n^(-rk̃)` when `π = ∞`.
pub fn subgroup_asymptotics(h: &CoreGraph, order: Option<usize>) -> Result<Asymptotics> {
    let poset = fringe(h)?;
    let whole = CoreGraph::bouquet(h.rank_of_ambient())?;
    let threshold = max_edge_fiber(h, &whole)?;
    let phi = phi_in(&poset, &whole)?.with_threshold(threshold);
    let profile = poset.profile();
    let order = order.unwrap_or_else(|| default_order(h.reduced_rank(), &profile));
    let series = laurent_expand(&phi, order);
    check_shape(&phi, &series, h.reduced_rank(), &profile)?;
    Ok(Asymptotics { phi, series, profile })
}

/// Checks the expansion against the profile to the precision available.
pub fn check_shape(
    phi: &RationalFunction,
    series: &LaurentSeries,
    reduced_rank: i64,
    profile: &AlgebraicProfile,
) -> Result<()> {
    let Some(pt) = profile.reduced_primitivity_rank() else {
        return if *phi == RationalFunction::n_pow(-reduced_rank) {
            Ok(())
        } else {
            Err(Error::ShapeViolation(format!(
                "expected exactly n^{} for a free factor, got {}",
                -reduced_rank,
                phi.expression()
            )))
        };
    };
    let crit = profile.critical.len() as i64;
    let last = pt.min(series.error_exponent() - 1);
    for e in series.leading_exponent().min(reduced_rank)..=last {
        let expected = (e == reduced_rank) as i64 + if e == pt { crit } else { 0 };
        let got = series.coefficient(e).unwrap_or_default();
        if got != num_rational::BigRational::from_integer(expected.into()) {
            return Err(Error::ShapeViolation(format!(
                "coefficient of n^{} is {got}, expected {expected}",
                -e
            )));
        }
    }
    Ok(())
}

/// Asymptotics of `E[#fix(w)]` for a single nontrivial word.
pub fn fixed_point_asymptotics(w: &Word) -> Result<(LaurentSeries, AlgebraicProfile)> {
    if w.is_identity() {
        return Err(Error::IdentityWord);
    }
    let h = CoreGraph::from_generators(w.rank(), std::slice::from_ref(w))?;
    let a = subgroup_asymptotics(&h, None)?;
    Ok((a.series, a.profile))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::PrimitivityRank;

    fn g(k: u32, gens: &[&str]) -> CoreGraph {
        CoreGraph::from_words(k, gens).unwrap()
    }

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_i64(c)
    }

    fn commutator() -> CoreGraph {
        g(2, &["x1 x2 X1 X2"])
    }

    #[test]
    fn stirling_small() {
        for r in 0..6 {
            assert_eq!(stirling_unsigned(r, 0).unwrap(), BigInt::one());
        }
        assert_eq!(stirling_unsigned(3, 1).unwrap(), BigInt::from(3));
        assert_eq!(stirling_unsigned(3, 2).unwrap(), BigInt::from(2));
        assert!(stirling_unsigned(3, 3).is_err());
        assert!(stirling_unsigned(0, 1).is_err());
    }

    #[test]
    fn falling_factorial_expansion() {
        for r in 0..=10usize {
            let ff = falling_factorial(r);
            for j in 0..r.max(1) {
                if r == 0 && j > 0 {
                    continue;
                }
                let sign = if j % 2 == 0 { 1 } else { -1 };
                let expect = stirling_unsigned(r, j).unwrap() * sign;
                assert_eq!(ff.coeff(r - j), expect, "r={r} j={j}");
            }
        }
    }

    #[test]
    fn l_values() {
        let f2 = CoreGraph::bouquet(2).unwrap();
        let l = l_value(&g(2, &["x1 x2"]), &f2).unwrap();
        assert_eq!(l, RationalFunction::new(p(&[-1, 1]), p(&[0, 1]), 1));
        assert_eq!(l_value(&f2, &f2).unwrap(), RationalFunction::n_pow(-1));
        let f3 = CoreGraph::bouquet(3).unwrap();
        assert_eq!(l_value(&f3, &f3).unwrap(), RationalFunction::n_pow(-2));
        assert_eq!(l_value(&commutator(), &commutator()).unwrap(), RationalFunction::one());
        assert!(matches!(l_value(&g(2, &["x1"]), &g(2, &["x2"])), Err(Error::NotSubgroup)));
    }

    #[test]
    fn phi_examples() {
        let f2 = CoreGraph::bouquet(2).unwrap();
        let c = phi(&commutator(), &f2).unwrap();
        assert_eq!(c, RationalFunction::new(p(&[0, 1]), p(&[-1, 1]), 1));
        assert_eq!(c.validity_threshold(), 2);
        assert_eq!(c.to_string(), "n/(n - 1), valid for n >= 2");
        assert_eq!(phi(&g(2, &["x1"]), &f2).unwrap(), RationalFunction::one());
        let sq = phi(&g(2, &["x1 x1"]), &f2).unwrap();
        assert_eq!(sq, RationalFunction::constant(2));
        assert_eq!(sq.validity_threshold(), 2);
        assert!(matches!(phi(&g(2, &["x1"]), &g(2, &["x2"])), Err(Error::NotSubgroup)));
    }

    #[test]
    fn mobius_tables() {
        let sq = fringe(&g(2, &["x1 x1"])).unwrap();
        let t = mobius_table(&sq, &g(2, &["x1"])).unwrap();
        assert_eq!(t.mu, vec![vec![1, -1], vec![0, 1]]);
        assert!(t.verify());
        let single = mobius_table(&sq, &g(2, &["x1 x1"])).unwrap();
        assert_eq!(single.mu, vec![vec![1]]);

        let f = fringe(&commutator()).unwrap();
        let t = mobius_table(&f, &CoreGraph::bouquet(2).unwrap()).unwrap();
        assert_eq!(t.interval.len(), 7);
        assert!(t.verify());
        let last = t.interval.len() - 1;
        assert_eq!((0..=last).map(|z| t.mu[0][z]).sum::<i64>(), 0);
        assert!(matches!(mobius_table(&f, &g(2, &["x2"])), Err(Error::NotInFringe)));
    }

    #[test]
    fn r_and_c_values() {
        let f2 = CoreGraph::bouquet(2).unwrap();
        assert_eq!(r_value(&commutator(), &commutator()).unwrap(), RationalFunction::one());
        assert!(r_value(&g(2, &["x1 x2"]), &f2).unwrap().is_zero());
        let r = r_value(&commutator(), &f2).unwrap();
        assert_eq!(r, RationalFunction::new(p(&[1]), p(&[-1, 1]), 1));
        assert_eq!(laurent_expand(&r, 0).leading_exponent(), 1);

        let f = fringe(&commutator()).unwrap();
        assert_eq!(c_value(&f2, &f2, &f).unwrap(), RationalFunction::n_pow(-1));
        let c = c_value(&commutator(), &f2, &f).unwrap();
        assert!(c.is_zero() || laurent_expand(&c, 0).leading_exponent() >= 2);
        let sq = fringe(&g(2, &["x1 x1"])).unwrap();
        let c = c_value(&g(2, &["x1 x1"]), &g(2, &["x1"]), &sq).unwrap();
        assert!(c.is_zero() || laurent_expand(&c, 0).leading_exponent() >= 1);
        assert!(matches!(c_value(&g(2, &["x1"]), &g(2, &["x1 x1"]), &sq), Err(Error::NotComparable)));
    }

    #[test]
    fn derivations_reconstruct_phi() {
        let f = fringe(&commutator()).unwrap();
        let d = Derivations::compute(&f);
        let top = f.index_of(&CoreGraph::bouquet(2).unwrap()).unwrap();
        let phi = d.phi[0][top].clone().unwrap();
        let sum_r = (0..f.len()).filter(|&b| f.covers(b, top)).map(|b| d.r[0][b].clone().unwrap()).fold(RationalFunction::zero(), |a, x| &a + &x);
        assert_eq!(sum_r, phi);
        let back = d.l_from_phi(&f);
        assert_eq!(back, d.l);
    }

    #[test]
    fn asymptotics() {
        let (s, prof) = fixed_point_asymptotics(&Word::parse("x1 x2 X1 X2", 2).unwrap()).unwrap();
        assert_eq!(prof.primitivity_rank, PrimitivityRank::Finite(2));
        assert!(s.to_string().starts_with("1 + 1/n + 1/n^2"));
        let (s, _) = fixed_point_asymptotics(&Word::parse("x1 x1", 2).unwrap()).unwrap();
        assert_eq!(s.to_string(), "2 + O(1/n^3)");
        let (s, prof) = fixed_point_asymptotics(&Word::parse("x1", 2).unwrap()).unwrap();
        assert!(prof.primitivity_rank.is_infinite());
        assert_eq!(s.to_string(), "1 + O(1/n^3)");
        assert!(matches!(fixed_point_asymptotics(&Word::identity(2)), Err(Error::IdentityWord)));
    }
}
