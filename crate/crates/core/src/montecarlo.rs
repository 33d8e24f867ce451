// SPDX-License-Identifier: Apache-2.0

//! Sampling random permutation representations and random coverings, and
//! estimating expected fixed-point and lift counts from them.
//!
//! Trials are split into fixed-size chunks. Chunk `c` draws from a ChaCha8
//! generator seeded with the user seed on stream `c`, so results depend only
//! on the seed and trial count, not on the thread pool.

use std::collections::HashSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::core_graph::{morphism, CoreGraph};
use crate::error::{Error, Result};
use crate::expectation::{l_value, phi};
use crate::words::Word;

const CHUNK: u64 = 1024;

/// A permutation of `{0, ..., n-1}` as its image table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n as u32).collect())
    }

    /// Panics unless `images` is a bijection.
    pub fn from_images(images: Vec<u32>) -> Self {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            assert!(!std::mem::replace(&mut seen[i as usize], true), "not a bijection");
        }
        Permutation(images)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut p: Vec<u32> = (0..n as u32).collect();
        p.shuffle(rng);
        Permutation(p)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Permutation(inv)
    }

    /// `self` first, then `next`.
    pub fn then(&self, next: &Permutation) -> Self {
        Permutation(self.0.iter().map(|&i| next.0[i as usize]).collect())
    }

    pub fn fixed_points(&self) -> usize {
        self.0.iter().enumerate().filter(|&(i, &j)| i as u32 == j).count()
    }

    pub fn is_identity(&self) -> bool {
        self.fixed_points() == self.0.len()
    }

    /// The image of `w` with generator `x_i` sent to `images[i-1]`, acting on
    /// the right.
    pub fn evaluate(w: &Word, images: &[Permutation]) -> Permutation {
        let n = images.first().map_or(0, Permutation::degree);
        let mut table: Vec<u32> = (0..n as u32).collect();
        for t in table.iter_mut() {
            let mut i = *t as usize;
            for l in w.letters() {
                let p = &images[l.generator() as usize - 1];
                i = if l.is_inverse() {
                    p.0.iter().position(|&x| x as usize == i).unwrap()
                } else {
                    p.apply(i)
                };
            }
            *t = i as u32;
        }
        Permutation(table)
    }
}

impl fmt::Display for Permutation {
    /// One-line notation on `1..n`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// A random homomorphism `J → S_n`, one permutation per spanning-tree basis
/// word of `J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomSample {
    pub target_degree: usize,
    pub images: Vec<Permutation>,
    pub basis: Vec<Word>,
}

fn check_degree(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidDegree);
    }
    Ok(())
}

pub fn sample_hom(j: &CoreGraph, n: usize, seed: u64) -> Result<HomSample> {
    check_degree(n)?;
    Ok(sample_hom_with(j, n, &mut ChaCha8Rng::seed_from_u64(seed)))
}

fn sample_hom_with<R: Rng + ?Sized>(j: &CoreGraph, n: usize, rng: &mut R) -> HomSample {
    let basis = j.spanning_basis();
    HomSample {
        target_degree: n,
        images: basis.iter().map(|_| Permutation::random(n, rng)).collect(),
        basis,
    }
}

/// Points fixed by every image.
pub fn common_fixed_points(sample: &HomSample) -> usize {
    (0..sample.target_degree)
        .filter(|&i| sample.images.iter().all(|p| p.apply(i) == i))
        .count()
}

/// An `n`-sheeted covering of `base`: one permutation per base edge, with the
/// lift of edge `e = (u, v)` joining `(u, i)` to `(v, σ_e(i))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringSample {
    pub base: CoreGraph,
    pub degree: usize,
    pub matchings: Vec<Permutation>,
}

/// Independent uniform permutations on every edge.
pub fn sample_covering(base: &CoreGraph, n: usize, seed: u64) -> Result<CoveringSample> {
    check_degree(n)?;
    Ok(sample_covering_with(base, n, &mut ChaCha8Rng::seed_from_u64(seed)))
}

fn sample_covering_with<R: Rng + ?Sized>(base: &CoreGraph, n: usize, rng: &mut R) -> CoveringSample {
    CoveringSample {
        base: base.clone(),
        degree: n,
        matchings: (0..base.edge_count()).map(|_| Permutation::random(n, rng)).collect(),
    }
}

impl CoveringSample {
    /// Every edge lifted by the identity: `n` disjoint copies of `base`.
    pub fn trivial(base: &CoreGraph, n: usize) -> Self {
        CoveringSample {
            base: base.clone(),
            degree: n,
            matchings: vec![Permutation::identity(n); base.edge_count()],
        }
    }

    /// Identity on spanning-tree edges; basis images on the others.
    pub fn from_hom(base: &CoreGraph, sample: &HomSample) -> Self {
        let n = sample.target_degree;
        CoveringSample {
            base: base.clone(),
            degree: n,
            matchings: base
                .basis_edges()
                .into_iter()
                .map(|b| b.map_or_else(|| Permutation::identity(n), |i| sample.images[i].clone()))
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.degree * self.base.vertex_count()
    }

    /// Lifted vertex `(v, i)` as a single index.
    pub fn lifted(&self, v: usize, sheet: usize) -> usize {
        v * self.degree + sheet
    }

    /// Lifted edges as `(origin, terminus, label)` on lifted indices.
    pub fn lifted_edges(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::with_capacity(self.degree * self.base.edge_count());
        for (e, sigma) in self.base.edges().iter().zip(&self.matchings) {
            for i in 0..self.degree {
                out.push((self.lifted(e.origin, i), self.lifted(e.terminus, sigma.apply(i)), e.label));
            }
        }
        out
    }

    /// Follows `w` from `(v, sheet)`; `None` if the base graph cannot read it.
    pub fn trace(&self, v: usize, sheet: usize, w: &Word) -> Option<(usize, usize)> {
        let (mut v, mut s) = (v, sheet);
        for &l in w.letters() {
            if l.is_inverse() {
                let e = self.base.in_edge(v, l.generator())?;
                v = self.base.edge(e).origin;
                s = self.matchings[e].images().iter().position(|&x| x as usize == s)?;
            } else {
                let e = self.base.out_edge(v, l.generator())?;
                v = self.base.edge(e).terminus;
                s = self.matchings[e].apply(s);
            }
        }
        Some((v, s))
    }

    /// Sheets over the basepoint whose lift of every generator closes up.
    pub fn fixed_sheets(&self, gens: &[Word]) -> usize {
        let bp = CoreGraph::BASEPOINT;
        (0..self.degree)
            .filter(|&i| gens.iter().all(|w| self.trace(bp, i, w) == Some((bp, i))))
            .count()
    }
}

/// Lifts of the morphism `h → cov.base` to the covering, one attempt per
/// basepoint sheet; with `injective_only`, only lifts that are injective.
pub fn count_lifts(h: &CoreGraph, cov: &CoveringSample, injective_only: bool) -> Result<usize> {
    let eta = morphism(h, &cov.base).ok_or(Error::NotSubgroup)?;
    let (vmap, emap) = (eta.vertex_map(), eta.edge_map());
    let mut count = 0;
    'sheets: for start in 0..cov.degree {
        let mut sheet = vec![usize::MAX; h.vertex_count()];
        sheet[CoreGraph::BASEPOINT] = start;
        let mut stack = vec![CoreGraph::BASEPOINT];
        while let Some(v) = stack.pop() {
            for (i, e) in h.edges().iter().enumerate() {
                let sigma = &cov.matchings[emap[i]];
                let (from, to, forward) = if e.origin == v {
                    (e.origin, e.terminus, true)
                } else if e.terminus == v {
                    (e.terminus, e.origin, false)
                } else {
                    continue;
                };
                let s = sheet[from];
                let image = if forward {
                    sigma.apply(s)
                } else {
                    sigma.images().iter().position(|&x| x as usize == s).unwrap()
                };
                if sheet[to] == usize::MAX {
                    sheet[to] = image;
                    stack.push(to);
                } else if sheet[to] != image {
                    continue 'sheets;
                }
            }
        }
        if injective_only {
            let vertices: HashSet<(usize, usize)> = (0..h.vertex_count()).map(|v| (vmap[v], sheet[v])).collect();
            let edges: HashSet<(usize, usize)> = h.edges().iter().enumerate().map(|(i, e)| (emap[i], sheet[e.origin])).collect();
            if vertices.len() < h.vertex_count() || edges.len() < h.edge_count() {
                continue;
            }
        }
        count += 1;
    }
    Ok(count)
}

/// Running `(count, Σx, Σx²)` of nonnegative integer observations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Moments {
    pub count: u64,
    pub sum: u128,
    pub sum_sq: u128,
}

impl Moments {
    pub fn push(&mut self, x: u64) {
        self.count += 1;
        self.sum += x as u128;
        self.sum_sq += (x as u128) * (x as u128);
    }

    pub fn merge(self, other: Moments) -> Moments {
        Moments {
            count: self.count + other.count,
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
        }
    }

    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.count as f64
    }

    /// Standard error of the mean; zero for a single observation.
    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let c = self.count as f64;
        let var = (self.sum_sq as f64 - (self.sum as f64).powi(2) / c) / (c - 1.0);
        (var.max(0.0) / c).sqrt()
    }
}

/// Runs `trials` independent observations, in parallel, reproducibly.
pub fn run_trials<F>(trials: u64, seed: u64, observe: F) -> Moments
where
    F: Fn(&mut ChaCha8Rng) -> u64 + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let mut m = Moments::default();
            for _ in 0..CHUNK.min(trials - c * CHUNK) {
                m.push(observe(&mut rng));
            }
            m
        })
        .reduce(Moments::default, Moments::merge)
}

/// Empirical mean against an exact value.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub mean: f64,
    pub stderr: f64,
    /// Exact value at `n` as `p/q`, when `n` is at or above the validity threshold.
    #[serde(serialize_with = "serialize_exact")]
    pub exact: Option<BigRational>,
    pub z_score: Option<f64>,
}

fn serialize_exact<S: serde::Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_some(&r.to_string()),
        None => s.serialize_none(),
    }
}

impl EstimateReport {
    fn new(n: usize, trials: u64, seed: u64, m: Moments, exact: Option<BigRational>) -> Self {
        let (mean, stderr) = (m.mean(), m.stderr());
        let z_score = exact.as_ref().map(|x| {
            let diff = mean - x.to_f64().unwrap_or(f64::NAN);
            if stderr > 0.0 {
                diff / stderr
            } else if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY.copysign(diff)
            }
        });
        EstimateReport {
            n,
            trials,
            seed,
            mean,
            stderr,
            exact,
            z_score,
        }
    }

    pub fn exact_f64(&self) -> Option<f64> {
        self.exact.as_ref().and_then(ToPrimitive::to_f64)
    }

    /// Within `k` standard errors of the exact value.
    pub fn within(&self, k: f64) -> bool {
        self.z_score.is_some_and(|z| z.abs() <= k)
    }

    pub const CSV_HEADER: &'static str = "n,trials,mean,stderr,exact,z";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.6},{:.6},{},{}",
            self.n,
            self.trials,
            self.mean,
            self.stderr,
            self.exact.as_ref().map_or(String::new(), |x| x.to_string()),
            self.z_score.map_or(String::new(), |z| format!("{z:.3}"))
        )
    }
}

impl fmt::Display for EstimateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} trials={} seed={} mean={:.6} stderr={:.6}",
            self.n, self.trials, self.seed, self.mean, self.stderr
        )?;
        match (&self.exact, self.z_score) {
            (Some(x), Some(z)) => write!(f, " exact={x} ({:.6}) z={z:.3}", self.exact_f64().unwrap_or(f64::NAN)),
            _ => f.write_str(" exact=unavailable"),
        }
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    Ok(())
}

fn exact_at(f: Result<crate::poly::RationalFunction>, n: usize) -> Result<Option<BigRational>> {
    match f?.eval(n as u64) {
        Ok(x) => Ok(Some(x)),
        Err(Error::BelowValidity { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Estimates `Φ_{H,J}(n)` by sampling homomorphisms of `J` and counting
/// points fixed by all of `H`.
pub fn estimate_phi(h: &CoreGraph, j: &CoreGraph, n: usize, trials: u64, seed: u64) -> Result<EstimateReport> {
    check_degree(n)?;
    check_trials(trials)?;
    if morphism(h, j).is_none() {
        return Err(Error::NotSubgroup);
    }
    let gens = h.spanning_basis();
    let m = run_trials(trials, seed, |rng| {
        let sample = sample_hom_with(j, n, rng);
        CoveringSample::from_hom(j, &sample).fixed_sheets(&gens) as u64
    });
    let exact = if h.is_trivial() {
        Some(BigRational::from_integer((n as i64).into()))
    } else {
        exact_at(phi(h, j), n)?
    };
    Ok(EstimateReport::new(n, trials, seed, m, exact))
}

/// Estimates the expected number of (injective) lifts of `h → j` to a
/// covering with independent uniform permutations on every edge of `j`.
pub fn estimate_lifts(
    h: &CoreGraph,
    j: &CoreGraph,
    n: usize,
    trials: u64,
    seed: u64,
    injective_only: bool,
) -> Result<EstimateReport> {
    check_degree(n)?;
    check_trials(trials)?;
    if morphism(h, j).is_none() {
        return Err(Error::NotSubgroup);
    }
    let m = run_trials(trials, seed, |rng| {
        let cov = sample_covering_with(j, n, rng);
        count_lifts(h, &cov, injective_only).expect("morphism exists") as u64
    });
    let exact = if injective_only {
        exact_at(l_value(h, j), n)?
    } else {
        exact_at(phi(h, j), n)?
    };
    Ok(EstimateReport::new(n, trials, seed, m, exact))
}
