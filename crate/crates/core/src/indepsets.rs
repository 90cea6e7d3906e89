//! Independent sets of Schreier multigraphs: enumeration, extremes, samplers,
//! overlap spectra, clusters and shattering components.
//!
//! A vertex with a self-loop is never in an independent set. Parallel edges
//! count once.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::empirical::Labeling;
use crate::error::{Error, Result};
use crate::exact::Scale;
use crate::moments::{self, eta, exact_expected_count_indep, rational_to_f64, MonteCarlo};
use crate::rng::{self, Rng};
use crate::sofic::{sample_perm_hom, schreier_graph, MultiGraph, PermHom};
use crate::unionfind::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    n: usize,
    bits: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet { n, bits: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = VertexSet::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    pub fn from_indices(n: usize, idx: &[usize]) -> Result<Self> {
        let mut s = VertexSet::empty(n);
        for &v in idx {
            if v >= n {
                return Err(Error::Config(format!("vertex {v} outside [0,{n})")));
            }
            s.insert(v);
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, v: usize) {
        self.bits[v / 64] |= 1 << (v % 64);
    }

    pub fn remove(&mut self, v: usize) {
        self.bits[v / 64] &= !(1 << (v % 64));
    }

    pub fn contains(&self, v: usize) -> bool {
        self.bits[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.bits.iter().position(|&w| w != 0).map(|i| i * 64 + self.bits[i].trailing_zeros() as usize)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        self.bits.iter().zip(&other.bits).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    /// `|A Δ B|`
    pub fn hamming(&self, other: &VertexSet) -> usize {
        self.bits.iter().zip(&other.bits).map(|(a, b)| (a ^ b).count_ones() as usize).sum()
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        self.bits.iter().zip(&other.bits).any(|(a, b)| a & b != 0)
    }

    pub fn to_labeling(&self) -> Labeling {
        Labeling { values: (0..self.n).map(|v| u8::from(self.contains(v))).collect(), alphabet: 2 }
    }

    pub fn from_labeling(x: &Labeling) -> Self {
        let mut s = VertexSet::empty(x.n());
        for (v, &c) in x.values.iter().enumerate() {
            if c != 0 {
                s.insert(v);
            }
        }
        s
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

/// Bitset adjacency without self-loops, plus loop flags.
struct Adjacency {
    n: usize,
    nbrs: Vec<VertexSet>,
    looped: Vec<bool>,
}

impl Adjacency {
    fn new(g: &MultiGraph) -> Self {
        let n = g.n();
        let mut nbrs = vec![VertexSet::empty(n); n];
        let mut looped = vec![false; n];
        for v in 0..n {
            for &w in g.neighbors(v) {
                if w == v {
                    looped[v] = true;
                } else {
                    nbrs[v].insert(w);
                }
            }
        }
        Adjacency { n, nbrs, looped }
    }

    /// Same graph with vertices renumbered so that `order[i]` becomes `i`.
    fn relabel(&self, order: &[usize]) -> Adjacency {
        let mut pos = vec![0; self.n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let nbrs = order
            .iter()
            .map(|&v| {
                let mut s = VertexSet::empty(self.n);
                for w in self.nbrs[v].iter() {
                    s.insert(pos[w]);
                }
                s
            })
            .collect();
        Adjacency { n: self.n, nbrs, looped: order.iter().map(|&v| self.looped[v]).collect() }
    }

    /// Highest distinct-neighbor count first, ties by index.
    fn degree_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(self.nbrs[v].len()), v));
        order
    }
}

pub fn is_independent(g: &MultiGraph, w: &VertexSet) -> bool {
    w.iter().all(|v| g.neighbors(v).iter().all(|&u| !w.contains(u)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndepEnumeration {
    pub sets: Vec<VertexSet>,
    pub complete: bool,
}

/// Visit every independent set with size in `[w_min, w_max]`.
/// The visitor returns false to stop; the return value is false if stopped.
pub fn visit_indep(g: &MultiGraph, w_min: usize, w_max: usize, visit: &mut dyn FnMut(&VertexSet) -> bool) -> bool {
    let adj = Adjacency::new(g);
    let order = adj.degree_order();
    let local = adj.relabel(&order);
    let n = adj.n;
    let mut allowed = VertexSet::empty(n);
    for v in 0..n {
        if !local.looped[v] {
            allowed.insert(v);
        }
    }
    let mut current = VertexSet::empty(n);
    let mut out = VertexSet::empty(n);
    let mut ctx = Visit { local: &local, order: &order, w_min, w_max, visit, current: &mut current, out: &mut out };
    ctx.go(0, &allowed, 0)
}

struct Visit<'a> {
    local: &'a Adjacency,
    order: &'a [usize],
    w_min: usize,
    w_max: usize,
    visit: &'a mut dyn FnMut(&VertexSet) -> bool,
    current: &'a mut VertexSet,
    out: &'a mut VertexSet,
}

/// Count of set bits at positions `>= from`.
fn count_from(s: &VertexSet, from: usize) -> usize {
    let (word, bit) = (from / 64, from % 64);
    if word >= s.bits.len() {
        return 0;
    }
    let first = (s.bits[word] >> bit).count_ones() as usize;
    first + s.bits[word + 1..].iter().map(|w| w.count_ones() as usize).sum::<usize>()
}

impl Visit<'_> {
    fn emit(&mut self) -> bool {
        for w in self.out.bits.iter_mut() {
            *w = 0;
        }
        for v in self.current.iter() {
            self.out.insert(self.order[v]);
        }
        (self.visit)(self.out)
    }

    fn go(&mut self, from: usize, allowed: &VertexSet, size: usize) -> bool {
        if size >= self.w_min && !self.emit() {
            return false;
        }
        if size == self.w_max {
            return true;
        }
        let n = self.local.n;
        for v in from..n {
            if !allowed.contains(v) {
                continue;
            }
            if size + count_from(allowed, v) < self.w_min {
                break;
            }
            let mut next = allowed.clone();
            for (a, b) in next.bits.iter_mut().zip(&self.local.nbrs[v].bits) {
                *a &= !b;
            }
            self.current.insert(v);
            let ok = self.go(v + 1, &next, size + 1);
            self.current.remove(v);
            if !ok {
                return false;
            }
        }
        true
    }
}

pub fn enumerate_indep(g: &MultiGraph, w_min: usize, w_max: usize, budget: Option<usize>) -> IndepEnumeration {
    let mut sets = Vec::new();
    let complete = visit_indep(g, w_min, w_max, &mut |s| {
        if budget.is_some_and(|b| sets.len() >= b) {
            return false;
        }
        sets.push(s.clone());
        true
    });
    IndepEnumeration { sets, complete }
}

/// `#I_w(G)`
pub fn count_indep_of_size(g: &MultiGraph, w: usize) -> u64 {
    let mut c = 0u64;
    visit_indep(g, w, w, &mut |_| {
        c += 1;
        true
    });
    c
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaxIndep {
    pub size: usize,
    pub witness: VertexSet,
}

impl MaxIndep {
    pub fn fraction(&self) -> f64 {
        if self.witness.n() == 0 {
            0.0
        } else {
            self.size as f64 / self.witness.n() as f64
        }
    }
}

/// Exact maximum independent set by branch and bound.
pub fn max_indep(g: &MultiGraph) -> MaxIndep {
    let adj = Adjacency::new(g);
    let n = adj.n;
    let mut cand = VertexSet::empty(n);
    for v in 0..n {
        if !adj.looped[v] {
            cand.insert(v);
        }
    }
    let mut best = VertexSet::empty(n);
    let mut cur = VertexSet::empty(n);
    mis_branch(&adj, &cand, &mut cur, &mut best);
    MaxIndep { size: best.len(), witness: best }
}

fn minus(a: &VertexSet, b: &VertexSet) -> VertexSet {
    let mut out = a.clone();
    for (x, y) in out.bits.iter_mut().zip(&b.bits) {
        *x &= !y;
    }
    out
}

fn and(a: &VertexSet, b: &VertexSet) -> VertexSet {
    let mut out = a.clone();
    for (x, y) in out.bits.iter_mut().zip(&b.bits) {
        *x &= y;
    }
    out
}

/// Greedy clique cover size of the candidate subgraph; bounds any independent subset.
fn clique_cover(adj: &Adjacency, cand: &VertexSet) -> usize {
    let mut left = cand.clone();
    let mut cliques = 0;
    while let Some(v) = left.first() {
        left.remove(v);
        let mut common = and(&left, &adj.nbrs[v]);
        while let Some(u) = common.first() {
            left.remove(u);
            common = and(&common, &adj.nbrs[u]);
        }
        cliques += 1;
    }
    cliques
}

fn mis_branch(adj: &Adjacency, cand: &VertexSet, cur: &mut VertexSet, best: &mut VertexSet) {
    let mut cand = cand.clone();
    let mut forced = Vec::new();
    // vertices of candidate degree <= 1 belong to some maximum solution
    loop {
        let pick = cand.iter().find(|&v| adj.nbrs[v].intersection_len(&cand) <= 1);
        match pick {
            Some(v) => {
                forced.push(v);
                cur.insert(v);
                cand.remove(v);
                cand = minus(&cand, &adj.nbrs[v]);
            }
            None => break,
        }
    }
    let cur_len = cur.len();
    if cand.is_empty() {
        if cur_len > best.len() {
            *best = cur.clone();
        }
    } else if cur_len + clique_cover(adj, &cand) > best.len() {
        let v = cand.iter().max_by_key(|&v| (adj.nbrs[v].intersection_len(&cand), std::cmp::Reverse(v))).unwrap();
        let mut with = minus(&cand, &adj.nbrs[v]);
        with.remove(v);
        cur.insert(v);
        mis_branch(adj, &with, cur, best);
        cur.remove(v);
        let mut without = cand.clone();
        without.remove(v);
        mis_branch(adj, &without, cur, best);
    }
    for v in forced {
        cur.remove(v);
    }
}

/// Default cap on sets materialized for exact sampling.
pub const SAMPLING_BUDGET: usize = 20_000_000;

/// Uniform independent set of size `w`, by enumeration and an index draw.
pub fn sample_uniform_indep(g: &MultiGraph, w: usize, rng: &mut Rng) -> Result<VertexSet> {
    let e = enumerate_indep(g, w, w, Some(SAMPLING_BUDGET));
    if !e.complete {
        return Err(Error::BudgetExceeded { budget: SAMPLING_BUDGET });
    }
    if e.sets.is_empty() {
        return Err(Error::Infeasible(format!("no independent set of size {w}")));
    }
    let i = rng::below(rng, e.sets.len());
    Ok(e.sets.into_iter().nth(i).expect("index in range"))
}

/// A uniform pair `(σ, W)` with `W` a `w`-subset and `σ(a_i)(W) ∩ W = ∅` for all `i`.
pub fn sample_planted(r: usize, n: usize, w: usize, rng: &mut Rng) -> Result<(PermHom, VertexSet)> {
    if 2 * w > n {
        return Err(Error::Infeasible(format!("planted model needs 2w <= n, got w={w}, n={n}")));
    }
    let mut chosen = rng::subset(rng, n, w);
    chosen.sort_unstable();
    let set = VertexSet::from_indices(n, &chosen)?;
    let outside: Vec<usize> = (0..n).filter(|&v| !set.contains(v)).collect();
    let mut gens = Vec::with_capacity(r);
    for _ in 0..r {
        let mut perm = vec![usize::MAX; n];
        let mut hit = vec![false; n];
        let images = rng::subset(rng, n - w, w);
        for (&v, &k) in chosen.iter().zip(&images) {
            perm[v] = outside[k];
            hit[outside[k]] = true;
        }
        let targets: Vec<usize> = (0..n).filter(|&u| !hit[u]).collect();
        let shuffle = rng::permutation(rng, n - w);
        for (j, &v) in outside.iter().enumerate() {
            perm[v] = targets[shuffle[j]];
        }
        gens.push(perm);
    }
    Ok((PermHom::new(gens)?, set))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverlapSpectrum {
    /// `counts[i]` is the number of sets `W'` in the band with `|W ∩ W'| = i`.
    pub counts: Vec<u64>,
    /// Maximal runs of empty buckets, inclusive.
    pub gaps: Vec<(usize, usize)>,
    pub complete: bool,
}

pub fn overlap_spectrum(g: &MultiGraph, w: &VertexSet, w_lo: usize, w_hi: usize, budget: Option<usize>) -> OverlapSpectrum {
    let mut counts = vec![0u64; w.len() + 1];
    let mut seen = 0usize;
    let complete = visit_indep(g, w_lo, w_hi, &mut |s| {
        if budget.is_some_and(|b| seen >= b) {
            return false;
        }
        seen += 1;
        counts[w.intersection_len(s)] += 1;
        true
    });
    let gaps = zero_runs(&counts);
    OverlapSpectrum { counts, gaps, complete }
}

fn zero_runs(counts: &[u64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &c) in counts.iter().enumerate() {
        match (c == 0, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, counts.len() - 1));
    }
    out
}

/// Sizes `k` with `|k/n − s| ≤ ε`.
pub fn closed_band(n: usize, s: Scale, eps: Scale) -> (usize, usize) {
    let lo = s.sub(eps).ceil_times(n).max(0) as usize;
    let hi = s.add(eps).floor_times(n).min(n as i64);
    (lo, hi.max(-1) as usize)
}

/// Sizes `k` with `|k/n − s| < ε`; empty when the returned low end exceeds the high end.
pub fn open_band(n: usize, s: Scale, eps: Scale) -> (i64, i64) {
    let lo_scale = s.sub(eps);
    let hi_scale = s.add(eps);
    let mut lo = lo_scale.floor_times(n) + 1;
    let mut hi = hi_scale.ceil_times(n) - 1;
    lo = lo.max(0);
    hi = hi.min(n as i64);
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport {
    pub count: u64,
    /// Members in enumeration order, up to the retention limit.
    pub members: Vec<VertexSet>,
    pub log_size_per_vertex: f64,
    pub complete: bool,
}

/// `2·|W ∩ W'| ≥ s·n`, decided in integers.
fn half_overlap(s: Scale, inter: usize, n: usize) -> bool {
    !s.exceeds_fraction(2 * inter, n)
}

/// `Cluster_{s,ε}(W)`: independent `W'` with `|#W'/n − s| ≤ ε` and `|W ∩ W'| ≥ (s/2)n`.
pub fn cluster_of(g: &MultiGraph, w: &VertexSet, s: f64, eps: f64, keep: usize, budget: Option<usize>) -> Result<ClusterReport> {
    let (s, eps) = (Scale::from_f64(s)?, Scale::from_f64(eps)?);
    let n = g.n();
    let (lo, hi) = closed_band(n, s, eps);
    let mut count = 0u64;
    let mut members = Vec::new();
    let mut complete = true;
    if lo <= hi {
        let mut seen = 0usize;
        complete = visit_indep(g, lo, hi, &mut |c| {
            if budget.is_some_and(|b| seen >= b) {
                return false;
            }
            seen += 1;
            if half_overlap(s, w.intersection_len(c), n) {
                count += 1;
                if members.len() < keep {
                    members.push(c.clone());
                }
            }
            true
        });
    }
    let log_size_per_vertex = if count == 0 { f64::NEG_INFINITY } else { (count as f64).ln() / n as f64 };
    Ok(ClusterReport { count, members, log_size_per_vertex, complete })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct GoodSetParams {
    pub s: f64,
    pub eps: f64,
    pub b1: f64,
    pub b2: f64,
    pub gamma: f64,
    pub f_rs: f64,
}

impl GoodSetParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps / 5.0 < self.b2 - self.b1) {
            return Err(Error::Config(format!(
                "requires eps/5 < b2 - b1, got eps/5 = {} and b2 - b1 = {}",
                self.eps / 5.0,
                self.b2 - self.b1
            )));
        }
        let q = self.eps / 10.0;
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Config(format!("eps/10 = {q} outside [0, 1]")));
        }
        let lhs = q * 2f64.ln() + eta(q)? + eta(1.0 - q)?;
        if !(lhs < self.gamma / 6.0) {
            return Err(Error::Config(format!(
                "requires (eps/10)log 2 + H(eps/10, 1-eps/10) < gamma/6, got {lhs} vs {}",
                self.gamma / 6.0
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodSetReport {
    pub passes: bool,
    pub gap_ok: bool,
    pub cluster_ok: bool,
    /// Intersection sizes in `[b1 n, b2 n]` realized by some `W'` in the open band.
    pub forbidden_hits: Vec<usize>,
    pub cluster_log_size: f64,
    pub reasons: Vec<String>,
    pub complete: bool,
}

/// Membership of `W` in the good family `W(σ)`.
///
/// 1. No independent `W'` with `|#W'/n − s| < ε` has `b1·n ≤ |W ∩ W'| ≤ b2·n`.
/// 2. `n⁻¹ log #Cluster_{s,ε}(W) ≤ f(r,s) − γ/2`.
pub fn good_set_filter(g: &MultiGraph, w: &VertexSet, params: &GoodSetParams, budget: Option<usize>) -> Result<GoodSetReport> {
    params.validate()?;
    let n = g.n();
    let (s, eps) = (Scale::from_f64(params.s)?, Scale::from_f64(params.eps)?);
    let (b1, b2) = (Scale::from_f64(params.b1)?, Scale::from_f64(params.b2)?);
    let (lo, hi) = open_band(n, s, eps);
    let mut forbidden_hits = Vec::new();
    let mut complete = true;
    if lo <= hi {
        let spec = overlap_spectrum(g, w, lo as usize, hi as usize, budget);
        complete &= spec.complete;
        for (i, &c) in spec.counts.iter().enumerate() {
            let above = !b1.exceeds_fraction(i, n);
            let below = b2.at_least_fraction(i, n);
            if c > 0 && above && below {
                forbidden_hits.push(i);
            }
        }
    }
    let cluster = cluster_of(g, w, params.s, params.eps, 0, budget)?;
    complete &= cluster.complete;
    let gap_ok = forbidden_hits.is_empty();
    let cluster_ok = cluster.log_size_per_vertex <= params.f_rs - params.gamma / 2.0;
    let mut reasons = Vec::new();
    if !gap_ok {
        reasons.push(format!("overlap in [b1 n, b2 n] realized at sizes {forbidden_hits:?}"));
    }
    if !cluster_ok {
        reasons.push(format!(
            "cluster log-size {} exceeds f - gamma/2 = {}",
            cluster.log_size_per_vertex,
            params.f_rs - params.gamma / 2.0
        ));
    }
    if !complete {
        reasons.push("budget exhausted; verdict covers a partial enumeration".into());
    }
    Ok(GoodSetReport {
        passes: gap_ok && cluster_ok && complete,
        gap_ok,
        cluster_ok,
        forbidden_hits,
        cluster_log_size: cluster.log_size_per_vertex,
        reasons,
        complete,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Components {
    /// Component index per input set, numbered by first appearance.
    pub labels: Vec<usize>,
    pub count: usize,
}

/// Components of the graph joining sets at normalized Hamming distance `< κ`.
pub fn shatter_components(sets: &[VertexSet], kappa: f64) -> Result<Components> {
    let kappa = Scale::from_f64(kappa)?;
    let m = sets.len();
    let n = sets.first().map(VertexSet::n).unwrap_or(0);
    if sets.iter().any(|s| s.n() != n) {
        return Err(Error::Config("sets over different vertex counts".into()));
    }
    let links: Vec<Vec<usize>> = (0..m)
        .into_par_iter()
        .map(|i| (i + 1..m).filter(|&j| kappa.exceeds_fraction(sets[i].hamming(&sets[j]), n)).collect())
        .collect();
    let mut uf = UnionFind::new(m);
    for (i, js) in links.iter().enumerate() {
        for &j in js {
            uf.union(i, j);
        }
    }
    Ok(Components { count: uf.set_count(), labels: uf.labels() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlantedEvent {
    pub vertex: usize,
    pub p_unif: f64,
    pub se_unif: f64,
    pub p_plant: f64,
    pub se_plant: f64,
    /// `P^plant(A) · 2E_R`
    pub bound: f64,
    /// `P^unif − bound ≤ 3·combined standard error`
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlantedCheck {
    pub e_r: f64,
    pub e_big_r: f64,
    /// `E_r / (2 E_R)`, the lower bound on `#I` defining the set `X`.
    pub threshold: f64,
    pub p_x: MonteCarlo,
    pub events: Vec<PlantedEvent>,
}

/// Monte Carlo check of `P^unif(A) ≤ P^plant(A)·2E^perm_{R,n}[#I]` on the cylinder
/// events `A_v = {(σ,W) : σ ∈ X, v ∈ W}`.
pub fn planted_inequality_check(r: usize, big_r: usize, n: usize, w: usize, samples: usize, seed: u64) -> Result<PlantedCheck> {
    if big_r < r {
        return Err(Error::Config("requires R >= r".into()));
    }
    if samples < 2 {
        return Err(Error::Config("samples must be >= 2".into()));
    }
    let e_r_exact = exact_expected_count_indep(r, n, w);
    let e_big_exact = exact_expected_count_indep(big_r, n, w);
    let e_r = rational_to_f64(&e_r_exact);
    let e_big_r = rational_to_f64(&e_big_exact);
    // #I >= E_r/(2E_R)  <=>  2·E_R·#I >= E_r, decided exactly
    let two_big = &e_big_exact * num_rational::BigRational::from_integer(2.into());
    let in_x = |count: u64| -> bool {
        (&two_big * num_rational::BigRational::from_integer(count.into())) >= e_r_exact
    };
    let threshold = rational_to_f64(&(&e_r_exact / &two_big));

    // uniform model: σ uniform, W uniform in I_w(σ); average P(v ∈ W | σ) exactly
    let unif: Vec<(f64, Vec<f64>)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::derive(seed, 2 * i as u64);
            let g = schreier_graph(&sample_perm_hom(r, n, &mut rng));
            let sets = enumerate_indep(&g, w, w, None).sets;
            let count = sets.len() as u64;
            let mut hits = vec![0.0; n];
            if count > 0 && in_x(count) {
                for s in &sets {
                    for v in s.iter() {
                        hits[v] += 1.0;
                    }
                }
                for h in hits.iter_mut() {
                    *h /= count as f64;
                }
            }
            (f64::from(u8::from(in_x(count))), hits)
        })
        .collect();
    let plant: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::derive(seed, 2 * i as u64 + 1);
            let (sigma, set) = sample_planted(r, n, w, &mut rng).expect("2w <= n checked by caller");
            let count = count_indep_of_size(&schreier_graph(&sigma), w);
            let x = in_x(count);
            (0..n).map(|v| f64::from(u8::from(x && set.contains(v)))).collect()
        })
        .collect();
    let p_x = moments::summarize(&unif.iter().map(|u| u.0).collect::<Vec<_>>());
    let events = (0..n)
        .map(|v| {
            let u = moments::summarize(&unif.iter().map(|x| x.1[v]).collect::<Vec<_>>());
            let p = moments::summarize(&plant.iter().map(|x| x[v]).collect::<Vec<_>>());
            let bound = p.estimate * 2.0 * e_big_r;
            let se = (u.stderr.powi(2) + (2.0 * e_big_r * p.stderr).powi(2)).sqrt();
            PlantedEvent {
                vertex: v,
                p_unif: u.estimate,
                se_unif: u.stderr,
                p_plant: p.estimate,
                se_plant: p.stderr,
                bound,
                holds: u.estimate - bound <= 3.0 * se,
            }
        })
        .collect();
    Ok(PlantedCheck { e_r, e_big_r, threshold, p_x, events })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle_graph(n: usize) -> MultiGraph {
        let edges: Vec<(usize, usize)> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        MultiGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn independence_basics() {
        let g = MultiGraph::from_edges(2, &[(0, 0), (1, 1)]).unwrap();
        assert!(is_independent(&g, &VertexSet::empty(2)));
        assert!(!is_independent(&g, &VertexSet::from_indices(2, &[0]).unwrap()));
    }

    #[test]
    fn four_cycle_diagonals() {
        let g = cycle_graph(4);
        let e = enumerate_indep(&g, 2, 2, None);
        let mut got: Vec<Vec<usize>> = e.sets.iter().map(VertexSet::to_vec).collect();
        got.sort();
        assert_eq!(got, vec![vec![0, 2], vec![1, 3]]);
        let g = MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        assert_eq!(count_indep_of_size(&g, 1), 2);
    }

    #[test]
    fn max_indep_examples() {
        for n in [4, 6, 10] {
            assert_eq!(max_indep(&cycle_graph(n)).size, n / 2);
        }
        assert_eq!(max_indep(&cycle_graph(7)).size, 3);
        let g = schreier_graph(&PermHom::identity(1, 5));
        assert_eq!(max_indep(&g).size, 0);
    }

    #[test]
    fn uniform_sampler_edges() {
        let mut rng = rng::from_seed(4);
        let g = cycle_graph(4);
        assert!(sample_uniform_indep(&g, 0, &mut rng).unwrap().is_empty());
        assert!(sample_uniform_indep(&g, 3, &mut rng).is_err());
        let path = MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        let s = sample_uniform_indep(&path, 1, &mut rng).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn planted_forced_transposition() {
        let mut rng = rng::from_seed(5);
        for _ in 0..10 {
            let (s, _) = sample_planted(1, 2, 1, &mut rng).unwrap();
            assert_eq!(s.gens()[0], vec![1, 0]);
        }
        assert!(sample_planted(1, 3, 2, &mut rng).is_err());
    }

    #[test]
    fn spectrum_basics() {
        let g = cycle_graph(6);
        let w = VertexSet::from_indices(6, &[0, 2, 4]).unwrap();
        let sp = overlap_spectrum(&g, &w, 3, 3, None);
        assert!(sp.counts[3] >= 1);
        let sp = overlap_spectrum(&g, &w, 0, 0, None);
        assert_eq!(sp.counts, vec![1, 0, 0, 0]);
        assert_eq!(sp.gaps, vec![(1, 3)]);
    }

    #[test]
    fn cluster_contains_w() {
        let g = cycle_graph(10);
        let w = VertexSet::from_indices(10, &[0, 2, 4]).unwrap();
        let c = cluster_of(&g, &w, 0.3, 0.0, 100, None).unwrap();
        assert!(c.members.contains(&w));
        let far = VertexSet::from_indices(10, &[1, 3, 5]).unwrap();
        assert!(!c.members.contains(&far));
    }

    #[test]
    fn bands() {
        let s = Scale::from_f64(0.3).unwrap();
        let e = Scale::from_f64(0.1).unwrap();
        assert_eq!(closed_band(10, s, e), (2, 4));
        assert_eq!(open_band(10, s, e), (3, 3));
        assert_eq!(open_band(20, s, e), (5, 7));
    }

    #[test]
    fn shatter_examples() {
        let a = VertexSet::from_indices(4, &[0]).unwrap();
        assert_eq!(shatter_components(&[a.clone(), a.clone()], 0.1).unwrap().count, 1);
        let b = VertexSet::from_indices(4, &[0, 1]).unwrap();
        assert_eq!(shatter_components(&[a.clone(), b.clone()], 0.25).unwrap().count, 2);
        assert_eq!(shatter_components(&[a, b], 0.26).unwrap().count, 1);
    }

    #[test]
    fn good_set_validation() {
        let p = GoodSetParams { s: 0.2, eps: 0.01, b1: 0.1, b2: 0.1, gamma: 1.0, f_rs: 1.0 };
        assert!(matches!(p.validate(), Err(Error::Config(_))));
        let p = GoodSetParams { s: 0.2, eps: 0.01, b1: 0.05, b2: 0.1, gamma: 0.0001, f_rs: 1.0 };
        assert!(p.validate().is_err());
        let p = GoodSetParams { s: 0.2, eps: 0.01, b1: 0.05, b2: 0.1, gamma: 0.1, f_rs: 1.0 };
        assert!(p.validate().is_ok());
    }
}
