//! Pullback names, windowed empirical measures and model spaces.
//!
//! A pattern over a window `D = (g_0, …, g_{k-1})` is the tuple
//! `(x(σ(g_0)⁻¹v), …, x(σ(g_{k-1})⁻¹v))`. Internally it is packed into a
//! base-`|X|` integer with `g_0` as the most significant digit, so integer
//! order is lexicographic pattern order.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::{evaluate, Word};
use crate::rng::{self, Rng};
use crate::sofic::{MultiGraph, PermHom};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Labeling {
    pub values: Vec<u8>,
    pub alphabet: usize,
}

impl Labeling {
    pub fn new(values: Vec<u8>, alphabet: usize) -> Result<Self> {
        if alphabet == 0 || alphabet > 256 {
            return Err(Error::InvalidLabeling(format!("alphabet size {alphabet}")));
        }
        if let Some(v) = values.iter().find(|&&v| v as usize >= alphabet) {
            return Err(Error::InvalidLabeling(format!("value {v} outside alphabet of size {alphabet}")));
        }
        Ok(Labeling { values, alphabet })
    }

    pub fn constant(n: usize, c: u8, alphabet: usize) -> Self {
        Labeling { values: vec![c; n], alphabet }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Number of vertices where the labelings differ.
    pub fn hamming(&self, other: &Labeling) -> usize {
        self.values.iter().zip(&other.values).filter(|(a, b)| a != b).count()
    }

    pub fn distance(&self, other: &Labeling) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            self.hamming(other) as f64 / self.n() as f64
        }
    }
}

fn check_window(window: &[Word]) -> Result<()> {
    if window.is_empty() {
        return Err(Error::Config("window must be nonempty".into()));
    }
    if window.len() > 64 {
        return Err(Error::Config("window longer than 64 words".into()));
    }
    Ok(())
}

fn pattern_key(p: &[u8], alphabet: usize) -> String {
    if alphabet <= 10 {
        p.iter().map(|&c| char::from(b'0' + c)).collect()
    } else {
        p.iter().map(u8::to_string).collect::<Vec<_>>().join(",")
    }
}

fn parse_key(s: &str, alphabet: usize) -> Result<Vec<u8>> {
    let bad = || Error::InvalidDistribution(format!("bad pattern key {s:?}"));
    if alphabet <= 10 {
        s.bytes()
            .map(|b| if b.is_ascii_digit() && ((b - b'0') as usize) < alphabet { Ok(b - b'0') } else { Err(bad()) })
            .collect()
    } else {
        s.split(',').map(|t| t.parse::<u8>().map_err(|_| bad())).collect()
    }
}

/// A distribution on patterns over a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistRepr", into = "DistRepr")]
pub struct WindowDistribution {
    window: Vec<Word>,
    alphabet: usize,
    probs: BTreeMap<Vec<u8>, f64>,
}

#[derive(Serialize, Deserialize)]
struct DistRepr {
    window: Vec<Word>,
    alphabet: usize,
    probs: BTreeMap<String, f64>,
}

impl TryFrom<DistRepr> for WindowDistribution {
    type Error = Error;
    fn try_from(r: DistRepr) -> Result<Self> {
        let probs = r
            .probs
            .iter()
            .map(|(k, &v)| Ok((parse_key(k, r.alphabet)?, v)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        WindowDistribution::new(r.window, r.alphabet, probs)
    }
}

impl From<WindowDistribution> for DistRepr {
    fn from(d: WindowDistribution) -> Self {
        let probs = d.probs.iter().map(|(k, &v)| (pattern_key(k, d.alphabet), v)).collect();
        DistRepr { window: d.window, alphabet: d.alphabet, probs }
    }
}

impl WindowDistribution {
    pub fn new(window: Vec<Word>, alphabet: usize, probs: BTreeMap<Vec<u8>, f64>) -> Result<Self> {
        check_window(&window)?;
        let mut total = 0.0;
        for (p, &w) in &probs {
            if p.len() != window.len() {
                return Err(Error::InvalidDistribution(format!("pattern length {} for window of {}", p.len(), window.len())));
            }
            if p.iter().any(|&c| c as usize >= alphabet) {
                return Err(Error::InvalidDistribution(format!("pattern {p:?} outside alphabet")));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidDistribution(format!("weight {w}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        let probs = probs.into_iter().filter(|&(_, w)| w > 0.0).collect();
        Ok(WindowDistribution { window, alphabet, probs })
    }

    /// I.i.d. labels with marginal `marginal` on every window coordinate.
    pub fn product(window: Vec<Word>, marginal: &[f64]) -> Result<Self> {
        check_window(&window)?;
        let a = marginal.len();
        let k = window.len();
        let total = a.checked_pow(k as u32).filter(|&t| t <= 1 << 24).ok_or_else(|| {
            Error::InvalidDistribution(format!("{a}^{k} patterns is too many for a product target"))
        })?;
        let mut probs = BTreeMap::new();
        for code in 0..total {
            let p = decode(code as u64, a, k);
            let w: f64 = p.iter().map(|&c| marginal[c as usize]).product();
            if w > 0.0 {
                probs.insert(p, w);
            }
        }
        let sum: f64 = probs.values().sum();
        for w in probs.values_mut() {
            *w /= sum;
        }
        WindowDistribution::new(window, a, probs)
    }

    pub fn window(&self) -> &[Word] {
        &self.window
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn probs(&self) -> &BTreeMap<Vec<u8>, f64> {
        &self.probs
    }

    pub fn prob(&self, p: &[u8]) -> f64 {
        self.probs.get(p).copied().unwrap_or(0.0)
    }

    fn coded(&self) -> HashMap<u64, f64> {
        self.probs.iter().map(|(p, &w)| (encode(p, self.alphabet), w)).collect()
    }
}

fn encode(p: &[u8], alphabet: usize) -> u64 {
    p.iter().fold(0u64, |acc, &c| acc * alphabet as u64 + c as u64)
}

fn decode(mut code: u64, alphabet: usize, len: usize) -> Vec<u8> {
    let mut p = vec![0u8; len];
    for slot in p.iter_mut().rev() {
        *slot = (code % alphabet as u64) as u8;
        code /= alphabet as u64;
    }
    p
}

/// Precomputed `σ(g)⁻¹` tables for a window.
#[derive(Debug, Clone)]
pub struct PullbackTables {
    sources: Vec<Vec<usize>>,
    n: usize,
}

impl PullbackTables {
    pub fn new(sigma: &PermHom, window: &[Word]) -> Self {
        let n = sigma.n();
        let sources = window.iter().map(|g| sigma.word_table(&g.inverse())).collect();
        PullbackTables { sources, n }
    }

    pub fn pattern(&self, x: &[u8], v: usize) -> Vec<u8> {
        self.sources.iter().map(|s| x[s[v]]).collect()
    }

    fn code(&self, x: &[u8], alphabet: u64, v: usize) -> u64 {
        self.sources.iter().fold(0u64, |acc, s| acc * alphabet + x[s[v]] as u64)
    }

    fn counts(&self, x: &[u8], alphabet: usize) -> HashMap<u64, usize> {
        let mut c = HashMap::new();
        for v in 0..self.n {
            *c.entry(self.code(x, alphabet as u64, v)).or_insert(0) += 1;
        }
        c
    }
}

/// `Π^σ_v(x)` restricted to the window.
pub fn pullback_pattern(sigma: &PermHom, x: &Labeling, v: usize, window: &[Word]) -> Vec<u8> {
    window.iter().map(|g| x.values[evaluate(sigma, &g.inverse(), v)]).collect()
}

/// Pattern tallies over vertices. Kept as integers so total mass is exactly `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalCounts {
    pub window: Vec<Word>,
    pub alphabet: usize,
    pub n: usize,
    pub counts: BTreeMap<Vec<u8>, usize>,
}

impl EmpiricalCounts {
    pub fn to_distribution(&self) -> WindowDistribution {
        let probs = self.counts.iter().map(|(p, &c)| (p.clone(), c as f64 / self.n as f64)).collect();
        WindowDistribution { window: self.window.clone(), alphabet: self.alphabet, probs }
    }

    /// Half the ℓ¹ distance to `target`.
    pub fn tv_to(&self, target: &WindowDistribution) -> Result<f64> {
        if self.window != target.window || self.alphabet != target.alphabet {
            return Err(Error::WindowMismatch);
        }
        let n = self.n as f64;
        let mut excess = 0.0;
        for (p, &c) in &self.counts {
            let d = c as f64 / n - target.prob(p);
            if d > 0.0 {
                excess += d;
            }
        }
        // both measures have mass 1, so TV equals the total positive part
        Ok(excess.min(1.0))
    }
}

pub fn empirical_counts(sigma: &PermHom, x: &Labeling, window: &[Word]) -> Result<EmpiricalCounts> {
    check_window(window)?;
    if x.n() != sigma.n() {
        return Err(Error::SizeMismatch { left: sigma.n(), right: x.n() });
    }
    let tables = PullbackTables::new(sigma, window);
    let counts = tables
        .counts(&x.values, x.alphabet)
        .into_iter()
        .map(|(code, c)| (decode(code, x.alphabet, window.len()), c))
        .collect();
    Ok(EmpiricalCounts { window: window.to_vec(), alphabet: x.alphabet, n: x.n(), counts })
}

/// `P^σ_x` pushed to the window.
pub fn windowed_empirical(sigma: &PermHom, x: &Labeling, window: &[Word]) -> Result<WindowDistribution> {
    Ok(empirical_counts(sigma, x, window)?.to_distribution())
}

pub fn tv_distance(p: &WindowDistribution, q: &WindowDistribution) -> Result<f64> {
    if p.window != q.window || p.alphabet != q.alphabet {
        return Err(Error::WindowMismatch);
    }
    let mut total = 0.0;
    for (k, &w) in &p.probs {
        total += (w - q.prob(k)).abs();
    }
    for (k, &w) in &q.probs {
        if !p.probs.contains_key(k) {
            total += w;
        }
    }
    Ok((0.5 * total).min(1.0))
}

/// Open TV ball around a window distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodSpec {
    pub target: WindowDistribution,
    pub radius: f64,
}

impl NeighborhoodSpec {
    /// Radii above 1 are accepted as the "everything" sentinel.
    pub fn new(target: WindowDistribution, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::Config(format!("radius {radius}")));
        }
        if !target.window.iter().any(Word::is_identity) {
            return Err(Error::Config("window must contain the identity".into()));
        }
        Ok(NeighborhoodSpec { target, radius })
    }

    pub fn everything(window: Vec<Word>, alphabet: usize) -> Result<Self> {
        let uniform = vec![1.0 / alphabet as f64; alphabet];
        NeighborhoodSpec::new(WindowDistribution::product(window, &uniform)?, 1.5)
    }

    pub fn window(&self) -> &[Word] {
        &self.target.window
    }

    pub fn alphabet(&self) -> usize {
        self.target.alphabet
    }
}

pub fn in_model_space(sigma: &PermHom, x: &Labeling, spec: &NeighborhoodSpec) -> Result<bool> {
    if spec.radius <= 0.0 {
        return Ok(false);
    }
    let tv = empirical_counts(sigma, x, spec.window())?.tv_to(&spec.target)?;
    Ok(tv < spec.radius)
}

/// Membership in every spec of an intersection.
pub fn in_all_model_spaces(sigma: &PermHom, x: &Labeling, specs: &[NeighborhoodSpec]) -> Result<bool> {
    for s in specs {
        if !in_model_space(sigma, x, s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub labelings: Vec<Labeling>,
    /// False when the budget stopped the search early.
    pub complete: bool,
}

/// Above this many raw labelings an unbudgeted enumeration is refused.
pub const UNBUDGETED_LIMIT: f64 = 4.0e9;

struct Search<'a> {
    n: usize,
    alphabet: usize,
    tables: PullbackTables,
    /// vertices whose pattern becomes known once vertex `k` is assigned
    completes_at: Vec<Vec<usize>>,
    target: HashMap<u64, f64>,
    /// `n · t_p`
    scaled: HashMap<u64, f64>,
    radius: f64,
    counts: HashMap<u64, usize>,
    excess: f64,
    deficit: f64,
    pending: usize,
    x: Vec<u8>,
    budget: Option<usize>,
    found: usize,
    sink: &'a mut dyn FnMut(&[u8]),
}

const SLACK: f64 = 1e-9;

impl Search<'_> {
    fn add(&mut self, code: u64, sign: i64) {
        let t = self.scaled.get(&code).copied().unwrap_or(0.0);
        let c = self.counts.entry(code).or_insert(0);
        let before = *c as f64;
        *c = (*c as i64 + sign) as usize;
        let after = *c as f64;
        self.excess += (after - t).max(0.0) - (before - t).max(0.0);
        self.deficit += (t - after).max(0.0) - (t - before).max(0.0);
    }

    fn pruned(&self) -> bool {
        let n = self.n as f64;
        let lb = (self.excess / n).max((self.deficit - self.pending as f64) / n);
        lb >= self.radius + SLACK
    }

    fn final_tv(&self) -> f64 {
        let n = self.n as f64;
        let mut excess = 0.0;
        for (code, &c) in &self.counts {
            let d = c as f64 / n - self.target.get(code).copied().unwrap_or(0.0);
            if d > 0.0 {
                excess += d;
            }
        }
        excess
    }

    /// Returns false when the budget is exhausted.
    fn run(&mut self, k: usize) -> bool {
        if k == self.n {
            if self.final_tv() < self.radius {
                if self.budget.is_some_and(|b| self.found >= b) {
                    return false;
                }
                self.found += 1;
                (self.sink)(&self.x);
            }
            return true;
        }
        for c in 0..self.alphabet as u8 {
            self.x[k] = c;
            let done = std::mem::take(&mut self.completes_at[k]);
            let codes: Vec<u64> = done.iter().map(|&v| self.tables.code(&self.x, self.alphabet as u64, v)).collect();
            for &code in &codes {
                self.add(code, 1);
            }
            self.pending -= done.len();
            let ok = self.pruned() || self.run(k + 1);
            self.pending += done.len();
            for &code in &codes {
                self.add(code, -1);
            }
            self.completes_at[k] = done;
            if !ok {
                return false;
            }
        }
        true
    }
}

fn search(
    sigma: &PermHom,
    spec: &NeighborhoodSpec,
    budget: Option<usize>,
    sink: &mut dyn FnMut(&[u8]),
) -> Result<bool> {
    let n = sigma.n();
    let alphabet = spec.alphabet();
    if budget.is_none() && (alphabet as f64).powi(n as i32) > UNBUDGETED_LIMIT {
        return Err(Error::EnumerationInfeasible(format!("{alphabet}^{n} labelings without a budget")));
    }
    if spec.radius <= 0.0 || n == 0 {
        return Ok(true);
    }
    let tables = PullbackTables::new(sigma, spec.window());
    let mut completes_at = vec![Vec::new(); n];
    for v in 0..n {
        let last = tables.sources.iter().map(|s| s[v]).max().unwrap_or(0);
        completes_at[last].push(v);
    }
    let target = spec.target.coded();
    let scaled: HashMap<u64, f64> = target.iter().map(|(&k, &t)| (k, t * n as f64)).collect();
    let mut s = Search {
        n,
        alphabet,
        tables,
        completes_at,
        target,
        scaled,
        radius: spec.radius,
        counts: HashMap::new(),
        excess: 0.0,
        deficit: n as f64,
        pending: n,
        x: vec![0; n],
        budget,
        found: 0,
        sink,
    };
    Ok(s.run(0))
}

/// Microstates of `Ω(O,σ)` in lexicographic order, at most `budget` of them.
pub fn enumerate_microstates(sigma: &PermHom, spec: &NeighborhoodSpec, budget: Option<usize>) -> Result<Enumeration> {
    let alphabet = spec.alphabet();
    let mut labelings = Vec::new();
    let complete = search(sigma, spec, budget, &mut |x| {
        labelings.push(Labeling { values: x.to_vec(), alphabet });
    })?;
    Ok(Enumeration { labelings, complete })
}

/// `#Ω(O,σ)` without materializing the microstates.
pub fn count_microstates(sigma: &PermHom, spec: &NeighborhoodSpec, budget: Option<usize>) -> Result<usize> {
    let mut count = 0usize;
    let complete = search(sigma, spec, budget, &mut |_| count += 1)?;
    if !complete {
        return Err(Error::BudgetExceeded { budget: budget.unwrap_or(0) });
    }
    Ok(count)
}

/// `n⁻¹ log #Ω(O,σ)`, `-∞` when empty.
pub fn entropy_estimate(sigma: &PermHom, spec: &NeighborhoodSpec, budget: Option<usize>) -> Result<f64> {
    let c = count_microstates(sigma, spec, budget)?;
    Ok(if c == 0 { f64::NEG_INFINITY } else { (c as f64).ln() / sigma.n() as f64 })
}

/// Local search for a labeling inside `Ω(O, σ)`.
///
/// Starts from a draw of the target's identity-coordinate marginal and flips
/// single vertices, accepting moves that do not increase the excess mass
/// `Σ_p (c_p/n − q_p)_+` and, rarely, moves that do. Returns `None` when
/// `max_flips` proposals do not reach the open ball.
pub fn search_microstate(sigma: &PermHom, spec: &NeighborhoodSpec, rng: &mut Rng, max_flips: usize) -> Result<Option<Labeling>> {
    let window = spec.window();
    check_window(window)?;
    let alphabet = spec.alphabet();
    let n = sigma.n();
    let codes = (alphabet as f64).powi(window.len() as i32);
    if codes > (1u64 << 22) as f64 {
        return Err(Error::Config(format!("{codes} patterns is too many for local search")));
    }
    if n == 0 || spec.radius <= 0.0 {
        return Ok(None);
    }
    let codes = codes as usize;
    let target: Vec<f64> = (0..codes).map(|c| spec.target.prob(&decode(c as u64, alphabet, window.len()))).collect();
    let id = window.iter().position(Word::is_identity).expect("spec window contains the identity");
    let mut marginal = vec![0.0; alphabet];
    for (c, q) in target.iter().enumerate() {
        marginal[decode(c as u64, alphabet, window.len())[id] as usize] += q;
    }
    let tables = PullbackTables::new(sigma, window);
    // vertices whose pattern reads x(v): σ(g)v for g in the window
    let forward: Vec<Vec<usize>> = window.iter().map(|g| sigma.word_table(g)).collect();
    let mut x: Vec<u8> = (0..n).map(|_| rng::categorical(rng, &marginal) as u8).collect();
    let mut counts = vec![0usize; codes];
    let mut code_of: Vec<usize> = (0..n).map(|v| tables.code(&x, alphabet as u64, v) as usize).collect();
    for &c in &code_of {
        counts[c] += 1;
    }
    let nf = n as f64;
    let excess = |c: usize, q: f64| (c as f64 / nf - q).max(0.0);
    let tv = |counts: &[usize]| counts.iter().zip(&target).map(|(&c, &q)| excess(c, q)).sum::<f64>();
    let mut current = tv(&counts);
    let mut affected: Vec<usize> = Vec::with_capacity(window.len());
    let mut new_codes: Vec<usize> = Vec::with_capacity(window.len());
    for _ in 0..max_flips {
        if current < spec.radius {
            current = tv(&counts);
            if current < spec.radius {
                break;
            }
        }
        let v = rng::below(rng, n);
        let old = x[v];
        let shift = 1 + rng::below(rng, alphabet.max(2) - 1) as u8;
        let new = (old + shift) % alphabet as u8;
        affected.clear();
        affected.extend(forward.iter().map(|f| f[v]));
        affected.sort_unstable();
        affected.dedup();
        // change in excess, computed over the touched codes only
        let mut before = 0.0;
        let mut touched: Vec<usize> = affected.iter().map(|&w| code_of[w]).collect();
        x[v] = new;
        new_codes.clear();
        new_codes.extend(affected.iter().map(|&w| tables.code(&x, alphabet as u64, w) as usize));
        touched.extend_from_slice(&new_codes);
        touched.sort_unstable();
        touched.dedup();
        for &c in &touched {
            before += excess(counts[c], target[c]);
        }
        for &w in &affected {
            counts[code_of[w]] -= 1;
        }
        for &c in &new_codes {
            counts[c] += 1;
        }
        let after: f64 = touched.iter().map(|&c| excess(counts[c], target[c])).sum();
        let delta = after - before;
        if delta <= 0.0 || rng::unit(rng) < (-delta * nf * 4.0).exp() {
            for (&w, &c) in affected.iter().zip(&new_codes) {
                code_of[w] = c;
            }
            current += delta;
        } else {
            for &c in &new_codes {
                counts[c] -= 1;
            }
            for &w in &affected {
                counts[code_of[w]] += 1;
            }
            x[v] = old;
        }
    }
    let candidate = Labeling { values: x, alphabet };
    Ok(if in_model_space(sigma, &candidate, spec)? { Some(candidate) } else { None })
}

/// Vertex and oriented-edge label statistics, held as integer counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissiblePair {
    pub alphabet: usize,
    pub n: usize,
    pub d: usize,
    pub vert_counts: Vec<u64>,
    /// row-major `|X| × |X|`
    pub edge_counts: Vec<u64>,
}

impl AdmissiblePair {
    pub fn pi_vert(&self) -> Vec<f64> {
        self.vert_counts.iter().map(|&c| c as f64 / self.n as f64).collect()
    }

    pub fn pi_edge(&self) -> Vec<Vec<f64>> {
        let total = (self.n * self.d) as f64;
        self.edge_counts.chunks(self.alphabet).map(|row| row.iter().map(|&c| c as f64 / total).collect()).collect()
    }

    /// Symmetry and both marginal identities, checked in integers.
    pub fn is_consistent(&self) -> bool {
        let a = self.alphabet;
        for p in 0..a {
            for q in 0..a {
                if self.edge_counts[p * a + q] != self.edge_counts[q * a + p] {
                    return false;
                }
            }
            let row: u64 = (0..a).map(|q| self.edge_counts[p * a + q]).sum();
            if row != self.d as u64 * self.vert_counts[p] {
                return false;
            }
        }
        true
    }
}

pub fn admissible_pair(g: &MultiGraph, x: &Labeling) -> Result<AdmissiblePair> {
    if g.n() != x.n() {
        return Err(Error::SizeMismatch { left: g.n(), right: x.n() });
    }
    let a = x.alphabet;
    let mut vert_counts = vec![0u64; a];
    let mut edge_counts = vec![0u64; a * a];
    for v in 0..g.n() {
        let p = x.values[v] as usize;
        vert_counts[p] += 1;
        for &w in g.neighbors(v) {
            edge_counts[p * a + x.values[w] as usize] += 1;
        }
    }
    Ok(AdmissiblePair { alphabet: a, n: g.n(), d: g.d(), vert_counts, edge_counts })
}

/// A finitary map `X^D → Y` given as a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalMap {
    pub window: Vec<Word>,
    pub out_alphabet: usize,
    pub table: HashMap<Vec<u8>, u8>,
}

impl LocalMap {
    /// Tabulate `f` over every pattern of the window.
    pub fn from_fn(window: Vec<Word>, in_alphabet: usize, out_alphabet: usize, f: impl Fn(&[u8]) -> u8) -> Result<Self> {
        check_window(&window)?;
        let k = window.len();
        let total = in_alphabet
            .checked_pow(k as u32)
            .filter(|&t| t <= 1 << 24)
            .ok_or_else(|| Error::Config("local map table too large".into()))?;
        let table = (0..total as u64)
            .map(|c| {
                let p = decode(c, in_alphabet, k);
                let y = f(&p);
                (p, y)
            })
            .collect();
        Ok(LocalMap { window, out_alphabet, table })
    }
}

/// `φ^σ(x)_v = φ(Π^σ_v(x))`
pub fn local_map_apply(sigma: &PermHom, phi: &LocalMap, x: &Labeling) -> Result<Labeling> {
    if x.n() != sigma.n() {
        return Err(Error::SizeMismatch { left: sigma.n(), right: x.n() });
    }
    let tables = PullbackTables::new(sigma, &phi.window);
    let mut out = Vec::with_capacity(x.n());
    for v in 0..x.n() {
        let p = tables.pattern(&x.values, v);
        match phi.table.get(&p) {
            Some(&y) => out.push(y),
            None => return Err(Error::MissingTableEntry(p)),
        }
    }
    Labeling::new(out, phi.out_alphabet)
}
