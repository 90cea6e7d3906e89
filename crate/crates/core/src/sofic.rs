//! Permutation and configuration models, Schreier graphs and sofic diagnostics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::{evaluate, Action, Word};
use crate::rng::{self, Rng};
use crate::unionfind::UnionFind;

/// A homomorphism `F_r → Sym(n)` given by its generator images.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PermHomRepr", into = "PermHomRepr")]
pub struct PermHom {
    n: usize,
    gens: Vec<Vec<usize>>,
    inv_gens: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct PermHomRepr {
    n: usize,
    gens: Vec<Vec<usize>>,
}

impl TryFrom<PermHomRepr> for PermHom {
    type Error = Error;
    fn try_from(r: PermHomRepr) -> Result<Self> {
        if r.gens.iter().any(|g| g.len() != r.n) {
            return Err(Error::SizeMismatch {
                left: r.n,
                right: r.gens.iter().map(Vec::len).find(|&l| l != r.n).unwrap_or(0),
            });
        }
        PermHom::new(r.gens)
    }
}

impl From<PermHom> for PermHomRepr {
    fn from(p: PermHom) -> Self {
        PermHomRepr { n: p.n, gens: p.gens }
    }
}

fn invert(generator: usize, p: &[usize]) -> Result<Vec<usize>> {
    let mut inv = vec![usize::MAX; p.len()];
    for (i, &j) in p.iter().enumerate() {
        if j >= p.len() {
            return Err(Error::InvalidPermutation { generator, reason: format!("image {j} out of range") });
        }
        if inv[j] != usize::MAX {
            return Err(Error::InvalidPermutation { generator, reason: format!("{j} hit twice") });
        }
        inv[j] = i;
    }
    Ok(inv)
}

impl PermHom {
    /// Build from forward tables. All tables must share one length.
    pub fn new(gens: Vec<Vec<usize>>) -> Result<Self> {
        let n = gens.first().map(Vec::len).unwrap_or(0);
        let mut inv_gens = Vec::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            if g.len() != n {
                return Err(Error::SizeMismatch { left: n, right: g.len() });
            }
            inv_gens.push(invert(i, g)?);
        }
        Ok(PermHom { n, gens, inv_gens })
    }

    pub fn identity(r: usize, n: usize) -> Self {
        let id: Vec<usize> = (0..n).collect();
        PermHom { n, gens: vec![id.clone(); r], inv_gens: vec![id; r] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.gens.len()
    }

    pub fn gens(&self) -> &[Vec<usize>] {
        &self.gens
    }

    pub fn inv_gens(&self) -> &[Vec<usize>] {
        &self.inv_gens
    }

    /// `σ(w)` as a forward table.
    pub fn word_table(&self, w: &Word) -> Vec<usize> {
        (0..self.n).map(|v| evaluate(self, w, v)).collect()
    }

    /// Replace the image of generator `i` (0-based).
    pub fn with_generator(&self, i: usize, perm: Vec<usize>) -> Result<Self> {
        let mut gens = self.gens.clone();
        gens[i] = perm;
        PermHom::new(gens)
    }
}

impl Action for PermHom {
    fn size(&self) -> usize {
        self.n
    }

    fn rank(&self) -> usize {
        self.gens.len()
    }

    fn act_letter(&self, l: i32, v: usize) -> usize {
        if l > 0 {
            self.gens[l as usize - 1][v]
        } else {
            self.inv_gens[(-l) as usize - 1][v]
        }
    }
}

/// A `d`-regular multigraph. Self-loops appear twice in their vertex's list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MultiGraphRepr", into = "MultiGraphRepr")]
pub struct MultiGraph {
    n: usize,
    d: usize,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct MultiGraphRepr {
    n: usize,
    d: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<MultiGraphRepr> for MultiGraph {
    type Error = Error;
    fn try_from(r: MultiGraphRepr) -> Result<Self> {
        let g = MultiGraph::from_edges(r.n, &r.edges)?;
        if g.d != r.d {
            return Err(Error::Config(format!("declared degree {} but edges give {}", r.d, g.d)));
        }
        Ok(g)
    }
}

impl From<MultiGraph> for MultiGraphRepr {
    fn from(g: MultiGraph) -> Self {
        MultiGraphRepr { n: g.n, d: g.d, edges: g.edges() }
    }
}

impl MultiGraph {
    /// Build from an undirected edge list; every vertex must end with the same degree.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Config(format!("edge ({u},{v}) outside [0,{n})")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let d = adjacency.first().map(Vec::len).unwrap_or(0);
        if adjacency.iter().any(|a| a.len() != d) {
            return Err(Error::Config("graph is not regular".into()));
        }
        for a in &mut adjacency {
            a.sort_unstable();
        }
        Ok(MultiGraph { n, d, adjacency })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Sorted edge multiset with `u <= v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n * self.d / 2);
        for (u, a) in self.adjacency.iter().enumerate() {
            let mut loops = 0;
            for &v in a {
                if v == u {
                    loops += 1;
                } else if u < v {
                    out.push((u, v));
                }
            }
            out.extend(std::iter::repeat((u, u)).take(loops / 2));
        }
        out.sort_unstable();
        out
    }

    /// Multiplicity of each unordered pair `u <= v`.
    pub fn edge_multiplicities(&self) -> BTreeMap<(usize, usize), usize> {
        let mut m = BTreeMap::new();
        for e in self.edges() {
            *m.entry(e).or_insert(0) += 1;
        }
        m
    }

    pub fn degrees_ok(&self) -> bool {
        self.adjacency.iter().all(|a| a.len() == self.d)
            && self.adjacency.iter().map(Vec::len).sum::<usize>() == self.d * self.n
    }

    pub fn component_count(&self) -> usize {
        let mut uf = UnionFind::new(self.n);
        for (u, a) in self.adjacency.iter().enumerate() {
            for &v in a {
                uf.union(u, v);
            }
        }
        uf.set_count()
    }

    pub fn has_self_loop(&self, v: usize) -> bool {
        self.adjacency[v].contains(&v)
    }
}

pub fn sample_perm_hom(r: usize, n: usize, rng: &mut Rng) -> PermHom {
    let gens: Vec<Vec<usize>> = (0..r).map(|_| rng::permutation(rng, n)).collect();
    PermHom::new(gens).expect("uniform permutations are valid")
}

/// Uniform perfect matching of the `n·d` half-edges, projected to a multigraph.
pub fn sample_config_graph(d: usize, n: usize, rng: &mut Rng) -> Result<MultiGraph> {
    if (d * n) % 2 == 1 {
        return Err(Error::OddHalfEdges { d, n });
    }
    let mut half: Vec<usize> = (0..n * d).collect();
    rng::shuffle(rng, &mut half);
    let edges: Vec<(usize, usize)> = half.chunks(2).map(|p| (p[0] / d, p[1] / d)).collect();
    let mut adjacency = vec![Vec::with_capacity(d); n];
    for (u, v) in edges {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    for a in &mut adjacency {
        a.sort_unstable();
    }
    Ok(MultiGraph { n, d, adjacency })
}

/// The `2r`-regular multigraph with edges `{v, σ(a_i)v}`.
pub fn schreier_graph(sigma: &PermHom) -> MultiGraph {
    let n = sigma.n;
    let mut adjacency = vec![Vec::with_capacity(2 * sigma.r()); n];
    for g in &sigma.gens {
        for (v, &w) in g.iter().enumerate() {
            adjacency[v].push(w);
            adjacency[w].push(v);
        }
    }
    for a in &mut adjacency {
        a.sort_unstable();
    }
    MultiGraph { n, d: 2 * sigma.r(), adjacency }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SoficReport {
    /// `(w, |Fix σ(w)| / n)` for each non-identity window word.
    pub fixed_fractions: Vec<(Word, f64)>,
    /// Vertices fixed by no non-identity word of the window.
    pub free_count: usize,
    pub is_trace_preserving: bool,
    pub is_multiplicative: bool,
}

pub fn sofic_report(sigma: &PermHom, window: &[Word], delta: f64) -> SoficReport {
    let n = sigma.n;
    let mut fixed_by_some = vec![false; n];
    let mut fixed_fractions = Vec::new();
    for w in window.iter().filter(|w| !w.is_identity()) {
        let mut count = 0;
        for (v, hit) in fixed_by_some.iter_mut().enumerate() {
            if evaluate(sigma, w, v) == v {
                count += 1;
                *hit = true;
            }
        }
        fixed_fractions.push((w.clone(), count as f64 / n as f64));
    }
    let free_count = fixed_by_some.iter().filter(|&&b| !b).count();
    SoficReport {
        fixed_fractions,
        free_count,
        is_trace_preserving: free_count as f64 > (1.0 - delta) * n as f64,
        // σ is a homomorphism by construction
        is_multiplicative: true,
    }
}

/// Simple closed cycles of each length `1..=max_len` (index `k-1` holds length `k`).
///
/// Loops are length 1, pairs of parallel edges length 2, and a longer cycle
/// through vertices counts once per choice of parallel edge on each step.
pub fn count_short_cycles(g: &MultiGraph, max_len: usize) -> Vec<u64> {
    let mut counts = vec![0u64; max_len];
    if max_len == 0 {
        return counts;
    }
    let mult = g.edge_multiplicities();
    // simple adjacency with multiplicities, u != v
    let mut simple: Vec<Vec<(usize, u64)>> = vec![Vec::new(); g.n];
    for (&(u, v), &m) in &mult {
        if u == v {
            counts[0] += m as u64;
        } else {
            simple[u].push((v, m as u64));
            simple[v].push((u, m as u64));
            if max_len >= 2 {
                counts[1] += (m * (m - 1) / 2) as u64;
            }
        }
    }
    if max_len < 3 {
        return counts;
    }
    let mut doubled = vec![0u64; max_len + 1];
    let mut on_path = vec![false; g.n];
    for s in 0..g.n {
        on_path[s] = true;
        walk(&simple, s, s, 1, 1, max_len, &mut on_path, &mut doubled);
        on_path[s] = false;
    }
    for k in 3..=max_len {
        // each cycle is traversed in both directions from its least vertex
        counts[k - 1] = doubled[k] / 2;
    }
    counts
}

#[allow(clippy::too_many_arguments)]
fn walk(
    simple: &[Vec<(usize, u64)>],
    start: usize,
    at: usize,
    len: usize,
    weight: u64,
    max_len: usize,
    on_path: &mut [bool],
    doubled: &mut [u64],
) {
    for &(next, m) in &simple[at] {
        if next == start && len >= 3 {
            doubled[len] += weight * m;
        } else if next > start && !on_path[next] && len < max_len {
            on_path[next] = true;
            walk(simple, start, next, len + 1, weight * m, max_len, on_path, doubled);
            on_path[next] = false;
        }
    }
}

/// Number of vertices on which some `s ∈ S` acts differently.
pub fn edit_count(s1: &PermHom, s2: &PermHom, words: &[Word]) -> Result<usize> {
    if s1.n != s2.n {
        return Err(Error::SizeMismatch { left: s1.n, right: s2.n });
    }
    Ok((0..s1.n).filter(|&v| words.iter().any(|w| evaluate(s1, w, v) != evaluate(s2, w, v))).count())
}

pub fn edit_distance(s1: &PermHom, s2: &PermHom, words: &[Word]) -> Result<f64> {
    let c = edit_count(s1, s2, words)?;
    Ok(if s1.n == 0 { 0.0 } else { c as f64 / s1.n as f64 })
}

/// `m` disjoint copies of `σ`; vertex `v` of copy `c` is `c·n + v`.
pub fn product_with_trivial(sigma: &PermHom, m: usize) -> Result<PermHom> {
    if m == 0 {
        return Err(Error::Config("product_with_trivial needs m >= 1".into()));
    }
    let n = sigma.n;
    let gens = sigma
        .gens
        .iter()
        .map(|g| (0..m).flat_map(|c| g.iter().map(move |&w| c * n + w)).collect())
        .collect();
    PermHom::new(gens)
}

/// The parts `{c·n .. (c+1)·n}` of a product with `m` copies.
pub fn product_parts(n: usize, m: usize) -> Vec<Vec<usize>> {
    (0..m).map(|c| (c * n..(c + 1) * n).collect()).collect()
}
