//! Two-scale simplicial homology of point clouds in Hamming cubes, prism
//! homotopies, and contraction paths through model spaces.
//!
//! Points are labelings; a set of points spans a simplex at scale `κ` when
//! every pair is at normalized Hamming distance `< κ`. Homology is over `Q`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One};
use serde::Serialize;

use crate::empirical::{enumerate_microstates, in_model_space, Labeling, NeighborhoodSpec};
use crate::error::{Error, Result};
use crate::exact::Scale;
use crate::linalg::{self, Reducer, SparseVec};
use crate::rng::{self, Rng};
use crate::sofic::PermHom;
use crate::unionfind::UnionFind;

/// Sorted point ids.
pub type Simplex = Vec<u32>;

pub trait Coeff: Clone + Num + Neg<Output = Self> + Debug {}
impl<T: Clone + Num + Neg<Output = T> + Debug> Coeff for T {}

/// Sort `ids`, returning the sorted tuple and whether the sort was odd.
/// `None` if a vertex repeats.
pub fn orient(ids: &[u32]) -> Option<(Simplex, bool)> {
    let mut v = ids.to_vec();
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, odd))
    }
}

/// A finite formal sum of oriented simplices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain<T> {
    terms: BTreeMap<Simplex, T>,
}

impl<T: Coeff> Default for Chain<T> {
    fn default() -> Self {
        Chain { terms: BTreeMap::new() }
    }
}

impl<T: Coeff> Chain<T> {
    pub fn zero() -> Self {
        Chain::default()
    }

    /// `[x_0, …, x_k]`, zero if a vertex repeats.
    pub fn simplex(ids: &[u32]) -> Self {
        let mut c = Chain::zero();
        c.add_term(ids, T::one());
        c
    }

    pub fn add_term(&mut self, ids: &[u32], c: T) {
        let Some((s, odd)) = orient(ids) else { return };
        let c = if odd { -c } else { c };
        let entry = self.terms.entry(s).or_insert_with(T::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            let key = orient(ids).expect("already oriented").0;
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Simplex, &T)> {
        self.terms.iter()
    }

    pub fn coeff(&self, s: &[u32]) -> T {
        self.terms.get(s).cloned().unwrap_or_else(T::zero)
    }

    /// Support size.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Chain<T>) -> Chain<T> {
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(s, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Chain<T>) -> Chain<T> {
        self.add(&other.scale(-T::one()))
    }

    pub fn scale(&self, f: T) -> Chain<T> {
        let mut out = Chain::zero();
        for (s, c) in &self.terms {
            out.add_term(s, c.clone() * f.clone());
        }
        out
    }

    /// `∂[x_0,…,x_d] = Σ (−1)^i [x_0,…,x̂_i,…,x_d]`
    pub fn boundary(&self) -> Chain<T> {
        let mut out = Chain::zero();
        for (s, c) in &self.terms {
            if s.len() < 2 {
                continue;
            }
            for i in 0..s.len() {
                let face: Vec<u32> = s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
                let sign = if i % 2 == 0 { c.clone() } else { -c.clone() };
                out.add_term(&face, sign);
            }
        }
        out
    }

    /// `λ_*`, applied vertexwise.
    pub fn push_forward(&self, lambda: &dyn Fn(u32) -> u32) -> Chain<T> {
        let mut out = Chain::zero();
        for (s, c) in &self.terms {
            let ids: Vec<u32> = s.iter().map(|&x| lambda(x)).collect();
            out.add_term(&ids, c.clone());
        }
        out
    }

    pub fn map_coeffs<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Chain<U> {
        let mut out = Chain::zero();
        for (s, c) in &self.terms {
            out.add_term(s, f(c));
        }
        out
    }
}

pub fn to_rational(c: &Chain<BigInt>) -> Chain<BigRational> {
    c.map_coeffs(|x| BigRational::from_integer(x.clone()))
}

/// All permutations of `0..k` with their signs, in lexicographic order.
fn permutations(k: usize) -> Vec<(Vec<usize>, bool)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, bool)>) {
        if prefix.len() == used.len() {
            let odd = orient(&prefix.iter().map(|&x| x as u32).collect::<Vec<_>>()).expect("distinct").1;
            out.push((prefix.clone(), odd));
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// The prism chain `P(z)`: for an ordered simplex
/// `P(x_0..x_k) = Σ_i (−1)^i [x_0..x_i, λx_i..λx_k]`, averaged with signs over
/// all orderings so that it is well defined on oriented simplices.
///
/// Satisfies `∂P(z) = λ_*z − z − P(∂z)`.
pub fn prism_homotopy(z: &Chain<BigRational>, lambda: &dyn Fn(u32) -> u32) -> Chain<BigRational> {
    let mut out = Chain::zero();
    let mut perm_cache: HashMap<usize, Vec<(Vec<usize>, bool)>> = HashMap::new();
    for (s, c) in z.terms() {
        let k1 = s.len();
        let perms = perm_cache.entry(k1).or_insert_with(|| permutations(k1));
        let fact = BigRational::from_integer((1..=k1).fold(BigInt::one(), |a, i| a * BigInt::from(i)));
        let base = c / &fact;
        for (p, odd) in perms.iter() {
            let y: Vec<u32> = p.iter().map(|&i| s[i]).collect();
            for i in 0..k1 {
                let mut ids: Vec<u32> = y[..=i].to_vec();
                ids.extend(y[i..].iter().map(|&x| lambda(x)));
                let coeff = if odd ^ (i % 2 == 1) { -base.clone() } else { base.clone() };
                out.add_term(&ids, coeff);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale2 {
    Inner,
    Outer,
}

/// Inner and outer Vietoris–Rips-type complexes on nested point sets.
#[derive(Debug, Clone)]
pub struct TwoScaleComplex {
    /// `Ω2`, deduplicated in input order.
    pub points: Vec<Labeling>,
    /// Positions in `points` of the `Ω1` points, in `Ω1` order.
    pub inner: Vec<u32>,
    pub kappa1: Scale,
    pub kappa2: Scale,
    pub d_max: usize,
    /// `inner_simplices[d]` for `d = 0..=d_max`
    pub inner_simplices: Vec<Vec<Simplex>>,
    /// `outer_simplices[d]` for `d = 0..=d_max+1`
    pub outer_simplices: Vec<Vec<Simplex>>,
    inner_index: Vec<HashMap<Simplex, usize>>,
    outer_index: Vec<HashMap<Simplex, usize>>,
}

fn dedup(points: &[Labeling]) -> Vec<Labeling> {
    let mut seen = std::collections::HashSet::new();
    points.iter().filter(|p| seen.insert((*p).clone())).cloned().collect()
}

/// Strict pairwise `d < κ` adjacency over `ids`.
fn close(points: &[Labeling], kappa: Scale, a: usize, b: usize) -> bool {
    let n = points[a].n();
    kappa.exceeds_fraction(points[a].hamming(&points[b]), n)
}

/// Cliques of the threshold graph on `verts` up to `max_dim`, lexicographic per dimension.
fn cliques(points: &[Labeling], verts: &[u32], kappa: Scale, max_dim: usize) -> Vec<Vec<Simplex>> {
    let m = verts.len();
    let adj: Vec<Vec<bool>> = (0..m)
        .map(|i| (0..m).map(|j| i != j && close(points, kappa, verts[i] as usize, verts[j] as usize)).collect())
        .collect();
    // work in local positions, then map to ids
    let mut levels: Vec<Vec<Vec<usize>>> = vec![(0..m).map(|i| vec![i]).collect()];
    for _ in 0..max_dim {
        let prev = levels.last().expect("nonempty");
        let mut next = Vec::new();
        for c in prev {
            let last = *c.last().expect("nonempty clique");
            for w in last + 1..m {
                if c.iter().all(|&u| adj[u][w]) {
                    let mut e = c.clone();
                    e.push(w);
                    next.push(e);
                }
            }
        }
        levels.push(next);
    }
    levels
        .into_iter()
        .map(|lvl| {
            let mut out: Vec<Simplex> = lvl
                .into_iter()
                .map(|c| {
                    let mut s: Simplex = c.into_iter().map(|i| verts[i]).collect();
                    s.sort_unstable();
                    s
                })
                .collect();
            out.sort();
            out
        })
        .collect()
}

fn index(levels: &[Vec<Simplex>]) -> Vec<HashMap<Simplex, usize>> {
    levels.iter().map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect()
}

pub fn build_complex(omega1: &[Labeling], omega2: &[Labeling], kappa1: f64, kappa2: f64, d_max: usize) -> Result<TwoScaleComplex> {
    let (k1, k2) = (Scale::from_f64(kappa1)?, Scale::from_f64(kappa2)?);
    build_complex_exact(omega1, omega2, k1, k2, d_max)
}

pub fn build_complex_exact(omega1: &[Labeling], omega2: &[Labeling], kappa1: Scale, kappa2: Scale, d_max: usize) -> Result<TwoScaleComplex> {
    if kappa1 > kappa2 {
        return Err(Error::Config(format!("requires kappa1 <= kappa2, got {kappa1} > {kappa2}")));
    }
    let points = dedup(omega2);
    let n = points.first().map(Labeling::n).unwrap_or(0);
    if points.iter().chain(omega1).any(|p| p.n() != n) {
        return Err(Error::Config("points of different lengths".into()));
    }
    let pos: HashMap<&Labeling, u32> = points.iter().enumerate().map(|(i, p)| (p, i as u32)).collect();
    let mut inner = Vec::new();
    for (i, p) in dedup(omega1).iter().enumerate() {
        match pos.get(p) {
            Some(&j) => inner.push(j),
            None => return Err(Error::NotNested(format!("inner point {i} is not in the outer set"))),
        }
    }
    let mut inner_sorted = inner.clone();
    inner_sorted.sort_unstable();
    let all: Vec<u32> = (0..points.len() as u32).collect();
    let inner_simplices = cliques(&points, &inner_sorted, kappa1, d_max);
    let outer_simplices = cliques(&points, &all, kappa2, d_max + 1);
    Ok(TwoScaleComplex {
        inner_index: index(&inner_simplices),
        outer_index: index(&outer_simplices),
        points,
        inner,
        kappa1,
        kappa2,
        d_max,
        inner_simplices,
        outer_simplices,
    })
}

impl TwoScaleComplex {
    fn simplices(&self, scale: Scale2) -> &[Vec<Simplex>] {
        match scale {
            Scale2::Inner => &self.inner_simplices,
            Scale2::Outer => &self.outer_simplices,
        }
    }

    fn index_of(&self, scale: Scale2) -> &[HashMap<Simplex, usize>] {
        match scale {
            Scale2::Inner => &self.inner_index,
            Scale2::Outer => &self.outer_index,
        }
    }

    /// One simplex per line, ids separated by spaces.
    pub fn to_simplex_list(&self, scale: Scale2) -> String {
        let mut out = String::new();
        for level in self.simplices(scale) {
            for s in level {
                let ids: Vec<String> = s.iter().map(u32::to_string).collect();
                out.push_str(&ids.join(" "));
                out.push('\n');
            }
        }
        out
    }
}

/// Columns of `∂_d` at a scale, rows indexed by the `(d−1)`-simplices of the same scale.
pub fn boundary_matrix(cx: &TwoScaleComplex, d: usize, scale: Scale2) -> Result<Vec<Vec<(usize, i64)>>> {
    let levels = cx.simplices(scale);
    if d == 0 || d >= levels.len() {
        return Err(Error::Config(format!("boundary in dimension {d} unavailable (have 1..{})", levels.len())));
    }
    let rows = &cx.index_of(scale)[d - 1];
    Ok(levels[d]
        .iter()
        .map(|s| {
            let mut col: Vec<(usize, i64)> = (0..s.len())
                .map(|i| {
                    let face: Simplex = s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
                    (rows[&face], if i % 2 == 0 { 1 } else { -1 })
                })
                .collect();
            col.sort_unstable();
            col
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Betti0 {
    pub rank: usize,
    /// Least `Ω1` index in each counted component, ascending.
    pub reps: Vec<usize>,
}

/// κ2-components of `Ω2` that meet `Ω1`.
pub fn betti0_two_scale(cx: &TwoScaleComplex) -> Betti0 {
    let mut uf = UnionFind::new(cx.points.len());
    if cx.outer_simplices.len() > 1 {
        for e in &cx.outer_simplices[1] {
            uf.union(e[0] as usize, e[1] as usize);
        }
    }
    let mut rep: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &p) in cx.inner.iter().enumerate() {
        rep.entry(uf.find(p as usize)).or_insert(i);
    }
    let mut reps: Vec<usize> = rep.into_values().collect();
    reps.sort_unstable();
    Betti0 { rank: reps.len(), reps }
}

/// Maximum number of inner simplices for a finite-L cycle search.
pub const TRUNCATION_GUARD: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyRank {
    pub dim: usize,
    /// Integral cycles of the inner complex whose classes form a basis.
    pub generators: Vec<Chain<BigInt>>,
}

fn columns_of(m: &[Vec<(usize, i64)>]) -> Vec<SparseVec> {
    m.iter().map(|c| linalg::from_ints(c)).collect()
}

/// Basis of `Z_d` of the inner complex, coordinates over inner `d`-simplices.
fn inner_cycles(cx: &TwoScaleComplex, d: usize, l: Option<usize>) -> Result<Vec<SparseVec>> {
    let count = cx.inner_simplices[d].len();
    if d == 0 {
        return Ok((0..count).map(|i| vec![(i, BigRational::one())]).collect());
    }
    let cols = columns_of(&boundary_matrix(cx, d, Scale2::Inner)?);
    match l {
        Some(l) if l < count => {
            if count > TRUNCATION_GUARD {
                return Err(Error::TruncationInfeasible { simplices: count, guard: TRUNCATION_GUARD });
            }
            // cycles of length <= l live on some support of exactly l simplices
            let mut span = Reducer::new();
            let mut basis = Vec::new();
            for support in combinations(count, l) {
                let sub: Vec<SparseVec> = support.iter().map(|&j| cols[j].clone()).collect();
                for k in linalg::kernel(&sub) {
                    let v: SparseVec = k.into_iter().map(|(j, c)| (support[j], c)).collect();
                    if span.insert(v.clone()) {
                        basis.push(v);
                    }
                }
            }
            Ok(basis)
        }
        _ => Ok(linalg::kernel(&cols)),
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    if k <= n {
        rec(0, n, k, &mut cur, &mut out);
    }
    out
}

/// `dim_Q H^L_d = dim Z^L_d(inner) − dim(Z^L_d(inner) ∩ B_d(outer))`, with `L = None` for ∞.
pub fn homology_rank(cx: &TwoScaleComplex, d: usize, l: Option<usize>) -> Result<HomologyRank> {
    if d > cx.d_max {
        return Err(Error::Config(format!("complex built to dimension {}, asked for {d}", cx.d_max)));
    }
    if l == Some(0) {
        return Err(Error::Config("L must be positive".into()));
    }
    let z = inner_cycles(cx, d, l)?;
    let to_outer: Vec<usize> = cx.inner_simplices[d].iter().map(|s| cx.outer_index[d][s]).collect();
    let mut span = Reducer::new();
    for b in columns_of(&boundary_matrix(cx, d + 1, Scale2::Outer)?) {
        span.insert(b);
    }
    let mut generators = Vec::new();
    for v in z {
        let mut mapped: SparseVec = v.iter().map(|(i, c)| (to_outer[*i], c.clone())).collect();
        mapped.sort_by_key(|e| e.0);
        if span.insert(mapped) {
            let mut chain = Chain::zero();
            for (i, c) in linalg::primitive_integer(&v) {
                chain.add_term(&cx.inner_simplices[d][i], c);
            }
            generators.push(chain);
        }
    }
    Ok(HomologyRank { dim: generators.len(), generators })
}

/// Greedy `κ`-cover of the points: each chosen center covers everything at distance `< κ`.
pub fn greedy_cover(points: &[Labeling], kappa: Scale) -> Vec<usize> {
    let mut covered = vec![false; points.len()];
    let mut centers = Vec::new();
    for i in 0..points.len() {
        if covered[i] {
            continue;
        }
        centers.push(i);
        for j in i..points.len() {
            if !covered[j] && (i == j || close(points, kappa, i, j)) {
                covered[j] = true;
            }
        }
    }
    centers
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverBound {
    pub cover: usize,
    /// `cover^(d+1)`
    #[serde(serialize_with = "as_string")]
    pub bound: BigInt,
    /// The bound is proved when `d = 0` or `κ2 ≥ 3κ1`.
    pub applicable: bool,
}

fn as_string<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn covering_bound(cx: &TwoScaleComplex, d: usize) -> CoverBound {
    let inner: Vec<Labeling> = cx.inner.iter().map(|&i| cx.points[i as usize].clone()).collect();
    let cover = greedy_cover(&inner, cx.kappa1).len();
    let bound = num_traits::pow(BigInt::from(cover), d + 1);
    CoverBound { cover, bound, applicable: d == 0 || cx.kappa2 >= cx.kappa1.mul_int(3) }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CylinderCheck {
    /// `∂P(z) = λ_*z − z`
    pub prism_identity: bool,
    /// Every simplex of `P(z)` lies in the complex at the enlarged scale.
    pub prism_supported: bool,
    /// `z − λ_*z` lies in the boundary space at the enlarged scale.
    pub in_boundaries: bool,
}

/// For a cycle `z` on `points` and a vertex map `λ`, test that `z − λ_*z` bounds
/// in the complex on `points` at scale `kappa`.
pub fn cylinder_check(points: &[Labeling], z: &Chain<BigInt>, lambda: &[u32], kappa: Scale) -> Result<CylinderCheck> {
    let d = z.terms().next().map(|(s, _)| s.len() - 1).unwrap_or(0);
    let all: Vec<u32> = (0..points.len() as u32).collect();
    let levels = cliques(points, &all, kappa, d + 1);
    let idx = index(&levels);
    let lam = |x: u32| lambda[x as usize];
    let zq = to_rational(z);
    let diff = zq.sub(&zq.push_forward(&lam));
    let p = prism_homotopy(&zq, &lam);
    let prism_identity = p.boundary() == zq.push_forward(&lam).sub(&zq).sub(&prism_homotopy(&zq.boundary(), &lam));
    let prism_supported = p.terms().all(|(s, _)| idx[d + 1].contains_key(s));
    let mut span = Reducer::new();
    for s in &levels[d + 1] {
        let col: SparseVec = Chain::<BigRational>::simplex(s)
            .boundary()
            .terms()
            .map(|(f, c)| (idx[d][f], c.clone()))
            .collect();
        let mut col = col;
        col.sort_by_key(|e| e.0);
        span.insert(col);
    }
    let mut target = Vec::new();
    let mut supported = true;
    for (s, c) in diff.terms() {
        match idx[d].get(s) {
            Some(&i) => target.push((i, c.clone())),
            None => supported = false,
        }
    }
    target.sort_by_key(|e| e.0);
    Ok(CylinderCheck { prism_identity, prism_supported, in_boundaries: supported && span.contains(target) })
}

/// `n⁻¹ log dim_Q H^L_d(O1, O2, κ1, κ2, σ)`, `-∞` when the rank is 0.
#[allow(clippy::too_many_arguments)]
pub fn betti_growth_estimate(
    sigma: &PermHom,
    o1: &NeighborhoodSpec,
    o2: &NeighborhoodSpec,
    kappa1: f64,
    kappa2: f64,
    d: usize,
    l: Option<usize>,
    budget: Option<usize>,
) -> Result<f64> {
    let e1 = enumerate_microstates(sigma, o1, budget)?;
    let e2 = enumerate_microstates(sigma, o2, budget)?;
    if !e1.complete || !e2.complete {
        return Err(Error::BudgetExceeded { budget: budget.unwrap_or(0) });
    }
    let cx = build_complex(&e1.labelings, &e2.labelings, kappa1, kappa2, d)?;
    let rank = if d == 0 { betti0_two_scale(&cx).rank } else { homology_rank(&cx, d, l)?.dim };
    Ok(if rank == 0 { f64::NEG_INFINITY } else { (rank as f64).ln() / sigma.n() as f64 })
}

/// `paths[i][j]` is `x_i^{(j)}`.
pub type Paths = Vec<Vec<Labeling>>;

/// Coupled resampling: one shared draw of `τ ∈ (0,1]^V` and `z ~ base^V`;
/// `x_i^{(j)}_v = z_v` if `τ_v ≤ j/k`, else `x_i(v)`.
pub fn bernoulli_contract_path(xs: &[Labeling], k: usize, base: &[f64], rng: &mut Rng) -> Result<Paths> {
    if k == 0 {
        return Err(Error::Config("k must be >= 1".into()));
    }
    let n = xs.first().map(Labeling::n).unwrap_or(0);
    if xs.iter().any(|x| x.n() != n) {
        return Err(Error::Config("labelings of different lengths".into()));
    }
    let alphabet = base.len();
    if xs.iter().any(|x| x.alphabet != alphabet) {
        return Err(Error::Config("base distribution does not match the alphabet".into()));
    }
    let tau: Vec<f64> = (0..n).map(|_| 1.0 - rng::unit(rng)).collect();
    let z: Vec<u8> = (0..n).map(|_| rng::categorical(rng, base) as u8).collect();
    Ok(xs
        .iter()
        .map(|x| {
            (0..=k)
                .map(|j| {
                    let values = (0..n).map(|v| if tau[v] * k as f64 <= j as f64 { z[v] } else { x.values[v] }).collect();
                    Labeling { values, alphabet }
                })
                .collect()
        })
        .collect())
}

fn check_partition(parts: &[Vec<usize>], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for p in parts {
        for &v in p {
            if v >= n {
                return Err(Error::NotPartition(format!("vertex {v} outside [0,{n})")));
            }
            if seen[v] {
                return Err(Error::NotPartition(format!("vertex {v} in two parts")));
            }
            seen[v] = true;
        }
    }
    if let Some(v) = seen.iter().position(|&s| !s) {
        return Err(Error::NotPartition(format!("vertex {v} uncovered")));
    }
    Ok(())
}

/// `x_i^{(j)} = Ψ_j(x_i)`, where `Ψ_j` overwrites parts `0..j` with `x_ref`.
pub fn diffuse_contract_path(parts: &[Vec<usize>], xs: &[Labeling], x_ref: &Labeling, max_part_fraction: Option<f64>) -> Result<Paths> {
    let n = x_ref.n();
    check_partition(parts, n)?;
    if let Some(f) = max_part_fraction {
        let cap = Scale::from_f64(f)?;
        if let Some(p) = parts.iter().find(|p| !cap.at_least_fraction(p.len(), n)) {
            return Err(Error::Config(format!("part of size {} exceeds fraction {f} of {n}", p.len())));
        }
    }
    if xs.iter().any(|x| x.n() != n) {
        return Err(Error::Config("labelings of different lengths".into()));
    }
    Ok(xs
        .iter()
        .map(|x| {
            let mut cur = x.clone();
            let mut path = vec![cur.clone()];
            for p in parts {
                for &v in p {
                    cur.values[v] = x_ref.values[v];
                }
                path.push(cur.clone());
            }
            path
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractReport {
    /// Conditions (1)–(5) in order.
    pub conditions: [bool; 5],
    /// First violation per condition as `(path, step)`.
    pub first_violation: [Option<(usize, usize)>; 5],
    /// Fraction of path points inside `Ω(O2, σ)`.
    pub membership_rate: f64,
    /// Least step where all paths agree.
    pub merge_step: Option<usize>,
}

/// Checks the five conditions of contractibility on given paths.
pub fn contractibility_check(originals: &[Labeling], paths: &Paths, sigma: &PermHom, o2: &NeighborhoodSpec, delta: f64) -> Result<ContractReport> {
    let delta = Scale::from_f64(delta)?;
    let mut conditions = [true; 5];
    let mut first: [Option<(usize, usize)>; 5] = [None; 5];
    let mut fail = |c: usize, at: (usize, usize), conditions: &mut [bool; 5]| {
        conditions[c] = false;
        if first[c].is_none() {
            first[c] = Some(at);
        }
    };
    if paths.len() != originals.len() {
        return Err(Error::Config("one path per original required".into()));
    }
    let steps = paths.first().map(Vec::len).unwrap_or(0);
    if steps == 0 || paths.iter().any(|p| p.len() != steps) {
        return Err(Error::Config("paths must be nonempty and aligned in j".into()));
    }
    let mut inside = 0usize;
    for (i, p) in paths.iter().enumerate() {
        for (j, x) in p.iter().enumerate() {
            if in_model_space(sigma, x, o2)? {
                inside += 1;
            } else {
                fail(0, (i, j), &mut conditions);
            }
        }
        if p[0] != originals[i] {
            fail(1, (i, 0), &mut conditions);
        }
        for j in 0..steps - 1 {
            let n = p[j].n();
            if !delta.exceeds_fraction(p[j].hamming(&p[j + 1]), n) {
                fail(3, (i, j), &mut conditions);
            }
        }
    }
    for j in 0..steps - 1 {
        for i in 0..paths.len() {
            for l in i + 1..paths.len() {
                if paths[i][j + 1].hamming(&paths[l][j + 1]) > paths[i][j].hamming(&paths[l][j]) {
                    fail(2, (i, j), &mut conditions);
                }
            }
        }
    }
    let merge_step = (0..steps).find(|&j| paths.iter().all(|p| p[j] == paths[0][j]));
    if merge_step.is_none() {
        fail(4, (0, steps - 1), &mut conditions);
    }
    Ok(ContractReport {
        conditions,
        first_violation: first,
        membership_rate: inside as f64 / (paths.len() * steps) as f64,
        merge_step,
    })
}
