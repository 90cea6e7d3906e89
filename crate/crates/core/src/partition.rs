//! Partitions of a finite weighted space whose parts are small and on which
//! given functions have conditional means close to their global means.
//!
//! Weights are integer masses; a function is given by its moments
//! `m_a = mass_a · f(a) · scale` so that every comparison is exact.
//!
//! The construction sorts atoms by `f` and consumes them from both ends,
//! taking from the high end while the running deviation from the mean is
//! nonpositive and from the low end otherwise. The running deviation then
//! never exceeds the largest atom, so any run of atoms of total weight
//! `≥ 10ε/δ` has mean within `δ/5` of the global mean. Runs are cut at that
//! weight, and the short tail is merged into the last run.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::Scale;

/// Largest total mass accepted; keeps every intermediate in `i128`.
pub const MAX_TOTAL_MASS: u64 = 1 << 40;
/// Largest function scale accepted.
pub const MAX_SCALE: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedSpace {
    masses: Vec<u64>,
    total: u64,
}

impl WeightedSpace {
    pub fn new(masses: Vec<u64>) -> Result<Self> {
        if masses.is_empty() || masses.contains(&0) {
            return Err(Error::Config("atoms need positive mass".into()));
        }
        let total = masses.iter().try_fold(0u64, |a, &m| a.checked_add(m)).filter(|&t| t <= MAX_TOTAL_MASS);
        let total = total.ok_or_else(|| Error::Config(format!("total mass above {MAX_TOTAL_MASS}")))?;
        Ok(WeightedSpace { masses, total })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        WeightedSpace::new(vec![1; n])
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn masses(&self) -> &[u64] {
        &self.masses
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn max_mass(&self) -> u64 {
        self.masses.iter().copied().max().unwrap_or(0)
    }
}

/// `f(a) = moments[a] / (mass_a · scale)`, with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomFunction {
    pub moments: Vec<u64>,
    pub scale: u64,
}

impl AtomFunction {
    /// From values `nums[a] / den`.
    pub fn from_values(space: &WeightedSpace, nums: &[u64], den: u64) -> Result<Self> {
        if nums.len() != space.len() {
            return Err(Error::SizeMismatch { left: space.len(), right: nums.len() });
        }
        let moments = nums.iter().zip(&space.masses).map(|(&v, &m)| v * m).collect();
        let f = AtomFunction { moments, scale: den };
        f.validate(space)?;
        Ok(f)
    }

    pub fn from_moments(space: &WeightedSpace, moments: Vec<u64>, scale: u64) -> Result<Self> {
        let f = AtomFunction { moments, scale };
        f.validate(space)?;
        Ok(f)
    }

    fn validate(&self, space: &WeightedSpace) -> Result<()> {
        if self.scale == 0 || self.scale > MAX_SCALE {
            return Err(Error::Config(format!("function scale must be in 1..={MAX_SCALE}")));
        }
        if self.moments.len() != space.len() {
            return Err(Error::SizeMismatch { left: space.len(), right: self.moments.len() });
        }
        if self.moments.iter().zip(&space.masses).any(|(&s, &m)| s as u128 > m as u128 * self.scale as u128) {
            return Err(Error::Config("function value above 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    /// Atom indices per part, each sorted ascending.
    pub parts: Vec<Vec<usize>>,
}

/// An item of the sweep: a union of atoms with its mass and `f`-moment.
#[derive(Debug, Clone)]
struct Item {
    atoms: Vec<usize>,
    mass: i128,
    moment: i128,
}

/// Strict `mass/total < ε`.
fn below(eps: Scale, mass: u64, total: u64) -> bool {
    let r = eps.ratio();
    (mass as i128) * (*r.denom() as i128) < (*r.numer() as i128) * (total as i128)
}

fn check_delta(delta: Scale) -> Result<()> {
    let r = delta.ratio();
    if !(*r.numer() > 0 && 4 * *r.numer() < *r.denom()) {
        return Err(Error::Config(format!("requires delta in (0, 1/4), got {delta}")));
    }
    Ok(())
}

fn rational(s: Scale) -> BigRational {
    let r = s.ratio();
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// One sweep over `items` for moments `moment`, with max item weight bound `eps`
/// (a fraction of `total`). Requires `eps < δ/10`.
fn sweep(items: Vec<Item>, total: i128, delta: &BigRational, eps: &BigRational) -> Vec<Item> {
    let s_total: i128 = items.iter().map(|i| i.moment).sum();
    let mut sorted = items;
    // ascending in f = moment/mass, ties by first atom
    sorted.sort_by(|a, b| {
        (a.moment * b.mass).cmp(&(b.moment * a.mass)).then_with(|| a.atoms[0].cmp(&b.atoms[0]))
    });
    let dev = |it: &Item| it.moment * total - s_total * it.mass;
    let mut order = Vec::with_capacity(sorted.len());
    let (mut lo, mut hi) = (0usize, sorted.len());
    let mut running: i128 = 0;
    while lo < hi {
        let take = if running <= 0 {
            hi -= 1;
            hi
        } else {
            lo += 1;
            lo - 1
        };
        running += dev(&sorted[take]);
        order.push(take);
    }
    // cut when block weight ≥ 10ε/δ, i.e. mass·δ ≥ 10ε·total
    let threshold = (BigRational::from_integer(BigInt::from(10)) * eps * BigRational::from_integer(BigInt::from(total)) / delta).ceil();
    let min_mass: i128 = threshold.to_integer().try_into().unwrap_or(i128::MAX);
    let mut blocks: Vec<Item> = Vec::new();
    let mut cur = Item { atoms: Vec::new(), mass: 0, moment: 0 };
    for k in order {
        let it = &sorted[k];
        cur.atoms.extend_from_slice(&it.atoms);
        cur.mass += it.mass;
        cur.moment += it.moment;
        if cur.mass >= min_mass {
            blocks.push(std::mem::replace(&mut cur, Item { atoms: Vec::new(), mass: 0, moment: 0 }));
        }
    }
    if cur.mass > 0 {
        match blocks.last_mut() {
            Some(last) => {
                last.atoms.extend(cur.atoms);
                last.mass += cur.mass;
                last.moment += cur.moment;
            }
            None => blocks.push(cur),
        }
    }
    for b in &mut blocks {
        b.atoms.sort_unstable();
    }
    blocks
}

fn to_items(space: &WeightedSpace, f: &AtomFunction) -> Vec<Item> {
    (0..space.len())
        .map(|a| Item { atoms: vec![a], mass: space.masses[a] as i128, moment: f.moments[a] as i128 })
        .collect()
}

fn regroup(space: &WeightedSpace, f: &AtomFunction, parts: &[Vec<usize>]) -> Vec<Item> {
    parts
        .iter()
        .map(|p| Item {
            atoms: p.clone(),
            mass: p.iter().map(|&a| space.masses[a] as i128).sum(),
            moment: p.iter().map(|&a| f.moments[a] as i128).sum(),
        })
        .collect()
}

/// Exact check that `parts` partitions the atoms.
pub fn verify_partition(space: &WeightedSpace, p: &Partition) -> Result<()> {
    let mut seen = vec![false; space.len()];
    for part in &p.parts {
        if part.is_empty() {
            return Err(Error::NotPartition("empty part".into()));
        }
        for &a in part {
            if a >= space.len() || std::mem::replace(&mut seen[a], true) {
                return Err(Error::NotPartition(format!("atom {a} repeated or out of range")));
            }
        }
    }
    if let Some(a) = seen.iter().position(|s| !s) {
        return Err(Error::NotPartition(format!("atom {a} uncovered")));
    }
    Ok(())
}

/// Largest part weight as an exact fraction of the total.
pub fn max_part_weight(space: &WeightedSpace, p: &Partition) -> BigRational {
    let m = p.parts.iter().map(|part| part.iter().map(|&a| space.masses[a]).sum::<u64>()).max().unwrap_or(0);
    BigRational::new(BigInt::from(m), BigInt::from(space.total))
}

/// `max_P |E[f|P] − E[f]|`, exactly.
pub fn max_mean_deviation(space: &WeightedSpace, f: &AtomFunction, p: &Partition) -> BigRational {
    let total = BigInt::from(space.total);
    let s_total: BigInt = f.moments.iter().map(|&m| BigInt::from(m)).sum();
    let scale = BigInt::from(f.scale);
    let mut worst = BigRational::zero();
    for part in &p.parts {
        let m: BigInt = part.iter().map(|&a| BigInt::from(space.masses[a])).sum();
        let s: BigInt = part.iter().map(|&a| BigInt::from(f.moments[a])).sum();
        // s/(m·scale) − S/(W·scale)
        let d = BigRational::new(&s * &total - &s_total * &m, &m * &total * &scale).abs();
        if d > worst {
            worst = d;
        }
    }
    worst
}

/// Partition with parts of weight `≤ 100ε/δ` and conditional means of `f`
/// within `δ` of `E[f]`.
///
/// Requires `δ ∈ (0, 1/4)`, `ε < δ/200` and every atom weight `< ε`.
pub fn balance_single(space: &WeightedSpace, f: &AtomFunction, delta: f64, eps: f64) -> Result<Partition> {
    let (delta, eps) = (Scale::from_f64(delta)?, Scale::from_f64(eps)?);
    check_delta(delta)?;
    if !(eps.ratio() > num_rational::Ratio::new(0, 1) && eps.mul_int(200) < delta) {
        return Err(Error::Config(format!("requires 0 < eps < delta/200, got eps = {eps}, delta = {delta}")));
    }
    if !below(eps, space.max_mass(), space.total) {
        return Err(Error::Config(format!("requires every atom weight < eps = {eps}")));
    }
    f.validate(space)?;
    let (dq, eq) = (rational(delta), rational(eps));
    let blocks = sweep(to_items(space, f), space.total as i128, &dq, &eq);
    let p = Partition { parts: blocks.into_iter().map(|b| b.atoms).collect() };
    verify_partition(space, &p)?;
    let bound = BigRational::from_integer(100.into()) * &eq / &dq;
    if max_part_weight(space, &p) > bound {
        return Err(Error::Postcondition("part weight above 100 eps/delta".into()));
    }
    if max_mean_deviation(space, f, &p) > dq {
        return Err(Error::Postcondition("conditional mean deviates by more than delta".into()));
    }
    Ok(p)
}

/// Partition with parts of weight `≤ ε(100/δ)^m` and every conditional mean
/// within `δ`, built one function at a time on top of the previous partition.
///
/// Requires `δ ∈ (0, 1/4)`, `0 < ε < (δ/100)^m` and every atom weight `< ε`.
pub fn balance_multi(space: &WeightedSpace, fs: &[AtomFunction], delta: f64, eps: f64) -> Result<Partition> {
    let (delta_s, eps_s) = (Scale::from_f64(delta)?, Scale::from_f64(eps)?);
    check_delta(delta_s)?;
    let (dq, eq) = (rational(delta_s), rational(eps_s));
    let m = fs.len();
    let hundred_over = BigRational::from_integer(100.into()) / &dq;
    let cap = num_traits::pow(dq.clone() / BigRational::from_integer(100.into()), m);
    if !(eq > BigRational::zero() && eq < cap) {
        return Err(Error::Config(format!("requires 0 < eps < (delta/100)^{m}, got eps = {eps_s}")));
    }
    if !below(eps_s, space.max_mass(), space.total) {
        return Err(Error::Config(format!("requires every atom weight < eps = {eps_s}")));
    }
    for f in fs {
        f.validate(space)?;
    }
    let mut p = Partition { parts: vec![(0..space.len()).collect()] };
    if m == 0 {
        return Ok(p);
    }
    p = Partition { parts: (0..space.len()).map(|a| vec![a]).collect() };
    let mut eps_i = eq.clone();
    for (i, f) in fs.iter().enumerate() {
        let blocks = sweep(regroup(space, f, &p.parts), space.total as i128, &dq, &eps_i);
        p = Partition { parts: blocks.into_iter().map(|b| b.atoms).collect() };
        eps_i = eps_i * &hundred_over;
        verify_partition(space, &p)?;
        if max_part_weight(space, &p) > eps_i {
            return Err(Error::Postcondition(format!("step {}: part weight above eps (100/delta)^{}", i + 1, i + 1)));
        }
        for (j, g) in fs[..=i].iter().enumerate() {
            if max_mean_deviation(space, g, &p) > dq {
                return Err(Error::Postcondition(format!("step {}: function {j} deviates by more than delta", i + 1)));
            }
        }
    }
    Ok(p)
}

/// Atoms are the given vertex parts; one function per (labeling, letter) pair
/// giving the fraction of the part carrying that letter.
pub fn part_letter_functions(parts: &[Vec<usize>], labelings: &[Vec<u8>], alphabet: usize) -> Result<(WeightedSpace, Vec<AtomFunction>)> {
    let space = WeightedSpace::new(parts.iter().map(|p| p.len() as u64).collect())?;
    let mut fs = Vec::new();
    for x in labelings {
        for c in 0..alphabet as u8 {
            let moments = parts.iter().map(|p| p.iter().filter(|&&v| x[v] == c).count() as u64).collect();
            fs.push(AtomFunction::from_moments(&space, moments, 1)?);
        }
    }
    Ok((space, fs))
}

/// Merge vertex parts along a partition of the parts.
pub fn coarsen(parts: &[Vec<usize>], grouping: &Partition) -> Vec<Vec<usize>> {
    grouping
        .parts
        .iter()
        .map(|g| {
            let mut vs: Vec<usize> = g.iter().flat_map(|&a| parts[a].iter().copied()).collect();
            vs.sort_unstable();
            vs
        })
        .collect()
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.parts.cmp(&other.parts)
    }
}

/// `ε(100/δ)^m` as an exact rational.
pub fn multi_bound(delta: f64, eps: f64, m: usize) -> Result<BigRational> {
    let (dq, eq) = (rational(Scale::from_f64(delta)?), rational(Scale::from_f64(eps)?));
    Ok(eq * num_traits::pow(BigRational::from_integer(100.into()) / dq, m))
}

impl Partition {
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn trivial(n: usize) -> Self {
        Partition { parts: vec![(0..n).collect()] }
    }
}
