//! Entropy functionals and first-moment exponents for independent sets.
//!
//! Natural logarithms throughout. Pair labels are ordered `00, 01, 10, 11`
//! where the first bit is membership in `W` and the second in `W'`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::empirical::AdmissiblePair;
use crate::error::{Error, Result};
use crate::indepsets::count_indep_of_size;
use crate::rng;
use crate::sofic::{sample_perm_hom, schreier_graph};

/// `η(x) = −x log x` with `η(0) = 0`.
pub fn eta(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain { value: x, domain: "[0, 1]" });
    }
    Ok(eta0(x))
}

fn eta0(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

/// `η(1−u)` without forming `1−u` inside the logarithm; matters when `r·u` is large.
fn eta_complement(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        -(1.0 - u) * (-u).ln_1p()
    }
}

pub fn shannon(p: &[f64]) -> Result<f64> {
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("mass {total}")));
    }
    p.iter().map(|&x| eta(x)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Config,
    Perm,
}

/// A vertex law and a symmetric oriented-edge law on a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairLaw {
    pub vert: Vec<f64>,
    /// row-major `|X| × |X|`
    pub edge: Vec<f64>,
}

impl PairLaw {
    pub fn alphabet(&self) -> usize {
        self.vert.len()
    }

    pub fn edge_at(&self, p: usize, q: usize) -> f64 {
        self.edge[p * self.alphabet() + q]
    }

    /// Largest violation among symmetry, both marginals, normalization and nonnegativity.
    pub fn constraint_violation(&self) -> f64 {
        let a = self.alphabet();
        let mut worst: f64 = (self.vert.iter().sum::<f64>() - 1.0).abs();
        for p in 0..a {
            let row: f64 = (0..a).map(|q| self.edge_at(p, q)).sum();
            worst = worst.max((row - self.vert[p]).abs());
            for q in 0..a {
                worst = worst.max((self.edge_at(p, q) - self.edge_at(q, p)).abs());
                worst = worst.max(-self.edge_at(p, q));
            }
            worst = worst.max(-self.vert[p]);
        }
        worst
    }
}

impl From<&AdmissiblePair> for PairLaw {
    fn from(p: &AdmissiblePair) -> Self {
        PairLaw { vert: p.pi_vert(), edge: p.pi_edge().concat() }
    }
}

/// `(d/2)H(π_edge) − (d−1)H(π_vert)` or `rH(π_edge) − (2r−1)H(π_vert)` with `d = 2r`.
pub fn first_moment_exponent(d: usize, law: &PairLaw, model: Model) -> Result<f64> {
    let hv = shannon(&law.vert)?;
    let he = shannon(&law.edge)?;
    match model {
        Model::Config => Ok((d as f64 / 2.0) * he - (d as f64 - 1.0) * hv),
        Model::Perm => {
            if d % 2 == 1 {
                return Err(Error::Config(format!("permutation model needs even degree, got {d}")));
            }
            let r = (d / 2) as f64;
            Ok(r * he - (2.0 * r - 1.0) * hv)
        }
    }
}

/// The single-set law at density `s`.
pub fn single_law(s: f64) -> PairLaw {
    PairLaw { vert: vec![1.0 - s, s], edge: vec![1.0 - 2.0 * s, s, s, 0.0] }
}

/// `f(r,s) = η(s) − (2r−1)η(1−s) + rη(1−2s)`
pub fn f_single(r: usize, s: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&s) {
        return Err(Error::Domain { value: s, domain: "[0, 1/2)" });
    }
    let r = r as f64;
    Ok(eta0(s) - (2.0 * r - 1.0) * eta_complement(s) + r * eta_complement(2.0 * s))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentResult {
    pub value: f64,
    pub maximizer: Option<PairLaw>,
    pub residual: f64,
}

/// Pair law with all four coordinates spelled out.
fn pair_law(s: f64, s2: f64, t: f64, e: f64) -> PairLaw {
    let b = s2 - t - e; // (00,01)
    let c = s - t - e; // (00,10)
    let a = 1.0 - 2.0 * s - 2.0 * s2 + 2.0 * t + 2.0 * e; // (00,00)
    let v00 = 1.0 - s - s2 + t;
    #[rustfmt::skip]
    let edge = vec![
        a, b, c, t,
        b, 0.0, e, 0.0,
        c, e, 0.0, 0.0,
        t, 0.0, 0.0, 0.0,
    ];
    PairLaw { vert: vec![v00, s2 - t, s - t, t], edge }
}

fn pair_value(r: usize, law: &PairLaw) -> f64 {
    let hv: f64 = law.vert.iter().map(|&x| eta0(x)).sum();
    let he: f64 = law.edge.iter().map(|&x| eta0(x)).sum();
    r as f64 * he - (2.0 * r as f64 - 1.0) * hv
}

/// Closed form at `s' = s` through the smaller root of `x² − (1−2t)x + (s−t)(1−2s) = 0`.
pub fn f_pair_closed(r: usize, s: f64, t: f64) -> Result<ExponentResult> {
    if !(0.0..0.5).contains(&s) {
        return Err(Error::Domain { value: s, domain: "s in [0, 1/2)" });
    }
    if !(0.0..=s).contains(&t) {
        return Err(Error::Domain { value: t, domain: "t in [0, s]" });
    }
    let b = 1.0 - 2.0 * t;
    let c = (s - t) * (1.0 - 2.0 * s);
    let disc = b * b - 4.0 * c;
    if disc < 0.0 {
        return Err(Error::Infeasible(format!("negative discriminant {disc}")));
    }
    // smaller root, written to avoid cancellation
    let x = if c == 0.0 { 0.0 } else { 2.0 * c / (b + disc.sqrt()) };
    let hv = eta0(t) + 2.0 * eta0(s - t) + eta0(1.0 - 2.0 * s + t);
    let he = 2.0 * eta0(t) + 4.0 * eta0(x) + 2.0 * eta0(s - t - x) + eta0(1.0 - 2.0 * s - 2.0 * x);
    let rf = r as f64;
    Ok(ExponentResult {
        value: rf * he - (2.0 * rf - 1.0) * hv,
        maximizer: Some(pair_law(s, s, t, s - t - x)),
        residual: ((s - t - x) * (1.0 - 2.0 * s - 2.0 * x) - x * x).abs(),
    })
}

/// Feasible range of the free coordinate `e = π_edge(01,10)`.
fn pair_range(s: f64, s2: f64, t: f64) -> Result<(f64, f64)> {
    for (v, name) in [(s, "s >= 0"), (s2, "s' >= 0"), (t, "t >= 0")] {
        if !(v >= 0.0) {
            return Err(Error::Infeasible(format!("violates {name}")));
        }
    }
    if t > s.min(s2) {
        return Err(Error::Infeasible("violates t <= min(s, s')".into()));
    }
    if s + s2 - t > 1.0 {
        return Err(Error::Infeasible("violates s + s' - t <= 1".into()));
    }
    let lo = (s + s2 - t - 0.5).max(0.0);
    let hi = s.min(s2) - t;
    if lo > hi {
        return Err(Error::Infeasible("violates pi_edge(00,00) >= 0: needs 2s + 2s' - 2t - 1 <= 2(min(s,s') - t)".into()));
    }
    Ok((lo, hi))
}

/// Maximize `rH(π_edge) − (2r−1)H(π_vert)` over admissible pair laws with
/// vertex law `(1−s−s'+t, s'−t, s−t, t)`.
///
/// The marginal constraints leave one free coordinate `e = π_edge(01,10)`
/// and the objective is strictly concave in it, with stationarity
/// `π(00,01)π(00,10) = π(00,00)e`, a quadratic in `e`.
pub fn f_pair(r: usize, s: f64, s2: f64, t: f64) -> Result<ExponentResult> {
    let (lo, hi) = pair_range(s, s2, t)?;
    let bq = 1.0 - s - s2;
    let cq = (s - t) * (s2 - t);
    let disc = bq * bq + 4.0 * cq;
    let root = if cq == 0.0 {
        0.0
    } else if bq >= 0.0 {
        2.0 * cq / (bq + disc.sqrt())
    } else {
        (-bq + disc.sqrt()) / 2.0
    };
    let e = root.clamp(lo, hi);
    let law = pair_law(s, s2, t, e);
    let grad = law.edge_at(0, 1) * law.edge_at(0, 2) - law.edge_at(0, 0) * e;
    // at a clamped endpoint only the sign of the gradient matters
    let residual = if e == root {
        grad.abs()
    } else if (e == lo && grad <= 0.0) || (e == hi && grad >= 0.0) {
        0.0
    } else {
        grad.abs()
    };
    Ok(ExponentResult { value: pair_value(r, &law), maximizer: Some(law), residual })
}

/// Value of the pair objective at a given free coordinate; used by grid checks.
pub fn f_pair_at(r: usize, s: f64, s2: f64, t: f64, e: f64) -> Result<f64> {
    let (lo, hi) = pair_range(s, s2, t)?;
    if e < lo - 1e-15 || e > hi + 1e-15 {
        return Err(Error::Domain { value: e, domain: "feasible pair coordinate" });
    }
    Ok(pair_value(r, &pair_law(s, s2, t, e.clamp(lo, hi))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Asymptotic {
    pub s: f64,
    pub t: f64,
    pub f_s_approx: f64,
    pub f_pair_approx: f64,
}

/// Leading-order forms `η(s) − rs²` and `η(t) + 2η(s−t) + r(t² − 2s²)`
/// at `s = b̄s·log(2r)/r`, `t = b̄t·log(2r)/r`.
pub fn asymptotic_f(r: usize, bar_s: f64, bar_t: f64) -> Asymptotic {
    let rf = r as f64;
    let scale = (2.0 * rf).ln() / rf;
    let (s, t) = (bar_s * scale, bar_t * scale);
    Asymptotic {
        s,
        t,
        f_s_approx: eta0(s) - rf * s * s,
        f_pair_approx: eta0(t) + 2.0 * eta0(s - t) + rf * (t * t - 2.0 * s * s),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusterDrop {
    pub value: f64,
    /// Set when `b̄s` lies outside `(2/3, 1)`.
    pub out_of_domain: bool,
}

/// `b̄s(1−b̄s)·log²(r)/r`
pub fn cluster_exponent_drop(r: usize, bar_s: f64) -> ClusterDrop {
    let rf = r as f64;
    let l = rf.ln();
    ClusterDrop {
        value: bar_s * (1.0 - bar_s) * l * l / rf,
        out_of_domain: !(bar_s > 2.0 / 3.0 && bar_s < 1.0),
    }
}

fn factorial(k: usize) -> BigInt {
    (2..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `E^perm[#I_w] = C(n,w)·[(n−w)!² / ((n−2w)!·n!)]^r`, exactly.
pub fn exact_expected_count_indep(r: usize, n: usize, w: usize) -> BigRational {
    if 2 * w > n {
        return BigRational::zero();
    }
    let binom = factorial(n) / (factorial(w) * factorial(n - w));
    let fnw = factorial(n - w);
    let per = BigRational::new(&fnw * &fnw, factorial(n - 2 * w) * factorial(n));
    let mut out = BigRational::from_integer(binom);
    for _ in 0..r {
        out *= &per;
    }
    out
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `ln k!` for `k = 0..=n`.
fn log_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    out.push(0.0);
    for k in 1..=n {
        let y = (k as f64).ln() - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        out.push(acc);
    }
    out
}

/// `ln E^perm[#I_w]`, or `-∞` when `2w > n`.
pub fn log_expected_count_indep(r: usize, n: usize, w: usize) -> f64 {
    if 2 * w > n {
        return f64::NEG_INFINITY;
    }
    let lf = log_factorials(n);
    let binom = lf[n] - lf[w] - lf[n - w];
    binom + r as f64 * (2.0 * lf[n - w] - lf[n - 2 * w] - lf[n])
}

/// Kahan–Babuška summation in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarlo {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Mean and standard error of a slice of draws.
pub fn summarize(draws: &[f64]) -> MonteCarlo {
    let m = draws.len();
    let mean = compensated_sum(draws.iter().copied()) / m as f64;
    let var = if m > 1 {
        compensated_sum(draws.iter().map(|x| (x - mean) * (x - mean))) / (m as f64 - 1.0)
    } else {
        0.0
    };
    MonteCarlo { estimate: mean, stderr: (var / m as f64).sqrt(), samples: m }
}

/// Sample mean of `#I_w(σ)` over `σ` from the permutation model.
///
/// Sample `i` uses the stream `(seed, i)`, so the result does not depend on
/// the thread count.
pub fn mc_expected_count(r: usize, n: usize, w: usize, samples: usize, seed: u64) -> Result<MonteCarlo> {
    if samples == 0 {
        return Err(Error::Config("samples must be >= 1".into()));
    }
    let draws: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::derive(seed, i as u64);
            let g = schreier_graph(&sample_perm_hom(r, n, &mut rng));
            count_indep_of_size(&g, w) as f64
        })
        .collect();
    Ok(summarize(&draws))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_values() {
        assert_eq!(eta(0.0).unwrap(), 0.0);
        assert_eq!(eta(1.0).unwrap(), 0.0);
        assert!((eta(0.5).unwrap() - 0.346574).abs() < 1e-6);
        assert!(eta(1.5).is_err());
        assert!((shannon(&[0.5, 0.5]).unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn single_exponent() {
        assert_eq!(f_single(2, 0.0).unwrap(), 0.0);
        assert!((f_single(2, 0.2).unwrap() - 0.399334).abs() < 1e-6);
        assert!((f_single(2, 0.5 - 1e-12).unwrap() + 2f64.ln()).abs() < 1e-9);
        assert!(f_single(2, 0.5).is_err());
        let law = single_law(0.2);
        let v = first_moment_exponent(4, &law, Model::Perm).unwrap();
        assert!((v - f_single(2, 0.2).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn config_equals_perm_at_even_degree() {
        let law = single_law(0.17);
        assert_eq!(
            first_moment_exponent(6, &law, Model::Config).unwrap(),
            first_moment_exponent(6, &law, Model::Perm).unwrap()
        );
        assert!(first_moment_exponent(3, &law, Model::Perm).is_err());
        let point = PairLaw { vert: vec![1.0, 0.0], edge: vec![1.0, 0.0, 0.0, 0.0] };
        assert_eq!(first_moment_exponent(4, &point, Model::Config).unwrap(), 0.0);
    }

    #[test]
    fn closed_pair_reference() {
        let res = f_pair_closed(2, 0.2, 0.1).unwrap();
        let law = res.maximizer.as_ref().unwrap();
        assert!((law.edge_at(0, 1) - 0.083772).abs() < 1e-6);
        assert!((res.value - 0.754034).abs() < 1e-6);
        assert!(res.residual < 1e-10);
        assert!(law.constraint_violation() < 1e-12);
        let diag = f_pair_closed(2, 0.2, 0.2).unwrap();
        assert!((diag.value - f_single(2, 0.2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn general_pair_matches_closed() {
        let a = f_pair(2, 0.2, 0.2, 0.1).unwrap();
        assert!((a.value - 0.754034).abs() < 1e-6);
        let b = f_pair(3, 0.15, 0.25, 0.05).unwrap();
        let c = f_pair(3, 0.25, 0.15, 0.05).unwrap();
        assert!((b.value - c.value).abs() < 1e-12);
        assert!(f_pair(2, 0.2, 0.2, 0.3).is_err());
        assert!((f_pair(2, 0.2, 0.2, 0.2).unwrap().value - f_single(2, 0.2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn drop_and_asymptotics() {
        let d = cluster_exponent_drop(100, 0.9);
        assert!((d.value - 0.019087).abs() < 1e-6);
        assert!(!d.out_of_domain);
        assert!(cluster_exponent_drop(100, 0.5).out_of_domain);
        let a = asymptotic_f(50, 0.8, 0.8);
        assert!((a.f_s_approx - a.f_pair_approx).abs() < 1e-15);
        let z = asymptotic_f(50, 0.0, 0.0);
        assert_eq!((z.f_s_approx, z.f_pair_approx), (0.0, 0.0));
    }

    #[test]
    fn exact_counts() {
        assert_eq!(exact_expected_count_indep(3, 7, 0), BigRational::one());
        assert_eq!(exact_expected_count_indep(1, 4, 2), BigRational::one());
        assert_eq!(
            exact_expected_count_indep(2, 5, 2),
            BigRational::new(BigInt::from(9), BigInt::from(10))
        );
        assert!(exact_expected_count_indep(2, 5, 3).is_zero());
        let q = rational_to_f64(&exact_expected_count_indep(2, 40, 8));
        assert!((q.ln() - log_expected_count_indep(2, 40, 8)).abs() < 1e-10);
    }

    #[test]
    fn mc_trivial_cases() {
        let m = mc_expected_count(2, 6, 0, 20, 1).unwrap();
        assert_eq!((m.estimate, m.stderr), (1.0, 0.0));
        let m = mc_expected_count(1, 1, 1, 20, 1).unwrap();
        assert_eq!(m.estimate, 0.0);
    }

    #[test]
    fn compensated_sum_is_accurate() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(xs), 2.0);
    }
}
