//! Exact sparse column reduction over `Q`.
//!
//! Vectors are sorted `(index, value)` lists with no stored zeros. The pivot
//! of a vector is its largest index.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type SparseVec = Vec<(usize, BigRational)>;

pub fn from_ints(v: &[(usize, i64)]) -> SparseVec {
    let mut out: SparseVec = v.iter().filter(|(_, c)| *c != 0).map(|&(i, c)| (i, BigRational::from_integer(c.into()))).collect();
    out.sort_by_key(|e| e.0);
    out
}

/// `a + f·b`
pub fn axpy(a: &[(usize, BigRational)], f: &BigRational, b: &[(usize, BigRational)]) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, f * &b[j].1));
            j += 1;
        } else {
            let c = &a[i].1 + f * &b[j].1;
            if !c.is_zero() {
                out.push((a[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Incremental echelon basis keyed by pivot.
#[derive(Debug, Default, Clone)]
pub struct Reducer {
    pivots: HashMap<usize, SparseVec>,
}

impl Reducer {
    pub fn new() -> Self {
        Reducer::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        while let Some((p, c)) = v.last() {
            match self.pivots.get(p) {
                Some(b) => {
                    let f = -(c / &b.last().expect("stored vectors are nonzero").1);
                    v = axpy(&v, &f, b);
                }
                None => break,
            }
        }
        v
    }

    /// Adds `v` to the span; returns true if the rank grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let r = self.reduce(v);
        match r.last() {
            Some(&(p, _)) => {
                self.pivots.insert(p, r);
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: SparseVec) -> bool {
        self.reduce(v).is_empty()
    }
}

pub fn rank(columns: &[SparseVec]) -> usize {
    let mut r = Reducer::new();
    for c in columns {
        r.insert(c.clone());
    }
    r.rank()
}

/// Basis of the null space of the matrix with the given columns, as
/// combinations of column indices.
pub fn kernel(columns: &[SparseVec]) -> Vec<SparseVec> {
    let mut pivots: HashMap<usize, (SparseVec, SparseVec)> = HashMap::new();
    let mut out = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        let mut v = col.clone();
        let mut combo: SparseVec = vec![(j, BigRational::one())];
        while let Some((p, c)) = v.last() {
            match pivots.get(p) {
                Some((b, bc)) => {
                    let f = -(c / &b.last().expect("nonzero").1);
                    v = axpy(&v, &f, b);
                    combo = axpy(&combo, &f, bc);
                }
                None => break,
            }
        }
        match v.last() {
            Some(&(p, _)) => {
                pivots.insert(p, (v, combo));
            }
            None => out.push(combo),
        }
    }
    out
}

/// Scale a rational vector to a primitive integer vector with positive leading entry.
pub fn primitive_integer(v: &[(usize, BigRational)]) -> Vec<(usize, BigInt)> {
    let den = v.iter().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let ints: Vec<(usize, BigInt)> = v.iter().map(|(i, c)| (*i, c.numer() * (&den / c.denom()))).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c));
    let sign = if ints.first().is_some_and(|(_, c)| c.is_negative()) { -BigInt::one() } else { BigInt::one() };
    let g = if g.is_zero() { BigInt::one() } else { g * sign };
    ints.into_iter().map(|(i, c)| (i, c / &g)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel_of_triangle_boundary() {
        // edges 01, 02, 12 over vertices 0, 1, 2
        let cols = vec![from_ints(&[(0, -1), (1, 1)]), from_ints(&[(0, -1), (2, 1)]), from_ints(&[(1, -1), (2, 1)])];
        assert_eq!(rank(&cols), 2);
        let k = kernel(&cols);
        assert_eq!(k.len(), 1);
        let z = primitive_integer(&k[0]);
        let expect: Vec<(usize, BigInt)> = vec![(0, 1.into()), (1, (-1).into()), (2, 1.into())];
        assert_eq!(z, expect);
    }

    #[test]
    fn membership() {
        let mut r = Reducer::new();
        r.insert(from_ints(&[(0, 2), (3, 4)]));
        assert!(r.contains(from_ints(&[(0, 1), (3, 2)])));
        assert!(!r.contains(from_ints(&[(0, 1)])));
    }
}
