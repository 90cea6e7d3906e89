//! Brute-force oracles shared by the integration tests. None of these call
//! into the library beyond its plain data types.

#![allow(dead_code)]

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use sofic_core::empirical::Labeling;
use sofic_core::sofic::MultiGraph;

pub fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// `dist/n < num/den`
pub fn closer(a: &Labeling, b: &Labeling, num: usize, den: usize) -> bool {
    hamming(&a.values, &b.values) * den < num * a.values.len()
}

/// Threshold-graph components by BFS; returns a label per point.
pub fn bfs_components(points: &[Labeling], num: usize, den: usize) -> Vec<usize> {
    let m = points.len();
    let mut label = vec![usize::MAX; m];
    let mut next = 0;
    for s in 0..m {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in 0..m {
                if label[v] == usize::MAX && closer(&points[u], &points[v], num, den) {
                    label[v] = next;
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    label
}

/// Rank of an integer matrix via Smith normal form, computed with
/// gcd row/column operations on big integers.
pub fn snf_rank(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> usize {
    let mut a = vec![vec![BigInt::zero(); cols]; rows];
    for &(i, j, v) in entries {
        a[i][j] += v;
    }
    smith_diagonal(&mut a).len()
}

/// Nonzero invariant factors, in order.
pub fn smith_diagonal(a: &mut [Vec<BigInt>]) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the trailing block as pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    for j in t..cols {
                        let d = &q * &a[t][j];
                        a[i][j] -= d;
                    }
                    if !a[i][t].is_zero() {
                        a.swap(t, i);
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    for row in a.iter_mut().skip(t) {
                        let d = &q * &row[t];
                        row[j] -= d;
                    }
                    if !a[t][j].is_zero() {
                        for row in a.iter_mut() {
                            row.swap(t, j);
                        }
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// Every independent set with size in `lo..=hi`, by scanning all subsets.
pub fn brute_indep(g: &MultiGraph, lo: usize, hi: usize) -> Vec<u64> {
    let n = g.n();
    assert!(n <= 24, "subset scan limited to n <= 24");
    let edges = g.edges();
    let mut out = Vec::new();
    for mask in 0u64..(1 << n) {
        let k = mask.count_ones() as usize;
        if k < lo || k > hi {
            continue;
        }
        if edges.iter().all(|&(u, v)| mask >> u & 1 == 0 || mask >> v & 1 == 0) {
            out.push(mask);
        }
    }
    out
}
