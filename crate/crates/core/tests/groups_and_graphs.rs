mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use sofic_core::freegroup::{ball, ball_size, evaluate, reduce_word, Word};
use sofic_core::rng;
use sofic_core::sofic::{count_short_cycles, sample_config_graph, sample_perm_hom, schreier_graph, MultiGraph, PermHom};

fn letters(r: i32, max_len: usize) -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec((1..=r, any::<bool>()).prop_map(|(i, neg)| if neg { -i } else { i }), 0..max_len)
}

fn perm_hom(r: usize, n: usize) -> impl Strategy<Value = PermHom> {
    any::<u64>().prop_map(move |seed| sample_perm_hom(r, n, &mut rng::from_seed(seed)))
}

/// Apply letters right to left, straight from the generator tables.
fn apply_naive(sigma: &PermHom, letters: &[i32], mut v: usize) -> usize {
    for &l in letters.iter().rev() {
        let i = l.unsigned_abs() as usize - 1;
        v = if l > 0 { sigma.gens()[i][v] } else { sigma.gens()[i].iter().position(|&u| u == v).unwrap() };
    }
    v
}

proptest! {
    #[test]
    fn reduction_is_idempotent_and_free(ls in letters(3, 20)) {
        let w = reduce_word(&ls, 3).unwrap();
        prop_assert_eq!(reduce_word(w.letters(), 3).unwrap(), w.clone());
        prop_assert!(w.letters().windows(2).all(|p| p[0] != -p[1]));
        prop_assert!(w.mul(&w.inverse()).is_identity());
    }

    #[test]
    fn evaluation_is_an_action(a in letters(2, 8), b in letters(2, 8), sigma in perm_hom(2, 9), v in 0usize..9) {
        let (wa, wb) = (reduce_word(&a, 2).unwrap(), reduce_word(&b, 2).unwrap());
        let lhs = evaluate(&sigma, &wa.mul(&wb), v);
        prop_assert_eq!(lhs, evaluate(&sigma, &wa, evaluate(&sigma, &wb, v)));
        // cancellation does not change the action
        prop_assert_eq!(evaluate(&sigma, &wa, v), apply_naive(&sigma, &a, v));
    }

    #[test]
    fn schreier_graph_is_2r_regular(sigma in perm_hom(3, 11)) {
        let g = schreier_graph(&sigma);
        prop_assert_eq!(g.d(), 6);
        prop_assert!((0..11).all(|v| g.neighbors(v).len() == 6));
        prop_assert_eq!(g.edges().len(), 33);
    }

    #[test]
    fn short_cycles_match_brute_force(seed in any::<u64>(), n in 3usize..9) {
        let g = schreier_graph(&sample_perm_hom(2, n, &mut rng::from_seed(seed)));
        prop_assert_eq!(count_short_cycles(&g, 5), brute_cycles(&g, 5));
    }
}

/// Cycles counted as closed walks on edge identities with no repeated vertex,
/// divided by the 2k rotations and reflections; loops and digons handled apart.
fn brute_cycles(g: &MultiGraph, max_len: usize) -> Vec<u64> {
    let edges = g.edges();
    let mut out = vec![0u64; max_len];
    out[0] = edges.iter().filter(|(u, v)| u == v).count() as u64;
    let mut mult: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for &(u, v) in edges.iter().filter(|(u, v)| u != v) {
        *mult.entry((u, v)).or_insert(0) += 1;
    }
    if max_len >= 2 {
        out[1] = mult.values().map(|&m| m * (m - 1) / 2).sum();
    }
    let m = |a: usize, b: usize| *mult.get(&(a.min(b), a.max(b))).unwrap_or(&0);
    fn walk(path: &mut Vec<usize>, n: usize, k: usize, m: &dyn Fn(usize, usize) -> u64, total: &mut u64) {
        if path.len() == k {
            let w: u64 = path.windows(2).map(|p| m(p[0], p[1])).product::<u64>() * m(path[k - 1], path[0]);
            *total += w;
            return;
        }
        for v in 0..n {
            if !path.contains(&v) && m(*path.last().unwrap(), v) > 0 {
                path.push(v);
                walk(path, n, k, m, total);
                path.pop();
            }
        }
    }
    for k in 3..=max_len {
        let mut total = 0;
        for s in 0..g.n() {
            walk(&mut vec![s], g.n(), k, &m, &mut total);
        }
        out[k - 1] = total / (2 * k as u64);
    }
    out
}

#[test]
fn ball_sizes() {
    for r in 1..4 {
        for rho in 0..4 {
            assert_eq!(ball(r, rho).len(), ball_size(r, rho));
        }
    }
    assert_eq!(ball_size(2, 1), 5);
    assert_eq!(ball(2, 1)[0], Word::identity());
}

fn chi_square_p(counts: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let stat: f64 = counts
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    1.0 - ChiSquared::new((counts.len() - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn permutations_are_uniform_on_sym4() {
    let mut rng = rng::from_seed(44);
    let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    for _ in 0..48_000 {
        *counts.entry(sample_perm_hom(1, 4, &mut rng).gens()[0].clone()).or_insert(0) += 1;
    }
    assert_eq!(counts.len(), 24);
    let c: Vec<u64> = counts.into_values().collect();
    assert!(chi_square_p(&c, &[1.0 / 24.0; 24]) > 0.001);
}

/// The 15 perfect matchings of 6 half-edges, each projected to a multigraph.
#[test]
fn configuration_model_matches_matching_law() {
    let (d, n) = (2, 3);
    fn matchings(rest: &[usize]) -> Vec<Vec<(usize, usize)>> {
        if rest.is_empty() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for i in 1..rest.len() {
            let others: Vec<usize> = rest[1..].iter().enumerate().filter(|&(j, _)| j + 1 != i).map(|(_, &x)| x).collect();
            for mut m in matchings(&others) {
                m.push((rest[0], rest[i]));
                out.push(m);
            }
        }
        out
    }
    let all = matchings(&(0..n * d).collect::<Vec<_>>());
    assert_eq!(all.len(), 15);
    let mut law: BTreeMap<Vec<(usize, usize)>, f64> = BTreeMap::new();
    for m in &all {
        let g = MultiGraph::from_edges(n, &m.iter().map(|&(a, b)| (a / d, b / d)).collect::<Vec<_>>()).unwrap();
        *law.entry(g.edges()).or_insert(0.0) += 1.0 / 15.0;
    }
    let mut rng = rng::from_seed(15);
    let mut seen: BTreeMap<Vec<(usize, usize)>, u64> = law.keys().map(|k| (k.clone(), 0)).collect();
    for _ in 0..30_000 {
        let e = sample_config_graph(d, n, &mut rng).unwrap().edges();
        *seen.get_mut(&e).expect("graph outside the matching law") += 1;
    }
    let counts: Vec<u64> = seen.values().copied().collect();
    let probs: Vec<f64> = law.values().copied().collect();
    assert!(chi_square_p(&counts, &probs) > 0.001);
}

#[test]
fn odd_half_edges_rejected() {
    assert!(sample_config_graph(3, 5, &mut rng::from_seed(0)).is_err());
}
