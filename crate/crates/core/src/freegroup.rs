//! Reduced words in the free group of rank `r`.
//!
//! A letter `i > 0` is the generator `a_i`, `-i` its inverse.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<i32>", into = "Vec<i32>")]
pub struct Word(Vec<i32>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(i: i32) -> Self {
        assert!(i != 0);
        Word(vec![i])
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest generator index used.
    pub fn max_index(&self) -> usize {
        self.0.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    pub fn pow(&self, k: usize) -> Word {
        (0..k).fold(Word::identity(), |acc, _| acc.mul(self))
    }

    /// Fails if any letter is out of range for rank `r`.
    pub fn check_rank(&self, r: usize) -> Result<()> {
        for &l in &self.0 {
            if l.unsigned_abs() as usize > r {
                return Err(Error::InvalidGenerator { index: l, rank: r });
            }
        }
        Ok(())
    }
}

fn push_reduced(out: &mut Vec<i32>, l: i32) {
    if out.last() == Some(&-l) {
        out.pop();
    } else {
        out.push(l);
    }
}

/// Freely reduce a raw letter sequence over rank `r`.
pub fn reduce_word(letters: &[i32], r: usize) -> Result<Word> {
    let mut out = Vec::with_capacity(letters.len());
    for &l in letters {
        if l == 0 || l.unsigned_abs() as usize > r {
            return Err(Error::InvalidGenerator { index: l, rank: r });
        }
        push_reduced(&mut out, l);
    }
    Ok(Word(out))
}

impl TryFrom<Vec<i32>> for Word {
    type Error = Error;
    fn try_from(v: Vec<i32>) -> Result<Self> {
        let r = v.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0);
        reduce_word(&v, r.max(1))
    }
}

impl From<Word> for Vec<i32> {
    fn from(w: Word) -> Vec<i32> {
        w.0
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&l| if l > 0 { format!("a{l}") } else { format!("a{}^-1", -l) })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// All reduced words of length at most `rho`, ordered by length then letters.
pub fn ball(r: usize, rho: usize) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    let mut frontier = vec![Word::identity()];
    let alphabet: Vec<i32> = (1..=r as i32).flat_map(|i| [i, -i]).collect();
    for _ in 0..rho {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &alphabet {
                if w.0.last() == Some(&-l) {
                    continue;
                }
                let mut v = w.0.clone();
                v.push(l);
                next.push(Word(v));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// `1 + Σ_{k=1..ρ} 2r(2r−1)^{k−1}`
pub fn ball_size(r: usize, rho: usize) -> usize {
    let mut total = 1usize;
    let mut sphere = 2 * r;
    for _ in 0..rho {
        total += sphere;
        sphere *= 2 * r - 1;
    }
    total
}

/// Sorted, deduplicated window containing the identity.
pub fn normalize_window(words: &[Word]) -> Vec<Word> {
    let set: BTreeSet<(usize, Word)> = words.iter().map(|w| (w.len(), w.clone())).collect();
    let mut out: Vec<Word> = set.into_iter().map(|(_, w)| w).collect();
    if out.first().map(|w| !w.is_identity()).unwrap_or(true) {
        out.insert(0, Word::identity());
    }
    out
}

/// A permutation representation of `F_r`, given generator by generator.
pub trait Action {
    fn size(&self) -> usize;
    fn rank(&self) -> usize;
    /// Image of `v` under the single letter `l`.
    fn act_letter(&self, l: i32, v: usize) -> usize;
}

/// `σ(w)v`, applying letters right to left.
pub fn evaluate<A: Action + ?Sized>(sigma: &A, w: &Word, v: usize) -> usize {
    w.0.iter().rev().fold(v, |u, &l| sigma.act_letter(l, u))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Perms(Vec<Vec<usize>>, Vec<Vec<usize>>);

    impl Perms {
        fn new(gens: Vec<Vec<usize>>) -> Self {
            let inv = gens
                .iter()
                .map(|g| {
                    let mut inv = vec![0; g.len()];
                    for (i, &j) in g.iter().enumerate() {
                        inv[j] = i;
                    }
                    inv
                })
                .collect();
            Perms(gens, inv)
        }
    }

    impl Action for Perms {
        fn size(&self) -> usize {
            self.0[0].len()
        }
        fn rank(&self) -> usize {
            self.0.len()
        }
        fn act_letter(&self, l: i32, v: usize) -> usize {
            if l > 0 {
                self.0[l as usize - 1][v]
            } else {
                self.1[(-l) as usize - 1][v]
            }
        }
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(reduce_word(&[1, -1], 2).unwrap(), Word::identity());
        assert_eq!(reduce_word(&[], 2).unwrap(), Word::identity());
        assert_eq!(reduce_word(&[1, 2, -2, 1], 2).unwrap().letters(), &[1, 1]);
        assert!(matches!(reduce_word(&[0], 2), Err(Error::InvalidGenerator { .. })));
        assert!(matches!(reduce_word(&[3], 2), Err(Error::InvalidGenerator { .. })));
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(ball(2, 0).len(), 1);
        assert_eq!(ball(2, 1).len(), 5);
        assert_eq!(ball(2, 2).len(), 17);
        for r in 1..4 {
            for rho in 0..4 {
                assert_eq!(ball(r, rho).len(), ball_size(r, rho));
            }
        }
    }

    #[test]
    fn ball_closed_under_inverse() {
        let b: BTreeSet<Word> = ball(2, 3).into_iter().collect();
        for w in &b {
            assert!(b.contains(&w.inverse()));
        }
    }

    #[test]
    fn evaluate_is_right_to_left() {
        // a1 = (0 1), a2 = (1 2); a1 a2 sends 2 -> 1 -> 0
        let s = Perms::new(vec![vec![1, 0, 2], vec![0, 2, 1]]);
        let w = reduce_word(&[1, 2], 2).unwrap();
        assert_eq!(evaluate(&s, &w, 2), 0);
        let e = reduce_word(&[1, -1], 2).unwrap();
        for v in 0..3 {
            assert_eq!(evaluate(&s, &e, v), v);
        }
    }

    #[test]
    fn json_round_trip() {
        let w: Word = serde_json::from_str("[1,-2,2,-1,2]").unwrap();
        assert_eq!(w.letters(), &[2]);
        assert_eq!(serde_json::to_string(&w).unwrap(), "[2]");
    }
}
