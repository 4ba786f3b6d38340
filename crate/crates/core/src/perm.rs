//! The finite Weyl group `S_h` in one-line notation.
//!
//! Images are stored 0-based; everything user-facing (display, serde,
//! constructors taking slices) is 1-based. The permutation matrix of `u` has
//! a one at `(u(j), j)`, so composition matches matrix multiplication.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::MAX_RANK;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct Permutation {
    len: u8,
    img: [u8; MAX_RANK],
}

impl Permutation {
    pub fn identity(h: usize) -> Self {
        assert!(h <= MAX_RANK, "rank {h} too large");
        let mut img = [0u8; MAX_RANK];
        for (j, slot) in img.iter_mut().enumerate().take(h) {
            *slot = j as u8;
        }
        Self { len: h as u8, img }
    }

    /// Builds a permutation from 1-based one-line notation.
    pub fn from_one_line(images: &[usize]) -> Result<Self> {
        let h = images.len();
        if h > MAX_RANK {
            return Err(Error::RankTooLarge(h));
        }
        let mut seen = [false; MAX_RANK];
        let mut img = [0u8; MAX_RANK];
        for (j, &v) in images.iter().enumerate() {
            if v == 0 || v > h || seen[v - 1] {
                return Err(Error::InvalidPermutation(images.to_vec()));
            }
            seen[v - 1] = true;
            img[j] = (v - 1) as u8;
        }
        Ok(Self { len: h as u8, img })
    }

    /// Builds a permutation from 0-based images. Panics on invalid input.
    pub(crate) fn from_zero_based(images: &[usize]) -> Self {
        let one: Vec<usize> = images.iter().map(|&v| v + 1).collect();
        Self::from_one_line(&one).expect("valid 0-based permutation")
    }

    /// The simple reflection `(i, i+1)`, `1 <= i < h`.
    pub fn simple(h: usize, i: usize) -> Self {
        assert!(i >= 1 && i < h, "simple reflection {i} out of range for h = {h}");
        Self::transposition(h, i - 1, i)
    }

    /// Transposition of the 0-based positions `a` and `b`.
    pub(crate) fn transposition(h: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(h);
        p.img.swap(a, b);
        p
    }

    pub fn degree(&self) -> usize {
        self.len as usize
    }

    /// 0-based image of the 0-based point `j`.
    #[inline]
    pub fn apply(&self, j: usize) -> usize {
        self.img[j] as usize
    }

    pub fn one_line(&self) -> Vec<usize> {
        self.zero_based().iter().map(|&v| v as usize + 1).collect()
    }

    pub(crate) fn zero_based(&self) -> &[u8] {
        &self.img[..self.len as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.zero_based().iter().enumerate().all(|(j, &v)| v as usize == j)
    }

    /// `(self ∘ other)(j) = self(other(j))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len != other.len {
            return Err(Error::SizeMismatch(self.degree(), other.degree()));
        }
        let mut img = [0u8; MAX_RANK];
        for (slot, &o) in img.iter_mut().zip(&other.img[..other.degree()]) {
            *slot = self.img[o as usize];
        }
        Ok(Self { len: self.len, img })
    }

    pub fn inverse(&self) -> Self {
        let mut img = [0u8; MAX_RANK];
        for j in 0..self.degree() {
            img[self.img[j] as usize] = j as u8;
        }
        Self { len: self.len, img }
    }

    /// Number of inversions, i.e. the Coxeter length.
    pub fn length(&self) -> usize {
        let w = self.zero_based();
        let mut count = 0;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[i] > w[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Whether `self` has minimal length in `W_I · self` for the simple
    /// reflections `subset` (given as `i` for `(i, i+1)`).
    pub fn is_left_reduced(&self, subset: &[usize]) -> bool {
        let inv = self.inverse();
        subset.iter().all(|&i| inv.apply(i - 1) < inv.apply(i))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_line().iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl std::str::FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected [..] permutation, got {s:?}")))?;
        let images = inner
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<usize>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_one_line(&images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.one_line()
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::from_one_line(&v)
    }
}

/// All of `S_h`, lexicographic in one-line notation.
pub fn all_permutations(h: usize) -> Vec<Permutation> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Permutation>) {
        let h = used.len();
        if prefix.len() == h {
            out.push(Permutation::from_zero_based(prefix));
            return;
        }
        for v in 0..h {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(h), &mut vec![false; h], &mut out);
    out
}

/// Longest element of the parabolic subgroup generated by `subset`.
///
/// The generators split `{1..h}` into runs of consecutive integers; the
/// longest element reverses each run.
pub fn longest_element(h: usize, subset: &[usize]) -> Permutation {
    let mut images: Vec<usize> = (0..h).collect();
    let mut start = 0;
    while start < h {
        let mut end = start;
        while end + 1 < h && subset.contains(&(end + 1)) {
            end += 1;
        }
        images[start..=end].reverse();
        start = end + 1;
    }
    Permutation::from_zero_based(&images)
}

/// Minimal length representatives of `W_I \ W`, in lexicographic order.
pub fn min_coset_reps(h: usize, subset: &[usize]) -> Vec<Permutation> {
    all_permutations(h).into_iter().filter(|w| w.is_left_reduced(subset)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Permutation {
        Permutation::from_one_line(v).unwrap()
    }

    #[test]
    fn compose_examples() {
        assert_eq!(p(&[2, 1]).compose(&p(&[2, 1])).unwrap(), p(&[1, 2]));
        let w = p(&[3, 1, 2]);
        assert_eq!(p(&[1, 2, 3]).compose(&w).unwrap(), w);
        assert_eq!(p(&[2, 3, 1]).compose(&p(&[2, 1, 3])).unwrap(), p(&[3, 2, 1]));
        assert!(p(&[1, 2]).compose(&p(&[1, 2, 3])).is_err());
    }

    #[test]
    fn length_examples() {
        assert_eq!(p(&[1, 2, 3]).length(), 0);
        assert_eq!(p(&[3, 2, 1]).length(), 3);
        assert_eq!(p(&[2, 3, 1]).length(), 2);
    }

    #[test]
    fn longest_examples() {
        assert_eq!(longest_element(3, &[1, 2]), p(&[3, 2, 1]));
        assert_eq!(longest_element(3, &[]), p(&[1, 2, 3]));
        assert_eq!(longest_element(3, &[2]), p(&[1, 3, 2]));
    }

    #[test]
    fn coset_rep_examples() {
        assert_eq!(min_coset_reps(2, &[]), vec![p(&[1, 2]), p(&[2, 1])]);
        assert_eq!(min_coset_reps(3, &[2]), vec![p(&[1, 2, 3]), p(&[2, 1, 3]), p(&[2, 3, 1])]);
        assert_eq!(min_coset_reps(4, &[1, 3]).len(), 6);
    }

    #[test]
    fn coset_reps_are_minimal_in_their_coset() {
        // brute force: w is minimal in W_I w iff no element of W_I shortens it
        for h in 1..=5 {
            for d in 0..=h {
                let subset: Vec<usize> = (1..h).filter(|&i| i != d).collect();
                let wi: Vec<Permutation> =
                    all_permutations(h).into_iter().filter(|v| longest_reduces(v, &subset)).collect();
                let reps = min_coset_reps(h, &subset);
                for w in all_permutations(h) {
                    let minimal = wi.iter().all(|v| v.compose(&w).unwrap().length() >= w.length());
                    assert_eq!(minimal, reps.contains(&w), "h={h} d={d} w={w}");
                }
            }
        }
    }

    // membership in the parabolic subgroup: preserves each run of the subset
    fn longest_reduces(v: &Permutation, subset: &[usize]) -> bool {
        let h = v.degree();
        let mut run = vec![0usize; h];
        for i in 1..h {
            run[i] = if subset.contains(&i) { run[i - 1] } else { run[i - 1] + 1 };
        }
        (0..h).all(|j| run[v.apply(j)] == run[j])
    }

    #[test]
    fn parse_and_display() {
        let w: Permutation = "[2,1,3]".parse().unwrap();
        assert_eq!(w.to_string(), "[2,1,3]");
        assert_eq!(serde_json::to_string(&w).unwrap(), "[2,1,3]");
        assert!("[1,1]".parse::<Permutation>().is_err());
        assert!("1,2".parse::<Permutation>().is_err());
    }
}
