//! The extended affine Weyl group of `GL_h` as monomial matrices.
//!
//! `(lam, u)` is the matrix with entry `ε^{lam[u(j)]}` at `(u(j), j)`, i.e.
//! `ε^lam · P_u`. The Iwahori subgroup is the preimage of the upper
//! triangular Borel, and the length is `log_q [I : I ∩ xIx^{-1}]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::MAX_RANK;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineWeylElement {
    perm: Permutation,
    lam: [i16; MAX_RANK],
}

/// Result of [`AffineWeylElement::reduced_decomposition`]:
/// `x = omega^omega_power · s_{word[0]} ··· s_{word[l-1]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedDecomposition {
    pub omega_power: i32,
    pub word: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupOp {
    Multiply,
    Invert,
}

impl AffineWeylElement {
    pub fn new(lam: &[i64], perm: Permutation) -> Result<Self> {
        if lam.len() != perm.degree() {
            return Err(Error::SizeMismatch(lam.len(), perm.degree()));
        }
        let mut arr = [0i16; MAX_RANK];
        for (slot, &v) in arr.iter_mut().zip(lam) {
            *slot = i16::try_from(v).map_err(|_| Error::Parse(format!("exponent {v} out of range")))?;
        }
        Ok(Self { perm, lam: arr })
    }

    pub fn identity(h: usize) -> Self {
        Self { perm: Permutation::identity(h), lam: [0; MAX_RANK] }
    }

    pub fn translation(lam: &[i64]) -> Result<Self> {
        Self::new(lam, Permutation::identity(lam.len()))
    }

    pub fn from_finite(perm: Permutation) -> Self {
        Self { perm, lam: [0; MAX_RANK] }
    }

    /// The length-zero generator: ones at `(j-1, j)` and `ε` at `(h, 1)`.
    pub fn omega(h: usize) -> Self {
        let images: Vec<usize> = (0..h).map(|j| if j == 0 { h - 1 } else { j - 1 }).collect();
        let mut lam = vec![0i64; h];
        lam[h - 1] = 1;
        Self::new(&lam, Permutation::from_zero_based(&images)).expect("consistent sizes")
    }

    /// Simple affine reflection `s_i`, `0 <= i < h`; `s_0` is the affine one.
    pub fn simple(h: usize, i: usize) -> Self {
        assert!(h >= 2 && i < h, "no simple reflection s_{i} for h = {h}");
        if i == 0 {
            let mut lam = vec![0i64; h];
            lam[0] = -1;
            lam[h - 1] = 1;
            Self::new(&lam, Permutation::transposition(h, 0, h - 1)).expect("consistent sizes")
        } else {
            Self::from_finite(Permutation::simple(h, i))
        }
    }

    pub fn rank(&self) -> usize {
        self.perm.degree()
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn lam(&self) -> &[i16] {
        &self.lam[..self.rank()]
    }

    pub fn lam_vec(&self) -> Vec<i64> {
        self.lam().iter().map(|&v| v as i64).collect()
    }

    /// Valuation of the determinant.
    pub fn det_valuation(&self) -> i64 {
        self.lam().iter().map(|&v| v as i64).sum()
    }

    /// The nonzero entry of column `j` (0-based): `(row, exponent)`.
    pub fn column_entry(&self, j: usize) -> (usize, i64) {
        let row = self.perm.apply(j);
        (row, self.lam[row] as i64)
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.rank() != other.rank() {
            return Err(Error::SizeMismatch(self.rank(), other.rank()));
        }
        Ok(self.mul_unchecked(other))
    }

    #[inline]
    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        // (λ,u)(μ,v) = (λ + u·μ, u∘v) with (u·μ)_{u(j)} = μ_j
        let mut lam = self.lam;
        for j in 0..self.rank() {
            lam[self.perm.apply(j)] += other.lam[j];
        }
        let perm = self.perm.compose(&other.perm).expect("equal ranks");
        Self { perm, lam }
    }

    pub fn inverse(&self) -> Self {
        // (λ,u)^{-1} = (-u^{-1}·λ, u^{-1})
        let inv = self.perm.inverse();
        let mut lam = [0i16; MAX_RANK];
        for i in 0..self.rank() {
            lam[inv.apply(i)] = -self.lam[i];
        }
        Self { perm: inv, lam }
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { *self };
        let mut acc = Self::identity(self.rank());
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul_unchecked(&base);
        }
        acc
    }

    /// `x ↦ g^{-1} x g`.
    pub fn conjugate_by(&self, g: &Self) -> Self {
        g.inverse().mul_unchecked(self).mul_unchecked(g)
    }

    /// Iwahori–Matsumoto length via the root count
    /// `Σ_{i≠j} max(0, [u⁻¹(i) > u⁻¹(j)] + λ_i − λ_j − [i > j])`.
    pub fn length(&self) -> usize {
        let h = self.rank();
        let inv = self.perm.inverse();
        let mut total = 0i64;
        for i in 0..h {
            for j in 0..h {
                if i == j {
                    continue;
                }
                let v = (inv.apply(i) > inv.apply(j)) as i64 + self.lam[i] as i64
                    - self.lam[j] as i64
                    - (i > j) as i64;
                if v > 0 {
                    total += v;
                }
            }
        }
        total as usize
    }

    /// Greedy right-descent decomposition with the first descent chosen.
    pub fn reduced_decomposition(&self) -> Result<ReducedDecomposition> {
        self.reduced_decomposition_with(|descents| descents[0])
    }

    /// Like [`Self::reduced_decomposition`], with a caller-chosen descent at
    /// every step (used to produce different reduced words).
    pub fn reduced_decomposition_with(
        &self,
        mut choose: impl FnMut(&[usize]) -> usize,
    ) -> Result<ReducedDecomposition> {
        let h = self.rank();
        let mut cur = *self;
        let mut removed = Vec::new();
        let mut len = cur.length();
        while len > 0 {
            let descents: Vec<usize> =
                (0..h).filter(|&i| h >= 2 && cur.mul_unchecked(&Self::simple(h, i)).length() < len).collect();
            if descents.is_empty() {
                return Err(Error::BrokenLengthConvention(format!("{self}: no descent at length {len}")));
            }
            let i = choose(&descents);
            cur = cur.mul_unchecked(&Self::simple(h, i));
            let next = cur.length();
            if next + 1 != len {
                return Err(Error::BrokenLengthConvention(format!("{self}: descent changed length by {}", len - next)));
            }
            len = next;
            removed.push(i);
        }
        let k = cur.det_valuation();
        if cur != Self::omega(h).pow(k) {
            return Err(Error::BrokenLengthConvention(format!("{self}: residual {cur} is not an omega power")));
        }
        removed.reverse();
        Ok(ReducedDecomposition { omega_power: k as i32, word: removed })
    }

    /// Whether all exponents lie in `{0,1}` with exactly `d` ones, i.e.
    /// membership in `W ε^μ W` for the minuscule `μ = (1^d, 0^{h-d})`.
    pub fn in_minuscule_double_coset(&self, h: usize, d: usize) -> bool {
        self.rank() == h
            && self.lam().iter().all(|&v| v == 0 || v == 1)
            && self.lam().iter().filter(|&&v| v == 1).count() == d
    }
}

pub fn group_law(x: &AffineWeylElement, y: &AffineWeylElement, op: GroupOp) -> Result<AffineWeylElement> {
    match op {
        GroupOp::Multiply => x.multiply(y),
        GroupOp::Invert => Ok(x.inverse()),
    }
}

impl fmt::Display for AffineWeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lam: Vec<String> = self.lam().iter().map(|v| v.to_string()).collect();
        write!(f, "perm={};lam=({})", self.perm, lam.join(","))
    }
}

impl fmt::Debug for AffineWeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl std::str::FromStr for AffineWeylElement {
    type Err = Error;

    /// Parses `perm=[2,1];lam=(0,1)`.
    fn from_str(s: &str) -> Result<Self> {
        let mut perm = None;
        let mut lam = None;
        for part in s.split(';') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in {part:?}")))?;
            match key.trim() {
                "perm" => perm = Some(value.parse::<Permutation>()?),
                "lam" => {
                    let inner = value
                        .trim()
                        .strip_prefix('(')
                        .and_then(|r| r.strip_suffix(')'))
                        .ok_or_else(|| Error::Parse(format!("expected (..) exponents, got {value:?}")))?;
                    let v = inner
                        .split(',')
                        .filter(|t| !t.trim().is_empty())
                        .map(|t| t.trim().parse::<i64>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
                        .collect::<Result<Vec<_>>>()?;
                    lam = Some(v);
                }
                other => return Err(Error::Parse(format!("unknown key {other:?}"))),
            }
        }
        let perm = perm.ok_or_else(|| Error::Parse("missing perm=".into()))?;
        let lam = lam.unwrap_or_else(|| vec![0; perm.degree()]);
        Self::new(&lam, perm)
    }
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    perm: Permutation,
    lam: Vec<i64>,
}

impl Serialize for AffineWeylElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementRepr { perm: self.perm, lam: self.lam_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AffineWeylElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ElementRepr::deserialize(d)?;
        Self::new(&r.lam, r.perm).map_err(serde::de::Error::custom)
    }
}
