//! Beginnings of semimodules, cocharacter profiles and middle elements.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::affine::AffineWeylElement;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::polygon::{x_block, x_of_polygon, NewtonPolygon};

/// A beginning of a semimodule of type `(n, m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SemimoduleBeginning {
    elements: BTreeSet<i64>,
    n: u32,
    m: u32,
}

impl SemimoduleBeginning {
    pub fn new(elements: impl IntoIterator<Item = i64>, n: u32, m: u32) -> Result<Self> {
        let elements: BTreeSet<i64> = elements.into_iter().collect();
        if !is_beginning(&elements, n, m) {
            return Err(Error::InvalidBeginning(format!("{elements:?} for type ({n}, {m})")));
        }
        Ok(Self { elements, n, m })
    }

    pub fn elements(&self) -> &BTreeSet<i64> {
        &self.elements
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn height(&self) -> usize {
        (self.n + self.m) as usize
    }

    pub fn contains(&self, j: i64) -> bool {
        self.elements.contains(&j)
    }
}

/// One element per residue class mod `n+m`, and every `i` has `i+n` or `i−m`.
pub fn is_beginning(c: &BTreeSet<i64>, n: u32, m: u32) -> bool {
    let h = (n + m) as i64;
    if h == 0 || c.len() != h as usize {
        return false;
    }
    let classes: BTreeSet<i64> = c.iter().map(|i| i.rem_euclid(h)).collect();
    classes.len() == h as usize && c.iter().all(|&i| c.contains(&(i + n as i64)) || c.contains(&(i - m as i64)))
}

/// All `λ` with `min λ = 0` and `ε^{-λ} x_{n,m} ε^λ ∈ W ε^μ W`.
///
/// Along the cycle `j ↦ u(j)` of `x_{n,m}`, the conjugated exponent of
/// column `j` is `e_j + λ_j − λ_{u(j)} ∈ {0,1}`; closing the cycle forces
/// exactly `n` of these to be one.
pub fn enumerate_cochar_block(n: u32, m: u32) -> Result<Vec<Vec<i64>>> {
    let x = x_block(n, m)?;
    let h = x.rank();
    let mut out = Vec::new();
    let mut choice = Vec::with_capacity(h);
    fn rec(x: &AffineWeylElement, ones_left: usize, choice: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let h = x.rank();
        if choice.len() == h {
            if ones_left == 0 {
                let mut lam = vec![0i64; h];
                let mut j = 0;
                for &b in choice.iter() {
                    let (row, e) = x.column_entry(j);
                    // e + λ_j − λ_row = b
                    lam[row] = lam[j] + e - b;
                    j = row;
                }
                let min = *lam.iter().min().expect("non-empty");
                out.push(lam.into_iter().map(|v| v - min).collect());
            }
            return;
        }
        let remaining = h - choice.len();
        for b in [0i64, 1] {
            if (b == 1 && ones_left == 0) || (b == 0 && ones_left >= remaining) {
                continue;
            }
            choice.push(b);
            rec(x, ones_left - b as usize, choice, out);
            choice.pop();
        }
    }
    rec(&x, n as usize, &mut choice, &mut out);
    out.sort();
    out.dedup();
    Ok(out)
}

/// `C ↦ λ` with `λ_j` the unique integer such that `h+1−j+hλ_j ∈ C`.
pub fn beginning_to_cochar(c: &SemimoduleBeginning) -> Vec<i64> {
    let h = c.height() as i64;
    (1..=h)
        .map(|j| {
            let base = h + 1 - j;
            let hit = c
                .elements()
                .iter()
                .find(|&&i| (i - base).rem_euclid(h) == 0)
                .expect("one element per residue class");
            (hit - base).div_euclid(h)
        })
        .collect()
}

/// `λ ↦ C = {h+1−j+hλ_j}`.
pub fn cochar_to_beginning(lam: &[i64], n: u32, m: u32) -> Result<SemimoduleBeginning> {
    let h = (n + m) as i64;
    if lam.len() as i64 != h {
        return Err(Error::SizeMismatch(lam.len(), h as usize));
    }
    SemimoduleBeginning::new(lam.iter().enumerate().map(|(k, &l)| h - k as i64 + h * l), n, m)
}

/// A cocharacter `λ` split into the blocks of a Newton polygon, normalized
/// so that each block has minimum 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CocharacterProfile {
    pub lam: Vec<i64>,
    pub block_sizes: Vec<usize>,
}

impl CocharacterProfile {
    pub fn new(lam: Vec<i64>, block_sizes: Vec<usize>) -> Result<Self> {
        let total: usize = block_sizes.iter().sum();
        if total != lam.len() {
            return Err(Error::SizeMismatch(lam.len(), total));
        }
        Ok(Self { lam, block_sizes })
    }

    fn block_ranges(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        self.block_sizes.iter().scan(0usize, |start, &size| {
            let r = *start..*start + size;
            *start += size;
            Some(r)
        })
    }

    /// Shifts each block to have minimum 0.
    pub fn normalized(&self) -> Self {
        let mut lam = self.lam.clone();
        for r in self.block_ranges() {
            if let Some(min) = lam[r.clone()].iter().min().copied() {
                lam[r].iter_mut().for_each(|v| *v -= min);
            }
        }
        Self { lam, block_sizes: self.block_sizes.clone() }
    }
}

/// Orbit representatives of `X_*(T)^P` under the centre of the Levi.
pub fn enumerate_profiles(p: &NewtonPolygon) -> Result<Vec<CocharacterProfile>> {
    let per_block = p
        .blocks()
        .iter()
        .map(|&(n, m)| enumerate_cochar_block(n, m))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![Vec::new()];
    for options in &per_block {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<i64>| {
                options.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.extend_from_slice(o);
                    v
                })
            })
            .collect();
    }
    Ok(out
        .into_iter()
        .map(|lam| CocharacterProfile { lam, block_sizes: p.block_sizes() })
        .collect())
}

/// Block-preserving stable ascending argsort of `λ`.
pub fn eta_of(profile: &CocharacterProfile) -> Permutation {
    let mut images: Vec<usize> = Vec::with_capacity(profile.lam.len());
    for r in profile.block_ranges() {
        let mut idx: Vec<usize> = r.collect();
        idx.sort_by_key(|&j| profile.lam[j]);
        images.extend(idx);
    }
    Permutation::from_zero_based(&images)
}

/// `ε^{-λ} x_P ε^λ`, checked to lie in `W ε^μ W`.
pub fn conjugated_block_element(profile: &CocharacterProfile, p: &NewtonPolygon) -> Result<AffineWeylElement> {
    if profile.block_sizes != p.block_sizes() {
        return Err(Error::SizeMismatch(profile.lam.len(), p.height()));
    }
    let t = AffineWeylElement::translation(&profile.lam)?;
    let c = x_of_polygon(p)?.conjugate_by(&t);
    if !c.in_minuscule_double_coset(p.height(), p.rise()) {
        return Err(Error::NotMinuscule(c.to_string()));
    }
    Ok(c)
}

/// `η_λ^{-1} ε^{-λ} x_P ε^λ η_λ`.
pub fn middle_element(profile: &CocharacterProfile, p: &NewtonPolygon) -> Result<AffineWeylElement> {
    let eta = AffineWeylElement::from_finite(eta_of(profile));
    Ok(conjugated_block_element(profile, p)?.conjugate_by(&eta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[i64]) -> BTreeSet<i64> {
        v.iter().copied().collect()
    }

    #[test]
    fn beginning_examples() {
        assert!(is_beginning(&set(&[0, 1]), 1, 1));
        assert!(!is_beginning(&set(&[0, 2, 4]), 1, 2));
        assert!(is_beginning(&set(&[5]), 0, 1));
        assert!(!is_beginning(&set(&[0, 2]), 1, 1));
    }

    #[test]
    fn cochar_examples() {
        assert_eq!(enumerate_cochar_block(1, 1).unwrap(), vec![vec![0, 0], vec![0, 1]]);
        assert_eq!(enumerate_cochar_block(1, 2).unwrap(), vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 1]]);
        assert_eq!(enumerate_cochar_block(0, 1).unwrap(), vec![vec![0]]);
        assert!(enumerate_cochar_block(2, 2).is_err());
    }

    #[test]
    fn bijection_examples() {
        let c = SemimoduleBeginning::new([1, 2], 1, 1).unwrap();
        assert_eq!(beginning_to_cochar(&c), vec![0, 0]);
        assert_eq!(cochar_to_beginning(&[0, 1], 1, 1).unwrap().elements(), &set(&[2, 3]));
        assert_eq!(cochar_to_beginning(&[0], 0, 1).unwrap().elements(), &set(&[1]));
        assert!(SemimoduleBeginning::new([0, 2], 1, 1).is_err());
    }

    #[test]
    fn profile_examples() {
        let np = |s: &str| s.parse::<NewtonPolygon>().unwrap();
        assert_eq!(enumerate_profiles(&np("1/2x2")).unwrap().len(), 2);
        let ord = enumerate_profiles(&np("0,1")).unwrap();
        assert_eq!(ord.len(), 1);
        assert_eq!(ord[0].lam, vec![0, 0]);
        assert_eq!(enumerate_profiles(&np("2/5x5")).unwrap().len(), 10);
    }

    #[test]
    fn eta_examples() {
        let prof = |v: &[i64]| CocharacterProfile::new(v.to_vec(), vec![v.len()]).unwrap();
        assert!(eta_of(&prof(&[0, 0])).is_identity());
        assert_eq!(eta_of(&prof(&[1, 0])).one_line(), vec![2, 1]);
        assert_eq!(eta_of(&prof(&[0, 1, 0])).one_line(), vec![1, 3, 2]);
        let blocks = CocharacterProfile::new(vec![1, 0, 1, 0], vec![2, 2]).unwrap();
        assert_eq!(eta_of(&blocks).one_line(), vec![2, 1, 4, 3]);
    }

    #[test]
    fn middle_examples() {
        let np = |s: &str| s.parse::<NewtonPolygon>().unwrap();
        let el = |lam: &[i64], perm: &[usize]| {
            AffineWeylElement::new(lam, Permutation::from_one_line(perm).unwrap()).unwrap()
        };
        let ss = np("1/2x2");
        let prof = |v: &[i64]| CocharacterProfile::new(v.to_vec(), vec![2]).unwrap();
        assert_eq!(middle_element(&prof(&[0, 0]), &ss).unwrap(), x_block(1, 1).unwrap());
        assert_eq!(middle_element(&prof(&[0, 1]), &ss).unwrap(), el(&[1, 0], &[2, 1]));
        let ord = CocharacterProfile::new(vec![0, 0], vec![1, 1]).unwrap();
        assert_eq!(middle_element(&ord, &np("0,1")).unwrap(), el(&[0, 1], &[1, 2]));
        assert!(matches!(middle_element(&prof(&[0, 2]), &ss), Err(Error::NotMinuscule(_))));
    }
}
