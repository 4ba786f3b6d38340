//! Supports of products of Iwahori double cosets.
//!
//! `I x I · I s I` is `I xs I` when `ℓ(xs) > ℓ(x)` and `I xs I ∪ I x I`
//! otherwise. Folding a reduced word of `y` onto `{x}` gives the set of
//! double cosets contained in `I x I · I y I`.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::affine::AffineWeylElement;
use crate::error::{Error, Result};
use crate::perm::Permutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoldRule {
    /// Both branches on length-decreasing steps (the set product).
    FullSupport,
    /// Only the longer element (the Demazure monoid product).
    DemazureMax,
}

/// A set of double cosets, each named by its `W̃` representative.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CosetSet(BTreeSet<AffineWeylElement>);

impl CosetSet {
    pub fn singleton(x: AffineWeylElement) -> Self {
        Self(BTreeSet::from([x]))
    }

    pub fn contains(&self, x: &AffineWeylElement) -> bool {
        self.0.contains(x)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &AffineWeylElement> {
        self.0.iter()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.0.iter().any(|x| large.0.contains(x))
    }
}

impl FromIterator<AffineWeylElement> for CosetSet {
    fn from_iter<T: IntoIterator<Item = AffineWeylElement>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Right convolution by the double coset of `s_i`.
pub fn fold_simple(set: &CosetSet, i: usize, rule: FoldRule) -> CosetSet {
    let mut out = BTreeSet::new();
    for x in set.iter() {
        let s = AffineWeylElement::simple(x.rank(), i);
        let xs = x.mul_unchecked(&s);
        if xs.length() > x.length() {
            out.insert(xs);
        } else {
            match rule {
                FoldRule::FullSupport => {
                    out.insert(xs);
                    out.insert(*x);
                }
                FoldRule::DemazureMax => {
                    out.insert(*x);
                }
            }
        }
    }
    CosetSet(out)
}

/// Double cosets contained in `⋃_{x∈set} I x I · I y I`.
pub fn support_from_set(set: &CosetSet, y: &AffineWeylElement, rule: FoldRule) -> Result<CosetSet> {
    let dec = y.reduced_decomposition()?;
    let omega = AffineWeylElement::omega(y.rank()).pow(dec.omega_power as i64);
    let mut cur: CosetSet = set
        .iter()
        .map(|x| x.multiply(&omega))
        .collect::<Result<_>>()?;
    for &i in &dec.word {
        cur = fold_simple(&cur, i, rule);
    }
    Ok(cur)
}

/// Double cosets contained in `I x I · I y I`.
pub fn coset_product_support(x: &AffineWeylElement, y: &AffineWeylElement, rule: FoldRule) -> Result<CosetSet> {
    if x.rank() != y.rank() {
        return Err(Error::SizeMismatch(x.rank(), y.rank()));
    }
    support_from_set(&CosetSet::singleton(*x), y, rule)
}

/// Whether `I target I ⊆ I y I · I z I · I y⁻¹ I` under `rule`.
pub fn sandwich_contains(
    target: &AffineWeylElement,
    y: &Permutation,
    z: &AffineWeylElement,
    rule: FoldRule,
) -> Result<bool> {
    let y = AffineWeylElement::from_finite(*y);
    let inner = coset_product_support(&y, z, rule)?;
    let outer = support_from_set(&inner, &y.inverse(), rule)?;
    Ok(outer.contains(target))
}

/// Memoizing evaluator for sandwich tests, with a cap on support sizes.
#[derive(Debug)]
pub struct CosetEngine {
    rule: FoldRule,
    max_support: usize,
    cache: HashMap<(AffineWeylElement, AffineWeylElement), CosetSet>,
}

impl CosetEngine {
    pub fn new(rule: FoldRule, max_support: usize) -> Self {
        Self { rule, max_support, cache: HashMap::new() }
    }

    pub fn rule(&self) -> FoldRule {
        self.rule
    }

    /// Memoized `coset_product_support(x, y, rule)`.
    pub fn support(&mut self, x: &AffineWeylElement, y: &AffineWeylElement) -> Result<&CosetSet> {
        if !self.cache.contains_key(&(*x, *y)) {
            let s = coset_product_support(x, y, self.rule)?;
            if s.len() > self.max_support {
                return Err(Error::ResourceExceeded(format!(
                    "support of {x} · {y} has {} elements (cap {})",
                    s.len(),
                    self.max_support
                )));
            }
            self.cache.insert((*x, *y), s);
        }
        Ok(&self.cache[&(*x, *y)])
    }

    /// Same answer as [`sandwich_contains`].
    ///
    /// For the full support this uses `IxI ⊆ IyIzIy⁻¹I ⟺ IyIzI ∩ IxIyI ≠ ∅`,
    /// which keeps both supports one fold chain deep.
    pub fn sandwich_contains(&mut self, target: &AffineWeylElement, y: &Permutation, z: &AffineWeylElement) -> Result<bool> {
        let ye = AffineWeylElement::from_finite(*y);
        match self.rule {
            FoldRule::FullSupport => {
                let left = self.support(&ye, z)?.clone();
                let right = self.support(target, &ye)?;
                Ok(left.intersects(right))
            }
            FoldRule::DemazureMax => {
                let inner = self.support(&ye, z)?.clone();
                let outer = support_from_set(&inner, &ye.inverse(), self.rule)?;
                Ok(outer.contains(target))
            }
        }
    }
}
