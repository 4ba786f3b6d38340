//! Dense polynomials in `t` over `F_q`.

use std::fmt;

use rand::Rng;

use super::field::{Elem, Field};

/// Coefficients in increasing degree with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<Elem>);

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}t"),
                _ => format!("{c}t^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join("+"))
    }
}

impl Poly {
    pub fn zero() -> Self {
        Self(Vec::new())
    }

    pub fn constant(c: Elem) -> Self {
        Self::monomial(c, 0)
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    /// `c·t^k`.
    pub fn monomial(c: Elem, k: usize) -> Self {
        if c == 0 {
            return Self::zero();
        }
        let mut v = vec![0; k + 1];
        v[k] = c;
        Self(v)
    }

    pub fn from_coeffs(mut c: Vec<Elem>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        Self(c)
    }

    /// Random polynomial of degree `< deg`.
    pub fn random<R: Rng + ?Sized>(f: &Field, deg: usize, rng: &mut R) -> Self {
        Self::from_coeffs((0..deg).map(|_| f.random(rng)).collect())
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// `t`-adic valuation.
    pub fn val(&self) -> Option<usize> {
        self.0.iter().position(|&c| c != 0)
    }

    pub fn coeff(&self, k: usize) -> Elem {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Self, f: &Field) -> Self {
        let n = self.0.len().max(other.0.len());
        Self::from_coeffs((0..n).map(|k| f.add(self.coeff(k), other.coeff(k))).collect())
    }

    pub fn sub(&self, other: &Self, f: &Field) -> Self {
        let n = self.0.len().max(other.0.len());
        Self::from_coeffs((0..n).map(|k| f.sub(self.coeff(k), other.coeff(k))).collect())
    }

    pub fn neg(&self, f: &Field) -> Self {
        Self(self.0.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn mul(&self, other: &Self, f: &Field) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Self::from_coeffs(out)
    }

    pub fn scale(&self, c: Elem, f: &Field) -> Self {
        Self::from_coeffs(self.0.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Multiplication by `t^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![0; k];
        v.extend_from_slice(&self.0);
        Self(v)
    }

    /// Exact division by `t^k`; the low coefficients must vanish.
    pub fn shift_down(&self, k: usize) -> Self {
        debug_assert!(self.0.iter().take(k).all(|&c| c == 0));
        Self(self.0.iter().skip(k).copied().collect())
    }

    /// Reduction modulo `t^k`.
    pub fn truncate(&self, k: usize) -> Self {
        Self::from_coeffs(self.0.iter().take(k).copied().collect())
    }

    /// `σ^k` applied to every coefficient.
    pub fn sigma(&self, k: i32, f: &Field) -> Self {
        Self(self.0.iter().map(|&c| f.frob_pow(c, k)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::field::FieldConfig;

    #[test]
    fn ring_operations() {
        let f = FieldConfig::default().field().unwrap();
        let a = Poly::from_coeffs(vec![1, 2, 0, 3]);
        let b = Poly::from_coeffs(vec![0, 1, 1]);
        assert_eq!(a.add(&b, &f).sub(&b, &f), a);
        assert_eq!(a.mul(&b, &f), b.mul(&a, &f));
        assert_eq!(a.mul(&b, &f).degree(), Some(5));
        assert_eq!(b.val(), Some(1));
        assert_eq!(b.shift_down(1).shift_up(1), b);
        assert_eq!(a.truncate(2), Poly::from_coeffs(vec![1, 2]));
        assert_eq!(a.sigma(2, &f), a);
        assert!(Poly::from_coeffs(vec![0, 0]).is_zero());
    }
}
