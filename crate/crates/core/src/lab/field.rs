//! Table-driven arithmetic in `F_{p^r}` for `p^r ≤ 256`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Field element: the coefficient vector of a polynomial over `F_p` read in base `p`.
pub type Elem = u8;

/// `F_{p^r}` with Frobenius `a ↦ a^p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldConfig {
    pub p: u32,
    pub r: u32,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self { p: 2, r: 2 }
    }
}

impl FieldConfig {
    pub fn new(p: u32, r: u32) -> Result<Self> {
        let cfg = Self { p, r };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn q(&self) -> u32 {
        self.p.pow(self.r)
    }

    fn validate(&self) -> Result<()> {
        let is_prime = self.p >= 2 && (2..self.p).take_while(|k| k * k <= self.p).all(|k| !self.p.is_multiple_of(k));
        if !is_prime {
            return Err(Error::InvalidField(format!("{} is not prime", self.p)));
        }
        if self.r == 0 || (self.p as u64).checked_pow(self.r).is_none_or(|q| q > 256) {
            return Err(Error::InvalidField(format!("{}^{} is out of range", self.p, self.r)));
        }
        Ok(())
    }

    /// Shared arithmetic tables for this configuration.
    pub fn field(&self) -> Result<Arc<Field>> {
        static CACHE: OnceLock<Mutex<HashMap<FieldConfig, Arc<Field>>>> = OnceLock::new();
        self.validate()?;
        let mut cache = CACHE.get_or_init(Default::default).lock().expect("field cache poisoned");
        Ok(cache.entry(*self).or_insert_with(|| Arc::new(Field::build(*self))).clone())
    }
}

pub struct Field {
    cfg: FieldConfig,
    q: usize,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
    frob: Vec<Elem>,
    frob_inv: Vec<Elem>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.cfg == other.cfg
    }
}

impl Eq for Field {}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F_{}^{}", self.cfg.p, self.cfg.r)
    }
}

fn digits(mut a: usize, p: usize, r: usize) -> Vec<usize> {
    (0..r)
        .map(|_| {
            let d = a % p;
            a /= p;
            d
        })
        .collect()
}

fn undigits(d: &[usize], p: usize) -> usize {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Product of two polynomials over `F_p` reduced modulo the monic `modulus`.
fn poly_mulmod(a: &[usize], b: &[usize], modulus: &[usize], p: usize) -> Vec<usize> {
    let r = modulus.len() - 1;
    let mut prod = vec![0usize; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (r..prod.len()).rev() {
        let c = prod[k];
        if c != 0 {
            for (i, &m) in modulus.iter().enumerate() {
                let idx = k - r + i;
                prod[idx] = (prod[idx] + p * p - c * m) % p;
            }
        }
    }
    prod.truncate(r);
    prod.resize(r, 0);
    prod
}

fn divides(divisor: &[usize], poly: &[usize], p: usize) -> bool {
    let mut rem = poly.to_vec();
    let dd = divisor.len() - 1;
    let lead_inv = (1..p).find(|&x| (x * divisor[dd]) % p == 1).expect("non-zero leading coefficient");
    for k in (dd..rem.len()).rev() {
        let c = (rem[k] * lead_inv) % p;
        if c != 0 {
            for (i, &m) in divisor.iter().enumerate() {
                let idx = k - dd + i;
                rem[idx] = (rem[idx] + p * p - c * m % p) % p;
            }
        }
    }
    rem.iter().take(dd).all(|&x| x == 0)
}

/// Lexicographically first monic irreducible polynomial of degree `r` over `F_p`.
fn irreducible(p: usize, r: usize) -> Vec<usize> {
    'candidates: for low in 0..p.pow(r as u32) {
        let mut f = digits(low, p, r);
        f.push(1);
        for deg in 1..=r / 2 {
            for low_g in 0..p.pow(deg as u32) {
                let mut g = digits(low_g, p, deg);
                g.push(1);
                if divides(&g, &f, p) {
                    continue 'candidates;
                }
            }
        }
        return f;
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Field {
    fn build(cfg: FieldConfig) -> Self {
        let p = cfg.p as usize;
        let r = cfg.r as usize;
        let q = p.pow(cfg.r);
        let modulus = irreducible(p, r);
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            let da = digits(a, p, r);
            for b in 0..q {
                let db = digits(b, p, r);
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = undigits(&sum, p) as Elem;
                mul[a * q + b] = undigits(&poly_mulmod(&da, &db, &modulus, p), p) as Elem;
            }
        }
        let mut neg = vec![0; q];
        let mut inv = vec![0; q];
        for a in 0..q {
            neg[a] = (0..q).find(|&b| add[a * q + b] == 0).expect("additive inverse") as Elem;
            if a != 0 {
                inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).expect("field") as Elem;
            }
        }
        let mut frob = vec![0; q];
        for a in 0..q {
            let mut x: Elem = 1;
            for _ in 0..p {
                x = mul[a * q + x as usize];
            }
            frob[a] = x;
        }
        let mut frob_inv = vec![0; q];
        for a in 0..q {
            frob_inv[frob[a] as usize] = a as Elem;
        }
        Self { cfg, q, add, mul, neg, inv, frob, frob_inv }
    }

    pub fn config(&self) -> FieldConfig {
        self.cfg
    }

    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a as usize * self.q + b as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        (a != 0).then(|| self.inv[a as usize])
    }

    #[inline]
    pub fn frob(&self, a: Elem) -> Elem {
        self.frob[a as usize]
    }

    #[inline]
    pub fn frob_inv(&self, a: Elem) -> Elem {
        self.frob_inv[a as usize]
    }

    /// `σ^k(a)` for any integer `k`.
    pub fn frob_pow(&self, mut a: Elem, k: i32) -> Elem {
        let k = k.rem_euclid(self.cfg.r as i32);
        for _ in 0..k {
            a = self.frob(a);
        }
        a
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(|a| a as Elem)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        rng.gen_range(0..self.q) as Elem
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        rng.gen_range(1..self.q) as Elem
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms() {
        for (p, r) in [(2, 1), (2, 2), (2, 3), (3, 2), (5, 1), (2, 8)] {
            let f = FieldConfig::new(p, r).unwrap().field().unwrap();
            let q = f.q();
            assert_eq!(q, (p as usize).pow(r));
            let els: Vec<Elem> = f.elements().collect();
            for &a in els.iter().step_by(if q > 16 { 7 } else { 1 }) {
                assert_eq!(f.frob_pow(a, r as i32), a);
                assert_eq!(f.frob_inv(f.frob(a)), a);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for &b in els.iter().step_by(if q > 16 { 5 } else { 1 }) {
                    assert_eq!(f.frob(f.mul(a, b)), f.mul(f.frob(a), f.frob(b)));
                    assert_eq!(f.frob(f.add(a, b)), f.add(f.frob(a), f.frob(b)));
                    assert_eq!(f.sub(f.add(a, b), b), a);
                }
            }
        }
    }

    #[test]
    fn frobenius_is_nontrivial_on_proper_extensions() {
        let f = FieldConfig::default().field().unwrap();
        assert!(f.elements().any(|a| f.frob(a) != a));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(FieldConfig::new(4, 1).is_err());
        assert!(FieldConfig::new(2, 9).is_err());
        assert!(FieldConfig::new(2, 0).is_err());
    }
}
