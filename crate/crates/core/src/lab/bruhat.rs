//! Effective Iwahori–Bruhat decomposition and the lattice-chain index oracle.

use std::collections::{HashSet, VecDeque};

use rand::Rng;

use super::field::Field;
use super::matrix::{FqMatrix, PolyMatrix, Subspace};
use super::poly::Poly;
use crate::affine::AffineWeylElement;
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// `t^shift · poly`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentMatrix {
    pub shift: i64,
    pub poly: PolyMatrix,
}

impl LaurentMatrix {
    pub fn from_poly(poly: PolyMatrix) -> Self {
        Self { shift: 0, poly }
    }

    /// Monomial matrix of `x`.
    pub fn monomial(x: &AffineWeylElement) -> Self {
        let shift = x.lam().iter().map(|&l| l as i64).min().unwrap_or(0).min(0);
        let lifted = AffineWeylElement::translation(&vec![-shift; x.rank()])
            .and_then(|t| t.multiply(x))
            .expect("ranks agree");
        Self { shift, poly: PolyMatrix::monomial(&lifted) }
    }

    pub fn size(&self) -> usize {
        self.poly.size()
    }

    pub fn mul(&self, other: &Self, f: &Field) -> Self {
        Self { shift: self.shift + other.shift, poly: self.poly.mul(&other.poly, f) }
    }

    pub fn mul_poly_left(&self, g: &PolyMatrix, f: &Field) -> Self {
        Self { shift: self.shift, poly: g.mul(&self.poly, f) }
    }

    pub fn mul_poly_right(&self, g: &PolyMatrix, f: &Field) -> Self {
        Self { shift: self.shift, poly: self.poly.mul(g, f) }
    }
}

/// The unique `w̃` with `M ∈ I w̃ I`, `I` the preimage of the upper-triangular Borel.
///
/// Pivot: minimal valuation, then the lowest row, then the leftmost column in
/// that row. Rows below and columns left of the pivot then carry only entries
/// of strictly larger valuation, so every elimination step is an Iwahori move.
pub fn iwahori_class_of(m: &LaurentMatrix, f: &Field) -> Result<AffineWeylElement> {
    let h = m.size();
    let mut a = m.poly.clone();
    let mut rows: Vec<usize> = (0..h).collect();
    let mut cols: Vec<usize> = (0..h).collect();
    let mut images = vec![0usize; h];
    let mut lam = vec![0i64; h];
    for _ in 0..h {
        let mut best: Option<(usize, usize, usize)> = None;
        for &i in &rows {
            for &j in &cols {
                if let Some(v) = a.get(i, j).val() {
                    let better = match best {
                        None => true,
                        Some((bv, bi, bj)) => v < bv || (v == bv && (i > bi || (i == bi && j < bj))),
                    };
                    if better {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let (v, r, c) = best.ok_or(Error::SingularMatrix)?;
        let unit = a.get(r, c).shift_down(v);
        for &i in &rows {
            if i == r || a.get(i, c).is_zero() {
                continue;
            }
            let factor = a.get(i, c).shift_down(v);
            for j in 0..h {
                let val = unit.mul(a.get(i, j), f).sub(&factor.mul(a.get(r, j), f), f);
                a.set(i, j, val);
            }
        }
        for &k in &cols {
            if k == c || a.get(r, k).is_zero() {
                continue;
            }
            let factor = a.get(r, k).shift_down(v);
            for i in 0..h {
                let val = unit.mul(a.get(i, k), f).sub(&factor.mul(a.get(i, c), f), f);
                a.set(i, k, val);
            }
        }
        images[c] = r;
        lam[r] = v as i64 + m.shift;
        rows.retain(|&i| i != r);
        cols.retain(|&j| j != c);
    }
    AffineWeylElement::new(&lam, Permutation::from_zero_based(&images))
}

/// Random element of the Iwahori subgroup with polynomial entries of degree `< deg`.
pub fn random_iwahori<R: Rng + ?Sized>(h: usize, deg: usize, f: &Field, rng: &mut R) -> PolyMatrix {
    let lower = PolyMatrix::from_fn(h, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => Poly::random(f, deg, rng).shift_up(1),
        std::cmp::Ordering::Equal => Poly::one(),
        std::cmp::Ordering::Less => Poly::zero(),
    });
    let upper = PolyMatrix::from_fn(h, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => Poly::random(f, deg, rng),
        std::cmp::Ordering::Equal => Poly::constant(f.random_nonzero(rng)).add(&Poly::random(f, deg, rng).shift_up(1), f),
        std::cmp::Ordering::Greater => Poly::zero(),
    });
    lower.mul(&upper, f)
}

/// `log_q [I : I ∩ xIx^{-1}]`, as the size of the Iwahori orbit of the
/// lattice chain `x·Λ_•` inside the window `t^{-a}O^h / t^a O^h`.
pub fn iwahori_index_length(x: &AffineWeylElement, f: &Field) -> usize {
    let h = x.rank();
    let a = x.lam().iter().map(|&l| (l as i64).abs()).max().unwrap_or(0) + 2;
    let width = (2 * a) as usize;
    let dim = h * width;
    let coord = |row: usize, k: i64| row * width + (k + a) as usize;

    let chain: Vec<Subspace> = (1..=h)
        .map(|i| {
            let mut vecs = Vec::new();
            for j in 0..h {
                let (row, e) = x.column_entry(j);
                let start = e + (j >= i) as i64;
                for k in start..a {
                    let mut v = vec![0; dim];
                    v[coord(row, k)] = 1;
                    vecs.push(v);
                }
            }
            Subspace::span(dim, vecs, f)
        })
        .collect();

    // action of g ∈ I on the window, through t^{2a}
    let window_action = |g: &PolyMatrix| {
        let mut m = FqMatrix::zero(dim, dim);
        for j in 0..h {
            for k in -a..a {
                for i in 0..h {
                    for (l, &c) in g.get(i, j).coeffs().iter().enumerate() {
                        let target = k + l as i64;
                        if c != 0 && target < a {
                            let cur = m.get(coord(i, target), coord(j, k));
                            m.set(coord(i, target), coord(j, k), f.add(cur, c));
                        }
                    }
                }
            }
        }
        m
    };
    let mut generators = Vec::new();
    let nonzero: Vec<u8> = f.elements().filter(|&c| c != 0).collect();
    for i in 0..h {
        for j in 0..h {
            for k in 0..width {
                if (i > j && k == 0) || (i == j && k == 0) {
                    continue;
                }
                for &c in &nonzero {
                    let mut g = PolyMatrix::identity(h);
                    let entry = g.get(i, j).add(&Poly::monomial(c, k), f);
                    g.set(i, j, entry);
                    generators.push(window_action(&g));
                }
            }
        }
        for &c in &nonzero {
            if c != 1 {
                let mut g = PolyMatrix::identity(h);
                g.set(i, i, Poly::constant(c));
                generators.push(window_action(&g));
            }
        }
    }

    let mut seen: HashSet<Vec<Subspace>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(chain.clone());
    queue.push_back(chain);
    while let Some(state) = queue.pop_front() {
        for g in &generators {
            let next: Vec<Subspace> = state.iter().map(|u| u.image(g, f)).collect();
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    let q = f.q();
    let mut size = seen.len();
    let mut ell = 0;
    while size > 1 {
        assert_eq!(size % q, 0, "orbit size is a power of q");
        size /= q;
        ell += 1;
    }
    ell
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::field::FieldConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn el(lam: &[i64], perm: &[usize]) -> AffineWeylElement {
        AffineWeylElement::new(lam, Permutation::from_one_line(perm).unwrap()).unwrap()
    }

    #[test]
    fn class_examples() {
        let f = FieldConfig::default().field().unwrap();
        let id = LaurentMatrix::from_poly(PolyMatrix::identity(3));
        assert_eq!(iwahori_class_of(&id, &f).unwrap(), AffineWeylElement::identity(3));
        let d = LaurentMatrix::from_poly(PolyMatrix::diag_t(&[1, 0]));
        assert_eq!(iwahori_class_of(&d, &f).unwrap(), el(&[1, 0], &[1, 2]));
        let neg = el(&[-1, 2], &[2, 1]);
        assert_eq!(iwahori_class_of(&LaurentMatrix::monomial(&neg), &f).unwrap(), neg);
        assert!(iwahori_class_of(&LaurentMatrix::from_poly(PolyMatrix::zero(2)), &f).is_err());
    }

    #[test]
    fn recovers_planted_classes() {
        let f = FieldConfig::default().field().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..60 {
            let h = rng.gen_range(1..=3);
            let lam: Vec<i64> = (0..h).map(|_| rng.gen_range(-2..=2)).collect();
            let perm = crate::perm::all_permutations(h);
            let x = AffineWeylElement::new(&lam, perm[rng.gen_range(0..perm.len())]).unwrap();
            let m = LaurentMatrix::monomial(&x)
                .mul_poly_left(&random_iwahori(h, 3, &f, &mut rng), &f)
                .mul_poly_right(&random_iwahori(h, 3, &f, &mut rng), &f);
            assert_eq!(iwahori_class_of(&m, &f).unwrap(), x);
        }
    }

    #[test]
    fn index_oracle_matches_length_formula() {
        let f = FieldConfig::new(2, 1).unwrap().field().unwrap();
        for x in [
            AffineWeylElement::identity(2),
            AffineWeylElement::omega(2),
            AffineWeylElement::omega(3),
            AffineWeylElement::simple(2, 0),
            AffineWeylElement::simple(3, 1),
            el(&[1, 0], &[1, 2]),
            el(&[1, 0], &[2, 1]),
            el(&[1, -1, 0], &[3, 1, 2]),
        ] {
            assert_eq!(iwahori_index_length(&x, &f), x.length(), "{x}");
        }
    }
}
