//! Effective minuscule local shtukas `(O^h, A·σ)` with `O = F_q[[t]]`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bt1::Bt1Module;
use super::field::{Field, FieldConfig};
use super::matrix::{FqMatrix, PolyMatrix};
use super::poly::Poly;
use crate::affine::AffineWeylElement;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::polygon::{x_of_polygon, HodgeDatum, NewtonPolygon};

/// Data from which `εA^{-1} mod t` can be read off exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `A = U_1 ε^μ U_2` with `U_i ∈ GL_h(O)`.
    Factorization { u1: PolyMatrix, mu: Vec<i64>, u2: PolyMatrix },
    /// A polynomial matrix `C` with `A·σ(C) = t`, so that `V = C·σ^{-1}`.
    Verschiebung(PolyMatrix),
}

#[derive(Clone, Debug)]
pub struct LocalShtuka {
    field: Arc<Field>,
    a: PolyMatrix,
    witness: Option<Witness>,
}

impl LocalShtuka {
    pub fn new(a: PolyMatrix, field: Arc<Field>, witness: Option<Witness>) -> Self {
        Self { field, a, witness }
    }

    /// `A` the monomial matrix of `x`, which must have exponents in `{0, 1}`.
    pub fn from_monomial(x: &AffineWeylElement, field: Arc<Field>) -> Result<Self> {
        if x.lam().iter().any(|&l| !(0..=1).contains(&l)) {
            return Err(Error::NotMinuscule(x.to_string()));
        }
        let h = x.rank();
        let t_xinv = AffineWeylElement::translation(&vec![1; h])?.multiply(&x.inverse())?;
        Ok(Self {
            a: PolyMatrix::monomial(x),
            witness: Some(Witness::Verschiebung(PolyMatrix::monomial(&t_xinv))),
            field,
        })
    }

    /// The minimal module `H_P` with Frobenius matrix `x_P`.
    pub fn minimal(p: &NewtonPolygon, field: Arc<Field>) -> Result<Self> {
        Self::from_monomial(&x_of_polygon(p)?, field)
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.a
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn height(&self) -> usize {
        self.a.size()
    }

    /// `v_t(det A)`.
    pub fn det_valuation(&self) -> Result<usize> {
        self.a.det(&self.field).val().ok_or(Error::SingularMatrix)
    }

    /// The reduction `M/tM`.
    pub fn bt1(&self) -> Result<Bt1Module> {
        let f = &*self.field;
        let v = match self.witness.as_ref().ok_or(Error::WitnessMissing)? {
            Witness::Verschiebung(c) => c.mod_t(),
            Witness::Factorization { u1, mu, u2 } => {
                let u1_inv = u1.mod_t().inverse(f).ok_or(Error::SingularMatrix)?;
                let u2_inv = u2.mod_t().inverse(f).ok_or(Error::SingularMatrix)?;
                let middle = FqMatrix::from_fn(mu.len(), mu.len(), |i, j| (i == j && mu[i] == 1) as u8);
                u2_inv.mul(&middle, f).mul(&u1_inv, f).sigma(-1, f)
            }
        };
        Bt1Module::new(self.field.clone(), self.a.mod_t(), v)
    }

    /// Slopes of `F` from the `t`-adic Newton polygon of the characteristic
    /// polynomial of `A·σ(A)⋯σ^{r-1}(A)`.
    pub fn newton_polygon(&self) -> Result<NewtonPolygon> {
        let f = &*self.field;
        let r = f.config().r;
        let mut b = self.a.clone();
        for k in 1..r {
            b = b.mul(&self.a.sigma(k as i32, f), f);
        }
        let coeffs = b.char_poly(f);
        let points: Vec<(i64, i64)> = coeffs
            .iter()
            .enumerate()
            .filter_map(|(l, c)| c.val().map(|v| (l as i64, v as i64)))
            .collect();
        let h = self.height() as i64;
        if points.last().map(|p| p.0) != Some(h) {
            return Err(Error::SingularMatrix);
        }
        let hull = lower_hull(&points);
        let mut slopes = Vec::new();
        for seg in hull.windows(2) {
            let (len, rise) = (seg[1].0 - seg[0].0, seg[1].1 - seg[0].1);
            if rise < 0 || rise > len * r as i64 {
                return Err(Error::Newton(format!("segment of length {len} and rise {rise}")));
            }
            slopes.extend(std::iter::repeat_n((rise as u32, (len * r as i64) as u32), len as usize));
        }
        let np = NewtonPolygon::from_slopes(&slopes).map_err(|e| Error::Newton(e.to_string()))?;
        let d = self.det_valuation()?;
        if np.height() != self.height() || np.rise() != d {
            return Err(Error::Newton(format!("endpoint ({}, {}) differs from ({}, {d})", np.height(), np.rise(), self.height())));
        }
        Ok(np)
    }

    /// `g·A·σ(g)^{-1}` given `g` and `g^{-1}`; the witness is transported when present.
    pub fn sigma_conjugate(&self, g: &PolyMatrix, g_inv: &PolyMatrix) -> Self {
        let f = &*self.field;
        let a = g.mul(&self.a, f).mul(&g_inv.sigma(1, f), f);
        let witness = match &self.witness {
            Some(Witness::Verschiebung(c)) => Some(Witness::Verschiebung(g.mul(c, f).mul(&g_inv.sigma(-1, f), f))),
            Some(Witness::Factorization { u1, mu, u2 }) => Some(Witness::Factorization {
                u1: g.mul(u1, f),
                mu: mu.clone(),
                u2: u2.mul(&g_inv.sigma(1, f), f),
            }),
            None => None,
        };
        Self { field: self.field.clone(), a, witness }
    }
}

/// Lower convex hull of points sorted by first coordinate.
fn lower_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &p in points {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b unless it lies strictly below the segment a–p
            if (b.1 - a.1) * (p.0 - a.0) >= (p.1 - a.1) * (b.0 - a.0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Random polynomial matrix of degree `< deg` with invertible constant term.
pub fn random_unimodular<R: Rng + ?Sized>(h: usize, deg: usize, f: &Field, rng: &mut R) -> PolyMatrix {
    loop {
        let m = PolyMatrix::from_fn(h, |_, _| Poly::random(f, deg, rng));
        if m.mod_t().inverse(f).is_some() {
            return m;
        }
    }
}

/// Random `g ∈ GL_h(F_q[t])` together with its polynomial inverse, built as
/// permutation · lower unitriangular · torus · upper unitriangular.
pub fn random_gl_with_inverse<R: Rng + ?Sized>(h: usize, deg: usize, f: &Field, rng: &mut R) -> (PolyMatrix, PolyMatrix) {
    let mut images: Vec<usize> = (0..h).collect();
    for i in (1..h).rev() {
        images.swap(i, rng.gen_range(0..=i));
    }
    let perm = Permutation::from_zero_based(&images);
    let p = PolyMatrix::monomial(&AffineWeylElement::from_finite(perm));
    let p_inv = PolyMatrix::monomial(&AffineWeylElement::from_finite(perm.inverse()));
    let lower = PolyMatrix::from_fn(h, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => Poly::random(f, deg, rng),
        std::cmp::Ordering::Equal => Poly::one(),
        std::cmp::Ordering::Less => Poly::zero(),
    });
    let upper = PolyMatrix::from_fn(h, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => Poly::random(f, deg, rng),
        std::cmp::Ordering::Equal => Poly::one(),
        std::cmp::Ordering::Greater => Poly::zero(),
    });
    let diag: Vec<u8> = (0..h).map(|_| f.random_nonzero(rng)).collect();
    let d = PolyMatrix::from_fn(h, |i, j| if i == j { Poly::constant(diag[i]) } else { Poly::zero() });
    let d_inv = PolyMatrix::from_fn(h, |i, j| {
        if i == j {
            Poly::constant(f.inv(diag[i]).expect("non-zero"))
        } else {
            Poly::zero()
        }
    });
    let g = p.mul(&lower, f).mul(&d, f).mul(&upper, f);
    let g_inv = unitriangular_inverse(&upper, f).mul(&d_inv, f).mul(&unitriangular_inverse(&lower, f), f).mul(&p_inv, f);
    (g, g_inv)
}

/// Inverse of a unitriangular polynomial matrix by substitution.
pub fn unitriangular_inverse(m: &PolyMatrix, f: &Field) -> PolyMatrix {
    let h = m.size();
    let lower = (0..h).all(|i| (i + 1..h).all(|j| m.get(i, j).is_zero()));
    let mut inv = PolyMatrix::zero(h);
    for col in 0..h {
        let mut x = vec![Poly::zero(); h];
        let order: Vec<usize> = if lower { (0..h).collect() } else { (0..h).rev().collect() };
        for &i in &order {
            let mut v = if i == col { Poly::one() } else { Poly::zero() };
            #[allow(clippy::needless_range_loop)]
            for k in 0..h {
                if k != i && !m.get(i, k).is_zero() {
                    v = v.sub(&m.get(i, k).mul(&x[k], f), f);
                }
            }
            x[i] = v;
        }
        inv.set_column(col, x);
    }
    inv
}

/// `A = U_1 ε^μ U_2` with random `U_i` of degree `< deg`.
pub fn sample_shtuka(hd: HodgeDatum, cfg: FieldConfig, deg: usize, seed: u64) -> Result<LocalShtuka> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(hd, cfg, deg, &mut rng)
}

/// The `trial`-th sample of a run, drawn from its own stream of `seed`.
pub fn sample_shtuka_trial(hd: HodgeDatum, cfg: FieldConfig, deg: usize, seed: u64, trial: u64) -> Result<LocalShtuka> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    sample_with(hd, cfg, deg, &mut rng)
}

fn sample_with(hd: HodgeDatum, cfg: FieldConfig, deg: usize, rng: &mut ChaCha8Rng) -> Result<LocalShtuka> {
    if deg == 0 {
        return Err(Error::Parse("sampling degree must be at least 1".into()));
    }
    let field = cfg.field()?;
    let f = &*field;
    let mu = hd.mu();
    let u1 = random_unimodular(hd.h, deg, f, rng);
    let u2 = random_unimodular(hd.h, deg, f, rng);
    let a = u1.mul(&PolyMatrix::diag_t(&mu), f).mul(&u2, f);
    Ok(LocalShtuka { field, a, witness: Some(Witness::Factorization { u1, mu, u2 }) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::bt1::eo_classify;

    fn field() -> Arc<Field> {
        FieldConfig::default().field().unwrap()
    }

    fn np(s: &str) -> NewtonPolygon {
        s.parse().unwrap()
    }

    #[test]
    fn reduction_of_diagonal() {
        let x = AffineWeylElement::translation(&[1, 0]).unwrap();
        let z = LocalShtuka::from_monomial(&x, field()).unwrap().bt1().unwrap();
        assert_eq!(z.f_matrix(), &FqMatrix::from_fn(2, 2, |i, j| (i == j && i == 1) as u8));
        assert_eq!(z.v_matrix(), &FqMatrix::from_fn(2, 2, |i, j| (i == j && i == 0) as u8));

        let etale = LocalShtuka::from_monomial(&AffineWeylElement::identity(1), field()).unwrap().bt1().unwrap();
        assert_eq!(etale.apply_f(&[1]), vec![1]);
        assert_eq!(etale.apply_v(&[1]), vec![0]);
    }

    #[test]
    fn minimal_module_reduction_has_nilpotent_frobenius() {
        let z = LocalShtuka::minimal(&np("1/2x2"), field()).unwrap().bt1().unwrap();
        assert_eq!(z.rank_f(), 1);
        for e in [[1u8, 0], [0, 1]] {
            assert_eq!(z.apply_f(&z.apply_f(&e)), vec![0, 0]);
        }
    }

    #[test]
    fn newton_examples() {
        let diag = LocalShtuka::from_monomial(&AffineWeylElement::translation(&[1, 0]).unwrap(), field()).unwrap();
        assert_eq!(diag.newton_polygon().unwrap(), np("0,1"));
        let ss = LocalShtuka::minimal(&np("1/2x2"), field()).unwrap();
        assert_eq!(ss.newton_polygon().unwrap(), np("1/2x2"));
        let etale = LocalShtuka::from_monomial(&AffineWeylElement::identity(1), field()).unwrap();
        assert_eq!(etale.newton_polygon().unwrap(), np("0"));
    }

    #[test]
    fn minimal_modules_have_their_polygon() {
        for h in 1..=5 {
            for d in 0..=h {
                for p in HodgeDatum::new(h, d).unwrap().polygons() {
                    assert_eq!(LocalShtuka::minimal(&p, field()).unwrap().newton_polygon().unwrap(), p);
                }
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_and_has_right_hodge_type() {
        let hd = HodgeDatum::new(2, 1).unwrap();
        let a = sample_shtuka(hd, FieldConfig::default(), 2, 42).unwrap();
        let b = sample_shtuka(hd, FieldConfig::default(), 2, 42).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        for seed in 0..30 {
            let s = sample_shtuka_trial(HodgeDatum::new(3, 1).unwrap(), FieldConfig::default(), 2, 7, seed).unwrap();
            assert_eq!(s.det_valuation().unwrap(), 1);
            let z = s.bt1().unwrap();
            assert_eq!(z.rank_f(), 2);
            eo_classify(&z, HodgeDatum::new(3, 1).unwrap()).unwrap();
        }
    }

    #[test]
    fn identity_factors_give_the_hodge_cocharacter() {
        let hd = HodgeDatum::new(3, 2).unwrap();
        let id = PolyMatrix::identity(3);
        let sh = LocalShtuka::new(
            PolyMatrix::diag_t(&hd.mu()),
            field(),
            Some(Witness::Factorization { u1: id.clone(), mu: hd.mu(), u2: id }),
        );
        assert_eq!(sh.bt1().unwrap().f_matrix().rank(sh.field()), 1);
    }

    #[test]
    fn gl_inverse_is_exact() {
        let f = field();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for h in 1..=4 {
            let (g, g_inv) = random_gl_with_inverse(h, 3, &f, &mut rng);
            assert_eq!(g.mul(&g_inv, &f), PolyMatrix::identity(h));
        }
    }

    #[test]
    fn newton_polygon_is_sigma_conjugation_invariant() {
        let f = field();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for seed in 0..20 {
            let hd = HodgeDatum::new(2 + (seed % 2) as usize, 1).unwrap();
            let sh = sample_shtuka(hd, FieldConfig::default(), 2, seed).unwrap();
            let (g, g_inv) = random_gl_with_inverse(hd.h, 2, &f, &mut rng);
            let conj = sh.sigma_conjugate(&g, &g_inv);
            assert_eq!(conj.newton_polygon().unwrap(), sh.newton_polygon().unwrap());
            assert_eq!(
                eo_classify(&conj.bt1().unwrap(), hd).unwrap(),
                eo_classify(&sh.bt1().unwrap(), hd).unwrap()
            );
        }
    }
}
