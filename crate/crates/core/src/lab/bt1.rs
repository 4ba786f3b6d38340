//! 1-truncated Dieudonné modules over `F_q`, canonical filtrations and EO classification.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use super::field::{Elem, Field, FieldConfig};
use super::matrix::{FqMatrix, Subspace};
use super::shtuka::LocalShtuka;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::polygon::HodgeDatum;
use crate::semimodule::SemimoduleBeginning;

/// `F(x) = f·σ(x)` and `V(x) = v·σ^{-1}(x)` on `F_q^h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bt1Module {
    field: Arc<Field>,
    f: FqMatrix,
    v: FqMatrix,
}

/// `(dim U, dim F(U), dim V^{-1}(U))` for each step of the canonical flag.
pub type Signature = Vec<(usize, usize, usize)>;

impl Bt1Module {
    /// Checks `Im F = ker V` and `Im V = ker F`.
    pub fn new(field: Arc<Field>, f: FqMatrix, v: FqMatrix) -> Result<Self> {
        let h = f.rows();
        if f.cols() != h || v.rows() != h || v.cols() != h {
            return Err(Error::SizeMismatch(f.rows(), v.rows()));
        }
        let z = Self { field, f, v };
        let fld = &*z.field;
        let im_f = z.f.column_space(fld);
        let im_v = z.v.column_space(fld);
        let ker_v = Subspace::span(h, z.v.kernel(fld), fld).sigma(1, fld);
        let ker_f = Subspace::span(h, z.f.kernel(fld), fld).sigma(-1, fld);
        if im_f != ker_v {
            return Err(Error::InvalidBt1("image of F differs from kernel of V".into()));
        }
        if im_v != ker_f {
            return Err(Error::InvalidBt1("image of V differs from kernel of F".into()));
        }
        Ok(z)
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.f.rows()
    }

    pub fn f_matrix(&self) -> &FqMatrix {
        &self.f
    }

    pub fn v_matrix(&self) -> &FqMatrix {
        &self.v
    }

    pub fn apply_f(&self, x: &[Elem]) -> Vec<Elem> {
        let sx: Vec<Elem> = x.iter().map(|&a| self.field.frob(a)).collect();
        self.f.mul_vec(&sx, &self.field)
    }

    pub fn apply_v(&self, x: &[Elem]) -> Vec<Elem> {
        let sx: Vec<Elem> = x.iter().map(|&a| self.field.frob_inv(a)).collect();
        self.v.mul_vec(&sx, &self.field)
    }

    pub fn rank_f(&self) -> usize {
        self.f.rank(&self.field)
    }

    /// `F(U) = f·σ(U)`.
    pub fn f_image(&self, u: &Subspace) -> Subspace {
        u.sigma(1, &self.field).image(&self.f, &self.field)
    }

    /// `V^{-1}(U) = σ(v^{-1}(U))`.
    pub fn v_preimage(&self, u: &Subspace) -> Subspace {
        u.preimage(&self.v, &self.field).sigma(1, &self.field)
    }

    /// Coarsest flag containing `0` and `Z` that is stable under `F(·)` and `V^{-1}(·)`.
    pub fn canonical_filtration(&self) -> Result<CanonicalFlag> {
        let h = self.dim();
        let mut found: BTreeSet<Subspace> = [Subspace::zero(h), Subspace::full(h)].into_iter().collect();
        let mut frontier: Vec<Subspace> = found.iter().cloned().collect();
        let mut rounds = 0;
        while !frontier.is_empty() {
            rounds += 1;
            if rounds > 4 * h + 4 {
                return Err(Error::Classification("canonical filtration did not converge".into()));
            }
            let mut next = Vec::new();
            for u in &frontier {
                for w in [self.f_image(u), self.v_preimage(u)] {
                    if found.insert(w.clone()) {
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        let mut flag: Vec<Subspace> = found.into_iter().collect();
        flag.sort_by_key(Subspace::dim);
        for pair in flag.windows(2) {
            if pair[0].dim() == pair[1].dim() || !pair[1].contains_subspace(&pair[0], &self.field) {
                return Err(Error::Classification("canonical filtration is not a chain".into()));
            }
        }
        let signature = flag
            .iter()
            .map(|u| (u.dim(), self.f_image(u).dim(), self.v_preimage(u).dim()))
            .collect();
        Ok(CanonicalFlag { flag, signature })
    }
}

#[derive(Clone, Debug)]
pub struct CanonicalFlag {
    pub flag: Vec<Subspace>,
    pub signature: Signature,
}

impl CanonicalFlag {
    pub fn dims(&self) -> Vec<usize> {
        self.flag.iter().map(Subspace::dim).collect()
    }
}

type ReferenceTable = Vec<(Signature, Permutation)>;

fn references(hd: HodgeDatum, cfg: FieldConfig) -> Result<Arc<ReferenceTable>> {
    type Cache = Mutex<HashMap<(HodgeDatum, FieldConfig), Arc<ReferenceTable>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("reference cache poisoned").get(&(hd, cfg)) {
        return Ok(t.clone());
    }
    let field = cfg.field()?;
    let mut table = Vec::new();
    for w in hd.eo_types() {
        let sh = LocalShtuka::from_monomial(&hd.eo_representative(&w)?, field.clone())?;
        let sig = sh.bt1()?.canonical_filtration()?.signature;
        if let Some((_, other)) = table.iter().find(|(s, _)| *s == sig) {
            return Err(Error::Classification(format!(
                "reference modules for {w} and {other} share a canonical signature"
            )));
        }
        table.push((sig, w));
    }
    let table = Arc::new(table);
    cache.lock().expect("reference cache poisoned").insert((hd, cfg), table.clone());
    Ok(table)
}

/// Signatures of the reference modules `Z_w`, one per EO type.
pub fn reference_signatures(hd: HodgeDatum, cfg: FieldConfig) -> Result<Vec<(Signature, Permutation)>> {
    Ok(references(hd, cfg)?.as_ref().clone())
}

/// The EO type `w ∈ ^IW` with `Z ≅ Z_w`.
pub fn eo_classify(z: &Bt1Module, hd: HodgeDatum) -> Result<Permutation> {
    if z.dim() != hd.h || z.rank_f() != hd.h - hd.d {
        return Err(Error::Classification(format!(
            "module of dimension {} and rank F {} does not have type ({}, {})",
            z.dim(),
            z.rank_f(),
            hd.h,
            hd.d
        )));
    }
    let sig = z.canonical_filtration()?.signature;
    references(hd, z.field().config())?
        .iter()
        .find(|(s, _)| *s == sig)
        .map(|(_, w)| *w)
        .ok_or_else(|| Error::Classification(format!("no reference module with signature {sig:?}")))
}

/// The graded module `Z_C` with its basis degrees.
#[derive(Clone, Debug, Serialize)]
pub struct GradedBt1 {
    #[serde(skip)]
    pub module: Bt1Module,
    pub degrees: Vec<i64>,
}

/// `Z_C`: basis `(e_j)_{j∈C}` in increasing `j`, `F e_j = e_{j+n}` and
/// `V e_j = e_{j+m}` when the target lies in `C`, zero otherwise.
pub fn graded_bt1_from_beginning(c: &SemimoduleBeginning, field: Arc<Field>) -> Result<GradedBt1> {
    let degrees: Vec<i64> = c.elements().iter().copied().collect();
    let h = degrees.len();
    let index = |j: i64| degrees.iter().position(|&d| d == j);
    let mut f = FqMatrix::zero(h, h);
    let mut v = FqMatrix::zero(h, h);
    for (k, &j) in degrees.iter().enumerate() {
        if let Some(t) = index(j + c.n() as i64) {
            f.set(t, k, 1);
        }
        if let Some(t) = index(j + c.m() as i64) {
            v.set(t, k, 1);
        }
    }
    Ok(GradedBt1 { module: Bt1Module::new(field, f, v)?, degrees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::AffineWeylElement;
    use crate::polygon::NewtonPolygon;

    fn field() -> Arc<Field> {
        FieldConfig::default().field().unwrap()
    }

    fn monomial_bt1(lam: &[i64], perm: &[usize]) -> Bt1Module {
        let x = AffineWeylElement::new(lam, Permutation::from_one_line(perm).unwrap()).unwrap();
        LocalShtuka::from_monomial(&x, field()).unwrap().bt1().unwrap()
    }

    #[test]
    fn graded_examples() {
        let c = SemimoduleBeginning::new([0, 1], 1, 1).unwrap();
        let z = graded_bt1_from_beginning(&c, field()).unwrap().module;
        assert_eq!(z.apply_f(&[1, 0]), vec![0, 1]);
        assert_eq!(z.apply_f(&[0, 1]), vec![0, 0]);
        assert_eq!(z.apply_v(&[1, 0]), vec![0, 1]);
        assert_eq!(z.apply_v(&[0, 1]), vec![0, 0]);

        let c = SemimoduleBeginning::new([1, 2, 3], 1, 2).unwrap();
        let z = graded_bt1_from_beginning(&c, field()).unwrap().module;
        assert_eq!(z.apply_f(&[1, 0, 0]), vec![0, 1, 0]);
        assert_eq!(z.apply_f(&[0, 1, 0]), vec![0, 0, 1]);
        assert_eq!(z.apply_f(&[0, 0, 1]), vec![0, 0, 0]);
        assert_eq!(z.apply_v(&[1, 0, 0]), vec![0, 0, 1]);
        assert_eq!(z.apply_v(&[0, 1, 0]), vec![0, 0, 0]);

        let c = SemimoduleBeginning::new([0], 0, 1).unwrap();
        let z = graded_bt1_from_beginning(&c, field()).unwrap().module;
        assert_eq!(z.apply_f(&[1]), vec![1]);
        assert_eq!(z.apply_v(&[1]), vec![0]);
    }

    #[test]
    fn graded_modules_are_bt1_for_all_small_beginnings() {
        for h in 1..=7u32 {
            for n in 0..=h {
                let Ok(lams) = crate::semimodule::enumerate_cochar_block(n, h - n) else { continue };
                for lam in lams {
                    let c = crate::semimodule::cochar_to_beginning(&lam, n, h - n).unwrap();
                    let z = graded_bt1_from_beginning(&c, field()).unwrap();
                    assert_eq!(z.module.rank_f(), (h - n) as usize);
                }
            }
        }
    }

    #[test]
    fn canonical_filtration_examples() {
        let ord = monomial_bt1(&[1, 0], &[1, 2]);
        let cf = ord.canonical_filtration().unwrap();
        assert_eq!(cf.dims(), vec![0, 1, 2]);
        assert_eq!(cf.signature[1].1, 1);

        let ss = monomial_bt1(&[0, 1], &[2, 1]);
        let cf = ss.canonical_filtration().unwrap();
        assert_eq!(cf.dims(), vec![0, 1, 2]);
        assert_eq!(cf.signature[1].1, 0);

        let empty = Bt1Module::new(field(), FqMatrix::zero(0, 0), FqMatrix::zero(0, 0)).unwrap();
        assert_eq!(empty.canonical_filtration().unwrap().dims(), vec![0]);
    }

    #[test]
    fn classification_examples() {
        let hd = HodgeDatum::new(2, 1).unwrap();
        let p: NewtonPolygon = "1/2x2".parse().unwrap();
        let z = LocalShtuka::minimal(&p, field()).unwrap().bt1().unwrap();
        assert_eq!(eo_classify(&z, hd).unwrap().one_line(), vec![1, 2]);
        assert_eq!(eo_classify(&monomial_bt1(&[1, 0], &[1, 2]), hd).unwrap().one_line(), vec![2, 1]);
        let z = monomial_bt1(&[0], &[1]);
        assert_eq!(eo_classify(&z, HodgeDatum::new(1, 0).unwrap()).unwrap().one_line(), vec![1]);
    }

    #[test]
    fn references_are_distinct_up_to_height_six() {
        for h in 1..=6 {
            for d in 0..=h {
                let hd = HodgeDatum::new(h, d).unwrap();
                let refs = reference_signatures(hd, FieldConfig::default()).unwrap();
                assert_eq!(refs.len(), hd.eo_types().len());
            }
        }
    }

    #[test]
    fn rejects_non_exact_pairs() {
        let f = FqMatrix::identity(2);
        assert!(Bt1Module::new(field(), f.clone(), f).is_err());
    }
}
