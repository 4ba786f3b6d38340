//! Lifting a 1-truncated module with a compatible filtration to a local shtuka
//! with prescribed Newton polygon.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use super::bt1::Bt1Module;
use super::field::{Elem, Field};
use super::matrix::PolyMatrix;
use super::poly::Poly;
use super::shtuka::{LocalShtuka, Witness};
use crate::error::{Error, Result};
use crate::polygon::NewtonPolygon;
use crate::semimodule::{cochar_to_beginning, enumerate_cochar_block, SemimoduleBeginning};

/// Basis label `(block, degree)`.
pub type Pair = (usize, i64);

/// `(i', j') ≺ (i, j)`: an earlier block, or the same block and a larger degree.
pub fn precedes(a: Pair, b: Pair) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 > b.1)
}

/// A compatible filtration with Newton polygon `P`, presented by its
/// semimodule beginnings and the correction coefficients of `F` and `V`.
///
/// `f_corrections[(i, j)]` holds the `a`-coefficients of `F(f^i_j)` for each
/// `j` with `j + n_i ∈ C_i`, and `v_corrections[(i, j)]` the `c`-coefficients
/// of `V(f^i_j)` for each `j` with `j + m_i ∈ C_i`. The remaining coefficients
/// are forced: `b = −c` and `d = −a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationData {
    pub polygon: NewtonPolygon,
    pub beginnings: Vec<SemimoduleBeginning>,
    pub f_corrections: BTreeMap<Pair, BTreeMap<Pair, Elem>>,
    pub v_corrections: BTreeMap<Pair, BTreeMap<Pair, Elem>>,
}

impl FiltrationData {
    /// Zero corrections: the graded module `⊕ Z_{C_i}`.
    pub fn graded(polygon: NewtonPolygon, beginnings: Vec<SemimoduleBeginning>) -> Result<Self> {
        let data = Self { polygon, beginnings, f_corrections: BTreeMap::new(), v_corrections: BTreeMap::new() };
        data.validate()?;
        Ok(data)
    }

    /// Uniformly random beginnings and corrections.
    pub fn random<R: Rng + ?Sized>(polygon: &NewtonPolygon, f: &Field, rng: &mut R) -> Result<Self> {
        let mut beginnings = Vec::new();
        for &(n, m) in polygon.blocks() {
            let options = enumerate_cochar_block(n, m)?;
            let lam = &options[rng.gen_range(0..options.len())];
            beginnings.push(cochar_to_beginning(lam, n, m)?);
        }
        let mut data = Self::graded(polygon.clone(), beginnings)?;
        let basis = data.basis();
        for &(i, j) in &basis {
            let (n, m) = data.block(i);
            for (step, target) in [(n, &mut data.f_corrections), (m, &mut data.v_corrections)] {
                if data.beginnings[i].contains(j + step as i64) {
                    let head = (i, j + step as i64);
                    let coeffs: BTreeMap<Pair, Elem> = basis
                        .iter()
                        .filter(|&&p| precedes(p, head))
                        .map(|&p| (p, f.random(rng)))
                        .filter(|&(_, c)| c != 0)
                        .collect();
                    target.insert((i, j), coeffs);
                }
            }
        }
        data.validate()?;
        Ok(data)
    }

    fn block(&self, i: usize) -> (u32, u32) {
        self.polygon.blocks()[i]
    }

    /// Basis labels ordered by block, then decreasing degree.
    pub fn basis(&self) -> Vec<Pair> {
        let mut out = Vec::new();
        for (i, c) in self.beginnings.iter().enumerate() {
            out.extend(c.elements().iter().rev().map(|&j| (i, j)));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InconsistentFiltration(msg));
        if self.beginnings.len() != self.polygon.blocks().len() {
            return bad(format!("{} beginnings for {} blocks", self.beginnings.len(), self.polygon.blocks().len()));
        }
        for (i, c) in self.beginnings.iter().enumerate() {
            if (c.n(), c.m()) != self.block(i) {
                return bad(format!("beginning {i} has type ({}, {})", c.n(), c.m()));
            }
        }
        for (map, is_f) in [(&self.f_corrections, true), (&self.v_corrections, false)] {
            for (&(i, j), coeffs) in map {
                if i >= self.beginnings.len() || !self.beginnings[i].contains(j) {
                    return bad(format!("correction at unknown pair ({i}, {j})"));
                }
                let (n, m) = self.block(i);
                let step = if is_f { n } else { m } as i64;
                if !self.beginnings[i].contains(j + step) {
                    return bad(format!("correction at inactive pair ({i}, {j})"));
                }
                for &p in coeffs.keys() {
                    let known = p.0 < self.beginnings.len() && self.beginnings[p.0].contains(p.1);
                    if !known || !precedes(p, (i, j + step)) {
                        return bad(format!("coefficient index {p:?} does not precede ({i}, {})", j + step));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Column vectors of `F` and `V` on the basis, over `F_q[t]`; with `t = 0`
/// this is the truncated module itself.
struct Operators {
    f_cols: Vec<Vec<Poly>>,
    v_cols: Vec<Vec<Poly>>,
}

fn build_operators(data: &FiltrationData, f: &Field, with_t: bool) -> Operators {
    let basis = data.basis();
    let h = basis.len();
    let index = |p: Pair| basis.iter().position(|&q| q == p).expect("basis label");
    let unit = |k: usize| -> Vec<Poly> { (0..h).map(|i| if i == k { Poly::one() } else { Poly::zero() }).collect() };
    let t_unit = |k: usize| -> Vec<Poly> {
        if with_t {
            (0..h).map(|i| if i == k { Poly::monomial(1, 1) } else { Poly::zero() }).collect()
        } else {
            vec![Poly::zero(); h]
        }
    };
    let axpy = |acc: &mut Vec<Poly>, c: Elem, v: &[Poly]| {
        for (x, y) in acc.iter_mut().zip(v) {
            *x = x.add(&y.scale(c, f), f);
        }
    };
    let empty = BTreeMap::new();
    let mut f_cols: Vec<Option<Vec<Poly>>> = vec![None; h];
    let mut v_cols: Vec<Option<Vec<Poly>>> = vec![None; h];
    // `basis` lists blocks in increasing order and degrees decreasingly, which is the induction order
    for &(i, j) in &basis {
        let (n, m) = data.block(i);
        let c = &data.beginnings[i];
        let k = index((i, j));

        let col = if c.contains(j + n as i64) {
            let mut col = unit(index((i, j + n as i64)));
            for (&p, &a) in data.f_corrections.get(&(i, j)).unwrap_or(&empty) {
                axpy(&mut col, a, &unit(index(p)));
            }
            col
        } else {
            // f_j = V(f_{j−m}) + Σ b f with b = −c
            let mut col = t_unit(index((i, j - m as i64)));
            for (&p, &cc) in data.v_corrections.get(&(i, j - m as i64)).unwrap_or(&empty) {
                let b = f.neg(cc);
                axpy(&mut col, f.frob(b), f_cols[index(p)].as_ref().expect("defined earlier"));
            }
            col
        };
        f_cols[k] = Some(col);

        let col = if c.contains(j + m as i64) {
            let mut col = unit(index((i, j + m as i64)));
            for (&p, &cc) in data.v_corrections.get(&(i, j)).unwrap_or(&empty) {
                axpy(&mut col, cc, &unit(index(p)));
            }
            col
        } else {
            // f_j = F(f_{j−n}) + Σ d f with d = −a
            let mut col = t_unit(index((i, j - n as i64)));
            for (&p, &a) in data.f_corrections.get(&(i, j - n as i64)).unwrap_or(&empty) {
                let d = f.neg(a);
                axpy(&mut col, f.frob_inv(d), v_cols[index(p)].as_ref().expect("defined earlier"));
            }
            col
        };
        v_cols[k] = Some(col);
    }
    Operators {
        f_cols: f_cols.into_iter().map(|c| c.expect("all defined")).collect(),
        v_cols: v_cols.into_iter().map(|c| c.expect("all defined")).collect(),
    }
}

fn to_poly_matrix(cols: &[Vec<Poly>]) -> PolyMatrix {
    let mut m = PolyMatrix::zero(cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c.clone());
    }
    m
}

/// The filtered 1-truncated module `Z` presented by `data`, in the basis `(f^i_j)`.
pub fn truncated_module(data: &FiltrationData, field: Arc<Field>) -> Result<Bt1Module> {
    data.validate()?;
    let ops = build_operators(data, &field, false);
    let f = to_poly_matrix(&ops.f_cols).mod_t();
    let v = to_poly_matrix(&ops.v_cols).mod_t();
    Bt1Module::new(field, f, v)
}

/// A lift that passed its structural checks.
#[derive(Clone, Debug)]
pub struct Lift {
    pub shtuka: LocalShtuka,
    pub block_ranges: Vec<std::ops::Range<usize>>,
}

/// The Dieudonné module `M` with basis `(g^i_j)`, as a local shtuka whose
/// witness is the matrix of `V`.
pub fn lift_from_filtration(data: &FiltrationData, field: Arc<Field>) -> Result<Lift> {
    data.validate()?;
    let f = &*field;
    let ops = build_operators(data, f, true);
    let a = to_poly_matrix(&ops.f_cols);
    let c = to_poly_matrix(&ops.v_cols);
    let h = a.size();

    let fail = |msg: &str| Err(Error::InconsistentFiltration(msg.to_string()));
    if a.mul(&c.sigma(1, f), f) != PolyMatrix::identity(h).shift_up(1) {
        return fail("F∘V differs from t");
    }

    let mut block_ranges = Vec::new();
    let mut start = 0;
    for b in &data.beginnings {
        block_ranges.push(start..start + b.height());
        start += b.height();
    }
    let block_of = |k: usize| block_ranges.iter().position(|r| r.contains(&k)).expect("in range");
    for i in 0..h {
        for j in 0..h {
            if block_of(i) > block_of(j) && (!a.get(i, j).is_zero() || !c.get(i, j).is_zero()) {
                return fail("block submodules are not stable");
            }
        }
    }

    let shtuka = LocalShtuka::new(a, field.clone(), Some(Witness::Verschiebung(c)));
    let z = shtuka.bt1()?;
    let expected = truncated_module(data, field.clone())?;
    if z.f_matrix() != expected.f_matrix() || z.v_matrix() != expected.v_matrix() {
        return fail("reduction differs from the truncated module");
    }

    for (r, &(n, m)) in block_ranges.iter().zip(data.polygon.blocks()) {
        let block = LocalShtuka::new(shtuka.matrix().submatrix(r.clone()), field.clone(), None);
        let single = NewtonPolygon::from_blocks(vec![(n, m)])?;
        if block.newton_polygon()? != single {
            return fail("diagonal block is not isoclinic of the expected slope");
        }
    }
    if shtuka.newton_polygon()? != data.polygon {
        return fail("Newton polygon of the lift differs from the target");
    }
    Ok(Lift { shtuka, block_ranges })
}

/// Sanity check that `Z` is the module of `data` without reference to a lift.
pub fn truncation_matches(lift: &Lift, data: &FiltrationData) -> Result<bool> {
    let z = lift.shtuka.bt1()?;
    let expected = truncated_module(data, lift.shtuka.field().clone())?;
    Ok(z.f_matrix() == expected.f_matrix() && z.v_matrix() == expected.v_matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::field::FieldConfig;
    use crate::polygon::{x_block, HodgeDatum};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn field() -> Arc<Field> {
        FieldConfig::default().field().unwrap()
    }

    #[test]
    fn graded_single_block_is_the_minimal_module() {
        for (n, m) in [(1, 1), (1, 2), (2, 3), (0, 1), (1, 0)] {
            let h = (n + m) as usize;
            let c = cochar_to_beginning(&vec![0; h], n, m).unwrap();
            let p = NewtonPolygon::from_blocks(vec![(n, m)]).unwrap();
            let lift = lift_from_filtration(&FiltrationData::graded(p, vec![c]).unwrap(), field()).unwrap();
            assert_eq!(lift.shtuka.matrix(), &PolyMatrix::monomial(&x_block(n, m).unwrap()));
        }
    }

    #[test]
    fn graded_two_blocks_is_block_diagonal() {
        let p: NewtonPolygon = "0,1/2x2".parse().unwrap();
        let cs = vec![cochar_to_beginning(&[0], 0, 1).unwrap(), cochar_to_beginning(&[0, 1], 1, 1).unwrap()];
        let lift = lift_from_filtration(&FiltrationData::graded(p, cs).unwrap(), field()).unwrap();
        let a = lift.shtuka.matrix();
        assert!(a.get(0, 1).is_zero() && a.get(0, 2).is_zero());
    }

    #[test]
    fn random_lifts_have_the_target_polygon() {
        let f = field();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for h in 1..=4 {
            for d in 0..=h {
                for p in HodgeDatum::new(h, d).unwrap().polygons() {
                    for _ in 0..5 {
                        let data = FiltrationData::random(&p, &f, &mut rng).unwrap();
                        let lift = lift_from_filtration(&data, f.clone()).unwrap();
                        assert!(truncation_matches(&lift, &data).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_indices() {
        let p: NewtonPolygon = "1/2x2".parse().unwrap();
        let c = cochar_to_beginning(&[0, 0], 1, 1).unwrap();
        let mut data = FiltrationData::graded(p, vec![c]).unwrap();
        // beginning {1, 2}: F is active at 1; (0, 1) does not precede (0, 2)
        data.f_corrections.insert((0, 1), [((0, 1), 1)].into_iter().collect());
        assert!(matches!(data.validate(), Err(Error::InconsistentFiltration(_))));
    }
}
