//! Matrices over `F_q` and over `F_q[t]`, subspaces, characteristic polynomials.

use rand::Rng;

use super::field::{Elem, Field};
use super::poly::Poly;
use crate::affine::AffineWeylElement;

/// Dense row-major matrix over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FqMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl FqMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<Elem>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, f: &Field, rng: &mut R) -> Self {
        Self::from_fn(rows, cols, |_, _| f.random(rng))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul(&self, other: &Self, f: &Field) -> Self {
        assert_eq!(self.cols, other.rows);
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(0, |acc, k| f.add(acc, f.mul(self.get(i, k), other.get(k, j))))
        })
    }

    pub fn mul_vec(&self, v: &[Elem], f: &Field) -> Vec<Elem> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(0, |acc, k| f.add(acc, f.mul(self.get(i, k), v[k]))))
            .collect()
    }

    /// `σ^k` entrywise.
    pub fn sigma(&self, k: i32, f: &Field) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| f.frob_pow(a, k)).collect() }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, f: &Field) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&i| m.get(i, col) != 0) else { continue };
            for j in 0..m.cols {
                m.data.swap(pr * m.cols + j, row * m.cols + j);
            }
            let inv = f.inv(m.get(row, col)).expect("pivot is non-zero");
            for j in 0..m.cols {
                m.set(row, j, f.mul(m.get(row, j), inv));
            }
            for i in 0..m.rows {
                let c = m.get(i, col);
                if i != row && c != 0 {
                    for j in 0..m.cols {
                        let v = f.sub(m.get(i, j), f.mul(c, m.get(row, j)));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, f: &Field) -> usize {
        self.rref(f).1.len()
    }

    /// Basis of the right kernel.
    pub fn kernel(&self, f: &Field) -> Vec<Vec<Elem>> {
        let (r, pivots) = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0; self.cols];
                v[fc] = 1;
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(row, fc));
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self, f: &Field) -> Option<Self> {
        let n = self.rows;
        if n != self.cols {
            return None;
        }
        let aug = Self::from_fn(n, 2 * n, |i, j| if j < n { self.get(i, j) } else { (j - n == i) as Elem });
        let (r, pivots) = aug.rref(f);
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| r.get(i, n + j)))
    }

    pub fn column_space(&self, f: &Field) -> Subspace {
        Subspace::span(self.rows, (0..self.cols).map(|j| self.column(j)), f)
    }
}

/// Subspace of `F_q^n` in canonical reduced-echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Elem>>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Self { ambient: n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Self {
            ambient: n,
            basis: (0..n).map(|i| (0..n).map(|j| (i == j) as Elem).collect()).collect(),
        }
    }

    pub fn span(n: usize, vectors: impl IntoIterator<Item = Vec<Elem>>, f: &Field) -> Self {
        let rows: Vec<Vec<Elem>> = vectors.into_iter().collect();
        if rows.is_empty() {
            return Self::zero(n);
        }
        let m = FqMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
        let (r, pivots) = m.rref(f);
        Self { ambient: n, basis: (0..pivots.len()).map(|i| (0..n).map(|j| r.get(i, j)).collect()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<Elem>] {
        &self.basis
    }

    pub fn contains_subspace(&self, other: &Self, f: &Field) -> bool {
        Self::span(self.ambient, self.basis.iter().chain(&other.basis).cloned(), f).dim() == self.dim()
    }

    /// `σ^k(U)`.
    pub fn sigma(&self, k: i32, f: &Field) -> Self {
        Self::span(self.ambient, self.basis.iter().map(|v| v.iter().map(|&a| f.frob_pow(a, k)).collect()), f)
    }

    /// Image under the linear map `m`.
    pub fn image(&self, m: &FqMatrix, f: &Field) -> Self {
        Self::span(m.rows(), self.basis.iter().map(|v| m.mul_vec(v, f)), f)
    }

    /// Preimage under the linear map `m`.
    pub fn preimage(&self, m: &FqMatrix, f: &Field) -> Self {
        // rows of `ann` cut out `self`
        let as_rows = FqMatrix::from_fn(self.dim().max(1), self.ambient, |i, j| {
            self.basis.get(i).map_or(0, |v| v[j])
        });
        let ann = as_rows.kernel(f);
        if ann.is_empty() {
            return Self::full(m.cols());
        }
        let n = FqMatrix::from_fn(ann.len(), self.ambient, |i, j| ann[i][j]);
        let composite = n.mul(m, f);
        Self::span(m.cols(), composite.kernel(f), f)
    }
}

/// Square matrix over `F_q[t]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    n: usize,
    data: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zero(n: usize) -> Self {
        Self { n, data: vec![Poly::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { Poly::one() } else { Poly::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Poly) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Constant matrix.
    pub fn from_fq(m: &FqMatrix) -> Self {
        Self::from_fn(m.rows(), |i, j| Poly::constant(m.get(i, j)))
    }

    /// Monomial matrix with `t^{λ_{u(j)}}` at `(u(j), j)`; translation parts must be non-negative.
    pub fn monomial(x: &AffineWeylElement) -> Self {
        let mut m = Self::zero(x.rank());
        for j in 0..x.rank() {
            let (row, e) = x.column_entry(j);
            assert!(e >= 0, "negative exponent in a polynomial matrix");
            m.set(row, j, Poly::monomial(1, e as usize));
        }
        m
    }

    /// Diagonal `diag(t^{μ_1}, …)`.
    pub fn diag_t(mu: &[i64]) -> Self {
        Self::from_fn(mu.len(), |i, j| if i == j { Poly::monomial(1, mu[i] as usize) } else { Poly::zero() })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Poly) {
        self.data[i * self.n + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Poly> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn set_column(&mut self, j: usize, col: Vec<Poly>) {
        for (i, p) in col.into_iter().enumerate() {
            self.set(i, j, p);
        }
    }

    pub fn mul(&self, other: &Self, f: &Field) -> Self {
        assert_eq!(self.n, other.n);
        Self::from_fn(self.n, |i, j| {
            (0..self.n).fold(Poly::zero(), |acc, k| acc.add(&self.get(i, k).mul(other.get(k, j), f), f))
        })
    }

    pub fn mul_vec(&self, v: &[Poly], f: &Field) -> Vec<Poly> {
        (0..self.n)
            .map(|i| (0..self.n).fold(Poly::zero(), |acc, k| acc.add(&self.get(i, k).mul(&v[k], f), f)))
            .collect()
    }

    pub fn sub(&self, other: &Self, f: &Field) -> Self {
        Self::from_fn(self.n, |i, j| self.get(i, j).sub(other.get(i, j), f))
    }

    /// `σ^k` applied to all coefficients.
    pub fn sigma(&self, k: i32, f: &Field) -> Self {
        Self { n: self.n, data: self.data.iter().map(|p| p.sigma(k, f)).collect() }
    }

    /// Multiplication by `t^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        Self { n: self.n, data: self.data.iter().map(|p| p.shift_up(k)).collect() }
    }

    pub fn mod_t(&self) -> FqMatrix {
        FqMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).coeff(0))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Poly::is_zero)
    }

    /// Leading principal-block submatrix on the index range `r`.
    pub fn submatrix(&self, r: std::ops::Range<usize>) -> Self {
        Self::from_fn(r.len(), |i, j| self.get(r.start + i, r.start + j).clone())
    }

    /// Coefficients `a_0 = 1, a_1, …, a_n` of `det(X − M) = Σ a_k X^{n−k}`,
    /// computed without division.
    pub fn char_poly(&self, f: &Field) -> Vec<Poly> {
        // p_{k+1} = (X − a) p_k − r·adj(X − A_k)·c with
        // adj(X − A_k) = Σ_i X^{k−1−i} Σ_{j≤i} a_{i−j} A_k^j.
        let mut coeffs = vec![Poly::one()];
        for k in 0..self.n {
            let a = self.get(k, k);
            let lead = self.submatrix(0..k);
            let row: Vec<Poly> = (0..k).map(|j| self.get(k, j).clone()).collect();
            let mut col: Vec<Poly> = (0..k).map(|i| self.get(i, k).clone()).collect();
            let mut s = Vec::with_capacity(k);
            for _ in 0..k {
                s.push(row.iter().zip(&col).fold(Poly::zero(), |acc, (x, y)| acc.add(&x.mul(y, f), f)));
                col = lead.mul_vec(&col, f);
            }
            let mut next = vec![Poly::zero(); k + 2];
            for (l, c) in coeffs.iter().enumerate() {
                next[l] = next[l].add(c, f);
                next[l + 1] = next[l + 1].sub(&c.mul(a, f), f);
            }
            for i in 0..k {
                let mut term = Poly::zero();
                for j in 0..=i {
                    term = term.add(&coeffs[i - j].mul(&s[j], f), f);
                }
                // X^{k−1−i} contributes to coefficient index (k+1) − (k−1−i) = i + 2
                next[i + 2] = next[i + 2].sub(&term, f);
            }
            coeffs = next;
        }
        coeffs
    }

    /// Determinant as `(−1)^n` times the constant term of the characteristic polynomial.
    pub fn det(&self, f: &Field) -> Poly {
        let c = self.char_poly(f).pop().expect("non-empty");
        if self.n % 2 == 1 {
            c.neg(f)
        } else {
            c
        }
    }

    /// Evaluation of `Σ c_k M^{n−k}` for scalar-polynomial coefficients.
    pub fn eval_poly(&self, coeffs: &[Poly], f: &Field) -> Self {
        let mut acc = Self::zero(self.n);
        for c in coeffs {
            acc = acc.mul(self, f);
            for i in 0..self.n {
                let v = acc.get(i, i).add(c, f);
                acc.set(i, i, v);
            }
        }
        acc
    }
}
