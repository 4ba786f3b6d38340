//! Newton polygons, Hodge data and the block elements `x_{n,m}`, `x_P`.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::affine::AffineWeylElement;
use crate::error::{Error, Result};
use crate::perm::{longest_element, min_coset_reps, Permutation};

/// An isosimple block `(n, m)` of slope `n / (n + m)`.
pub type Block = (u32, u32);

fn slope_cmp(a: &Block, b: &Block) -> Ordering {
    // n_a/(n_a+m_a) vs n_b/(n_b+m_b)
    (a.0 as u64 * (b.0 + b.1) as u64).cmp(&(b.0 as u64 * (a.0 + a.1) as u64))
}

fn check_block(&(n, m): &Block) -> Result<()> {
    if n + m == 0 || n.gcd(&m) != 1 {
        return Err(Error::NotCoprime(n, m));
    }
    Ok(())
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NewtonPolygon {
    blocks: Vec<Block>,
}

impl NewtonPolygon {
    /// Validates coprimality and sorts the blocks by ascending slope.
    pub fn from_blocks(mut blocks: Vec<Block>) -> Result<Self> {
        for b in &blocks {
            check_block(b)?;
        }
        blocks.sort_by(slope_cmp);
        Ok(Self { blocks })
    }

    /// Slopes `(numerator, denominator)` with multiplicity; each slope
    /// `ν = a/b` (reduced) must occur a multiple of `b` times.
    pub fn from_slopes(slopes: &[(u32, u32)]) -> Result<Self> {
        let mut reduced: Vec<Block> = Vec::with_capacity(slopes.len());
        for &(num, den) in slopes {
            if den == 0 || num > den {
                return Err(Error::InvalidSlope(format!("{num}/{den}")));
            }
            let g = num.gcd(&den);
            let (a, b) = (num / g, den / g);
            reduced.push((a, b - a));
        }
        reduced.sort_by(slope_cmp);
        let mut blocks = Vec::new();
        let mut i = 0;
        while i < reduced.len() {
            let block = reduced[i];
            let mut j = i;
            while j < reduced.len() && reduced[j] == block {
                j += 1;
            }
            let count = (j - i) as u32;
            let size = block.0 + block.1;
            if !count.is_multiple_of(size) {
                return Err(Error::InvalidSlope(format!(
                    "slope {}/{} has multiplicity {count}, not a multiple of {size}",
                    block.0, size
                )));
            }
            blocks.extend(std::iter::repeat_n(block, (count / size) as usize));
            i = j;
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn height(&self) -> usize {
        self.blocks.iter().map(|&(n, m)| (n + m) as usize).sum()
    }

    pub fn rise(&self) -> usize {
        self.blocks.iter().map(|&(n, _)| n as usize).sum()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|&(n, m)| (n + m) as usize).collect()
    }

    pub fn hodge(&self) -> HodgeDatum {
        HodgeDatum { h: self.height(), d: self.rise() }
    }

    /// Slopes `ν ↦ 1 − ν`.
    pub fn dual(&self) -> Self {
        Self::from_blocks(self.blocks.iter().map(|&(n, m)| (m, n)).collect()).expect("dual blocks are coprime")
    }

    /// `(slope, total multiplicity)` groups in ascending order.
    fn slope_groups(&self) -> Vec<(Block, usize)> {
        let mut out: Vec<(Block, usize)> = Vec::new();
        for &b in &self.blocks {
            let size = (b.0 + b.1) as usize;
            match out.last_mut() {
                Some((last, count)) if *last == b => *count += size,
                _ => out.push((b, size)),
            }
        }
        out
    }
}

impl fmt::Display for NewtonPolygon {
    /// `0,1` or `1/2x2`: slopes with multiplicity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .slope_groups()
            .into_iter()
            .map(|((n, m), count)| {
                let slope = if m == 0 {
                    "1".to_string()
                } else if n == 0 {
                    "0".to_string()
                } else {
                    format!("{n}/{}", n + m)
                };
                if count == 1 {
                    slope
                } else {
                    format!("{slope}x{count}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NP({self})")
    }
}

impl std::str::FromStr for NewtonPolygon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut slopes = Vec::new();
        for item in s.split(',') {
            let item = item.trim();
            if item.is_empty() {
                return Err(Error::Parse(format!("empty slope in {s:?}")));
            }
            let (slope, count) = match item.split_once('x') {
                Some((sl, c)) => {
                    let c = c.trim().parse::<usize>().map_err(|e| Error::Parse(format!("{item:?}: {e}")))?;
                    (sl.trim(), c)
                }
                None => (item, 1),
            };
            let (num, den) = match slope.split_once('/') {
                Some((a, b)) => (
                    a.trim().parse::<u32>().map_err(|e| Error::Parse(format!("{slope:?}: {e}")))?,
                    b.trim().parse::<u32>().map_err(|e| Error::Parse(format!("{slope:?}: {e}")))?,
                ),
                None => (slope.parse::<u32>().map_err(|e| Error::Parse(format!("{slope:?}: {e}")))?, 1),
            };
            slopes.extend(std::iter::repeat_n((num, den), count));
        }
        Self::from_slopes(&slopes)
    }
}

/// Height `h` and `d = length(M/FM)`, with `μ = (1^d, 0^{h-d})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HodgeDatum {
    pub h: usize,
    pub d: usize,
}

impl HodgeDatum {
    pub fn new(h: usize, d: usize) -> Result<Self> {
        if d > h || h == 0 {
            return Err(Error::Parse(format!("need 0 <= d <= h and h >= 1, got (h, d) = ({h}, {d})")));
        }
        if h > crate::MAX_RANK {
            return Err(Error::RankTooLarge(h));
        }
        Ok(Self { h, d })
    }

    pub fn mu(&self) -> Vec<i64> {
        (0..self.h).map(|i| (i < self.d) as i64).collect()
    }

    /// The type `I = S ∖ {(d, d+1)}` as the list of `i` with `(i, i+1) ∈ I`.
    pub fn eo_type(&self) -> Vec<usize> {
        (1..self.h).filter(|&i| i != self.d).collect()
    }

    pub fn mu_and_type(&self) -> (Vec<i64>, Vec<usize>) {
        (self.mu(), self.eo_type())
    }

    /// The EO types `^I W`.
    pub fn eo_types(&self) -> Vec<Permutation> {
        min_coset_reps(self.h, &self.eo_type())
    }

    pub fn dual(&self) -> Self {
        Self { h: self.h, d: self.h - self.d }
    }

    /// `w · w_0 · w_{0,I} · ε^μ`.
    pub fn eo_representative(&self, w: &Permutation) -> Result<AffineWeylElement> {
        if w.degree() != self.h {
            return Err(Error::SizeMismatch(w.degree(), self.h));
        }
        let subset = self.eo_type();
        if !w.is_left_reduced(&subset) {
            return Err(Error::NotLeftReduced(w.to_string()));
        }
        let finite = w.compose(&longest_element(self.h, &(1..self.h).collect::<Vec<_>>()))?.compose(&longest_element(self.h, &subset))?;
        AffineWeylElement::from_finite(finite).multiply(&AffineWeylElement::translation(&self.mu())?)
    }

    /// All Newton polygons with endpoint `(h, d)`, ordered by block list.
    pub fn polygons(&self) -> Vec<NewtonPolygon> {
        let mut candidates: Vec<Block> = Vec::new();
        for size in 1..=self.h as u32 {
            for n in 0..=size.min(self.d as u32) {
                if n.gcd(&(size - n)) == 1 {
                    candidates.push((n, size - n));
                }
            }
        }
        candidates.sort_by(slope_cmp);
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(cands: &[Block], start: usize, h: u32, d: u32, cur: &mut Vec<Block>, out: &mut Vec<NewtonPolygon>) {
            if h == 0 && d == 0 {
                out.push(NewtonPolygon { blocks: cur.clone() });
                return;
            }
            for (k, &(n, m)) in cands.iter().enumerate().skip(start) {
                if n + m <= h && n <= d {
                    cur.push((n, m));
                    rec(cands, k, h - n - m, d - n, cur, out);
                    cur.pop();
                }
            }
        }
        rec(&candidates, 0, self.h as u32, self.d as u32, &mut cur, &mut out);
        out.sort();
        out
    }
}

/// Matrix of `F` on the minimal module `H_{n,m}` in the basis `(e_h, …, e_1)`.
pub fn x_block(n: u32, m: u32) -> Result<AffineWeylElement> {
    check_block(&(n, m))?;
    let h = (n + m) as usize;
    let n = n as usize;
    let m = m as usize;
    // column j (1-based) goes to row j-n with exponent 0, or row j+m with exponent 1
    let mut images = vec![0usize; h];
    let mut lam = vec![0i64; h];
    for j in 1..=h {
        if j > n {
            images[j - 1] = j - n - 1;
        } else {
            images[j - 1] = j + m - 1;
            lam[j + m - 1] = 1;
        }
    }
    AffineWeylElement::new(&lam, Permutation::from_zero_based(&images))
}

/// Block-diagonal `x_P` with the blocks in stored order.
pub fn x_of_polygon(p: &NewtonPolygon) -> Result<AffineWeylElement> {
    let h = p.height();
    if h > crate::MAX_RANK {
        return Err(Error::RankTooLarge(h));
    }
    let mut images = Vec::with_capacity(h);
    let mut lam = Vec::with_capacity(h);
    let mut offset = 0;
    for &(n, m) in p.blocks() {
        let x = x_block(n, m)?;
        for j in 0..x.rank() {
            images.push(offset + x.perm().apply(j));
        }
        lam.extend(x.lam_vec());
        offset += x.rank();
    }
    AffineWeylElement::new(&lam, Permutation::from_zero_based(&images))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(lam: &[i64], perm: &[usize]) -> AffineWeylElement {
        AffineWeylElement::new(lam, Permutation::from_one_line(perm).unwrap()).unwrap()
    }

    fn np(s: &str) -> NewtonPolygon {
        s.parse().unwrap()
    }

    #[test]
    fn slopes_to_blocks() {
        assert_eq!(NewtonPolygon::from_slopes(&[(0, 1), (1, 1)]).unwrap().blocks(), &[(0, 1), (1, 0)]);
        assert_eq!(NewtonPolygon::from_slopes(&[(1, 2), (1, 2)]).unwrap().blocks(), &[(1, 1)]);
        assert_eq!(NewtonPolygon::from_slopes(&[(1, 3); 3]).unwrap().blocks(), &[(1, 2)]);
        assert!(NewtonPolygon::from_slopes(&[(3, 2)]).is_err());
        assert!(NewtonPolygon::from_slopes(&[(1, 2)]).is_err());
        assert!(NewtonPolygon::from_blocks(vec![(2, 2)]).is_err());
    }

    #[test]
    fn text_format() {
        assert_eq!(np("1/2x2").blocks(), &[(1, 1)]);
        assert_eq!(np("0,1").blocks(), &[(0, 1), (1, 0)]);
        assert_eq!(np("1,0").to_string(), "0,1");
        assert_eq!(np("0x2,1").blocks(), &[(0, 1), (0, 1), (1, 0)]);
        assert_eq!(np("2/5x5,1/2x2").to_string(), "2/5x5,1/2x2");
        assert_eq!(serde_json::to_string(&np("1/2x2")).unwrap(), r#"{"blocks":[[1,1]]}"#);
        assert!("1/2x3".parse::<NewtonPolygon>().is_err());
        assert!("a".parse::<NewtonPolygon>().is_err());
    }

    #[test]
    fn x_block_examples() {
        assert_eq!(x_block(1, 1).unwrap(), el(&[0, 1], &[2, 1]));
        assert_eq!(x_block(0, 1).unwrap(), el(&[0], &[1]));
        assert_eq!(x_block(1, 2).unwrap(), el(&[0, 0, 1], &[3, 1, 2]));
        assert!(x_block(2, 4).is_err());
    }

    #[test]
    fn x_polygon_examples() {
        assert_eq!(x_of_polygon(&np("1/2x2")).unwrap(), x_block(1, 1).unwrap());
        assert_eq!(x_of_polygon(&np("0,1")).unwrap(), el(&[0, 1], &[1, 2]));
        assert_eq!(x_of_polygon(&np("0,1/2x2")).unwrap(), el(&[0, 0, 1], &[1, 3, 2]));
    }

    #[test]
    fn hodge_examples() {
        assert_eq!(np("1/2x2").hodge(), HodgeDatum { h: 2, d: 1 });
        let hd = np("1/3x3").hodge();
        assert_eq!(hd, HodgeDatum { h: 3, d: 1 });
        assert_eq!(hd.mu_and_type(), (vec![1, 0, 0], vec![2]));
        let etale = HodgeDatum::new(3, 0).unwrap();
        assert_eq!(etale.mu_and_type(), (vec![0, 0, 0], vec![1, 2]));
        assert_eq!(HodgeDatum::new(2, 1).unwrap().mu_and_type(), (vec![1, 0], vec![]));
    }

    #[test]
    fn eo_representative_examples() {
        let hd = HodgeDatum::new(2, 1).unwrap();
        let p = |v: &[usize]| Permutation::from_one_line(v).unwrap();
        assert_eq!(hd.eo_representative(&p(&[1, 2])).unwrap(), x_block(1, 1).unwrap());
        assert_eq!(hd.eo_representative(&p(&[2, 1])).unwrap(), el(&[1, 0], &[1, 2]));
        for h in 1..=4 {
            assert_eq!(
                HodgeDatum::new(h, 0).unwrap().eo_representative(&Permutation::identity(h)).unwrap(),
                AffineWeylElement::identity(h)
            );
        }
        let hd31 = HodgeDatum::new(3, 1).unwrap();
        assert!(matches!(hd31.eo_representative(&p(&[1, 3, 2])), Err(Error::NotLeftReduced(_))));
    }

    #[test]
    fn polygon_enumeration() {
        let list = |h, d| HodgeDatum::new(h, d).unwrap().polygons();
        assert_eq!(list(2, 1), vec![np("0,1"), np("1/2x2")]);
        assert_eq!(list(3, 1), vec![np("0x2,1"), np("0,1/2x2"), np("1/3x3")]);
        assert_eq!(list(1, 0), vec![np("0")]);
    }

    #[test]
    fn polygon_invariants() {
        for h in 1..=6 {
            for d in 0..=h {
                let hd = HodgeDatum::new(h, d).unwrap();
                for p in hd.polygons() {
                    let x = x_of_polygon(&p).unwrap();
                    assert_eq!(x.det_valuation(), d as i64);
                    assert!(x.in_minuscule_double_coset(h, d), "{p}");
                    assert_eq!(p.to_string().parse::<NewtonPolygon>().unwrap(), p);
                }
                let reps: Vec<_> = hd.eo_types().iter().map(|w| hd.eo_representative(w).unwrap()).collect();
                let distinct: std::collections::BTreeSet<_> = reps.iter().collect();
                assert_eq!(distinct.len(), reps.len());
                assert!(reps.iter().all(|x| x.in_minuscule_double_coset(h, d)));
            }
        }
    }
}
