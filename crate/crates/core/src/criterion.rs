//! Which EO types lift to which Newton polygons, and non-emptiness of affine
//! Deligne–Lusztig varieties, decided by coset sandwiches.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::affine::AffineWeylElement;
use crate::coset::{CosetEngine, FoldRule};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lab::{eo_classify, FieldConfig, LocalShtuka};
use crate::perm::{all_permutations, longest_element, Permutation};
use crate::polygon::{HodgeDatum, NewtonPolygon};
use crate::semimodule::{conjugated_block_element, enumerate_profiles, eta_of};

/// Which double coset is tested against which sandwich.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `I x_w I ⊆ I y I · I z I · I y⁻¹ I`.
    TargetInMiddle,
    /// `I z I ⊆ I y I · I x_w I · I y⁻¹ I`.
    MiddleInTarget,
}

/// How `η_λ` conjugates the block element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaOrientation {
    /// `η⁻¹ · c · η`.
    Literal,
    /// `η · c · η⁻¹`.
    Swapped,
}

/// The conventions under which a table was computed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConventionManifest {
    pub rule: FoldRule,
    pub orientation: Orientation,
    pub eta: EtaOrientation,
    /// Evaluate on the dual datum `(h, h−d)` with dual EO type and polygon.
    pub mirror: bool,
    pub version: String,
}

impl Default for ConventionManifest {
    fn default() -> Self {
        Self {
            rule: FoldRule::FullSupport,
            orientation: Orientation::TargetInMiddle,
            eta: EtaOrientation::Literal,
            mirror: false,
            version: crate::VERSION.to_string(),
        }
    }
}

impl ConventionManifest {
    /// All variant combinations, the literal reading first.
    pub fn variants() -> Vec<Self> {
        let mut out = Vec::new();
        for rule in [FoldRule::FullSupport, FoldRule::DemazureMax] {
            for orientation in [Orientation::TargetInMiddle, Orientation::MiddleInTarget] {
                for eta in [EtaOrientation::Literal, EtaOrientation::Swapped] {
                    for mirror in [false, true] {
                        out.push(Self { rule, orientation, eta, mirror, version: crate::VERSION.to_string() });
                    }
                }
            }
        }
        out
    }

    pub fn is_literal(&self) -> bool {
        let d = Self::default();
        (self.rule, self.orientation, self.eta, self.mirror) == (d.rule, d.orientation, d.eta, d.mirror)
    }

    pub fn label(&self) -> String {
        format!(
            "{}/{}/{}{}",
            match self.rule {
                FoldRule::FullSupport => "full_support",
                FoldRule::DemazureMax => "demazure_max",
            },
            match self.orientation {
                Orientation::TargetInMiddle => "target_in_middle",
                Orientation::MiddleInTarget => "middle_in_target",
            },
            match self.eta {
                EtaOrientation::Literal => "eta_literal",
                EtaOrientation::Swapped => "eta_swapped",
            },
            if self.mirror { "/mirror" } else { "" }
        )
    }
}

/// Caps guarding against runaway searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_height: usize,
    pub max_support: usize,
    pub cell_timeout: Option<Duration>,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_height: 6, max_support: 250_000, cell_timeout: None }
    }
}

/// A `(λ, y)` pair that makes the sandwich hold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellWitness {
    pub lambda: Vec<i64>,
    pub y: Permutation,
    pub middle: AffineWeylElement,
    pub target: AffineWeylElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellResult {
    pub value: bool,
    pub witness: Option<CellWitness>,
    /// Number of `(λ, y)` pairs examined.
    pub searched: usize,
}

/// `η⁻¹ ε^{-λ} x_P ε^λ η` or its swapped variant.
fn middle_under(profile: &crate::semimodule::CocharacterProfile, p: &NewtonPolygon, eta: EtaOrientation) -> Result<AffineWeylElement> {
    let c = conjugated_block_element(profile, p)?;
    let e = AffineWeylElement::from_finite(eta_of(profile));
    Ok(match eta {
        EtaOrientation::Literal => c.conjugate_by(&e),
        EtaOrientation::Swapped => c.conjugate_by(&e.inverse()),
    })
}

/// `θ(x) = w_0 · (1−λ, u) · w_0`, the Iwahori class of the dual module.
pub fn dual_element(x: &AffineWeylElement) -> AffineWeylElement {
    let h = x.rank();
    let lam: Vec<i64> = x.lam_vec().iter().map(|l| 1 - l).collect();
    let w0 = AffineWeylElement::from_finite(longest_element(h, &(1..h).collect::<Vec<_>>()));
    let flipped = AffineWeylElement::new(&lam, *x.perm()).expect("same rank");
    w0.multiply(&flipped).and_then(|y| y.multiply(&w0)).expect("same rank")
}

/// The EO type of the dual of `Z_w`, on the dual Hodge datum.
pub fn dual_eo_type(hd: HodgeDatum, w: &Permutation) -> Result<Permutation> {
    let theta = dual_element(&hd.eo_representative(w)?);
    let z = LocalShtuka::from_monomial(&theta, FieldConfig::default().field()?)?.bt1()?;
    eo_classify(&z, hd.dual())
}

fn search(target: &AffineWeylElement, p: &NewtonPolygon, manifest: &ConventionManifest, limits: &Limits) -> Result<CellResult> {
    let h = p.height();
    if h > limits.max_height {
        return Err(Error::ResourceExceeded(format!("height {h} exceeds the cap {}", limits.max_height)));
    }
    let start = Instant::now();
    let mut engine = CosetEngine::new(manifest.rule, limits.max_support);
    let ys = all_permutations(h);
    let mut searched = 0;
    for profile in enumerate_profiles(p)? {
        let middle = middle_under(&profile, p, manifest.eta)?;
        for y in &ys {
            if let Some(t) = limits.cell_timeout {
                if start.elapsed() > t {
                    return Err(Error::ResourceExceeded(format!("cell exceeded {t:?} after {searched} pairs")));
                }
            }
            searched += 1;
            let hit = match manifest.orientation {
                Orientation::TargetInMiddle => engine.sandwich_contains(target, y, &middle)?,
                Orientation::MiddleInTarget => engine.sandwich_contains(&middle, y, target)?,
            };
            if hit {
                let witness = CellWitness { lambda: profile.lam.clone(), y: *y, middle, target: *target };
                return Ok(CellResult { value: true, witness: Some(witness), searched });
            }
        }
    }
    Ok(CellResult { value: false, witness: None, searched })
}

fn check_shape(hd: HodgeDatum, p: &NewtonPolygon) -> Result<()> {
    if (p.height(), p.rise()) != (hd.h, hd.d) {
        return Err(Error::Shape(format!(
            "polygon {p} ends at ({}, {}), not at ({}, {})",
            p.height(),
            p.rise(),
            hd.h,
            hd.d
        )));
    }
    Ok(())
}

/// Whether the EO type `w` occurs in the isogeny class of `P`.
pub fn lifts_to(hd: HodgeDatum, w: &Permutation, p: &NewtonPolygon, manifest: &ConventionManifest, limits: &Limits) -> Result<CellResult> {
    check_shape(hd, p)?;
    if hd.h > limits.max_height {
        return Err(Error::ResourceExceeded(format!("height {} exceeds the cap {}", hd.h, limits.max_height)));
    }
    if manifest.mirror {
        let plain = ConventionManifest { mirror: false, ..manifest.clone() };
        return lifts_to(hd.dual(), &dual_eo_type(hd, w)?, &p.dual(), &plain, limits);
    }
    search(&hd.eo_representative(w)?, p, manifest, limits)
}

/// Whether `X_x(b)` is non-empty for `b` of Newton polygon `P`.
pub fn adlv_nonempty(x: &AffineWeylElement, p: &NewtonPolygon, manifest: &ConventionManifest, limits: &Limits) -> Result<CellResult> {
    if x.rank() != p.height() {
        return Err(Error::Shape(format!("element of rank {} against polygon of height {}", x.rank(), p.height())));
    }
    if !x.in_minuscule_double_coset(p.height(), p.rise()) {
        return Err(Error::NotMinuscule(x.to_string()));
    }
    if manifest.mirror {
        let plain = ConventionManifest { mirror: false, ..manifest.clone() };
        return adlv_nonempty(&dual_element(x), &p.dual(), &plain, limits);
    }
    search(x, p, manifest, limits)
}

/// Rows are EO types, columns Newton polygons.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceTable {
    pub version: String,
    pub manifest: ConventionManifest,
    pub hodge: HodgeDatum,
    pub rows: Vec<Permutation>,
    pub cols: Vec<NewtonPolygon>,
    pub cells: Vec<Vec<CellResult>>,
}

impl IncidenceTable {
    pub fn value(&self, w: &Permutation, p: &NewtonPolygon) -> Option<bool> {
        let i = self.rows.iter().position(|r| r == w)?;
        let j = self.cols.iter().position(|c| c == p)?;
        Some(self.cells[i][j].value)
    }

    /// Every row and every column has a true cell.
    pub fn is_covered(&self) -> bool {
        let rows_ok = self.cells.iter().all(|row| row.iter().any(|c| c.value));
        let cols_ok = (0..self.cols.len()).all(|j| self.cells.iter().any(|row| row[j].value));
        rows_ok && cols_ok
    }

    /// Header `eo` followed by the polygon strings.
    pub fn csv_header(&self) -> Vec<String> {
        std::iter::once("eo".to_string()).chain(self.cols.iter().map(|p| p.to_string())).collect()
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .zip(&self.cells)
            .map(|(w, row)| std::iter::once(w.to_string()).chain(row.iter().map(|c| c.value.to_string())).collect())
            .collect()
    }
}

pub fn incidence_table(hd: HodgeDatum, manifest: &ConventionManifest, limits: &Limits, exec: Execution) -> Result<IncidenceTable> {
    if hd.h > limits.max_height {
        return Err(Error::ResourceExceeded(format!("height {} exceeds the cap {}", hd.h, limits.max_height)));
    }
    let rows = hd.eo_types();
    let cols = hd.polygons();
    let pairs: Vec<(usize, usize)> = (0..rows.len()).flat_map(|i| (0..cols.len()).map(move |j| (i, j))).collect();
    let results = exec.map(pairs, |(i, j)| lifts_to(hd, &rows[i], &cols[j], manifest, limits));
    let mut cells = vec![Vec::with_capacity(cols.len()); rows.len()];
    for (k, r) in results.into_iter().enumerate() {
        cells[k / cols.len()].push(r?);
    }
    Ok(IncidenceTable { version: crate::VERSION.to_string(), manifest: manifest.clone(), hodge: hd, rows, cols, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn np(s: &str) -> NewtonPolygon {
        s.parse().unwrap()
    }

    fn perm(v: &[usize]) -> Permutation {
        Permutation::from_one_line(v).unwrap()
    }

    fn el(lam: &[i64], p: &[usize]) -> AffineWeylElement {
        AffineWeylElement::new(lam, perm(p)).unwrap()
    }

    #[test]
    fn height_two_cells() {
        let hd = HodgeDatum::new(2, 1).unwrap();
        let m = ConventionManifest::default();
        let l = Limits::default();
        let ss = lifts_to(hd, &perm(&[1, 2]), &np("1/2x2"), &m, &l).unwrap();
        assert!(ss.value);
        assert_eq!(ss.witness.as_ref().unwrap().y, perm(&[1, 2]));
        assert!(lifts_to(hd, &perm(&[2, 1]), &np("0,1"), &m, &l).unwrap().value);
        let no = lifts_to(hd, &perm(&[1, 2]), &np("0,1"), &m, &l).unwrap();
        assert!(!no.value);
        assert_eq!(no.searched, 2);
    }

    #[test]
    fn literal_reading_accepts_the_disputed_cell() {
        let hd = HodgeDatum::new(2, 1).unwrap();
        let r = lifts_to(hd, &perm(&[2, 1]), &np("1/2x2"), &ConventionManifest::default(), &Limits::default()).unwrap();
        assert!(r.value);
        let w = r.witness.unwrap();
        assert_eq!((w.lambda, w.y), (vec![0, 1], perm(&[2, 1])));
    }

    #[test]
    fn trivial_table() {
        let t = incidence_table(HodgeDatum::new(1, 0).unwrap(), &ConventionManifest::default(), &Limits::default(), Execution::Sequential).unwrap();
        assert_eq!(t.csv_rows(), vec![vec!["[1]".to_string(), "true".to_string()]]);
    }

    #[test]
    fn adlv_examples() {
        let m = ConventionManifest::default();
        let l = Limits::default();
        assert!(adlv_nonempty(&el(&[0, 1], &[2, 1]), &np("1/2x2"), &m, &l).unwrap().value);
        assert!(adlv_nonempty(&el(&[1, 0], &[1, 2]), &np("0,1"), &m, &l).unwrap().value);
        assert!(!adlv_nonempty(&el(&[0, 1], &[2, 1]), &np("0,1"), &m, &l).unwrap().value);
        assert!(matches!(adlv_nonempty(&el(&[2, 0], &[1, 2]), &np("1/2x2"), &m, &l), Err(Error::NotMinuscule(_))));
    }

    #[test]
    fn resource_guard() {
        let l = Limits { max_height: 2, ..Limits::default() };
        let r = incidence_table(HodgeDatum::new(3, 1).unwrap(), &ConventionManifest::default(), &l, Execution::Sequential);
        assert!(matches!(r, Err(Error::ResourceExceeded(_))));
    }

    #[test]
    fn shape_mismatch() {
        let r = lifts_to(HodgeDatum::new(2, 1).unwrap(), &perm(&[1, 2]), &np("0x2"), &ConventionManifest::default(), &Limits::default());
        assert!(matches!(r, Err(Error::Shape(_))));
    }

    #[test]
    fn duality_is_an_involution() {
        for (h, d) in [(2, 1), (3, 1), (4, 2), (4, 1)] {
            let hd = HodgeDatum::new(h, d).unwrap();
            for w in hd.eo_types() {
                let x = hd.eo_representative(&w).unwrap();
                assert_eq!(dual_element(&dual_element(&x)), x);
                let dw = dual_eo_type(hd, &w).unwrap();
                assert_eq!(dual_eo_type(hd.dual(), &dw).unwrap(), w);
            }
        }
    }

    #[test]
    fn variants_are_distinct_and_literal_first() {
        let v = ConventionManifest::variants();
        assert_eq!(v.len(), 16);
        assert!(v[0].is_literal());
        let labels: std::collections::BTreeSet<String> = v.iter().map(|m| m.label()).collect();
        assert_eq!(labels.len(), 16);
    }
}
