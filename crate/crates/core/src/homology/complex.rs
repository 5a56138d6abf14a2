//! Chain complexes, chain maps and their homology with ℤ, ℚ or ℤ/p coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::is_prime;
use super::matrix::SparseMatrix;
use super::snf::{invariant_factors, rank_mod_p};
use crate::error::{Error, Result};

/// How filtration levels interact with the differential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelOrder {
    /// `d` never lowers the level (a decreasing filtration by subcomplexes `level ≥ p`).
    NonDecreasing,
    /// `d` never raises the level (an increasing filtration by subcomplexes `level ≤ p`).
    NonIncreasing,
}

/// A bounded chain complex `C_top → … → C_0` of free abelian groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainComplex {
    ranks: Vec<usize>,
    /// `boundaries[k] : C_k → C_{k−1}`; `boundaries[0]` has zero rows.
    boundaries: Vec<SparseMatrix>,
    levels: Option<Vec<Vec<u32>>>,
    order: LevelOrder,
}

impl ChainComplex {
    /// `boundaries[k]` must be `ranks[k−1] × ranks[k]` (with `ranks[−1] = 0`).
    pub fn new(boundaries: Vec<SparseMatrix>) -> Result<Self> {
        let ranks: Vec<usize> = boundaries.iter().map(SparseMatrix::cols).collect();
        for (k, d) in boundaries.iter().enumerate() {
            let expected = if k == 0 { 0 } else { ranks[k - 1] };
            if d.rows() != expected {
                return Err(Error::DimensionMismatch(format!(
                    "d_{k} has {} rows, expected {expected}",
                    d.rows()
                )));
            }
        }
        Ok(Self { ranks, boundaries, levels: None, order: LevelOrder::NonDecreasing })
    }

    /// Complex with the given ranks and zero differentials.
    pub fn with_zero_differentials(ranks: &[usize]) -> Self {
        let boundaries = ranks
            .iter()
            .enumerate()
            .map(|(k, &r)| SparseMatrix::zeros(if k == 0 { 0 } else { ranks[k - 1] }, r))
            .collect();
        Self { ranks: ranks.to_vec(), boundaries, levels: None, order: LevelOrder::NonDecreasing }
    }

    pub fn zero() -> Self {
        Self::with_zero_differentials(&[])
    }

    pub fn with_levels(mut self, levels: Vec<Vec<u32>>, order: LevelOrder) -> Result<Self> {
        if levels.len() != self.ranks.len() || levels.iter().zip(&self.ranks).any(|(l, &r)| l.len() != r) {
            return Err(Error::DimensionMismatch("filtration levels do not match ranks".into()));
        }
        self.levels = Some(levels);
        self.order = order;
        Ok(self)
    }

    /// Number of degrees stored (`top + 1`).
    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0)
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, k: usize) -> usize {
        self.ranks.get(k).copied().unwrap_or(0)
    }

    /// `d_k`, or a zero matrix of the right shape outside the stored range.
    pub fn boundary(&self, k: usize) -> SparseMatrix {
        match self.boundaries.get(k) {
            Some(d) => d.clone(),
            None => SparseMatrix::zeros(self.rank(k.wrapping_sub(1)), self.rank(k)),
        }
    }

    pub fn boundary_ref(&self, k: usize) -> Option<&SparseMatrix> {
        self.boundaries.get(k)
    }

    pub fn levels(&self) -> Option<&[Vec<u32>]> {
        self.levels.as_deref()
    }

    pub fn level_order(&self) -> LevelOrder {
        self.order
    }

    pub fn check_d_squared(&self) -> Result<()> {
        (2..self.boundaries.len()).into_par_iter().try_for_each(|k| {
            if self.boundaries[k - 1].mul(&self.boundaries[k]).is_zero() {
                Ok(())
            } else {
                Err(Error::DSquaredNonzero { degree: k })
            }
        })
    }

    /// Checks the differential against the level order; trivially fine without levels.
    pub fn check_filtration(&self) -> Result<()> {
        let Some(levels) = &self.levels else { return Ok(()) };
        for (k, d) in self.boundaries.iter().enumerate().skip(1) {
            for (r, c, _) in d.triplets() {
                let (from, to) = (levels[k][c], levels[k - 1][r]);
                let ok = match self.order {
                    LevelOrder::NonDecreasing => to >= from,
                    LevelOrder::NonIncreasing => to <= from,
                };
                if !ok {
                    return Err(Error::FiltrationViolation { degree: k });
                }
            }
        }
        Ok(())
    }

    /// `Σ (−1)^k rank C_k`.
    pub fn euler_characteristic(&self) -> i64 {
        self.ranks.iter().enumerate().map(|(k, &r)| if k % 2 == 0 { r as i64 } else { -(r as i64) }).sum()
    }

    /// The cochain complex regraded by `m = ambient − k`, as a chain complex:
    /// its degree-`m` homology is `H^{ambient−m}` of `self`. Levels are kept
    /// and the level order flips.
    pub fn dual(&self, ambient: usize) -> Result<Self> {
        if let Some(top) = (0..self.len()).rev().find(|&k| self.rank(k) > 0).filter(|&k| k > ambient) {
            return Err(Error::DimensionMismatch(format!(
                "complex has cells in degree {top} above the ambient dimension {ambient}"
            )));
        }
        let k_of = |m: usize| ambient - m;
        let boundaries: Vec<SparseMatrix> = (0..=ambient)
            .map(|m| {
                // D_m → D_{m−1} is δ : C^{a−m} → C^{a−m+1}, the transpose of d_{a−m+1}.
                if m == 0 {
                    SparseMatrix::zeros(0, self.rank(k_of(0)))
                } else {
                    self.boundary(k_of(m) + 1).transpose()
                }
            })
            .collect();
        let mut out = Self::new(boundaries)?;
        if let Some(levels) = &self.levels {
            let lv = (0..=ambient).map(|m| levels.get(k_of(m)).cloned().unwrap_or_default()).collect();
            let order = match self.order {
                LevelOrder::NonDecreasing => LevelOrder::NonIncreasing,
                LevelOrder::NonIncreasing => LevelOrder::NonDecreasing,
            };
            out = out.with_levels(lv, order)?;
        }
        Ok(out)
    }
}

/// Coefficient systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coefficients {
    Integers,
    Rationals,
    Prime(u64),
}

impl Coefficients {
    pub fn is_field(&self) -> bool {
        !matches!(self, Coefficients::Integers)
    }
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::Integers => write!(f, "Z"),
            Coefficients::Rationals => write!(f, "Q"),
            Coefficients::Prime(p) => write!(f, "Z{p}"),
        }
    }
}

impl std::str::FromStr for Coefficients {
    type Err = Error;
    /// `Z`, `Q`, or `Zp` for a prime `p` (e.g. `Z2`, `Z/3`).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "Z" | "z" => return Ok(Coefficients::Integers),
            "Q" | "q" => return Ok(Coefficients::Rationals),
            _ => {}
        }
        let digits = t.strip_prefix('Z').or_else(|| t.strip_prefix('z')).map(|d| d.trim_start_matches('/'));
        match digits.and_then(|d| d.parse::<u64>().ok()) {
            Some(p) if is_prime(p) => Ok(Coefficients::Prime(p)),
            _ => Err(Error::InvalidCoefficients(format!("{s:?}: expected Z, Q or Zp with p prime"))),
        }
    }
}

/// A finitely generated abelian group `ℤ^betti ⊕ ⊕ ℤ/t_i` (or a vector space).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub betti: usize,
    /// Elementary divisors `> 1`, each dividing the next.
    pub torsion: Vec<u64>,
}

impl HomologyGroup {
    pub fn free(betti: usize) -> Self {
        Self { betti, torsion: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }

    /// Dimension of `self ⊗ ℤ/p`.
    pub fn tensor_rank_mod(&self, p: u64) -> usize {
        self.betti + self.torsion.iter().filter(|&&t| t % p == 0).count()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        match self.betti {
            0 => {}
            1 => terms.push("Z".to_string()),
            b => terms.push(format!("Z^{b}")),
        }
        terms.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Groups indexed by degree; absent degrees are zero.
pub type GradedGroups = BTreeMap<usize, HomologyGroup>;

/// Rank and elementary divisors of one differential, computed once and shared.
#[derive(Clone, Debug)]
struct DiffData {
    rank: usize,
    torsion: Vec<u64>,
}

fn torsion_of(factors: &[BigInt]) -> Result<Vec<u64>> {
    factors
        .iter()
        .filter(|f| !f.is_one())
        .map(|f| f.to_u64().ok_or_else(|| Error::Overflow(f.to_string())))
        .collect()
}

fn diff_data(c: &ChainComplex, coeff: Coefficients) -> Result<Vec<DiffData>> {
    // one entry per stored degree plus d_{top+1} = 0
    (0..=c.len())
        .into_par_iter()
        .map(|k| {
            let Some(d) = c.boundary_ref(k) else {
                return Ok(DiffData { rank: 0, torsion: Vec::new() });
            };
            match coeff {
                Coefficients::Integers => {
                    let f = invariant_factors(d);
                    Ok(DiffData { rank: f.len(), torsion: torsion_of(&f)? })
                }
                Coefficients::Rationals => Ok(DiffData { rank: invariant_factors(d).len(), torsion: Vec::new() }),
                Coefficients::Prime(p) => {
                    if !is_prime(p) {
                        return Err(Error::InvalidCoefficients(format!("{p} is not prime")));
                    }
                    Ok(DiffData { rank: rank_mod_p(d, p), torsion: Vec::new() })
                }
            }
        })
        .collect()
}

/// `H_k = ker d_k / im d_{k+1}` for every stored degree.
pub fn homology(c: &ChainComplex, coeff: Coefficients) -> Result<GradedGroups> {
    let data = diff_data(c, coeff)?;
    Ok((0..c.len())
        .map(|k| {
            let betti = c.rank(k) - data[k].rank - data[k + 1].rank;
            (k, HomologyGroup { betti, torsion: data[k + 1].torsion.clone() })
        })
        .collect())
}

/// `H^k` of the transposed complex. For a cellular complex of a one-point
/// compactification this is compactly supported cohomology.
pub fn compactly_supported_cohomology(c: &ChainComplex, coeff: Coefficients) -> Result<GradedGroups> {
    let data = diff_data(c, coeff)?;
    Ok((0..c.len())
        .map(|k| {
            let betti = c.rank(k) - data[k].rank - data[k + 1].rank;
            (k, HomologyGroup { betti, torsion: data[k].torsion.clone() })
        })
        .collect())
}

/// Which way the duality relabelling is applied; both are `k ↦ ambient − k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DualityDirection {
    /// compactly supported cohomology to homology
    CohomologyToHomology,
    /// homology to compactly supported cohomology
    HomologyToCohomology,
}

/// Relabels degree `k` as `ambient − k`. Degrees above `ambient` must be zero
/// and are dropped.
pub fn poincare_dual_degrees(ambient: usize, groups: &GradedGroups, _direction: DualityDirection) -> GradedGroups {
    groups
        .iter()
        .filter(|(&k, _)| k <= ambient)
        .map(|(&k, g)| (ambient - k, g.clone()))
        .collect()
}

/// Betti numbers as a dense vector up to the top nonzero degree.
pub fn betti_vector(groups: &GradedGroups) -> Vec<usize> {
    let top = groups.iter().filter(|(_, g)| !g.is_zero()).map(|(&k, _)| k).max();
    match top {
        None => Vec::new(),
        Some(t) => (0..=t).map(|k| groups.get(&k).map_or(0, |g| g.betti)).collect(),
    }
}

/// Drops zero groups.
pub fn nonzero(groups: &GradedGroups) -> GradedGroups {
    groups.iter().filter(|(_, g)| !g.is_zero()).map(|(&k, g)| (k, g.clone())).collect()
}

/// One row of a universal-coefficient check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UcRow {
    pub degree: usize,
    pub integral: HomologyGroup,
    pub rational_rank: usize,
    /// `(p, computed rank, predicted rank)`
    pub mod_p: Vec<(u64, usize, usize)>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UcReport {
    pub rows: Vec<UcRow>,
    pub ok: bool,
}

pub const UC_PRIMES: [u64; 3] = [2, 3, 5];

/// Compares field homology with the prediction from integral homology.
pub fn verify_universal_coefficients(c: &ChainComplex) -> Result<UcReport> {
    let z = homology(c, Coefficients::Integers)?;
    let q = homology(c, Coefficients::Rationals)?;
    let mods: Vec<(u64, GradedGroups)> = UC_PRIMES
        .iter()
        .map(|&p| homology(c, Coefficients::Prime(p)).map(|h| (p, h)))
        .collect::<Result<_>>()?;
    let rows: Vec<UcRow> = (0..c.len())
        .map(|k| {
            let integral = z[&k].clone();
            let rational_rank = q[&k].betti;
            let below = k.checked_sub(1).map(|j| z[&j].clone()).unwrap_or_default();
            let mod_p: Vec<(u64, usize, usize)> = mods
                .iter()
                .map(|(p, h)| {
                    let predicted = integral.tensor_rank_mod(*p) + below.torsion.iter().filter(|&&t| t % p == 0).count();
                    (*p, h[&k].betti, predicted)
                })
                .collect();
            let ok = rational_rank == integral.betti && mod_p.iter().all(|(_, a, b)| a == b);
            UcRow { degree: k, integral, rational_rank, mod_p, ok }
        })
        .collect();
    let ok = rows.iter().all(|r| r.ok);
    Ok(UcReport { rows, ok })
}

/// `f_k : C_k → D_{k+shift}` for every source degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainMap {
    pub degree_shift: i64,
    pub blocks: Vec<SparseMatrix>,
}

impl ChainMap {
    pub fn target_degree(&self, k: usize) -> Option<usize> {
        usize::try_from(k as i64 + self.degree_shift).ok()
    }

    pub fn identity(c: &ChainComplex) -> Self {
        Self { degree_shift: 0, blocks: c.ranks().iter().map(|&r| SparseMatrix::identity(r)).collect() }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex, degree_shift: i64) -> Self {
        let blocks = (0..source.len())
            .map(|k| {
                let t = usize::try_from(k as i64 + degree_shift).map(|t| target.rank(t)).unwrap_or(0);
                SparseMatrix::zeros(t, source.rank(k))
            })
            .collect();
        Self { degree_shift, blocks }
    }

    /// `f_k`, or zero if not stored.
    pub fn block(&self, k: usize, source: &ChainComplex, target: &ChainComplex) -> SparseMatrix {
        match self.blocks.get(k) {
            Some(b) => b.clone(),
            None => SparseMatrix::zeros(self.target_degree(k).map_or(0, |t| target.rank(t)), source.rank(k)),
        }
    }

    /// Shapes match and `d ∘ f_k = f_{k−1} ∘ d` in every degree.
    pub fn check(&self, source: &ChainComplex, target: &ChainComplex) -> Result<()> {
        for k in 0..source.len() {
            let f = self.block(k, source, target);
            let t = self.target_degree(k);
            let t_rank = t.map_or(0, |t| target.rank(t));
            if f.cols() != source.rank(k) || f.rows() != t_rank {
                return Err(Error::DimensionMismatch(format!("chain map block {k} has the wrong shape")));
            }
            if k == 0 {
                continue;
            }
            let lhs = match t {
                Some(t) if t > 0 => target.boundary(t).mul(&f),
                _ => SparseMatrix::zeros(t.map_or(0, |t| target.rank(t.wrapping_sub(1))), source.rank(k)),
            };
            let rhs = self.block(k - 1, source, target).mul(&source.boundary(k));
            if lhs.rows() != rhs.rows() || lhs.triplets().ne(rhs.triplets()) {
                if lhs.is_zero() && rhs.is_zero() {
                    continue;
                }
                return Err(Error::NotAChainMap { degree: k });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn times_two() -> ChainComplex {
        ChainComplex::new(vec![SparseMatrix::zeros(0, 1), SparseMatrix::from_triplets(1, 1, [(0, 0, 2)])]).unwrap()
    }

    #[test]
    fn circle_and_times_two() {
        let circle = ChainComplex::with_zero_differentials(&[1, 1]);
        let h = homology(&circle, Coefficients::Integers).unwrap();
        assert_eq!(h[&0], HomologyGroup::free(1));
        assert_eq!(h[&1], HomologyGroup::free(1));

        let c = times_two();
        let h = homology(&c, Coefficients::Integers).unwrap();
        assert_eq!(h[&0], HomologyGroup { betti: 0, torsion: vec![2] });
        assert!(h[&1].is_zero());
        let hc = compactly_supported_cohomology(&c, Coefficients::Integers).unwrap();
        assert!(hc[&0].is_zero());
        assert_eq!(hc[&1], HomologyGroup { betti: 0, torsion: vec![2] });
    }

    #[test]
    fn universal_coefficients_on_times_two() {
        let c = times_two();
        let q = homology(&c, Coefficients::Rationals).unwrap();
        assert_eq!((q[&0].betti, q[&1].betti), (0, 0));
        let z2 = homology(&c, Coefficients::Prime(2)).unwrap();
        assert_eq!((z2[&0].betti, z2[&1].betti), (1, 1));
        assert!(verify_universal_coefficients(&c).unwrap().ok);
    }

    #[test]
    fn dual_of_times_two() {
        let d = times_two().dual(1).unwrap();
        let h = homology(&d, Coefficients::Integers).unwrap();
        // H^1 of the cochains is Z/2, relabelled to degree 0
        assert_eq!(h[&0], HomologyGroup { betti: 0, torsion: vec![2] });
        assert!(h[&1].is_zero());
    }

    #[test]
    fn duality_relabels() {
        let mut g = GradedGroups::new();
        g.insert(3, HomologyGroup::free(1));
        g.insert(4, HomologyGroup::free(1));
        let d = poincare_dual_degrees(4, &g, DualityDirection::CohomologyToHomology);
        assert_eq!(betti_vector(&d), vec![1, 1]);
        assert!(poincare_dual_degrees(4, &GradedGroups::new(), DualityDirection::HomologyToCohomology).is_empty());
    }

    #[test]
    fn coefficient_parsing() {
        assert_eq!("Z".parse::<Coefficients>().unwrap(), Coefficients::Integers);
        assert_eq!("Z2".parse::<Coefficients>().unwrap(), Coefficients::Prime(2));
        assert_eq!("Z/5".parse::<Coefficients>().unwrap(), Coefficients::Prime(5));
        assert!("Z4".parse::<Coefficients>().is_err());
        assert!("R".parse::<Coefficients>().is_err());
    }

    #[test]
    fn chain_map_checks() {
        let c = times_two();
        assert!(ChainMap::identity(&c).check(&c, &c).is_ok());
        assert!(ChainMap::zero(&c, &c, 0).check(&c, &c).is_ok());
        let bad = ChainMap {
            degree_shift: 0,
            blocks: vec![SparseMatrix::identity(1), SparseMatrix::zeros(1, 1)],
        };
        assert_eq!(bad.check(&c, &c), Err(Error::NotAChainMap { degree: 1 }));
    }
}
