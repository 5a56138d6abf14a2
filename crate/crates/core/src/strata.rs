//! Stratification combinatorics of the complement of a multiplicity-stratum
//! closure in `Sym^n X`, for any `dim X ≥ 2`.
//!
//! Every stratum is a space `w_μ` of configurations with multiplicity pattern
//! `μ`, which is a coloured configuration space with colour vector
//! `multiplicity_vector(μ)`. Its codimension is `dim X · (n − #parts(μ))`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{enumerate_partitions, is_subpartition, ColourVector, Partition};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumDescriptor {
    pub pattern: Partition,
    pub codimension: u32,
    pub dim_x: u32,
}

impl StratumDescriptor {
    pub fn new(pattern: Partition, dim_x: u32) -> Self {
        let codimension = dim_x * (pattern.total() - pattern.parts_count() as u32);
        Self { pattern, codimension, dim_x }
    }

    /// Colour vector of the coloured configuration space this stratum is.
    pub fn colours(&self) -> ColourVector {
        self.pattern.multiplicity_vector()
    }
}

/// Strata of the complement grouped by codimension. Every codimension from
/// `0` to `dim_x · (n − 1)` has a row; rows with `dim_x ∤ p` are always empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratificationTable {
    pub lambda: Partition,
    pub dim_x: u32,
    pub rows: BTreeMap<u32, Vec<StratumDescriptor>>,
}

impl StratificationTable {
    pub fn row(&self, codimension: u32) -> &[StratumDescriptor] {
        self.rows.get(&codimension).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn strata(&self) -> impl Iterator<Item = &StratumDescriptor> {
        self.rows.values().flatten()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.values().all(Vec::is_empty)
    }
}

/// Degree bound stored as `4 · bound` so quarter-integers are exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityRange {
    pub bound_times_four: i64,
    pub description: String,
}

impl StabilityRange {
    pub fn contains(&self, degree: usize) -> bool {
        4 * degree as i64 <= self.bound_times_four
    }

    /// Largest degree in range, if any.
    pub fn max_degree(&self) -> Option<usize> {
        (self.bound_times_four >= 0).then(|| self.bound_times_four.div_euclid(4) as usize)
    }

    pub fn bound(&self) -> f64 {
        self.bound_times_four as f64 / 4.0
    }
}

/// Patterns `μ ⊢ n` with `μ ≰ λ`, in canonical (lexicographic descending) order.
pub fn allowed_patterns(lambda: &Partition) -> Vec<Partition> {
    enumerate_partitions(lambda.total())
        .into_iter()
        .filter(|mu| !is_subpartition(mu, lambda).expect("same total"))
        .collect()
}

pub fn strata_by_codimension(lambda: &Partition, dim_x: u32) -> Result<StratificationTable> {
    if dim_x < 2 {
        return Err(Error::DimensionTooSmall(dim_x));
    }
    let n = lambda.total();
    let mut rows: BTreeMap<u32, Vec<StratumDescriptor>> = (0..=dim_x * n.saturating_sub(1))
        .map(|p| (p, Vec::new()))
        .collect();
    for mu in allowed_patterns(lambda) {
        let s = StratumDescriptor::new(mu, dim_x);
        rows.entry(s.codimension).or_default().push(s);
    }
    Ok(StratificationTable { lambda: lambda.clone(), dim_x, rows })
}

/// `⌊(n + j) · dim X / 2⌋`: codimensions up to which `1^j λ` and `1^{j+1} λ`
/// have matching strata.
pub fn strata_agreement_bound(n: u32, j: u32, dim_x: u32) -> u32 {
    (n + j) * dim_x / 2
}

/// Adds one point of multiplicity one: `μ ↦ 1μ`.
pub fn stabilize_stratum(pattern: &Partition) -> Partition {
    pattern.prepend_ones(1)
}

/// `∏_{i<‖v‖} (χ − i) / ∏ v(j)!`, the compactly supported Euler characteristic
/// of `Conf_v(X)` when `chi_x = χ_c(X)`.
pub fn chi_c_coloured_conf(v: &ColourVector, chi_x: i64) -> Result<BigInt> {
    let mut num = BigInt::one();
    for i in 0..v.norm() as i64 {
        num *= BigInt::from(chi_x - i);
    }
    let mut den = BigInt::one();
    for &c in v.counts() {
        for k in 2..=c as i64 {
            den *= k;
        }
    }
    let (q, r) = num.div_rem(&den);
    if !r.is_zero() {
        return Err(Error::NonIntegralResult {
            numerator: num.to_string(),
            denominator: den.to_string(),
        });
    }
    Ok(q)
}

/// χ_c of the complement, summed over its strata.
pub fn chi_c_wcomp(lambda: &Partition, chi_x: i64, dim_x: u32) -> Result<BigInt> {
    let table = strata_by_codimension(lambda, dim_x)?;
    table
        .strata()
        .map(|s| chi_c_coloured_conf(&s.colours(), chi_x))
        .sum()
}

/// Range `* ≤ v(i)/2` for stabilising by colour `i` (1-based).
pub fn coloured_stability_range(v: &ColourVector, colour: usize) -> Result<StabilityRange> {
    let vi = v.get(colour)? as i64;
    Ok(StabilityRange {
        bound_times_four: 2 * vi,
        description: format!("* <= v({colour})/2 = {vi}/2"),
    })
}

/// Range `* ≤ (j+n)/4 − 1/2` for the complements `1^j λ → 1^{j+1} λ`.
pub fn symcomp_stability_range(n: u32, j: u32) -> StabilityRange {
    StabilityRange {
        bound_times_four: (j + n) as i64 - 2,
        description: format!("* <= ({j}+{n})/4 - 1/2"),
    }
}

/// If a map of first-quadrant spectral sequences is an isomorphism on `E^1`
/// for `p + q ≤ e1_bound`, it is an isomorphism on `E^∞` for `p + q` up to
/// the returned value.
pub fn ss_transfer_range(e1_bound: i64) -> i64 {
    (e1_bound - 1).div_euclid(2)
}

/// Per-codimension comparison of the strata of `1^j λ` and `1^{j+1} λ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrataRowComparison {
    pub codimension: u32,
    pub count_source: usize,
    pub count_target: usize,
    /// `μ ↦ 1μ` is injective from the source row into the target row.
    pub injective: bool,
    /// ... and also onto the target row.
    pub bijective: bool,
    pub within_bound: bool,
}

pub fn compare_stabilized_strata(
    lambda: &Partition,
    j: u32,
    dim_x: u32,
) -> Result<Vec<StrataRowComparison>> {
    let source = strata_by_codimension(&lambda.prepend_ones(j), dim_x)?;
    let target = strata_by_codimension(&lambda.prepend_ones(j + 1), dim_x)?;
    let bound = strata_agreement_bound(lambda.total(), j, dim_x);
    let mut out = Vec::new();
    for (&p, trow) in &target.rows {
        let srow = source.row(p);
        let images: Vec<Partition> = srow.iter().map(|s| stabilize_stratum(&s.pattern)).collect();
        let mut sorted = images.clone();
        sorted.sort();
        sorted.dedup();
        let injective = sorted.len() == images.len()
            && images.iter().all(|m| trow.iter().any(|t| &t.pattern == m));
        let bijective = injective && images.len() == trow.len();
        out.push(StrataRowComparison {
            codimension: p,
            count_source: srow.len(),
            count_target: trow.len(),
            injective,
            bijective,
            within_bound: p <= bound,
        });
    }
    Ok(out)
}
