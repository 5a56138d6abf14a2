//! Verification suites comparing homology across stabilisation maps, plus the
//! spectral-sequence and strata reports built on top of them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foxneuwirth::{
    build_complex, conf_space_spec, stabilization_chain_map, wcomp_spec, FnSpec, StabilizeBy,
};
use crate::homology::{
    check_ss_bound, compactly_supported_cohomology, homology, Coefficients, Field, GradedGroups, HomologyGroup,
    PrimeField, Rationals, SpectralPage, SpectralSequence, SsBoundReport,
};
use crate::oracles::{record_matches, small_space_table};
use crate::partitions::{enumerate_partitions, is_subpartition, ColourVector, Partition};
use crate::strata::{
    allowed_patterns, coloured_stability_range, compare_stabilized_strata, symcomp_stability_range,
    StabilityRange, StrataRowComparison,
};

/// Which groups of a space are wanted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    /// `H_*` of the space, through Poincaré duality
    Homology,
    /// `H_c^*` of the space
    CompactSupport,
}

/// Spec with colours relabelled canonically; the space does not change.
pub fn canonical_spec(spec: &FnSpec) -> FnSpec {
    match spec {
        FnSpec::Coloured(v) => FnSpec::Coloured(v.canonical()),
        other => other.clone(),
    }
}

/// Computes the groups of a space from scratch.
pub fn space_groups(spec: &FnSpec, coeff: Coefficients, kind: GroupKind, limit: u32) -> Result<GradedGroups> {
    if kind == GroupKind::Homology
        && coeff == Coefficients::Integers
        && matches!(spec, FnSpec::Complement(_) | FnSpec::Symmetric(_))
    {
        return Err(Error::IntegralDualityUnavailable);
    }
    let fc = build_complex(&canonical_spec(spec), limit)?;
    match kind {
        GroupKind::Homology => homology(&fc.dual()?, coeff),
        GroupKind::CompactSupport => compactly_supported_cohomology(&fc.complex, coeff),
    }
}

/// Where verification suites get their groups from (direct or cached).
pub trait GroupSource: Sync {
    fn groups(&self, spec: &FnSpec, coeff: Coefficients, kind: GroupKind) -> Result<GradedGroups>;
}

/// Computes everything on demand.
#[derive(Clone, Copy, Debug)]
pub struct Direct {
    pub limit: u32,
}

impl GroupSource for Direct {
    fn groups(&self, spec: &FnSpec, coeff: Coefficients, kind: GroupKind) -> Result<GradedGroups> {
        space_groups(spec, coeff, kind, self.limit)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

/// `H_k` on both sides of a stabilisation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub degree: usize,
    pub source: HomologyGroup,
    pub target: HomologyGroup,
    pub in_range: bool,
    pub agrees: bool,
}

/// A side condition whose failure fails the report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyRow {
    pub property: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: String,
    pub instance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<StabilityRange>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub rows: Vec<ComparisonRow>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub strata_rows: Vec<StrataRowComparison>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub properties: Vec<PropertyRow>,
    pub verdict: Verdict,
}

impl VerificationReport {
    fn new(claim: &str, instance: String, range: Option<StabilityRange>) -> Self {
        Self {
            claim: claim.into(),
            instance,
            range,
            rows: Vec::new(),
            strata_rows: Vec::new(),
            properties: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    /// Pass iff every in-range row agrees, every strata row inside the bound
    /// matches, and every property holds.
    fn finish(mut self) -> Self {
        let rows_ok = self.rows.iter().all(|r| !r.in_range || r.agrees);
        let strata_ok = self
            .strata_rows
            .iter()
            .all(|r| r.injective && (!r.within_bound || (r.bijective && r.count_source == r.count_target)));
        let props_ok = self.properties.iter().all(|p| p.holds);
        self.verdict = if rows_ok && strata_ok && props_ok { Verdict::Pass } else { Verdict::Fail };
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

pub const HSTAB_COLOURED: &str = "hstab-coloured";
pub const HSTAB_SYMCOMP: &str = "hstab-symcomp";
pub const STRATA_BOUND: &str = "strata-bound";
pub const ORACLES: &str = "oracles";

fn comparison_rows(a: &GradedGroups, b: &GradedGroups, range: &StabilityRange) -> Vec<ComparisonRow> {
    let degrees: BTreeSet<usize> = a.keys().chain(b.keys()).copied().collect();
    degrees
        .into_iter()
        .map(|k| {
            let source = a.get(&k).cloned().unwrap_or_default();
            let target = b.get(&k).cloned().unwrap_or_default();
            let agrees = source == target;
            ComparisonRow { degree: k, in_range: range.contains(k), agrees, source, target }
        })
        .collect()
}

/// Betti numbers never drop from source to target, in any degree.
fn monotonicity(rows: &[ComparisonRow]) -> PropertyRow {
    let drops: Vec<String> = rows
        .iter()
        .filter(|r| r.source.betti > r.target.betti)
        .map(|r| format!("b_{}: {} > {}", r.degree, r.source.betti, r.target.betti))
        .collect();
    PropertyRow {
        property: "monotone-betti".into(),
        holds: drops.is_empty(),
        detail: if drops.is_empty() { "b_k(source) <= b_k(target) for all k".into() } else { drops.join("; ") },
    }
}

/// Coloured instances: sorted triples `v` with `‖v‖ < max_total`, and one
/// colour per distinct value of `v(i)`.
pub fn coloured_instances(max_total: u32) -> Vec<(ColourVector, usize)> {
    let mut out = Vec::new();
    for a in 0..max_total {
        for b in 0..=a {
            for c in 0..=b {
                if a + b + c >= max_total {
                    continue;
                }
                let v = [a, b, c];
                let mut seen = BTreeSet::new();
                for (i, &x) in v.iter().enumerate() {
                    if seen.insert(x) {
                        out.push((ColourVector::new(v.to_vec()), i + 1));
                    }
                }
            }
        }
    }
    out.sort_by_key(|(v, i)| (v.norm(), v.clone(), *i));
    out
}

/// One coloured stability instance.
pub fn verify_coloured_instance(v: &ColourVector, colour: usize, source: &dyn GroupSource) -> Result<VerificationReport> {
    let target = v.plus_unit(colour)?;
    let range = coloured_stability_range(&extend(v, colour), colour)?;
    let a = source.groups(&conf_space_spec(v), Coefficients::Integers, GroupKind::Homology)?;
    let b = source.groups(&conf_space_spec(&target), Coefficients::Integers, GroupKind::Homology)?;
    let mut report = VerificationReport::new(HSTAB_COLOURED, format!("v={v} i={colour}"), Some(range.clone()));
    report.rows = comparison_rows(&a, &b, &range);
    report.properties.push(monotonicity(&report.rows));
    Ok(report.finish())
}

/// `v` padded with zeros so that `colour` is a valid index.
fn extend(v: &ColourVector, colour: usize) -> ColourVector {
    let mut counts = v.counts().to_vec();
    if counts.len() < colour {
        counts.resize(colour, 0);
    }
    ColourVector::new(counts)
}

/// Every coloured instance with `‖v‖ < max_total`, run in parallel.
pub fn verify_coloured(max_total: u32, source: &dyn GroupSource) -> Result<Vec<VerificationReport>> {
    if max_total > 8 {
        return Err(Error::SizeLimitExceeded { total: max_total, limit: 8 });
    }
    coloured_instances(max_total)
        .par_iter()
        .map(|(v, i)| verify_coloured_instance(v, *i, source))
        .collect()
}

/// Builds the two spectral sequences and the stabilisation map for
/// `1^j λ → 1^{j+1} λ` and checks the `E^1`-to-`E^∞` transfer.
pub fn ss_bound_for_complements<F: Field>(field: F, lambda: &Partition, limit: u32) -> Result<SsBoundReport> {
    let src = build_complex(&wcomp_spec(lambda)?, limit)?;
    let tgt = build_complex(&wcomp_spec(&lambda.prepend_ones(1))?, limit)?;
    let f = stabilization_chain_map(&src, &tgt, StabilizeBy::WeightOne)?;
    let ss_src = SpectralSequence::new(field.clone(), &src.dual()?)?;
    let ss_tgt = SpectralSequence::new(field, &tgt.dual()?)?;
    check_ss_bound(&f, &ss_src, &ss_tgt)
}

/// `1^j λ → 1^{j+1} λ` for `j < j_max`, rationally; the total weight
/// `|λ| + j_max` must stay within `limit`.
pub fn verify_symcomp(
    lambda: &Partition,
    j_max: u32,
    source: &dyn GroupSource,
    limit: u32,
) -> Result<Vec<VerificationReport>> {
    let n = lambda.total();
    if n == 0 {
        return Err(Error::InvalidPartition("need a partition of n >= 1".into()));
    }
    if n + j_max > limit {
        return Err(Error::SizeLimitExceeded { total: n + j_max, limit });
    }
    (0..j_max)
        .into_par_iter()
        .map(|j| {
            let lj = lambda.prepend_ones(j);
            let lj1 = lambda.prepend_ones(j + 1);
            let range = symcomp_stability_range(n, j);
            let a = source.groups(&wcomp_spec(&lj)?, Coefficients::Rationals, GroupKind::Homology)?;
            let b = source.groups(&wcomp_spec(&lj1)?, Coefficients::Rationals, GroupKind::Homology)?;
            let mut report =
                VerificationReport::new(HSTAB_SYMCOMP, format!("lambda={} j={j}", lambda.to_csv()), Some(range.clone()));
            report.rows = comparison_rows(&a, &b, &range);
            report.properties.push(monotonicity(&report.rows));
            let ss = ss_bound_for_complements(Rationals, &lj, limit)?;
            report.properties.push(PropertyRow {
                property: "ss-bound".into(),
                holds: ss.ok,
                detail: format!(
                    "E1 iso for p+q <= {}, so E-infinity iso expected for p+q <= {}; observed <= {}",
                    ss.e1_iso_bound, ss.transferred, ss.einf_iso_bound
                ),
            });
            Ok(report.finish())
        })
        .collect()
}

/// Strata-count comparisons for every `λ ⊢ n ≤ n_max`, `j ≤ j_max`, and each dimension.
pub fn verify_strata(n_max: u32, j_max: u32, dims: &[u32]) -> Result<Vec<VerificationReport>> {
    if n_max + j_max > 12 {
        return Err(Error::SizeLimitExceeded { total: n_max + j_max, limit: 12 });
    }
    let mut cases = Vec::new();
    for n in 1..=n_max {
        for lambda in enumerate_partitions(n) {
            for j in 0..=j_max {
                for &d in dims {
                    cases.push((lambda.clone(), j, d));
                }
            }
        }
    }
    cases
        .par_iter()
        .map(|(lambda, j, d)| {
            let rows = compare_stabilized_strata(lambda, *j, *d)?;
            let mut report =
                VerificationReport::new(STRATA_BOUND, format!("lambda={} j={j} dim={d}", lambda.to_csv()), None);
            report.strata_rows = rows;
            let lj = lambda.prepend_ones(*j);
            let allowed = allowed_patterns(&lj);
            let covered = enumerate_partitions(lj.total()).iter().all(|mu| {
                let sub = is_subpartition(mu, &lj).unwrap_or(false);
                sub != allowed.contains(mu)
            });
            report.properties.push(PropertyRow {
                property: "strata-partition".into(),
                holds: covered,
                detail: "subpartitions and allowed patterns split the partitions of n".into(),
            });
            Ok(report.finish())
        })
        .collect()
}

/// Reproduces every record of the oracle table.
pub fn verify_oracles(source: &dyn GroupSource) -> Result<Vec<VerificationReport>> {
    small_space_table()?
        .par_iter()
        .map(|rec| {
            let got = source.groups(&rec.spec, rec.coefficients, GroupKind::Homology)?;
            let mut report = VerificationReport::new(ORACLES, rec.space.clone(), None);
            let degrees: BTreeSet<usize> = if rec.complete {
                got.keys().chain(rec.expected.keys()).copied().collect()
            } else {
                rec.expected.keys().copied().collect()
            };
            report.rows = degrees
                .into_iter()
                .map(|k| {
                    let source = rec.expected.get(&k).cloned().unwrap_or_default();
                    let target = got.get(&k).cloned().unwrap_or_default();
                    ComparisonRow { degree: k, agrees: source == target, source, target, in_range: true }
                })
                .collect();
            report.properties.push(PropertyRow {
                property: "record".into(),
                holds: record_matches(rec, &got),
                detail: rec.derivation.clone(),
            });
            Ok(report.finish())
        })
        .collect()
}

/// `E^1` entry against the direct sum of stratum homologies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Row {
    pub p: u32,
    pub q: i64,
    pub e1: usize,
    pub strata: usize,
    pub agrees: bool,
}

/// `Σ_{p+q=m} dim E^∞_{p,q}` against `dim H_c^{dim W − m}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub degree: usize,
    pub e_infinity: usize,
    pub compact_support: usize,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub lambda: Partition,
    pub field: String,
    pub pages: Vec<SpectralPage>,
    pub e1_rows: Vec<E1Row>,
    pub convergence_rows: Vec<ConvergenceRow>,
    pub verdict: Verdict,
}

/// Field choice for spectral sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralField {
    Rationals,
    Prime(u64),
}

impl SpectralField {
    pub fn from_coefficients(c: Coefficients) -> Result<Self> {
        match c {
            Coefficients::Rationals => Ok(SpectralField::Rationals),
            Coefficients::Prime(p) => Ok(SpectralField::Prime(p)),
            Coefficients::Integers => Err(Error::InvalidCoefficients("spectral sequences need a field".into())),
        }
    }

    fn coefficients(self) -> Coefficients {
        match self {
            SpectralField::Rationals => Coefficients::Rationals,
            SpectralField::Prime(p) => Coefficients::Prime(p),
        }
    }
}

/// Pages of the codimension-filtered complex of the complement of `λ`, with
/// the `E^1`-versus-strata and convergence tables.
pub fn spectral_report(lambda: &Partition, field: SpectralField, limit: u32) -> Result<SpectralReport> {
    match field {
        SpectralField::Rationals => spectral_report_in(Rationals, lambda, limit),
        SpectralField::Prime(p) => spectral_report_in(PrimeField::new(p)?, lambda, limit),
    }
}

fn spectral_report_in<F: Field>(field: F, lambda: &Partition, limit: u32) -> Result<SpectralReport> {
    let coeff = if field.name() == "Q" {
        SpectralField::Rationals
    } else {
        SpectralField::Prime(field.name().trim_start_matches("Z/").parse().expect("prime field name"))
    }
    .coefficients();
    let fc = build_complex(&wcomp_spec(lambda)?, limit)?;
    let ss = SpectralSequence::new(field.clone(), &fc.dual()?)?;
    ss.check_pages()?;
    let n = lambda.total();

    let mut strata: BTreeMap<(u32, i64), usize> = BTreeMap::new();
    for mu in allowed_patterns(lambda) {
        let p = 2 * (n - mu.parts_count() as u32);
        let h = space_groups(&FnSpec::Stratum(mu), coeff, GroupKind::Homology, limit)?;
        for (q, g) in h {
            if g.betti > 0 {
                *strata.entry((p, q as i64)).or_default() += g.betti;
            }
        }
    }
    let e1 = ss.page(1);
    let keys: BTreeSet<(u32, i64)> = e1.dims.keys().chain(strata.keys()).copied().collect();
    let e1_rows: Vec<E1Row> = keys
        .into_iter()
        .map(|(p, q)| {
            let (a, b) = (e1.dim(p, q), strata.get(&(p, q)).copied().unwrap_or(0));
            E1Row { p, q, e1: a, strata: b, agrees: a == b }
        })
        .collect();

    let hc = compactly_supported_cohomology(&fc.complex, coeff)?;
    let dim_w = fc.manifold_dim();
    let convergence_rows: Vec<ConvergenceRow> = (0..=dim_w)
        .map(|m| {
            let einf = ss.infinity().total(m as i64);
            let c = hc.get(&(dim_w - m)).map_or(0, |g| g.betti);
            ConvergenceRow { degree: m, e_infinity: einf, compact_support: c, agrees: einf == c }
        })
        .collect();
    let ok = e1_rows.iter().all(|r| r.agrees) && convergence_rows.iter().all(|r| r.agrees);
    Ok(SpectralReport {
        lambda: lambda.clone(),
        field: field.name(),
        pages: ss.pages().to_vec(),
        e1_rows,
        convergence_rows,
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
    })
}

/// Overall verdict of a set of reports.
pub fn overall(reports: &[VerificationReport]) -> Verdict {
    if reports.iter().all(VerificationReport::passed) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}
