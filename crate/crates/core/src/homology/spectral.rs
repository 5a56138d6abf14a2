//! The spectral sequence of a filtered chain complex over a field.
//!
//! The complex must carry levels with [`LevelOrder::NonIncreasing`], so
//! `G_p = span{cells of level ≤ p}` is an increasing filtration by
//! subcomplexes. Entries are indexed `(p, q)` with total degree `m = p + q`;
//! `d_r` has bidegree `(−r, r − 1)`. With
//! `Z^r_p = {x ∈ G_p : dx ∈ G_{p−r}}` and `B^r_p = G_p ∩ d(G_{p+r})`,
//! `E^r_p = Z^r_p / (Z^{r−1}_{p−1} + B^{r−1}_p)`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::complex::{ChainComplex, ChainMap, LevelOrder};
use super::field::{nullspace, rank, DenseMatrix, Field, Quotient};
use super::induced::dense_boundary;
use crate::error::{Error, Result};
use crate::strata::ss_transfer_range;

/// One differential `d_r : E^r_{p,q} → E^r_{p−r,q+r−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageDifferential {
    pub from: (u32, i64),
    pub to: (u32, i64),
    /// `matrix[t][s]`, entries rendered in the field
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralPage {
    pub r: usize,
    /// nonzero dimensions by `(p, q)`, written out as `(p, q, dim)` triplets
    #[serde(with = "triplets")]
    pub dims: BTreeMap<(u32, i64), usize>,
    /// nonzero differentials leaving this page
    pub differentials: Vec<PageDifferential>,
}

mod triplets {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        p: u32,
        q: i64,
        dim: usize,
    }

    pub fn serialize<S: Serializer>(dims: &BTreeMap<(u32, i64), usize>, s: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = dims.iter().map(|(&(p, q), &dim)| Entry { p, q, dim }).collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<(u32, i64), usize>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        Ok(entries.into_iter().map(|e| ((e.p, e.q), e.dim)).collect())
    }
}

impl SpectralPage {
    pub fn dim(&self, p: u32, q: i64) -> usize {
        self.dims.get(&(p, q)).copied().unwrap_or(0)
    }

    /// `Σ_{p+q=m} dim E_{p,q}`.
    pub fn total(&self, m: i64) -> usize {
        self.dims.iter().filter(|((p, q), _)| *p as i64 + q == m).map(|(_, d)| d).sum()
    }
}

/// Filtered complex plus the data needed to form any page.
pub struct SpectralSequence<F: Field> {
    field: F,
    complex: ChainComplex,
    levels: Vec<Vec<u32>>,
    dense: Vec<DenseMatrix<F::Elem>>,
    /// distinct levels present
    present: BTreeSet<u32>,
    pages: Vec<SpectralPage>,
}

impl<F: Field> SpectralSequence<F> {
    /// Computes pages `E^0 … E^R` where `E^R = E^∞`.
    pub fn new(field: F, complex: &ChainComplex) -> Result<Self> {
        let levels = match (complex.levels(), complex.level_order()) {
            (Some(l), LevelOrder::NonIncreasing) => l.to_vec(),
            (Some(_), LevelOrder::NonDecreasing) => return Err(Error::FiltrationViolation { degree: 0 }),
            (None, _) => complex.ranks().iter().map(|&r| vec![0; r]).collect(),
        };
        let complex = complex.clone();
        complex.check_filtration()?;
        let dense = (0..=complex.len()).map(|k| dense_boundary(&field, &complex, k)).collect();
        let present = levels.iter().flatten().copied().collect();
        let mut ss = Self { field, complex, levels, dense, present, pages: Vec::new() };
        ss.pages = ss.compute_pages();
        Ok(ss)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn pages(&self) -> &[SpectralPage] {
        &self.pages
    }

    /// `E^r`, with pages past the last stored one equal to `E^∞`.
    pub fn page(&self, r: usize) -> &SpectralPage {
        &self.pages[r.min(self.pages.len() - 1)]
    }

    pub fn infinity(&self) -> &SpectralPage {
        self.pages.last().expect("at least one page")
    }

    /// Index of the first page from which nothing changes.
    pub fn infinity_index(&self) -> usize {
        self.pages.len() - 1
    }

    fn span(&self) -> usize {
        match (self.present.first(), self.present.last()) {
            (Some(a), Some(b)) => (b - a) as usize,
            _ => 0,
        }
    }

    fn level(&self, m: usize, i: usize) -> i64 {
        self.levels[m][i] as i64
    }

    /// Basis of `Z^r_p` in degree `m`, as full-length vectors.
    fn z_basis(&self, r: i64, p: i64, m: usize) -> Vec<Vec<F::Elem>> {
        let n = self.complex.rank(m);
        let cols: Vec<usize> = (0..n).filter(|&i| self.level(m, i) <= p).collect();
        let rows: Vec<usize> = if m == 0 {
            Vec::new()
        } else {
            (0..self.complex.rank(m - 1)).filter(|&i| self.level(m - 1, i) > p - r).collect()
        };
        self.restricted_kernel(m, &rows, &cols, n)
    }

    /// Kernel of `d_m` restricted to `rows × cols`, embedded in `C_m`.
    fn restricted_kernel(&self, m: usize, rows: &[usize], cols: &[usize], n: usize) -> Vec<Vec<F::Elem>> {
        let d = &self.dense[m];
        let sub: DenseMatrix<F::Elem> = rows.iter().map(|&r| cols.iter().map(|&c| d[r][c].clone()).collect()).collect();
        let ker = if rows.is_empty() {
            (0..cols.len())
                .map(|i| {
                    let mut v = vec![self.field.zero(); cols.len()];
                    v[i] = self.field.one();
                    v
                })
                .collect()
        } else {
            nullspace(&self.field, &sub, cols.len())
        };
        ker.into_iter()
            .map(|k| {
                let mut v = vec![self.field.zero(); n];
                for (j, &c) in cols.iter().enumerate() {
                    v[c] = k[j].clone();
                }
                v
            })
            .collect()
    }

    fn apply_d(&self, m: usize, x: &[F::Elem]) -> Vec<F::Elem> {
        let d = &self.dense[m];
        d.iter()
            .map(|row| {
                row.iter().zip(x).fold(self.field.zero(), |acc, (a, b)| {
                    if self.field.is_zero(a) || self.field.is_zero(b) {
                        acc
                    } else {
                        self.field.add(&acc, &self.field.mul(a, b))
                    }
                })
            })
            .collect()
    }

    /// Spanning set of `B^r_p = G_p ∩ d(G_{p+r})` in degree `m`.
    fn b_span(&self, r: i64, p: i64, m: usize) -> Vec<Vec<F::Elem>> {
        let up = m + 1;
        let n_up = self.complex.rank(up);
        if n_up == 0 {
            return Vec::new();
        }
        let cols: Vec<usize> = (0..n_up).filter(|&i| self.level(up, i) <= p + r).collect();
        let rows: Vec<usize> = (0..self.complex.rank(m)).filter(|&i| self.level(m, i) > p).collect();
        self.restricted_kernel(up, &rows, &cols, n_up)
            .iter()
            .map(|y| self.apply_d(up, y))
            .filter(|v| v.iter().any(|x| !self.field.is_zero(x)))
            .collect()
    }

    /// `E^r_p` in total degree `m` as an explicit quotient.
    pub fn quotient(&self, r: usize, p: u32, m: usize) -> Quotient<F> {
        let (r, p) = (r as i64, p as i64);
        let n = self.complex.rank(m);
        let numerator = self.z_basis(r, p, m);
        let mut denominator = self.z_basis(r - 1, p - 1, m);
        denominator.extend(self.b_span(r - 1, p, m));
        Quotient::new(&self.field, n, &denominator, &numerator)
    }

    fn degrees(&self) -> usize {
        self.complex.len()
    }

    fn compute_pages(&self) -> Vec<SpectralPage> {
        let last = self.span() + 1;
        let diffs: BTreeSet<usize> = self
            .present
            .iter()
            .flat_map(|a| self.present.iter().filter(move |b| *b > a).map(move |b| (b - a) as usize))
            .collect();
        let mut pages: Vec<SpectralPage> = Vec::with_capacity(last + 1);
        for r in 0..=last {
            let needs = r <= 1 || r == last || diffs.contains(&r) || diffs.contains(&(r - 1));
            if !needs {
                let mut prev = pages[r - 1].clone();
                prev.r = r;
                prev.differentials.clear();
                pages.push(prev);
                continue;
            }
            let cells: Vec<(u32, usize)> = self
                .present
                .iter()
                .flat_map(|&p| (0..self.degrees()).map(move |m| (p, m)))
                .collect();
            let quotients: BTreeMap<(u32, usize), Quotient<F>> = cells
                .par_iter()
                .map(|&(p, m)| ((p, m), self.quotient(r, p, m)))
                .collect();
            let dims = quotients
                .iter()
                .filter(|(_, q)| q.dim() > 0)
                .map(|(&(p, m), q)| ((p, m as i64 - p as i64), q.dim()))
                .collect();
            let mut differentials = Vec::new();
            if r == 0 || diffs.contains(&r) {
                for (&(p, m), src) in &quotients {
                    if src.dim() == 0 || m == 0 || (p as usize) < r {
                        continue;
                    }
                    let tp = p - r as u32;
                    let Some(tgt) = quotients.get(&(tp, m - 1)) else { continue };
                    if tgt.dim() == 0 {
                        continue;
                    }
                    let cols: Vec<Vec<F::Elem>> = src
                        .representatives()
                        .iter()
                        .map(|x| tgt.coordinates(&self.apply_d(m, x)).expect("d maps Z^r_p into Z^r_{p-r}"))
                        .collect();
                    if cols.iter().flatten().all(|x| self.field.is_zero(x)) {
                        continue;
                    }
                    let matrix = (0..tgt.dim())
                        .map(|i| cols.iter().map(|c| self.field.render(&c[i])).collect())
                        .collect();
                    differentials.push(PageDifferential {
                        from: (p, m as i64 - p as i64),
                        to: (tp, m as i64 - 1 - tp as i64),
                        matrix,
                    });
                }
            }
            pages.push(SpectralPage { r, dims, differentials });
        }
        pages
    }

    /// `d_r ∘ d_r = 0` is implicit in the construction; this checks that each
    /// page's dimensions are the homology of the previous page.
    pub fn check_pages(&self) -> Result<()> {
        for w in self.pages.windows(2) {
            let (cur, next) = (&w[0], &w[1]);
            let mut keys: BTreeSet<(u32, i64)> = cur.dims.keys().copied().collect();
            keys.extend(next.dims.keys().copied());
            for (p, q) in keys {
                let rank_of = |d: &PageDifferential| -> usize {
                    let m: DenseMatrix<F::Elem> = d
                        .matrix
                        .iter()
                        .map(|row| row.iter().map(|s| self.parse(s)).collect())
                        .collect();
                    rank(&self.field, &m)
                };
                let out: usize = cur.differentials.iter().filter(|d| d.from == (p, q)).map(rank_of).sum();
                let inc: usize = cur.differentials.iter().filter(|d| d.to == (p, q)).map(rank_of).sum();
                if cur.dim(p, q) < out + inc || next.dim(p, q) != cur.dim(p, q) - out - inc {
                    return Err(Error::FiltrationViolation { degree: (p as i64 + q) as usize });
                }
            }
        }
        Ok(())
    }

    fn parse(&self, s: &str) -> F::Elem {
        // rendered entries are integers or fractions `a/b`
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.parse::<i64>().expect("entry"), b.parse::<i64>().expect("entry")),
            None => (s.parse::<i64>().expect("entry"), 1),
        };
        self.field.mul(&self.field.from_i64(num), &self.field.inv(&self.field.from_i64(den)))
    }
}

/// Matrix of the map induced by a filtration-preserving, degree-0 chain map
/// on `E^r_{p,q}`.
pub fn page_map<F: Field>(
    f: &ChainMap,
    source: &SpectralSequence<F>,
    target: &SpectralSequence<F>,
    r: usize,
    p: u32,
    q: i64,
) -> Result<Vec<Vec<F::Elem>>> {
    let m = p as i64 + q;
    if f.degree_shift != 0 {
        return Err(Error::DimensionMismatch("page maps need a degree-0 chain map".into()));
    }
    if m < 0 {
        return Ok(Vec::new());
    }
    let m = m as usize;
    let field = source.field();
    let src = source.quotient(r, p, m);
    let tgt = target.quotient(r, p, m);
    let block = f.block(m, &source.complex, &target.complex);
    let mut cols = Vec::with_capacity(src.dim());
    for x in src.representatives() {
        let mut y = vec![field.zero(); block.rows()];
        for (row, c, v) in block.triplets() {
            y[row] = field.add(&y[row], &field.mul(&field.from_i64(v), &x[c]));
        }
        cols.push(tgt.coordinates(&y).ok_or(Error::FiltrationViolation { degree: m })?);
    }
    Ok((0..tgt.dim()).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect())
}

fn is_iso<F: Field>(field: &F, m: &[Vec<F::Elem>], src_dim: usize, tgt_dim: usize) -> bool {
    src_dim == tgt_dim && (src_dim == 0 || rank(field, &m.to_vec()) == src_dim)
}

/// Outcome of comparing two spectral sequences through a chain map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsBoundReport {
    /// largest `t` with `E^1` isomorphisms for all `p + q ≤ t` (`−1` if none)
    pub e1_iso_bound: i64,
    /// `⌊(t − 1)/2⌋`
    pub transferred: i64,
    /// largest `s` with `E^∞` isomorphisms for all `p + q ≤ s` (`−1` if none)
    pub einf_iso_bound: i64,
    pub ok: bool,
}

/// Checks that an `E^1` isomorphism range `p + q ≤ 2s + 1` yields an `E^∞`
/// isomorphism range `p + q ≤ s`. Levels must be preserved by `f`.
pub fn check_ss_bound<F: Field>(
    f: &ChainMap,
    source: &SpectralSequence<F>,
    target: &SpectralSequence<F>,
) -> Result<SsBoundReport> {
    f.check(&source.complex, &target.complex)?;
    let top = source.degrees().max(target.degrees()) as i64;
    let mut levels: BTreeSet<u32> = source.present.clone();
    levels.extend(target.present.iter().copied());
    let bound_for = |r: usize| -> Result<i64> {
        for m in 0..=top {
            for &p in &levels {
                let q = m - p as i64;
                if q < 0 {
                    continue;
                }
                let (sd, td) = (source.page(r).dim(p, q), target.page(r).dim(p, q));
                if sd == 0 && td == 0 {
                    continue;
                }
                let mat = page_map(f, source, target, r, p, q)?;
                if !is_iso(source.field(), &mat, sd, td) {
                    return Ok(m - 1);
                }
            }
        }
        Ok(top)
    };
    let e1 = bound_for(1)?;
    let inf = source.infinity_index().max(target.infinity_index());
    let einf = bound_for(inf)?;
    let transferred = ss_transfer_range(e1);
    Ok(SsBoundReport { e1_iso_bound: e1, transferred, einf_iso_bound: einf, ok: einf >= transferred })
}
