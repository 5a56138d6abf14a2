//! Fox–Neuwirth cell structures on one-point compactifications.
//!
//! A configuration in ℝ² is sorted into columns (equal x-coordinate, read left
//! to right) and, within a column, entries read bottom to top. The set of
//! configurations with a given column shape is an open cell of dimension
//! `#columns + #entries`. Its closure in the compactification meets the
//! cells obtained by merging two adjacent columns (every shuffle of their
//! entries) or, in a symmetric product, by merging two adjacent entries of
//! one column. Everything else falls to the basepoint, so the cellular chain
//! complex computes Borel–Moore homology.
//!
//! Cells are oriented by the coordinate list `x_1 … x_k, y_{1,1} … y_{k,m_k}`.
//! Comparing the outward-normal-first boundary orientation with the face's
//! own orientation gives the incidence numbers:
//!
//! * merging columns `i, i+1` (0-based) along a shuffle `σ`: `(−1)^i · sgn σ`,
//!   where `sgn σ` counts pairs with an entry of column `i + 1` placed below an
//!   entry of column `i`;
//! * merging the entry with global index `g` (0-based, reading order) into the
//!   one below it, in a cell with `k` columns: `(−1)^(k + g + 1)`.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homology::{ChainComplex, ChainMap, LevelOrder, SparseMatrix};
use crate::partitions::{enumerate_partitions, is_subpartition, ColourVector, Partition};

/// Default bound on the total weight of a spec.
pub const DEFAULT_LIMIT: u32 = 8;

/// One point of a configuration: a colour (coloured mode) or a multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Entry {
    pub label: Option<u8>,
    pub weight: u8,
}

impl Entry {
    pub fn coloured(colour: u8) -> Self {
        Self { label: Some(colour), weight: 1 }
    }

    pub fn weighted(weight: u8) -> Self {
        Self { label: None, weight }
    }
}

/// A Fox–Neuwirth cell: column sizes plus the entries in reading order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FnCell {
    sizes: Vec<u8>,
    entries: Vec<Entry>,
}

impl FnCell {
    pub fn new(columns: Vec<Vec<Entry>>) -> Self {
        let sizes = columns.iter().map(|c| c.len() as u8).collect();
        let entries = columns.into_iter().flatten().collect();
        Self { sizes, entries }
    }

    fn from_parts(sizes: Vec<u8>, entries: Vec<Entry>) -> Self {
        Self { sizes, entries }
    }

    pub fn dimension(&self) -> usize {
        self.sizes.len() + self.entries.len()
    }

    pub fn column_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn columns(&self) -> Vec<&[Entry]> {
        let mut out = Vec::with_capacity(self.sizes.len());
        let mut start = 0;
        for &s in &self.sizes {
            out.push(&self.entries[start..start + s as usize]);
            start += s as usize;
        }
        out
    }

    pub fn total_weight(&self) -> u32 {
        self.entries.iter().map(|e| e.weight as u32).sum()
    }

    /// Multiset of entry weights.
    pub fn pattern(&self) -> Partition {
        Partition::new(self.entries.iter().map(|e| e.weight as u32).collect()).expect("weights are positive")
    }

    /// `2·total − dimension`.
    pub fn codimension(&self) -> usize {
        2 * self.total_weight() as usize - self.dimension()
    }

    /// Prepends a column holding the single entry `e`.
    pub fn prepend(&self, e: Entry) -> Self {
        let mut sizes = Vec::with_capacity(self.sizes.len() + 1);
        sizes.push(1);
        sizes.extend_from_slice(&self.sizes);
        let mut entries = Vec::with_capacity(self.entries.len() + 1);
        entries.push(e);
        entries.extend_from_slice(&self.entries);
        Self { sizes, entries }
    }

    /// Applies `f` to every entry, keeping the shape.
    pub fn relabel(&self, f: impl Fn(Entry) -> Entry) -> Self {
        Self { sizes: self.sizes.clone(), entries: self.entries.iter().map(|&e| f(e)).collect() }
    }
}

impl Ord for FnCell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dimension()
            .cmp(&other.dimension())
            .then_with(|| self.sizes.cmp(&other.sizes))
            .then_with(|| self.entries.cmp(&other.entries))
    }
}

impl PartialOrd for FnCell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FnCell {
    /// `[aa|b]` for colours (`a` is colour 1), `[1,1|2]` for weights.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<String> = self
            .columns()
            .iter()
            .map(|col| match col.first().and_then(|e| e.label) {
                Some(_) => col.iter().map(|e| colour_char(e.label.unwrap_or(0))).collect(),
                None => col.iter().map(|e| e.weight.to_string()).collect::<Vec<_>>().join(","),
            })
            .collect();
        write!(f, "[{}]", cols.join("|"))
    }
}

fn colour_char(c: u8) -> char {
    if (1..=26).contains(&c) {
        (b'a' + c - 1) as char
    } else {
        '?'
    }
}

/// Which space a complex models.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FnSpec {
    /// `Conf_v(ℝ²)`.
    Coloured(ColourVector),
    /// The complement of the closure of the `λ` stratum in `Sym^n(ℝ²)`.
    Complement(Partition),
    /// The single stratum with multiplicity pattern exactly `λ` (locally closed).
    Stratum(Partition),
    /// All of `Sym^n(ℝ²)`.
    Symmetric(u32),
}

/// `Conf_v(ℝ²)`; trailing zero colours are dropped.
pub fn conf_space_spec(v: &ColourVector) -> FnSpec {
    FnSpec::Coloured(v.trimmed())
}

/// The complement of the closure of the `λ` stratum.
pub fn wcomp_spec(lambda: &Partition) -> Result<FnSpec> {
    let spec = FnSpec::Complement(lambda.clone());
    check_open(&spec)?;
    Ok(spec)
}

/// A split of one part into two positive parts.
fn one_step_splits(mu: &Partition) -> Vec<Partition> {
    let mut out = Vec::new();
    for (i, &part) in mu.parts().iter().enumerate() {
        for a in 1..part {
            let mut parts: Vec<u32> = mu.parts().to_vec();
            parts.remove(i);
            parts.push(a);
            parts.push(part - a);
            out.push(Partition::new(parts).expect("positive parts"));
        }
    }
    out
}

/// Asserts the allowed patterns are closed under splitting parts, so the
/// excluded set is closed and collapsing it is legitimate.
pub fn check_open(spec: &FnSpec) -> Result<()> {
    let n = spec.total_weight();
    for mu in enumerate_partitions(n) {
        if !spec.allows(&mu) {
            continue;
        }
        if let Some(bad) = one_step_splits(&mu).into_iter().find(|s| !spec.allows(s)) {
            return Err(Error::NotOpen(format!("{mu} is allowed but its refinement {bad} is not")));
        }
    }
    Ok(())
}

impl FnSpec {
    pub fn total_weight(&self) -> u32 {
        match self {
            FnSpec::Coloured(v) => v.norm(),
            FnSpec::Complement(l) | FnSpec::Stratum(l) => l.total(),
            FnSpec::Symmetric(n) => *n,
        }
    }

    /// Real dimension of the space, `2 · total weight`.
    pub fn ambient_dim(&self) -> usize {
        2 * self.total_weight() as usize
    }

    /// Whether configurations with multiplicity pattern `mu` belong to the space.
    pub fn allows(&self, mu: &Partition) -> bool {
        if mu.total() != self.total_weight() {
            return false;
        }
        match self {
            FnSpec::Coloured(_) => mu.parts().iter().all(|&p| p == 1),
            FnSpec::Complement(l) => !is_subpartition(mu, l).unwrap_or(true),
            FnSpec::Stratum(l) => mu == l,
            FnSpec::Symmetric(_) => true,
        }
    }

    pub fn is_coloured(&self) -> bool {
        matches!(self, FnSpec::Coloured(_))
    }

    /// Dimension of the space itself: `2 · #parts` for a stratum, else the ambient dimension.
    pub fn manifold_dim(&self) -> usize {
        match self {
            FnSpec::Stratum(l) => 2 * l.parts_count(),
            _ => self.ambient_dim(),
        }
    }

    fn check_limit(&self, limit: u32) -> Result<()> {
        let total = self.total_weight();
        if total > limit {
            return Err(Error::SizeLimitExceeded { total, limit });
        }
        Ok(())
    }
}

impl fmt::Display for FnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnSpec::Coloured(v) => write!(f, "Conf_{v}"),
            FnSpec::Complement(l) => write!(f, "wcomp_{l}"),
            FnSpec::Stratum(l) => write!(f, "w_{l}"),
            FnSpec::Symmetric(n) => write!(f, "Sym^{n}"),
        }
    }
}

/// All compositions of `n` (ordered sequences of positive integers).
fn compositions(n: usize) -> Vec<Vec<u8>> {
    fn rec(rest: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for first in 1..=rest {
            cur.push(first as u8);
            rec(rest - first, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut out);
    out
}

/// Distinct orderings of a multiset of labels, lexicographic.
fn multiset_permutations(counts: &[u32]) -> Vec<Vec<u8>> {
    fn rec(counts: &mut [u32], left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for c in 0..counts.len() {
            if counts[c] == 0 {
                continue;
            }
            counts[c] -= 1;
            cur.push(c as u8 + 1);
            rec(counts, left - 1, cur, out);
            cur.pop();
            counts[c] += 1;
        }
    }
    let mut counts = counts.to_vec();
    let total = counts.iter().sum::<u32>() as usize;
    let mut out = Vec::new();
    rec(&mut counts, total, &mut Vec::new(), &mut out);
    out
}

/// Every cell of the spec, grouped by dimension (index = dimension) and sorted.
pub fn enumerate_cells(spec: &FnSpec, limit: u32) -> Result<Vec<Vec<FnCell>>> {
    spec.check_limit(limit)?;
    let n = spec.total_weight() as usize;
    let mut cells: Vec<FnCell> = Vec::new();
    match spec {
        FnSpec::Coloured(v) => {
            let shapes = compositions(n);
            for labels in multiset_permutations(v.counts()) {
                let entries: Vec<Entry> = labels.iter().map(|&c| Entry::coloured(c)).collect();
                for sizes in &shapes {
                    cells.push(FnCell::from_parts(sizes.clone(), entries.clone()));
                }
            }
        }
        _ => {
            let allowed: HashSet<Partition> =
                enumerate_partitions(n as u32).into_iter().filter(|mu| spec.allows(mu)).collect();
            for weights in compositions(n) {
                let entries: Vec<Entry> = weights.iter().map(|&w| Entry::weighted(w)).collect();
                let pattern = Partition::new(weights.iter().map(|&w| w as u32).collect()).expect("positive");
                if !allowed.contains(&pattern) {
                    continue;
                }
                for sizes in compositions(entries.len()) {
                    cells.push(FnCell::from_parts(sizes, entries.clone()));
                }
            }
        }
    }
    if n == 0 && cells.is_empty() && spec.allows(&Partition::empty()) {
        cells.push(FnCell::from_parts(Vec::new(), Vec::new()));
    }
    let mut by_dim: Vec<Vec<FnCell>> = vec![Vec::new(); 2 * n + 1];
    for c in cells {
        by_dim[c.dimension()].push(c);
    }
    for d in &mut by_dim {
        d.sort();
    }
    Ok(by_dim)
}

/// Interleavings of `a` below/above `b`: each result lists the merged column
/// bottom to top and the number of `(a, b)` pairs with `b` below `a`.
fn shuffles(a: &[Entry], b: &[Entry]) -> Vec<(Vec<Entry>, usize)> {
    let total = a.len() + b.len();
    let mut out = Vec::new();
    // choose positions of `a` entries by bitmask
    for mask in 0u32..(1u32 << total) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        let mut merged = Vec::with_capacity(total);
        let (mut ia, mut ib, mut inversions) = (0, 0, 0);
        for pos in 0..total {
            if mask & (1 << pos) != 0 {
                merged.push(a[ia]);
                ia += 1;
                inversions += ib;
            } else {
                merged.push(b[ib]);
                ib += 1;
            }
        }
        out.push((merged, inversions));
    }
    out
}

/// Signed codimension-one degenerations of `cell` that stay in the space.
pub fn boundary(cell: &FnCell, spec: &FnSpec) -> Vec<(FnCell, i64)> {
    let mut terms: Vec<(FnCell, i64)> = Vec::new();
    let k = cell.sizes.len();
    let starts: Vec<usize> = cell
        .sizes
        .iter()
        .scan(0usize, |acc, &s| {
            let start = *acc;
            *acc += s as usize;
            Some(start)
        })
        .collect();
    // column merges keep the pattern, so they always stay in the space
    for i in 0..k.saturating_sub(1) {
        let a = &cell.entries[starts[i]..starts[i] + cell.sizes[i] as usize];
        let b = &cell.entries[starts[i + 1]..starts[i + 1] + cell.sizes[i + 1] as usize];
        let base = if i % 2 == 0 { 1 } else { -1 };
        for (merged, inv) in shuffles(a, b) {
            let sign = if inv % 2 == 0 { base } else { -base };
            let mut sizes = cell.sizes.clone();
            sizes[i] += sizes[i + 1];
            sizes.remove(i + 1);
            let mut entries = cell.entries.clone();
            entries.splice(starts[i]..starts[i + 1] + cell.sizes[i + 1] as usize, merged);
            terms.push((FnCell::from_parts(sizes, entries), sign));
        }
    }
    if !spec.is_coloured() {
        for c in 0..k {
            for j in 1..cell.sizes[c] as usize {
                let g = starts[c] + j;
                let mut entries = cell.entries.clone();
                let upper = entries.remove(g);
                entries[g - 1].weight += upper.weight;
                let mut sizes = cell.sizes.clone();
                sizes[c] -= 1;
                let face = FnCell::from_parts(sizes, entries);
                if !spec.allows(&face.pattern()) {
                    continue;
                }
                let sign = if (k + g + 1) % 2 == 0 { 1 } else { -1 };
                terms.push((face, sign));
            }
        }
    }
    terms
}

/// A built cellular model: cells by dimension and the boundary complex, whose
/// generators are filtered by stratum codimension `2·(n − #entries)`.
#[derive(Clone, Debug)]
pub struct FnComplex {
    pub spec: FnSpec,
    pub cells: Vec<Vec<FnCell>>,
    index: Vec<HashMap<FnCell, usize>>,
    pub complex: ChainComplex,
}

impl FnComplex {
    pub fn cell_index(&self, cell: &FnCell) -> Option<usize> {
        self.index.get(cell.dimension())?.get(cell).copied()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    /// Real dimension of the modelled space.
    pub fn manifold_dim(&self) -> usize {
        self.spec.manifold_dim()
    }

    /// Dual complex graded so that degree-`m` homology is `H_c^{dim − m}`;
    /// by Poincaré duality this is `H_m` of the space.
    pub fn dual(&self) -> Result<ChainComplex> {
        self.complex.dual(self.manifold_dim())
    }

    /// Versioned record of the cells and boundary triplets.
    pub fn serialize_record(&self) -> SerializedComplex {
        SerializedComplex {
            version: SERIAL_VERSION,
            spec: self.spec.clone(),
            cells: self.cells.iter().map(|d| d.iter().map(ToString::to_string).collect()).collect(),
            boundaries: (0..self.complex.len())
                .map(|k| self.complex.boundary(k).triplets().collect())
                .collect(),
        }
    }
}

pub const SERIAL_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerializedComplex {
    pub version: u32,
    pub spec: FnSpec,
    /// cell names by dimension, in canonical order
    pub cells: Vec<Vec<String>>,
    /// `(row, col, coefficient)` of `d_k` for every `k`
    pub boundaries: Vec<Vec<(usize, usize, i64)>>,
}

/// Builds the filtered complex and checks `d∘d = 0`.
pub fn build_complex(spec: &FnSpec, limit: u32) -> Result<FnComplex> {
    if let FnSpec::Complement(_) = spec {
        check_open(spec)?;
    }
    let cells = enumerate_cells(spec, limit)?;
    let index: Vec<HashMap<FnCell, usize>> = cells
        .iter()
        .map(|d| d.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect())
        .collect();
    let boundaries: Vec<SparseMatrix> = (0..cells.len())
        .into_par_iter()
        .map(|d| {
            if d == 0 {
                return SparseMatrix::zeros(0, cells[0].len());
            }
            let triplets: Vec<(usize, usize, i64)> = cells[d]
                .iter()
                .enumerate()
                .flat_map(|(col, cell)| {
                    boundary(cell, spec).into_iter().map(move |(face, s)| (face, col, s))
                })
                .map(|(face, col, s)| {
                    let row = *index[d - 1].get(&face).expect("faces of allowed cells are enumerated");
                    (row, col, s)
                })
                .collect();
            SparseMatrix::from_triplets(cells[d - 1].len(), cells[d].len(), triplets)
        })
        .collect();
    let n = spec.total_weight();
    let levels = cells
        .iter()
        .map(|d| d.iter().map(|c| 2 * (n - c.entries.len() as u32)).collect())
        .collect();
    let complex = ChainComplex::new(boundaries)?.with_levels(levels, LevelOrder::NonDecreasing)?;
    complex.check_d_squared()?;
    Ok(FnComplex { spec: spec.clone(), cells, index, complex })
}

/// How the stabilisation adds a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabilizeBy {
    /// a point of the given colour (1-based)
    Colour(usize),
    /// a point of multiplicity one
    WeightOne,
}

/// The spec after adding one point.
pub fn stabilized_spec(spec: &FnSpec, by: StabilizeBy) -> Result<FnSpec> {
    match (spec, by) {
        (FnSpec::Coloured(v), StabilizeBy::Colour(i)) => Ok(FnSpec::Coloured(v.plus_unit(i)?)),
        (FnSpec::Complement(l), StabilizeBy::WeightOne) => Ok(FnSpec::Complement(l.prepend_ones(1))),
        (FnSpec::Stratum(l), StabilizeBy::WeightOne) => Ok(FnSpec::Stratum(l.prepend_ones(1))),
        (FnSpec::Symmetric(n), StabilizeBy::WeightOne) => Ok(FnSpec::Symmetric(n + 1)),
        _ => Err(Error::DimensionMismatch(format!("{spec} cannot be stabilised by {by:?}"))),
    }
}

/// The prepend-a-column map `e ↦ (−1)^{#columns(e)} [new | e]`.
///
/// On cochains it commutes with the coboundary and raises the cell degree by
/// two, so between the dual complexes (graded by homological degree of the
/// spaces) it is a degree-0 chain map. The result is checked before return.
pub fn stabilization_chain_map(source: &FnComplex, target: &FnComplex, by: StabilizeBy) -> Result<ChainMap> {
    let expected = stabilized_spec(&source.spec, by)?;
    if expected != target.spec {
        return Err(Error::DimensionMismatch(format!("target {} is not {expected}", target.spec)));
    }
    let new = match by {
        StabilizeBy::Colour(i) => Entry::coloured(i as u8),
        StabilizeBy::WeightOne => Entry::weighted(1),
    };
    let (a_src, a_tgt) = (source.manifold_dim(), target.manifold_dim());
    let blocks = (0..=a_src)
        .map(|m| {
            let k = a_src - m;
            let src_cells = source.cells.get(k).map(Vec::as_slice).unwrap_or(&[]);
            let tgt_rank = target.cells.get(a_tgt - m).map_or(0, Vec::len);
            let triplets: Vec<(usize, usize, i64)> = src_cells
                .iter()
                .enumerate()
                .map(|(col, cell)| {
                    let img = cell.prepend(new);
                    let row = target.cell_index(&img).ok_or_else(|| {
                        Error::DimensionMismatch(format!("{img} missing from {}", target.spec))
                    })?;
                    let sign = if cell.column_count() % 2 == 0 { 1 } else { -1 };
                    Ok((row, col, sign))
                })
                .collect::<Result<_>>()?;
            Ok(SparseMatrix::from_triplets(tgt_rank, src_cells.len(), triplets))
        })
        .collect::<Result<Vec<_>>>()?;
    let map = ChainMap { degree_shift: 0, blocks };
    map.check(&source.dual()?, &target.dual()?)?;
    Ok(map)
}

/// Whether `relabel` is a bijection of cells carrying `a`'s boundary matrices
/// exactly onto `b`'s.
pub fn isomorphic_by_relabel(a: &FnComplex, b: &FnComplex, relabel: impl Fn(&FnCell) -> FnCell) -> bool {
    // the two may list different numbers of (empty) top dimensions
    let top = a.cells.len().max(b.cells.len());
    let count = |x: &FnComplex, d: usize| x.cells.get(d).map_or(0, Vec::len);
    if (0..top).any(|d| count(a, d) != count(b, d)) {
        return false;
    }
    let mut perm: Vec<Vec<usize>> = Vec::with_capacity(top);
    for d in (0..top).map(|d| a.cells.get(d).map_or(&[][..], Vec::as_slice)) {
        let mut p = Vec::with_capacity(d.len());
        for c in d {
            match b.cell_index(&relabel(c)) {
                Some(i) => p.push(i),
                None => return false,
            }
        }
        perm.push(p);
    }
    (1..top).all(|k| {
        let da = a.complex.boundary(k);
        let db = b.complex.boundary(k);
        let moved = SparseMatrix::from_triplets(
            da.rows(),
            da.cols(),
            da.triplets().map(|(r, c, v)| (perm[k - 1][r], perm[k][c], v)),
        );
        moved == db
    })
}

/// The single-stratum complex for `λ` against the coloured complex for its
/// multiplicity vector, matching an entry of weight `w` with colour `w`.
pub fn colour_comp_isomorphic(lambda: &Partition, limit: u32) -> Result<bool> {
    let stratum = build_complex(&FnSpec::Stratum(lambda.clone()), limit)?;
    let coloured = build_complex(&conf_space_spec(&lambda.multiplicity_vector()), limit)?;
    Ok(isomorphic_by_relabel(&stratum, &coloured, |c| c.relabel(|e| Entry::coloured(e.weight))))
}
