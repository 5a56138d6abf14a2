//! Smith normal form over ℤ.
//!
//! Two routes are provided. [`smith_normal_form`] is a dense big-integer
//! reduction that also returns the unimodular transforms. [`invariant_factors`]
//! only needs the diagonal: it eliminates unit pivots on the sparse matrix
//! with Markowitz-style pivot choice and hands the unit-free residual to the
//! dense reduction. The same sparse elimination over `ℤ/p` gives ranks mod p.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{IntMatrix, SparseMatrix};

/// `U · M · V = D` with `U`, `V` unimodular and `D` diagonal, `d_i | d_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    /// `min(rows, cols)` diagonal entries, non-negative, nonzero ones first.
    pub diagonal: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
    pub left_inverse: IntMatrix,
    pub right_inverse: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }
}

struct Transforms {
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

/// Dense Smith normal form with transforms.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let mut a = m.clone();
    let mut t = Transforms {
        u: IntMatrix::identity(m.rows()),
        u_inv: IntMatrix::identity(m.rows()),
        v: IntMatrix::identity(m.cols()),
        v_inv: IntMatrix::identity(m.cols()),
    };
    let diagonal = reduce(&mut a, Some(&mut t));
    SmithForm { diagonal, left: t.u, right: t.v, left_inverse: t.u_inv, right_inverse: t.v_inv }
}

/// Dense diagonal only.
pub fn dense_invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let mut a = m.clone();
    reduce(&mut a, None)
}

fn row_add(a: &mut IntMatrix, t: &mut Option<&mut Transforms>, dst: usize, src: usize, q: &BigInt) {
    a.add_row_multiple(dst, src, q);
    if let Some(t) = t {
        t.u.add_row_multiple(dst, src, q);
        t.u_inv.add_col_multiple(src, dst, &-q);
    }
}

fn col_add(a: &mut IntMatrix, t: &mut Option<&mut Transforms>, dst: usize, src: usize, q: &BigInt) {
    a.add_col_multiple(dst, src, q);
    if let Some(t) = t {
        t.v.add_col_multiple(dst, src, q);
        t.v_inv.add_row_multiple(src, dst, &-q);
    }
}

fn row_swap(a: &mut IntMatrix, t: &mut Option<&mut Transforms>, i: usize, j: usize) {
    a.swap_rows(i, j);
    if let Some(t) = t {
        t.u.swap_rows(i, j);
        t.u_inv.swap_cols(i, j);
    }
}

fn col_swap(a: &mut IntMatrix, t: &mut Option<&mut Transforms>, i: usize, j: usize) {
    a.swap_cols(i, j);
    if let Some(t) = t {
        t.v.swap_cols(i, j);
        t.v_inv.swap_rows(i, j);
    }
}

fn row_negate(a: &mut IntMatrix, t: &mut Option<&mut Transforms>, i: usize) {
    a.negate_row(i);
    if let Some(t) = t {
        t.u.negate_row(i);
        t.u_inv.negate_col(i);
    }
}

fn reduce(a: &mut IntMatrix, mut t: Option<&mut Transforms>) -> Vec<BigInt> {
    let (m, n) = (a.rows(), a.cols());
    let steps = m.min(n);
    for k in 0..steps {
        loop {
            // smallest nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in k..m {
                for j in k..n {
                    let v = &a[(i, j)];
                    if v.is_zero() {
                        continue;
                    }
                    if best.map_or(true, |(bi, bj)| v.abs() < a[(bi, bj)].abs()) {
                        best = Some((i, j));
                        if v.is_one() || (-v).is_one() {
                            break;
                        }
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(a, steps);
            };
            row_swap(a, &mut t, k, pi);
            col_swap(a, &mut t, k, pj);

            let mut clean = true;
            for i in k + 1..m {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let q = a[(i, k)].div_floor(&a[(k, k)]);
                row_add(a, &mut t, i, k, &-q);
                if !a[(i, k)].is_zero() {
                    clean = false;
                }
            }
            for j in k + 1..n {
                if a[(k, j)].is_zero() {
                    continue;
                }
                let q = a[(k, j)].div_floor(&a[(k, k)]);
                col_add(a, &mut t, j, k, &-q);
                if !a[(k, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let pivot = a[(k, k)].clone();
            let offender = (k + 1..m).find(|&i| (k + 1..n).any(|j| !a[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => row_add(a, &mut t, k, i, &BigInt::one()),
                None => break,
            }
        }
        if a[(k, k)].is_negative() {
            row_negate(a, &mut t, k);
        }
    }
    finish(a, steps)
}

fn finish(a: &IntMatrix, steps: usize) -> Vec<BigInt> {
    (0..steps).map(|i| a[(i, i)].clone()).collect()
}

/// Arithmetic used by the sparse elimination.
trait ElimRing {
    type E: Clone;
    fn from_i64(&self, v: i64) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn is_unit(&self, a: &Self::E) -> bool;
    /// `a / u` for a unit `u`.
    fn div_unit(&self, a: &Self::E, u: &Self::E) -> Self::E;
    /// `a − f·b`, or `None` on overflow.
    fn mul_sub(&self, a: &Self::E, f: &Self::E, b: &Self::E) -> Option<Self::E>;
    fn to_bigint(&self, a: &Self::E) -> BigInt;
}

struct I64Ring;
impl ElimRing for I64Ring {
    type E = i64;
    fn from_i64(&self, v: i64) -> i64 {
        v
    }
    fn is_zero(&self, a: &i64) -> bool {
        *a == 0
    }
    fn is_unit(&self, a: &i64) -> bool {
        *a == 1 || *a == -1
    }
    fn div_unit(&self, a: &i64, u: &i64) -> i64 {
        a * u
    }
    fn mul_sub(&self, a: &i64, f: &i64, b: &i64) -> Option<i64> {
        a.checked_sub(f.checked_mul(*b)?)
    }
    fn to_bigint(&self, a: &i64) -> BigInt {
        BigInt::from(*a)
    }
}

struct BigRing;
impl ElimRing for BigRing {
    type E = BigInt;
    fn from_i64(&self, v: i64) -> BigInt {
        BigInt::from(v)
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn is_unit(&self, a: &BigInt) -> bool {
        a.is_one() || (-a).is_one()
    }
    fn div_unit(&self, a: &BigInt, u: &BigInt) -> BigInt {
        a * u
    }
    fn mul_sub(&self, a: &BigInt, f: &BigInt, b: &BigInt) -> Option<BigInt> {
        Some(a - f * b)
    }
    fn to_bigint(&self, a: &BigInt) -> BigInt {
        a.clone()
    }
}

struct ModP(u64);
impl ModP {
    fn pow(&self, b: u64, mut e: u64) -> u64 {
        let p = self.0 as u128;
        let (mut r, mut b) = (1u128, b as u128 % p);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r as u64
    }
}
impl ElimRing for ModP {
    type E = u64;
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.0 as i64) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn is_unit(&self, a: &u64) -> bool {
        *a != 0
    }
    fn div_unit(&self, a: &u64, u: &u64) -> u64 {
        let inv = self.pow(*u, self.0 - 2);
        ((*a as u128 * inv as u128) % self.0 as u128) as u64
    }
    fn mul_sub(&self, a: &u64, f: &u64, b: &u64) -> Option<u64> {
        let p = self.0 as u128;
        let fb = (*f as u128 * *b as u128) % p;
        Some(((*a as u128 + p - fb) % p) as u64)
    }
    fn to_bigint(&self, a: &u64) -> BigInt {
        BigInt::from(*a)
    }
}

struct Overflow;

/// Result of sparse unit-pivot elimination: pivots eliminated plus the residual.
struct Eliminated<E> {
    unit_pivots: usize,
    residual_rows: Vec<Vec<(usize, E)>>,
    residual_cols: Vec<usize>,
}

fn eliminate<R: ElimRing>(ring: &R, m: &SparseMatrix) -> Result<Eliminated<R::E>, Overflow> {
    let mut rows: Vec<Vec<(usize, R::E)>> = m
        .row_lists()
        .into_iter()
        .map(|r| r.into_iter().map(|(c, v)| (c, ring.from_i64(v))).filter(|(_, v)| !ring.is_zero(v)).collect())
        .collect();
    let mut cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols()];
    for (r, row) in rows.iter().enumerate() {
        for (c, _) in row {
            cols[*c].insert(r);
        }
    }
    let mut row_alive = vec![true; m.rows()];
    let mut col_alive = vec![true; m.cols()];
    let mut unit_pivots = 0;

    // Markowitz-style choice: shortest live column holding a unit, then the
    // shortest row among its units. Stale heap entries are skipped lazily.
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
        (0..cols.len()).filter(|&c| !cols[c].is_empty()).map(|c| Reverse((cols[c].len(), c))).collect();
    loop {
        let mut best: Option<(usize, usize)> = None;
        while let Some(Reverse((len, c))) = heap.pop() {
            if !col_alive[c] || cols[c].len() != len || len == 0 {
                continue;
            }
            let mut pick: Option<(usize, usize)> = None;
            for &r in &cols[c] {
                let row = &rows[r];
                let v = &row[row.binary_search_by_key(&c, |(cc, _)| *cc).unwrap_or_else(|_| unreachable!())].1;
                if ring.is_unit(v) && pick.map_or(true, |(_, l)| row.len() < l) {
                    pick = Some((r, row.len()));
                }
            }
            if let Some((r, _)) = pick {
                best = Some((r, c));
                break;
            }
        }
        let Some((pr, pc)) = best else { break };
        let prow = std::mem::take(&mut rows[pr]);
        let pval = prow.iter().find(|(c, _)| *c == pc).map(|(_, v)| v.clone()).expect("pivot present");
        let targets: Vec<usize> = cols[pc].iter().copied().filter(|&r| r != pr).collect();
        for r in targets {
            let row = std::mem::take(&mut rows[r]);
            let a = row.iter().find(|(c, _)| *c == pc).map(|(_, v)| v.clone()).expect("entry present");
            let f = ring.div_unit(&a, &pval);
            // row ← row − f·prow, merged by column
            let mut merged: Vec<(usize, R::E)> = Vec::with_capacity(row.len() + prow.len());
            let (mut i, mut j) = (0, 0);
            while i < row.len() || j < prow.len() {
                let take_row = j >= prow.len() || (i < row.len() && row[i].0 < prow[j].0);
                let take_piv = i >= row.len() || (j < prow.len() && prow[j].0 < row[i].0);
                if take_row {
                    merged.push(row[i].clone());
                    i += 1;
                } else if take_piv {
                    let c = prow[j].0;
                    let zero = ring.from_i64(0);
                    let v = ring.mul_sub(&zero, &f, &prow[j].1).ok_or(Overflow)?;
                    if !ring.is_zero(&v) {
                        cols[c].insert(r);
                        merged.push((c, v));
                    }
                    j += 1;
                } else {
                    let c = row[i].0;
                    let v = ring.mul_sub(&row[i].1, &f, &prow[j].1).ok_or(Overflow)?;
                    if ring.is_zero(&v) {
                        cols[c].remove(&r);
                    } else {
                        merged.push((c, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
            rows[r] = merged;
        }
        for (c, _) in &prow {
            cols[*c].remove(&pr);
        }
        row_alive[pr] = false;
        col_alive[pc] = false;
        for (c, _) in &prow {
            if col_alive[*c] && !cols[*c].is_empty() {
                heap.push(Reverse((cols[*c].len(), *c)));
            }
        }
        // The pivot column is now zero outside the pivot row; the pivot row is
        // cleared by column operations, which touch nothing else.
        unit_pivots += 1;
    }

    let residual_cols: Vec<usize> = (0..cols.len()).filter(|&c| col_alive[c] && !cols[c].is_empty()).collect();
    let residual_rows: Vec<Vec<(usize, R::E)>> = rows
        .into_iter()
        .zip(&row_alive)
        .filter(|(row, &alive)| alive && !row.is_empty())
        .map(|(row, _)| row)
        .collect();
    Ok(Eliminated { unit_pivots, residual_rows, residual_cols })
}

fn residual_dense<R: ElimRing>(ring: &R, e: &Eliminated<R::E>) -> IntMatrix {
    let mut m = IntMatrix::zeros(e.residual_rows.len(), e.residual_cols.len());
    for (i, row) in e.residual_rows.iter().enumerate() {
        for (c, v) in row {
            let j = e.residual_cols.binary_search(c).expect("residual column");
            m[(i, j)] = ring.to_bigint(v);
        }
    }
    m
}

fn factors_via<R: ElimRing>(ring: &R, m: &SparseMatrix) -> Result<Vec<BigInt>, Overflow> {
    let e = eliminate(ring, m)?;
    let mut out = vec![BigInt::one(); e.unit_pivots];
    if !e.residual_rows.is_empty() {
        let dense = residual_dense(ring, &e);
        out.extend(dense_invariant_factors(&dense).into_iter().filter(|d| !d.is_zero()));
    }
    Ok(out)
}

/// Nonzero invariant factors of an integer matrix, in divisibility order.
pub fn invariant_factors(m: &SparseMatrix) -> Vec<BigInt> {
    match factors_via(&I64Ring, m) {
        Ok(f) => f,
        Err(Overflow) => match factors_via(&BigRing, m) {
            Ok(f) => f,
            Err(Overflow) => unreachable!("big integers do not overflow"),
        },
    }
}

/// Rank over `ℤ/p` (`p` prime).
pub fn rank_mod_p(m: &SparseMatrix, p: u64) -> usize {
    let ring = ModP(p);
    match eliminate(&ring, m) {
        Ok(e) => {
            debug_assert!(e.residual_rows.is_empty());
            e.unit_pivots
        }
        Err(Overflow) => unreachable!("modular arithmetic does not overflow"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) -> SmithForm {
        let s = smith_normal_form(m);
        let d = s.left.mul(m).mul(&s.right);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let expect = if i == j { s.diagonal[i].clone() } else { BigInt::zero() };
                assert_eq!(d[(i, j)], expect);
            }
        }
        assert_eq!(s.left.mul(&s.left_inverse), IntMatrix::identity(m.rows()));
        assert_eq!(s.right.mul(&s.right_inverse), IntMatrix::identity(m.cols()));
        for w in s.diagonal.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]) || w[1].is_zero());
        }
        s
    }

    #[test]
    fn small_examples() {
        let s = check(&IntMatrix::from_rows(&[vec![2, 4], vec![6, 10]]));
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(2)]);
        let s = check(&IntMatrix::zeros(3, 2));
        assert!(s.diagonal.iter().all(Zero::is_zero));
        let s = check(&IntMatrix::identity(4));
        assert!(s.diagonal.iter().all(One::is_one));
    }

    #[test]
    fn sparse_matches_dense() {
        let rows = vec![vec![2, 4, 0, 1], vec![6, 10, 0, 3], vec![0, 0, 4, 0]];
        let dense = IntMatrix::from_rows(&rows);
        let sparse = SparseMatrix::from_triplets(
            3,
            4,
            rows.iter().enumerate().flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v))),
        );
        let mut from_dense: Vec<BigInt> =
            dense_invariant_factors(&dense).into_iter().filter(|d| !d.is_zero()).collect();
        from_dense.sort();
        assert_eq!(invariant_factors(&sparse), from_dense);
        assert_eq!(rank_mod_p(&sparse, 2), 1);
        assert_eq!(rank_mod_p(&sparse, 3), 3);
        assert_eq!(rank_mod_p(&sparse, 5), 3);
    }
}
