//! Exact fields (ℚ and ℤ/p) and the dense linear algebra built on them.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub trait Field: Clone + Send + Sync + Debug {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Inverse of a nonzero element.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn name(&self) -> String;
    fn render(&self, a: &Self::Elem) -> String;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn name(&self) -> String {
        "Q".into()
    }
    fn render(&self, a: &BigRational) -> String {
        a.to_string()
    }
}

/// `ℤ/p` for a prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::InvalidCoefficients(format!("{p} is not a supported prime")));
        }
        Ok(Self { p })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }
}

impl Field for PrimeField {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn inv(&self, a: &u64) -> u64 {
        let (mut r, mut b, mut e) = (1u64, *a % self.p, self.p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % self.p;
            }
            b = b * b % self.p;
            e >>= 1;
        }
        r
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn name(&self) -> String {
        format!("Z/{}", self.p)
    }
    fn render(&self, a: &u64) -> String {
        a.to_string()
    }
}

/// Row-major dense matrix over a field.
pub type DenseMatrix<E> = Vec<Vec<E>>;

/// `v ← v − f·w`.
pub fn axpy<F: Field>(field: &F, v: &mut [F::Elem], f: &F::Elem, w: &[F::Elem]) {
    if field.is_zero(f) {
        return;
    }
    for (a, b) in v.iter_mut().zip(w) {
        if !field.is_zero(b) {
            *a = field.sub(a, &field.mul(f, b));
        }
    }
}

/// Rank of a dense matrix.
pub fn rank<F: Field>(field: &F, m: &DenseMatrix<F::Elem>) -> usize {
    let mut e = Echelon::new(field.clone(), m.first().map_or(0, Vec::len));
    m.iter().filter(|row| e.insert(row.to_vec())).count()
}

/// Basis of `{x : M x = 0}` for an `r × c` matrix.
pub fn nullspace<F: Field>(field: &F, m: &DenseMatrix<F::Elem>, cols: usize) -> Vec<Vec<F::Elem>> {
    // reduced row echelon form
    let mut a: Vec<Vec<F::Elem>> = m.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        let Some(p) = (row..a.len()).find(|&r| !field.is_zero(&a[r][c])) else { continue };
        a.swap(row, p);
        let inv = field.inv(&a[row][c]);
        for x in a[row].iter_mut() {
            *x = field.mul(x, &inv);
        }
        let pivot_row = a[row].clone();
        for (r, other) in a.iter_mut().enumerate() {
            if r != row && !field.is_zero(&other[c]) {
                let f = other[c].clone();
                axpy(field, other, &f, &pivot_row);
            }
        }
        pivots.push(c);
        row += 1;
        if row == a.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![field.zero(); cols];
            v[fc] = field.one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = field.sub(&field.zero(), &a[i][fc]);
            }
            v
        })
        .collect()
}

/// Incrementally built semi-echelon basis of a subspace. Each stored vector
/// carries a tag vector so that reductions can report coordinates.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    field: F,
    dim: usize,
    rows: Vec<(usize, Vec<F::Elem>)>,
}

impl<F: Field> Echelon<F> {
    pub fn new(field: F, dim: usize) -> Self {
        Self { field, dim, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.dim
    }

    /// Reduces `v` in place; returns the multipliers used per stored row.
    pub fn reduce(&self, v: &mut [F::Elem]) -> Vec<F::Elem> {
        let mut coeffs = Vec::with_capacity(self.rows.len());
        for (pivot, row) in &self.rows {
            if field_is_zero(&self.field, &v[*pivot]) {
                coeffs.push(self.field.zero());
                continue;
            }
            let f = self.field.mul(&v[*pivot], &self.field.inv(&row[*pivot]));
            axpy(&self.field, v, &f, row);
            coeffs.push(f);
        }
        coeffs
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| self.field.is_zero(x))
    }

    /// Adds `v` if independent; returns whether the rank grew.
    pub fn insert(&mut self, mut v: Vec<F::Elem>) -> bool {
        assert_eq!(v.len(), self.dim);
        self.reduce(&mut v);
        match v.iter().position(|x| !self.field.is_zero(x)) {
            Some(p) => {
                self.rows.push((p, v));
                true
            }
            None => false,
        }
    }
}

fn field_is_zero<F: Field>(field: &F, a: &F::Elem) -> bool {
    field.is_zero(a)
}

/// A quotient `Z / W` of subspaces of `F^n` with a chosen basis of
/// representatives, supporting coordinates of classes.
#[derive(Clone, Debug)]
pub struct Quotient<F: Field> {
    field: F,
    dim: usize,
    /// semi-echelon rows with their class in terms of `reps`
    rows: Vec<(usize, Vec<F::Elem>, Vec<F::Elem>)>,
    reps: Vec<Vec<F::Elem>>,
}

impl<F: Field> Quotient<F> {
    /// `numerator` must contain `denominator` (not checked).
    pub fn new(field: &F, dim: usize, denominator: &[Vec<F::Elem>], numerator: &[Vec<F::Elem>]) -> Self {
        let mut q = Self { field: field.clone(), dim, rows: Vec::new(), reps: Vec::new() };
        for w in denominator {
            q.push(w.clone(), None);
        }
        for z in numerator {
            q.push(z.clone(), Some(z));
        }
        let k = q.reps.len();
        for (_, _, tag) in q.rows.iter_mut() {
            tag.resize(k, field.zero());
        }
        q
    }

    fn push(&mut self, v: Vec<F::Elem>, rep: Option<&Vec<F::Elem>>) {
        let mut v = v;
        let tag = self.reduce_tagged(&mut v);
        if let Some(p) = v.iter().position(|x| !self.field.is_zero(x)) {
            let mut t: Vec<F::Elem> = tag.iter().map(|x| self.field.sub(&self.field.zero(), x)).collect();
            if let Some(rep) = rep {
                t.resize(self.reps.len() + 1, self.field.zero());
                t[self.reps.len()] = self.field.add(&t[self.reps.len()], &self.field.one());
                self.reps.push(rep.clone());
            }
            self.rows.push((p, v, t));
        }
    }

    /// Reduces `v` and returns the accumulated class coordinates (length may be short).
    fn reduce_tagged(&self, v: &mut [F::Elem]) -> Vec<F::Elem> {
        let mut acc: Vec<F::Elem> = Vec::new();
        for (pivot, row, tag) in &self.rows {
            if self.field.is_zero(&v[*pivot]) {
                continue;
            }
            let f = self.field.mul(&v[*pivot], &self.field.inv(&row[*pivot]));
            axpy(&self.field, v, &f, row);
            if acc.len() < tag.len() {
                acc.resize(tag.len(), self.field.zero());
            }
            for (a, t) in acc.iter_mut().zip(tag) {
                *a = self.field.add(a, &self.field.mul(&f, t));
            }
        }
        acc
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn ambient(&self) -> usize {
        self.dim
    }

    pub fn representatives(&self) -> &[Vec<F::Elem>] {
        &self.reps
    }

    /// Coordinates of the class of `v ∈ Z`; `None` if `v ∉ Z`.
    pub fn coordinates(&self, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let mut w = v.to_vec();
        let mut c = self.reduce_tagged(&mut w);
        if w.iter().any(|x| !self.field.is_zero(x)) {
            return None;
        }
        c.resize(self.reps.len(), self.field.zero());
        Some(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.mul(&3, &f.inv(&3)), 1);
        assert_eq!(f.from_i64(-1), 6);
        assert!(PrimeField::new(9).is_err());
    }

    #[test]
    fn nullspace_and_rank() {
        let q = Rationals;
        let m: DenseMatrix<_> = vec![
            vec![q.from_i64(1), q.from_i64(2), q.from_i64(3)],
            vec![q.from_i64(2), q.from_i64(4), q.from_i64(6)],
        ];
        assert_eq!(rank(&q, &m), 1);
        let ns = nullspace(&q, &m, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            let s = m[0].iter().zip(&v).fold(q.zero(), |acc, (a, b)| q.add(&acc, &q.mul(a, b)));
            assert!(q.is_zero(&s));
        }
    }

    #[test]
    fn quotient_coordinates() {
        let f = PrimeField::new(5).unwrap();
        // Z = F^3, W = span(e0)
        let w = vec![vec![1, 0, 0]];
        let z = vec![vec![1, 0, 0], vec![1, 1, 0], vec![0, 1, 1]];
        let q = Quotient::new(&f, 3, &w, &z);
        assert_eq!(q.dim(), 2);
        let c = q.coordinates(&[3, 2, 1]).unwrap();
        // [3,2,1] ≡ a·[1,1,0] + b·[0,1,1] mod e0 ⇒ b = 1, a = 1
        assert_eq!(c, vec![1, 1]);
        assert!(q.coordinates(&[0, 0, 0]).unwrap().iter().all(|x| *x == 0));
    }
}
