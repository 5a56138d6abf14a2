//! Homology bases and matrices of induced maps.
//!
//! Over ℤ the basis of `H_k` comes from two Smith forms: the right transform
//! of `d_k` gives a basis of the cycles, and a second Smith form of the
//! boundaries written in that basis splits off the torsion. Over a field the
//! basis is a complement of the boundaries inside the cycles.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::complex::{ChainComplex, ChainMap, HomologyGroup};
use super::field::{nullspace, DenseMatrix, Field, Quotient};
use super::matrix::IntMatrix;
use super::snf::smith_normal_form;
use crate::error::{Error, Result};

/// Chosen generators of `H_k(C; ℤ)`, with coordinates for any cycle.
#[derive(Clone, Debug)]
pub struct IntegralBasis {
    /// `0` marks a free generator, otherwise its order.
    pub orders: Vec<u64>,
    /// cycle representatives, one per generator
    pub generators: Vec<Vec<BigInt>>,
    // cycle z ↦ (P · (V⁻¹ z)[r..])[selected]
    v_inv_tail: IntMatrix,
    p: IntMatrix,
    selected: Vec<usize>,
    rank_d: usize,
}

impl IntegralBasis {
    pub fn compute(c: &ChainComplex, k: usize) -> Result<Self> {
        let n = c.rank(k);
        let dk = c.boundary(k).to_dense();
        let s = smith_normal_form(&dk);
        let r = s.rank();
        // kernel basis: last n − r columns of V
        let kdim = n - r;
        let mut v_inv_tail = IntMatrix::zeros(kdim, n);
        for i in 0..kdim {
            for j in 0..n {
                v_inv_tail[(i, j)] = s.right_inverse[(r + i, j)].clone();
            }
        }
        let mut z = IntMatrix::zeros(n, kdim);
        for i in 0..n {
            for j in 0..kdim {
                z[(i, j)] = s.right[(i, r + j)].clone();
            }
        }
        let dk1 = c.boundary(k + 1).to_dense();
        let a = v_inv_tail.mul(&dk1);
        let sa = smith_normal_form(&a);
        let gens_all = z.mul(&sa.left_inverse);
        let mut orders = Vec::new();
        let mut selected = Vec::new();
        for i in 0..kdim {
            let e = sa.diagonal.get(i).cloned().unwrap_or_else(BigInt::zero);
            if e.is_one() {
                continue;
            }
            let order = if e.is_zero() { 0 } else { e.to_u64().ok_or_else(|| Error::Overflow(e.to_string()))? };
            orders.push(order);
            selected.push(i);
        }
        let generators = selected.iter().map(|&i| gens_all.column(i)).collect();
        Ok(Self { orders, generators, v_inv_tail, p: sa.left, selected, rank_d: r })
    }

    pub fn group(&self) -> HomologyGroup {
        let betti = self.orders.iter().filter(|&&o| o == 0).count();
        let torsion = self.orders.iter().copied().filter(|&o| o > 0).collect();
        HomologyGroup { betti, torsion }
    }

    /// Coordinates of the class of a cycle (torsion coordinates reduced).
    pub fn coordinates(&self, cycle: &[BigInt]) -> Vec<BigInt> {
        let w = self.v_inv_tail.mul_vec(cycle);
        let c = self.p.mul_vec(&w);
        self.selected
            .iter()
            .zip(&self.orders)
            .map(|(&i, &o)| if o == 0 { c[i].clone() } else { c[i].mod_floor(&BigInt::from(o)) })
            .collect()
    }

    pub fn rank_of_boundary(&self) -> usize {
        self.rank_d
    }
}

/// `f_*` on `H_k` in the chosen bases; `matrix[t][s]` is the coefficient of
/// target generator `t` in the image of source generator `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralInducedMap {
    pub source_degree: usize,
    pub source_orders: Vec<u64>,
    pub target_orders: Vec<u64>,
    pub matrix: Vec<Vec<BigInt>>,
}

impl IntegralInducedMap {
    /// Whether the free-to-free block is square with determinant `±1`.
    pub fn free_part_unimodular(&self) -> bool {
        let src: Vec<usize> = (0..self.source_orders.len()).filter(|&i| self.source_orders[i] == 0).collect();
        let tgt: Vec<usize> = (0..self.target_orders.len()).filter(|&i| self.target_orders[i] == 0).collect();
        if src.len() != tgt.len() {
            return false;
        }
        let mut m = IntMatrix::zeros(tgt.len(), src.len());
        for (a, &t) in tgt.iter().enumerate() {
            for (b, &s) in src.iter().enumerate() {
                m[(a, b)] = self.matrix[t][s].clone();
            }
        }
        m.determinant().abs().is_one()
    }
}

fn apply(f: &ChainMap, source: &ChainComplex, target: &ChainComplex, k: usize, v: &[BigInt]) -> Vec<BigInt> {
    let block = f.block(k, source, target);
    let mut out = vec![BigInt::zero(); block.rows()];
    for (r, c, x) in block.triplets() {
        out[r] += &v[c] * x;
    }
    out
}

/// Integral `f_*` in source degree `k` (dense; meant for small complexes).
pub fn induced_map_integral(
    f: &ChainMap,
    source: &ChainComplex,
    target: &ChainComplex,
    k: usize,
) -> Result<IntegralInducedMap> {
    f.check(source, target)?;
    let t = f.target_degree(k);
    let src = IntegralBasis::compute(source, k)?;
    let Some(t) = t else {
        return Ok(IntegralInducedMap {
            source_degree: k,
            source_orders: src.orders.clone(),
            target_orders: Vec::new(),
            matrix: Vec::new(),
        });
    };
    let tgt = IntegralBasis::compute(target, t)?;
    let cols: Vec<Vec<BigInt>> = src.generators.iter().map(|g| tgt.coordinates(&apply(f, source, target, k, g))).collect();
    let matrix = (0..tgt.orders.len()).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    Ok(IntegralInducedMap { source_degree: k, source_orders: src.orders, target_orders: tgt.orders, matrix })
}

/// Dense copy of `d_k` over a field.
pub fn dense_boundary<F: Field>(field: &F, c: &ChainComplex, k: usize) -> DenseMatrix<F::Elem> {
    let d = c.boundary(k);
    let mut m = vec![vec![field.zero(); d.cols()]; d.rows()];
    for (r, col, v) in d.triplets() {
        m[r][col] = field.from_i64(v);
    }
    m
}

fn columns_of<F: Field>(m: &DenseMatrix<F::Elem>, cols: usize) -> Vec<Vec<F::Elem>> {
    (0..cols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

/// `H_k(C; F)` as a quotient of cycles by boundaries.
pub fn field_homology_basis<F: Field>(field: &F, c: &ChainComplex, k: usize) -> Quotient<F> {
    let n = c.rank(k);
    let cycles = nullspace(field, &dense_boundary(field, c, k), n);
    let up = dense_boundary(field, c, k + 1);
    let boundaries = columns_of::<F>(&up, c.rank(k + 1));
    Quotient::new(field, n, &boundaries, &cycles)
}

/// `f_*` over a field in source degree `k`; `matrix[t][s]` as in the integral case.
pub fn induced_map_field<F: Field>(
    field: &F,
    f: &ChainMap,
    source: &ChainComplex,
    target: &ChainComplex,
    k: usize,
) -> Result<Vec<Vec<F::Elem>>> {
    f.check(source, target)?;
    let src = field_homology_basis(field, source, k);
    let Some(t) = f.target_degree(k) else { return Ok(Vec::new()) };
    let tgt = field_homology_basis(field, target, t);
    let block = f.block(k, source, target);
    let mut cols = Vec::with_capacity(src.dim());
    for g in src.representatives() {
        let mut img = vec![field.zero(); block.rows()];
        for (r, c, v) in block.triplets() {
            img[r] = field.add(&img[r], &field.mul(&field.from_i64(v), &g[c]));
        }
        let coords = tgt.coordinates(&img).ok_or(Error::NotAChainMap { degree: k })?;
        cols.push(coords);
    }
    Ok((0..tgt.dim()).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::field::Rationals;
    use crate::homology::matrix::SparseMatrix;

    fn sample() -> ChainComplex {
        // ℤ → ℤ² → ℤ with H_2 = 0, H_1 = ℤ/2, H_0 = 0
        ChainComplex::new(vec![
            SparseMatrix::zeros(0, 1),
            SparseMatrix::from_triplets(1, 2, [(0, 0, 1), (0, 1, -1)]),
            SparseMatrix::from_triplets(2, 1, [(0, 0, 2), (1, 0, 2)]),
        ])
        .unwrap()
    }

    #[test]
    fn integral_basis_of_sample() {
        let c = sample();
        let b1 = IntegralBasis::compute(&c, 1).unwrap();
        assert_eq!(b1.group(), HomologyGroup { betti: 0, torsion: vec![2] });
        assert!(IntegralBasis::compute(&c, 0).unwrap().group().is_zero());
        assert!(IntegralBasis::compute(&c, 2).unwrap().group().is_zero());
    }

    #[test]
    fn identity_and_zero_maps() {
        let c = sample();
        let id = ChainMap::identity(&c);
        for k in 0..3 {
            let m = induced_map_integral(&id, &c, &c, k).unwrap();
            for (i, row) in m.matrix.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    assert_eq!(*x, BigInt::from((i == j) as i64));
                }
            }
            let z = induced_map_integral(&ChainMap::zero(&c, &c, 0), &c, &c, k).unwrap();
            assert!(z.matrix.iter().flatten().all(Zero::is_zero));
        }
        let q = Rationals;
        // rationally everything vanishes
        assert!(induced_map_field(&q, &id, &c, &c, 1).unwrap().is_empty());
        let circle = ChainComplex::with_zero_differentials(&[1, 1]);
        let m = induced_map_field(&q, &ChainMap::identity(&circle), &circle, &circle, 1).unwrap();
        assert_eq!(m, vec![vec![q.one()]]);
    }
}
