use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;

use symstrat_core::foxneuwirth::{build_complex, conf_space_spec, DEFAULT_LIMIT};
use symstrat_core::homology::{
    homology, smith_normal_form, verify_universal_coefficients, ChainComplex, Coefficients, IntMatrix, SparseMatrix,
};
use symstrat_core::partitions::{enumerate_partitions, is_subpartition, ColourVector, Partition};
use symstrat_core::strata::{
    allowed_patterns, chi_c_coloured_conf, compare_stabilized_strata, stabilize_stratum, strata_agreement_bound,
    strata_by_codimension,
};

/// Partition numbers by the coin-change recurrence.
fn partition_count(n: usize) -> usize {
    let mut ways = vec![0usize; n + 1];
    ways[0] = 1;
    for part in 1..=n {
        for total in part..=n {
            ways[total] += ways[total - part];
        }
    }
    ways[n]
}

fn partition_strategy(max: u32) -> impl Strategy<Value = Partition> {
    (1..=max).prop_flat_map(|n| {
        let all = enumerate_partitions(n);
        (0..all.len()).prop_map(move |i| all[i].clone())
    })
}

fn merge_two(lambda: &Partition, i: usize, j: usize) -> Partition {
    let parts = lambda.parts();
    let (i, j) = (i % parts.len(), j % parts.len());
    if i == j {
        return lambda.clone();
    }
    let mut out: Vec<u32> = parts.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, &p)| p).collect();
    out.push(parts[i] + parts[j]);
    Partition::new(out).unwrap()
}

proptest! {
    #[test]
    fn enumeration_matches_partition_numbers(n in 0u32..=14) {
        let all = enumerate_partitions(n);
        prop_assert_eq!(all.len(), partition_count(n as usize));
        let distinct: BTreeSet<_> = all.iter().cloned().collect();
        prop_assert_eq!(distinct.len(), all.len());
        for p in &all {
            prop_assert_eq!(p.total(), n);
            prop_assert!(p.parts().windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn csv_and_multiplicities_round_trip(lambda in partition_strategy(10)) {
        let back: Partition = lambda.to_csv().parse().unwrap();
        prop_assert_eq!(&back, &lambda);
        let m = lambda.multiplicity_vector();
        let weighted: u32 = m.counts().iter().enumerate().map(|(i, &c)| (i as u32 + 1) * c).sum();
        prop_assert_eq!(weighted, lambda.total());
        prop_assert_eq!(m.norm() as usize, lambda.parts_count());
    }

    #[test]
    fn subpartition_order(lambda in partition_strategy(8), i in 0usize..8, j in 0usize..8, k in 0usize..8) {
        let n = lambda.total();
        prop_assert!(is_subpartition(&lambda, &lambda).unwrap());
        prop_assert!(is_subpartition(&Partition::new(vec![n]).unwrap(), &lambda).unwrap());
        prop_assert!(is_subpartition(&lambda, &Partition::ones(n)).unwrap());
        let coarser = merge_two(&lambda, i, j);
        prop_assert!(is_subpartition(&coarser, &lambda).unwrap());
        let coarsest = merge_two(&coarser, j, k);
        prop_assert!(is_subpartition(&coarsest, &lambda).unwrap());
        if coarser != lambda {
            prop_assert!(!is_subpartition(&lambda, &coarser).unwrap());
        }
    }

    #[test]
    fn canonical_relabelling(counts in prop::collection::vec(0u32..4, 0..5), rot in 0usize..5) {
        let v = ColourVector::new(counts.clone());
        let c = v.canonical();
        prop_assert_eq!(c.canonical(), c.clone());
        prop_assert_eq!(c.norm(), v.norm());
        let mut rotated = counts;
        if !rotated.is_empty() {
            let r = rot % rotated.len();
            rotated.rotate_left(r);
        }
        prop_assert_eq!(ColourVector::new(rotated).canonical(), c);
    }

    #[test]
    fn strata_split_the_partitions(lambda in partition_strategy(8), dim in 2u32..=4) {
        let n = lambda.total();
        let allowed = allowed_patterns(&lambda);
        let coarsenings = enumerate_partitions(n).iter().filter(|mu| is_subpartition(mu, &lambda).unwrap()).count();
        prop_assert_eq!(allowed.len() + coarsenings, partition_count(n as usize));
        let table = strata_by_codimension(&lambda, dim).unwrap();
        let listed: Vec<_> = table.strata().collect();
        prop_assert_eq!(listed.len(), allowed.len());
        for s in listed {
            prop_assert_eq!(s.codimension, dim * (n - s.pattern.parts_count() as u32));
        }
    }

    #[test]
    fn stabilising_strata_is_injective(lambda in partition_strategy(6), j in 0u32..=4, dim in 2u32..=3) {
        let rows = compare_stabilized_strata(&lambda, j, dim).unwrap();
        let bound = strata_agreement_bound(lambda.total(), j, dim);
        for r in rows {
            prop_assert!(r.injective);
            prop_assert_eq!(r.within_bound, r.codimension <= bound);
            if r.within_bound {
                prop_assert!(r.bijective);
            }
        }
        for mu in allowed_patterns(&lambda.prepend_ones(j)) {
            prop_assert_eq!(stabilize_stratum(&mu).total(), mu.total() + 1);
        }
    }

    #[test]
    fn cell_counts_give_euler_characteristic(counts in prop::collection::vec(0u32..3, 1..4)) {
        let v = ColourVector::new(counts);
        prop_assume!(v.norm() <= 5);
        let fc = build_complex(&conf_space_spec(&v), DEFAULT_LIMIT).unwrap();
        prop_assert_eq!(BigInt::from(fc.complex.euler_characteristic()), chi_c_coloured_conf(&v, 1).unwrap());
    }
}

fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(m, n)| prop::collection::vec(prop::collection::vec(-5i64..=5, n), m))
}

proptest! {
    #[test]
    fn smith_form_is_a_factorisation(rows in matrix_strategy()) {
        let a = IntMatrix::from_rows(&rows);
        let s = smith_normal_form(&a);
        let d = s.left.mul(&a).mul(&s.right);
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let want = if i == j { s.diagonal[i].clone() } else { BigInt::zero() };
                prop_assert_eq!(&d[(i, j)], &want);
            }
        }
        prop_assert_eq!(s.left.mul(&s.left_inverse), IntMatrix::identity(a.rows()));
        prop_assert_eq!(s.right.mul(&s.right_inverse), IntMatrix::identity(a.cols()));
        let nz: Vec<&BigInt> = s.diagonal.iter().filter(|x| !x.is_zero()).collect();
        prop_assert!(nz.windows(2).all(|w| w[1].is_multiple_of(w[0])));
    }

    #[test]
    fn smith_form_ignores_elementary_operations(rows in matrix_strategy(), q in -3i64..=3, r in 0usize..6, c in 0usize..6) {
        let mut shuffled = rows.clone();
        let m = shuffled.len();
        let (a, b) = (r % m, (r + 1) % m);
        if a != b {
            let src = shuffled[b].clone();
            for (x, y) in shuffled[a].iter_mut().zip(src) {
                *x += q * y;
            }
        }
        let n = shuffled[0].len();
        let (a, b) = (c % n, (c + 1) % n);
        if a != b {
            for row in shuffled.iter_mut() {
                row[a] += q * row[b];
            }
        }
        prop_assert_eq!(
            smith_normal_form(&IntMatrix::from_rows(&rows)).diagonal,
            smith_normal_form(&IntMatrix::from_rows(&shuffled)).diagonal
        );
    }
}

/// Simplicial chain complex of the downward closure of the given simplices.
fn simplicial(simplices: &[Vec<usize>]) -> (ChainComplex, usize) {
    let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for s in simplices {
        let mut s = s.clone();
        s.sort_unstable();
        s.dedup();
        for mask in 1u32..(1 << s.len()) {
            faces.insert((0..s.len()).filter(|&i| mask & (1 << i) != 0).map(|i| s[i]).collect());
        }
    }
    let top = faces.iter().map(Vec::len).max().unwrap_or(1);
    let by_dim: Vec<Vec<Vec<usize>>> =
        (1..=top).map(|k| faces.iter().filter(|f| f.len() == k).cloned().collect()).collect();
    let mut boundaries = vec![SparseMatrix::zeros(0, by_dim[0].len())];
    for k in 1..by_dim.len() {
        let mut triplets = Vec::new();
        for (c, f) in by_dim[k].iter().enumerate() {
            for i in 0..f.len() {
                let mut face = f.clone();
                face.remove(i);
                let r = by_dim[k - 1].binary_search(&face).unwrap();
                triplets.push((r, c, if i % 2 == 0 { 1 } else { -1 }));
            }
        }
        boundaries.push(SparseMatrix::from_triplets(by_dim[k - 1].len(), by_dim[k].len(), triplets));
    }
    // components by union-find on edges
    let verts: Vec<usize> = by_dim[0].iter().map(|v| v[0]).collect();
    let mut parent: Vec<usize> = (0..=verts.iter().max().copied().unwrap_or(0)).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            p[x] = find(p, p[x]);
        }
        p[x]
    }
    if by_dim.len() > 1 {
        for e in &by_dim[1] {
            let (a, b) = (find(&mut parent, e[0]), find(&mut parent, e[1]));
            parent[a] = b;
        }
    }
    let roots: BTreeSet<usize> = verts.iter().map(|&v| find(&mut parent, v)).collect();
    (ChainComplex::new(boundaries).unwrap(), roots.len())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn simplicial_homology_invariants(
        simplices in prop::collection::vec(prop::collection::vec(0usize..7, 1..=4), 1..8)
    ) {
        let (c, components) = simplicial(&simplices);
        c.check_d_squared().unwrap();
        let q = homology(&c, Coefficients::Rationals).unwrap();
        let chi: i64 = q.iter().map(|(&k, g)| if k % 2 == 0 { g.betti as i64 } else { -(g.betti as i64) }).sum();
        prop_assert_eq!(chi, c.euler_characteristic());
        prop_assert_eq!(q[&0].betti, components);
        prop_assert!(verify_universal_coefficients(&c).unwrap().ok);
        let z = homology(&c, Coefficients::Integers).unwrap();
        prop_assert!(z[&0].torsion.is_empty());
    }
}
