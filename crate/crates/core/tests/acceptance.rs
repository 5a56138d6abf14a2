//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.
//!
//! Runs without the libtest harness so the summary always reaches stdout.

use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use symstrat_core::foxneuwirth::{build_complex, colour_comp_isomorphic, conf_space_spec, wcomp_spec, FnComplex, FnSpec};
use symstrat_core::homology::{
    betti_vector, compactly_supported_cohomology, homology, invariant_factors, poincare_dual_degrees, rank_mod_p,
    smith_normal_form, verify_universal_coefficients, Coefficients, DualityDirection, HomologyGroup, IntMatrix,
    SparseMatrix,
};
use symstrat_core::oracles::{braid_abelianization, ordered_config_betti};
use symstrat_core::partitions::{enumerate_partitions, ColourVector, Partition};
use symstrat_core::strata::{chi_c_coloured_conf, chi_c_wcomp, strata_agreement_bound};
use symstrat_core::verify::{
    space_groups, spectral_report, verify_coloured, verify_oracles, verify_strata, verify_symcomp, Direct, GroupKind,
    SpectralField, Verdict, VerificationReport,
};

const LIMIT: u32 = 8;

/// Universal-coefficient checks take minutes beyond this size (`2,1,1,1,1,1`
/// alone needs about five), so the two largest coloured complexes are skipped.
const UC_CELL_CAP: usize = 100_000;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// Every spec of total weight ≤ 7: colour vectors up to relabelling, the
/// complements and the single strata.
fn weight_seven_family() -> Vec<FnSpec> {
    let mut specs = Vec::new();
    for n in 0..=7 {
        for lambda in enumerate_partitions(n) {
            specs.push(conf_space_spec(&ColourVector::new(lambda.parts().to_vec())));
            if n > 0 {
                specs.push(wcomp_spec(&lambda).expect("complements are open"));
                specs.push(FnSpec::Stratum(lambda));
            }
        }
    }
    specs
}

fn build_family() -> Vec<(FnSpec, Result<FnComplex, String>)> {
    weight_seven_family()
        .into_par_iter()
        .map(|s| {
            let built = build_complex(&s, LIMIT).map_err(|e| e.to_string());
            (s, built)
        })
        .collect()
}

fn criterion_1(family: &[(FnSpec, Result<FnComplex, String>)]) -> Outcome {
    let bad: Vec<String> = family
        .par_iter()
        .filter_map(|(s, c)| match c {
            Ok(c) => c.complex.check_d_squared().err().map(|e| format!("{s}: {e}")),
            Err(e) => Some(format!("{s}: {e}")),
        })
        .collect();
    let cells: usize = family.iter().filter_map(|(_, c)| c.as_ref().ok()).map(FnComplex::cell_count).sum();
    Outcome::new(
        bad.is_empty(),
        format!("{} complexes, {cells} cells; failures: {:?}", family.len(), bad),
    )
}

fn criterion_2() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for n in 2..=5u32 {
        let v = ColourVector::new(vec![1; n as usize]);
        let fc = build_complex(&conf_space_spec(&v), LIMIT).unwrap();
        let hc = compactly_supported_cohomology(&fc.complex, Coefficients::Integers).unwrap();
        let h = poincare_dual_degrees(2 * n as usize, &hc, DualityDirection::CohomologyToHomology);
        let via_dual = homology(&fc.dual().unwrap(), Coefficients::Integers).unwrap();
        let expected: Vec<usize> = ordered_config_betti(n).into_iter().map(|b| b as usize).collect();
        let torsion_free = h.values().all(|g| g.torsion.is_empty());
        let good = betti_vector(&h) == expected && torsion_free && betti_vector(&via_dual) == expected;
        ok &= good;
        notes.push(format!("n={n} {:?}{}", betti_vector(&h), if good { "" } else { " MISMATCH" }));
    }
    Outcome::new(ok, notes.join(", "))
}

fn criterion_3() -> Outcome {
    let reports = verify_oracles(&Direct { limit: LIMIT }).unwrap();
    let mut ok = reports.iter().all(VerificationReport::passed);
    let mut notes = vec![format!("{} oracle records", reports.len())];
    for n in 2..=6u32 {
        let h = space_groups(&conf_space_spec(&ColourVector::new(vec![n])), Coefficients::Integers, GroupKind::Homology, LIMIT)
            .unwrap();
        let braid = braid_abelianization(n).unwrap();
        let good = h.get(&1) == Some(&HomologyGroup::free(1)) && braid == HomologyGroup::free(1);
        ok &= good;
        notes.push(format!("H_1 Conf_{n} = {}", h.get(&1).cloned().unwrap_or_default()));
    }
    Outcome::new(ok, notes.join(", "))
}

fn rows_agree(r: &VerificationReport) -> bool {
    r.rows.iter().all(|row| !row.in_range || row.agrees)
}

fn criterion_4(reports: &[VerificationReport]) -> Outcome {
    let failing: Vec<&str> = reports.iter().filter(|r| !rows_agree(r)).map(|r| r.instance.as_str()).collect();
    let in_range: usize = reports.iter().map(|r| r.rows.iter().filter(|x| x.in_range).count()).sum();
    Outcome::new(
        failing.is_empty() && !reports.is_empty(),
        format!("{} instances, {in_range} in-range rows; failing: {failing:?}", reports.len()),
    )
}

fn symcomp_lambdas() -> Vec<Partition> {
    ["2", "3", "1,2", "2,2", "4"].iter().map(|s| s.parse().unwrap()).collect()
}

fn criterion_5(reports: &[VerificationReport]) -> Outcome {
    let failing: Vec<&str> = reports
        .iter()
        .filter(|r| !rows_agree(r) || r.properties.iter().any(|p| p.property == "ss-bound" && !p.holds))
        .map(|r| r.instance.as_str())
        .collect();
    let in_range: usize = reports.iter().map(|r| r.rows.iter().filter(|x| x.in_range).count()).sum();
    Outcome::new(
        failing.is_empty() && reports.len() == 5 + 4 + 4 + 3 + 3,
        format!("{} instances, {in_range} in-range rows, spectral transfer checked; failing: {failing:?}", reports.len()),
    )
}

fn criterion_6() -> Outcome {
    let reports = verify_strata(6, 6, &[2, 3]).unwrap();
    let failing: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.instance.as_str()).collect();
    let checked: usize = reports.iter().map(|r| r.strata_rows.iter().filter(|x| x.within_bound).count()).sum();
    Outcome::new(
        failing.is_empty() && strata_agreement_bound(2, 3, 2) == 5,
        format!("{} instances, {checked} rows within the bound; failing: {failing:?}", reports.len()),
    )
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for l in ["3", "1,2", "4"] {
        let lambda: Partition = l.parse().unwrap();
        let r = spectral_report(&lambda, SpectralField::Rationals, LIMIT).unwrap();
        let good = r.verdict == Verdict::Pass && !r.e1_rows.is_empty();
        ok &= good;
        notes.push(format!(
            "{lambda}: {} E1 entries, {} convergence degrees, {}",
            r.e1_rows.len(),
            r.convergence_rows.len(),
            r.verdict
        ));
    }
    Outcome::new(ok, notes.join("; "))
}

fn criterion_8() -> Outcome {
    let lambdas: Vec<Partition> = (0..=6).flat_map(enumerate_partitions).collect();
    let bad: Vec<String> = lambdas
        .par_iter()
        .filter(|l| !colour_comp_isomorphic(l, LIMIT).unwrap())
        .map(ToString::to_string)
        .collect();
    Outcome::new(bad.is_empty(), format!("{} partitions; non-isomorphic: {bad:?}", lambdas.len()))
}

fn chi_oracle(spec: &FnSpec) -> BigInt {
    match spec {
        FnSpec::Coloured(v) => chi_c_coloured_conf(v, 1).unwrap(),
        FnSpec::Complement(l) => chi_c_wcomp(l, 1, 2).unwrap(),
        FnSpec::Stratum(l) => chi_c_coloured_conf(&l.multiplicity_vector(), 1).unwrap(),
        FnSpec::Symmetric(_) => BigInt::one(),
    }
}

fn criterion_9(family: &[(FnSpec, Result<FnComplex, String>)]) -> Outcome {
    let bad: Vec<String> = family
        .iter()
        .filter_map(|(s, c)| {
            let c = c.as_ref().ok()?;
            let (got, want) = (BigInt::from(c.complex.euler_characteristic()), chi_oracle(s));
            (got != want).then(|| format!("{s}: {got} vs {want}"))
        })
        .collect();
    Outcome::new(bad.is_empty(), format!("{} specs; mismatches: {bad:?}", family.len()))
}

fn criterion_10(coloured: &[VerificationReport], symcomp: &[VerificationReport]) -> Outcome {
    let all: Vec<&VerificationReport> = coloured.iter().chain(symcomp).collect();
    let checked = all.iter().filter(|r| r.properties.iter().any(|p| p.property == "monotone-betti")).count();
    let bad: Vec<&str> = all
        .iter()
        .filter(|r| r.properties.iter().any(|p| p.property == "monotone-betti" && !p.holds))
        .map(|r| r.instance.as_str())
        .collect();
    Outcome::new(
        bad.is_empty() && checked == all.len(),
        format!("{checked} stabilisations (integral coloured, rational complements); drops: {bad:?}"),
    )
}

/// Textbook Smith reduction by repeated smallest-pivot division, kept
/// separate from the library's elimination.
fn naive_invariant_factors(rows: &[Vec<i64>]) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut out = Vec::new();
    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !a[i][j].is_zero() && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { return pad(out, m.min(n)) };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..m {
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..n {
                    let s = &q * &a[t][j];
                    a[i][j] -= s;
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..n {
                let q = a[t][j].div_floor(&a[t][t]);
                for i in t..m {
                    let s = &q * &a[i][t];
                    a[i][j] -= s;
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match offender {
                Some(i) => {
                    for j in t..n {
                        let s = a[i][j].clone();
                        a[t][j] += s;
                    }
                }
                None => break,
            }
        }
        out.push(a[t][t].abs());
    }
    pad(out, m.min(n))
}

fn pad(mut v: Vec<BigInt>, len: usize) -> Vec<BigInt> {
    v.resize(len, BigInt::zero());
    v
}

fn laplace(m: &[Vec<BigInt>]) -> BigInt {
    if m.is_empty() {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for (j, x) in m[0].iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = x * laplace(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    (k - 1..n)
        .flat_map(|last| {
            subsets(last, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

/// `d_k / d_{k−1}` with `d_k` the gcd of the `k × k` minors.
fn determinantal_factors(rows: &[Vec<i64>]) -> Vec<BigInt> {
    let m = rows.len();
    let n = rows[0].len();
    let mut prev = BigInt::one();
    let mut out = Vec::new();
    for k in 1..=m.min(n) {
        let mut g = BigInt::zero();
        for rs in subsets(m, k) {
            for cs in subsets(n, k) {
                let minor: Vec<Vec<BigInt>> =
                    rs.iter().map(|&r| cs.iter().map(|&c| BigInt::from(rows[r][c])).collect()).collect();
                g = g.gcd(&laplace(&minor));
            }
        }
        if g.is_zero() {
            out.resize(m.min(n), BigInt::zero());
            break;
        }
        out.push(&g / &prev);
        prev = g;
    }
    out
}

fn random_sparse(rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let m = rng.gen_range(1..=12);
    let n = rng.gen_range(1..=12);
    let density = rng.gen_range(0.1..0.7);
    (0..m)
        .map(|_| (0..n).map(|_| if rng.gen_bool(density) { rng.gen_range(-4..=4) } else { 0 }).collect())
        .collect()
}

fn snf_self_check(rows: &[Vec<i64>]) -> Result<(), String> {
    let a = IntMatrix::from_rows(rows);
    let s = smith_normal_form(&a);
    let (m, n) = (a.rows(), a.cols());
    for (u, ui, k) in [(&s.left, &s.left_inverse, m), (&s.right, &s.right_inverse, n)] {
        if u.mul(ui) != IntMatrix::identity(k) || !u.determinant().abs().is_one() {
            return Err("transform not unimodular".into());
        }
    }
    let d = s.left.mul(&a).mul(&s.right);
    for i in 0..m {
        for j in 0..n {
            let want = if i == j { s.diagonal[i].clone() } else { BigInt::zero() };
            if d[(i, j)] != want {
                return Err("U A V is not the diagonal".into());
            }
        }
    }
    if s.diagonal.windows(2).any(|w| !w[0].is_zero() && !w[1].is_multiple_of(&w[0]) || w[0].is_zero() && !w[1].is_zero()) {
        return Err("divisibility chain broken".into());
    }
    let oracle = naive_invariant_factors(rows);
    if s.diagonal != oracle {
        return Err(format!("diagonal {:?} vs naive {:?}", s.diagonal, oracle));
    }
    if m.max(n) <= 5 && determinantal_factors(rows) != oracle {
        return Err("determinantal divisors disagree".into());
    }
    let triplets = rows.iter().enumerate().flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &x)| (i, j, x)));
    let sparse = SparseMatrix::from_triplets(m, n, triplets.filter(|t| t.2 != 0));
    let nonzero: Vec<BigInt> = oracle.iter().filter(|x| !x.is_zero()).cloned().collect();
    if invariant_factors(&sparse) != nonzero {
        return Err("sparse route disagrees".into());
    }
    for p in [2u64, 3, 5] {
        let want = nonzero.iter().filter(|x| !x.is_multiple_of(&BigInt::from(p))).count();
        if rank_mod_p(&sparse, p) != want {
            return Err(format!("rank mod {p}"));
        }
    }
    Ok(())
}

fn criterion_11(family: &[(FnSpec, Result<FnComplex, String>)]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let matrices: Vec<Vec<Vec<i64>>> = (0..400).map(|_| random_sparse(&mut rng)).collect();
    let snf_bad: Vec<String> = matrices
        .par_iter()
        .enumerate()
        .filter_map(|(i, m)| snf_self_check(m).err().map(|e| format!("#{i}: {e}")))
        .collect();
    let checked: Vec<_> = family.iter().filter(|(_, c)| c.as_ref().is_ok_and(|c| c.cell_count() <= UC_CELL_CAP)).collect();
    let uc_bad: Vec<String> = checked
        .par_iter()
        .filter_map(|(s, c)| {
            let c = c.as_ref().ok()?;
            let ok = verify_universal_coefficients(&c.complex).map(|r| r.ok).unwrap_or(false);
            (!ok).then(|| s.to_string())
        })
        .collect();
    Outcome::new(
        snf_bad.is_empty() && uc_bad.is_empty(),
        format!(
            "{} random matrices up to 12x12, universal coefficients on {} of {} complexes (<= {UC_CELL_CAP} cells); failures: {snf_bad:?} {uc_bad:?}",
            matrices.len(),
            checked.len(),
            family.len()
        ),
    )
}

fn main() {
    let source = Direct { limit: LIMIT };
    let mut results: Vec<(u32, &str, Outcome, f64)> = Vec::new();
    let mut run = |id: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        println!("criterion {id:>2} {:<28} {} ({secs:.1}s) {}", name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((id, name, o, secs));
    };

    let family = build_family();
    let coloured = verify_coloured(7, &source).unwrap();
    let symcomp: Vec<VerificationReport> = symcomp_lambdas()
        .iter()
        .flat_map(|l| verify_symcomp(l, 7 - l.total(), &source, 7).unwrap())
        .collect();

    run(1, "differential soundness", &mut || criterion_1(&family));
    run(2, "ordered configurations", &mut criterion_2);
    run(3, "small spaces and braid H_1", &mut criterion_3);
    run(4, "coloured stability", &mut || criterion_4(&coloured));
    run(5, "complement stability", &mut || criterion_5(&symcomp));
    run(6, "strata bound", &mut criterion_6);
    run(7, "spectral sequence", &mut criterion_7);
    run(8, "colour comparison", &mut criterion_8);
    run(9, "euler characteristic", &mut || criterion_9(&family));
    run(10, "monotonicity", &mut || criterion_10(&coloured, &symcomp));
    run(11, "engine self-consistency", &mut || criterion_11(&family));

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria PASS", results.len());
    } else {
        println!("acceptance: FAIL {failed:?}");
        std::process::exit(1);
    }
}
