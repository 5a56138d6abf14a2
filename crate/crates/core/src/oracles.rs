//! Ground truths computed without any cell structure: polynomial expansion
//! for ordered configurations and abelianised braid presentations.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foxneuwirth::{conf_space_spec, FnSpec};
use crate::homology::{invariant_factors, Coefficients, GradedGroups, HomologyGroup, SparseMatrix};
use crate::partitions::ColourVector;

/// Coefficients of `∏_{i=1}^{n−1} (1 + i t)`: the Betti numbers of `PConf_n(ℝ²)`.
pub fn ordered_config_betti(n: u32) -> Vec<u64> {
    let mut poly = vec![1u64];
    for i in 1..n.max(1) as u64 {
        let mut next = vec![0u64; poly.len() + 1];
        for (d, &c) in poly.iter().enumerate() {
            next[d] += c;
            next[d + 1] += c * i;
        }
        poly = next;
    }
    poly
}

/// Relation matrix of the abelianised Artin presentation of `B_n`: one row
/// per relation, one column per generator `σ_1 … σ_{n−1}`.
pub fn braid_relation_matrix(n: u32) -> SparseMatrix {
    let g = n.saturating_sub(1) as usize;
    let mut triplets = Vec::new();
    let mut row = 0;
    for i in 0..g {
        for j in i + 1..g {
            if j == i + 1 {
                // σ_i σ_{i+1} σ_i = σ_{i+1} σ_i σ_{i+1}  ↦  σ_i − σ_{i+1}
                triplets.push((row, i, 1));
                triplets.push((row, j, -1));
            }
            // σ_i σ_j = σ_j σ_i abelianises to the zero row
            row += 1;
        }
    }
    SparseMatrix::from_triplets(row, g, triplets)
}

/// `B_n^{ab}` as the cokernel of the relation matrix.
pub fn braid_abelianization(n: u32) -> Result<HomologyGroup> {
    let m = braid_relation_matrix(n);
    let f = invariant_factors(&m);
    let torsion = f
        .iter()
        .filter(|d| !d.is_one())
        .map(|d: &BigInt| d.to_u64().ok_or_else(|| Error::Overflow(d.to_string())))
        .collect::<Result<Vec<_>>>()?;
    Ok(HomologyGroup { betti: m.cols() - f.len(), torsion })
}

/// An independently known homology table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub space: String,
    pub spec: FnSpec,
    pub coefficients: Coefficients,
    /// expected `H_k` of the space (not Borel–Moore)
    pub expected: GradedGroups,
    /// if false only the listed degrees are asserted
    pub complete: bool,
    pub derivation: String,
}

pub const ORACLE_TABLE_VERSION: u32 = 1;

fn groups(pairs: &[(usize, HomologyGroup)]) -> GradedGroups {
    pairs.iter().cloned().collect()
}

/// The fixed table of small spaces, ordered configurations and braid `H_1`.
pub fn small_space_table() -> Result<Vec<OracleRecord>> {
    let z = HomologyGroup::free(1);
    let mut out = vec![
        OracleRecord {
            space: "Conf_1(R^2)".into(),
            spec: conf_space_spec(&ColourVector::new(vec![1])),
            coefficients: Coefficients::Integers,
            expected: groups(&[(0, z.clone())]),
            complete: true,
            derivation: "contractible".into(),
        },
        OracleRecord {
            space: "Conf_2(R^2)".into(),
            spec: conf_space_spec(&ColourVector::new(vec![2])),
            coefficients: Coefficients::Integers,
            expected: groups(&[(0, z.clone()), (1, z.clone())]),
            complete: true,
            derivation: "centre of mass and antipodal quotient retract onto S^1".into(),
        },
        OracleRecord {
            space: "PConf_2(R^2)".into(),
            spec: conf_space_spec(&ColourVector::new(vec![1, 1])),
            coefficients: Coefficients::Integers,
            expected: groups(&[(0, z.clone()), (1, z.clone())]),
            complete: true,
            derivation: "centre of mass and normalised difference retract onto S^1".into(),
        },
    ];
    for n in 3..=5u32 {
        let betti = ordered_config_betti(n);
        out.push(OracleRecord {
            space: format!("PConf_{n}(R^2)"),
            spec: conf_space_spec(&ColourVector::new(vec![1; n as usize])),
            coefficients: Coefficients::Integers,
            expected: betti.iter().enumerate().map(|(k, &b)| (k, HomologyGroup::free(b as usize))).collect(),
            complete: true,
            derivation: format!("Orlik-Solomon: coefficients of prod_{{i<{n}}} (1 + i t), torsion-free"),
        });
    }
    for n in 2..=6u32 {
        out.push(OracleRecord {
            space: format!("H_1 Conf_{n}(R^2)"),
            spec: conf_space_spec(&ColourVector::new(vec![n])),
            coefficients: Coefficients::Integers,
            expected: groups(&[(1, braid_abelianization(n)?)]),
            complete: false,
            derivation: format!("Smith form of the abelianised braid relations of B_{n}"),
        });
    }
    Ok(out)
}

/// Whether `computed` matches a record, honouring `complete`.
pub fn record_matches(record: &OracleRecord, computed: &GradedGroups) -> bool {
    let zero = HomologyGroup::default();
    if record.complete {
        let degrees = computed.keys().chain(record.expected.keys());
        degrees.into_iter().all(|k| {
            computed.get(k).unwrap_or(&zero) == record.expected.get(k).unwrap_or(&zero)
        })
    } else {
        record.expected.iter().all(|(k, g)| computed.get(k).unwrap_or(&zero) == g)
    }
}
