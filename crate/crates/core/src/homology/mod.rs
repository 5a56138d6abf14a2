//! Exact homological algebra: matrices, Smith normal form, chain complexes,
//! induced maps and spectral sequences.

pub mod complex;
pub mod field;
pub mod induced;
pub mod matrix;
pub mod snf;
pub mod spectral;

pub use complex::{
    betti_vector, compactly_supported_cohomology, homology, nonzero, poincare_dual_degrees,
    verify_universal_coefficients, ChainComplex, ChainMap, Coefficients, DualityDirection, GradedGroups,
    HomologyGroup, LevelOrder, UcReport,
};
pub use field::{Field, PrimeField, Rationals};
pub use matrix::{IntMatrix, SparseMatrix};
pub use snf::{invariant_factors, rank_mod_p, smith_normal_form, SmithForm};
pub use spectral::{check_ss_bound, SpectralPage, SpectralSequence, SsBoundReport};
