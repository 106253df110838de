//! Zero-difference functions on `Z_n` from cyclic unit subgroups.
//!
//! A subgroup `G = <e>` of `Z_n^×` partitions `Z_n` into cosets `rG`; numbering
//! the cosets gives the coset index function `f_G`. The number of `x` with
//! `f_G(x + a) = f_G(x)` equals the size of `⋃_{g∈G} {x : x(g-1) ≡ a}`, which
//! turns the zero-difference spectrum into a question about linear
//! congruences. This crate builds `f_G`, computes the spectrum both ways,
//! and checks the closed-form families in [`families`] against it.
//!
//! With the default `parallel` feature, per-shift and per-modulus sweeps run
//! on rayon; see [`Execution`].

pub mod coset;
pub mod error;
pub mod exec;
pub mod families;
pub mod modular;
pub mod scan;
pub mod spectrum;

pub use coset::{
    build_coset_index_function, build_partition, build_subgroup, cyclic_unit_subgroups,
    CosetIndexFunction, CosetPartition, UnitSubgroup,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use families::{
    verify_family, ClassPrediction, FamilyDescriptor, FamilyId, ShiftClass, Verdict, Verification,
    VerificationReport,
};
pub use modular::{
    crt_solve, euler_phi, factorize, gcd, is_prime, multiplicative_order, primitive_root,
    solve_linear_congruence, CongruenceSolution, CrtSolution, LinearCongruence, ResidueRing,
};
pub use scan::{scan_range, ScanRecord};
pub use spectrum::{
    check_zdbf_condition, solution_union, spectrum_direct, spectrum_via_unions, Classification,
    SolutionUnion, ZdbfCheck, ZdfSpectrum,
};
