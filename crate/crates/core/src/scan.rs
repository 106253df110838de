//! Sweeps over moduli: every distinct cyclic unit subgroup of every `Z_n` in
//! a range, with its measured parameters and any matching family.

use serde::Serialize;

use crate::coset::{cyclic_unit_subgroups, UnitSubgroup};
use crate::error::{precondition, Result};
use crate::exec::Execution;
use crate::families::{match_family, FamilyId};
use crate::modular::ResidueRing;
use crate::spectrum::{spectrum_via_unions_with, Classification};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRecord {
    pub n: u64,
    /// Smallest generator of the subgroup.
    pub e: u64,
    /// `|G|`.
    pub k: u64,
    pub m: u64,
    #[serde(rename = "S")]
    pub s: Vec<u64>,
    pub classification: Classification,
    pub family: Option<FamilyId>,
}

pub fn scan_subgroup(subgroup: &UnitSubgroup) -> Result<ScanRecord> {
    let spectrum = spectrum_via_unions_with(subgroup, Execution::Sequential)?;
    let family = match_family(subgroup, &spectrum).map(|d| d.family);
    Ok(ScanRecord {
        n: subgroup.modulus(),
        e: subgroup.generator(),
        k: subgroup.order(),
        m: spectrum.image_size(),
        s: spectrum.values().to_vec(),
        classification: spectrum.classification(),
        family,
    })
}

/// All records for one modulus, ordered by generator.
pub fn scan_modulus(n: u64) -> Result<Vec<ScanRecord>> {
    let ring = ResidueRing::new(n)?;
    cyclic_unit_subgroups(ring)
        .iter()
        .map(scan_subgroup)
        .collect()
}

/// Records for every `n` in `n_min..=n_max`, ordered by `(n, e)` whatever the
/// execution strategy.
pub fn scan_range(n_min: u64, n_max: u64, exec: Execution) -> Result<Vec<ScanRecord>> {
    if n_min < 2 || n_min > n_max {
        return Err(precondition(format!(
            "scan range must satisfy 2 <= n_min <= n_max, got {n_min}..={n_max}"
        )));
    }
    let per_n = exec.try_map_range(n_min..n_max + 1, scan_modulus)?;
    Ok(per_n.into_iter().flatten().collect())
}
