//! Zero-difference spectra of coset index functions.
//!
//! For every nonzero shift `a`, `N(G, a) = |{x : f(x+a) = f(x)}|`. Two
//! independent routes compute it:
//!
//! * [`spectrum_direct`] scans the lookup table, `O(n)` per shift;
//! * [`spectrum_via_unions`] counts `⋃_{g∈G} {x : x(g-1) ≡ a (mod n)}`
//!   with the linear congruence solver, `O(n·|G|)` in total.
//!
//! The direct route is the oracle; the union route is the identity that makes
//! the closed-form predictions possible.

use serde::Serialize;

use crate::coset::{CosetIndexFunction, CosetPartition, UnitSubgroup};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::modular::LinearCongruence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Classification {
    /// `|S| = 1`, a zero-difference balanced function.
    #[serde(rename = "ZDBF")]
    Zdbf,
    #[serde(rename = "NONTRIVIAL_ZDF")]
    NontrivialZdf,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Zdbf => "ZDBF",
            Classification::NontrivialZdf => "NONTRIVIAL_ZDF",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-shift zero-difference counts together with the derived `(n, m, S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZdfSpectrum {
    modulus: u64,
    /// `per_shift[a - 1] = N(a)` for `a` in `1..n`.
    per_shift: Vec<u64>,
    values: Vec<u64>,
    image_size: u64,
    classification: Classification,
}

impl ZdfSpectrum {
    pub fn from_counts(modulus: u64, per_shift: Vec<u64>, image_size: u64) -> Self {
        debug_assert_eq!(per_shift.len() as u64, modulus - 1);
        let mut values = per_shift.clone();
        values.sort_unstable();
        values.dedup();
        let classification = if values.len() == 1 {
            Classification::Zdbf
        } else {
            Classification::NontrivialZdf
        };
        Self {
            modulus,
            per_shift,
            values,
            image_size,
            classification,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `N(a)` for `a` in `1..n`.
    pub fn count(&self, shift: u64) -> Option<u64> {
        match shift {
            0 => None,
            a => self.per_shift.get(a as usize - 1).copied(),
        }
    }

    /// Counts for shifts `1, 2, ..., n-1`.
    pub fn per_shift(&self) -> &[u64] {
        &self.per_shift
    }

    /// Iterator of `(a, N(a))`.
    pub fn shifts(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.per_shift
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as u64 + 1, c))
    }

    /// `S`, ascending.
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// `m`.
    pub fn image_size(&self) -> u64 {
        self.image_size
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }

    /// `λ` for a ZDBF.
    pub fn lambda(&self) -> Option<u64> {
        match self.classification {
            Classification::Zdbf => Some(self.values[0]),
            Classification::NontrivialZdf => None,
        }
    }
}

fn shift_collisions(table: &[u32], shift: usize) -> u64 {
    let n = table.len();
    let (head, tail) = table.split_at(n - shift);
    // x in [0, n-shift): compare table[x + shift] with table[x]
    let inner = head
        .iter()
        .zip(&table[shift..])
        .filter(|(a, b)| a == b)
        .count();
    // x in [n-shift, n): x + shift wraps to x + shift - n
    let wrapped = tail
        .iter()
        .zip(&table[..shift])
        .filter(|(a, b)| a == b)
        .count();
    (inner + wrapped) as u64
}

/// Spectrum of an arbitrary lookup table `Z_n -> Z_m` by direct counting.
pub fn spectrum_of_table(table: &[u32], exec: Execution) -> ZdfSpectrum {
    let n = table.len() as u64;
    let per_shift = exec.map_range(1..n, |a| shift_collisions(table, a as usize));
    let mut image: Vec<u32> = table.to_vec();
    image.sort_unstable();
    image.dedup();
    ZdfSpectrum::from_counts(n, per_shift, image.len() as u64)
}

pub fn spectrum_direct(f: &CosetIndexFunction) -> ZdfSpectrum {
    spectrum_direct_with(f, Execution::default())
}

pub fn spectrum_direct_with(f: &CosetIndexFunction, exec: Execution) -> ZdfSpectrum {
    let n = f.ring().modulus();
    let table = f.table();
    let per_shift = exec.map_range(1..n, |a| shift_collisions(table, a as usize));
    ZdfSpectrum::from_counts(n, per_shift, f.image_size())
}

/// `{x : f(x+a) = f(x)}`, ascending.
pub fn collision_set(f: &CosetIndexFunction, shift: u64) -> Vec<u64> {
    let ring = f.ring();
    ring.elements()
        .filter(|&x| f.eval(ring.add(x, shift)) == f.eval(x))
        .collect()
}

/// `S(G, a)`: the union of the solution sets of `x(g-1) ≡ a` over `g ∈ G`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionUnion {
    pub shift: u64,
    /// Ascending, deduplicated.
    pub union_set: Vec<u64>,
    /// `N(G, a)`.
    pub size: u64,
}

/// One prepared congruence `(g-1)x ≡ · (mod n)` per `g ≠ 1`.
struct UnionSolver {
    congruences: Vec<LinearCongruence>,
}

impl UnionSolver {
    fn new(subgroup: &UnitSubgroup) -> Result<Self> {
        let ring = subgroup.ring();
        let congruences = subgroup
            .elements()
            .iter()
            .filter(|&&g| g != 1)
            .map(|&g| LinearCongruence::new(ring.sub(g, 1), ring))
            .collect::<Result<_>>()?;
        Ok(Self { congruences })
    }

    fn union(&self, shift: u64) -> Vec<u64> {
        // g = 1 contributes 0·x ≡ a, which has no solution for a ≠ 0
        let mut set: Vec<u64> = self
            .congruences
            .iter()
            .flat_map(|c| c.solutions(shift))
            .collect();
        set.sort_unstable();
        set.dedup();
        set
    }
}

fn check_shift(subgroup: &UnitSubgroup, shift: u64) -> Result<u64> {
    let shift = subgroup.ring().element(shift)?;
    if shift == 0 {
        return Err(Error::Zero { what: "shift" });
    }
    Ok(shift)
}

pub fn solution_union(subgroup: &UnitSubgroup, shift: u64) -> Result<SolutionUnion> {
    let shift = check_shift(subgroup, shift)?;
    let union_set = UnionSolver::new(subgroup)?.union(shift);
    let size = union_set.len() as u64;
    Ok(SolutionUnion {
        shift,
        union_set,
        size,
    })
}

/// All solution unions for `a = 1..n`, in shift order.
pub fn solution_unions(subgroup: &UnitSubgroup, exec: Execution) -> Result<Vec<SolutionUnion>> {
    let solver = UnionSolver::new(subgroup)?;
    Ok(exec.map_range(1..subgroup.modulus(), |a| {
        let union_set = solver.union(a);
        let size = union_set.len() as u64;
        SolutionUnion {
            shift: a,
            union_set,
            size,
        }
    }))
}

pub fn spectrum_via_unions(subgroup: &UnitSubgroup) -> Result<ZdfSpectrum> {
    spectrum_via_unions_with(subgroup, Execution::default())
}

/// Counts `N(G, a)` from the union of congruence solutions, and `m` from the
/// coset-size census `Σ M(G,a)/a`.
pub fn spectrum_via_unions_with(subgroup: &UnitSubgroup, exec: Execution) -> Result<ZdfSpectrum> {
    let solver = UnionSolver::new(subgroup)?;
    let n = subgroup.modulus();
    let per_shift = exec.map_range(1..n, |a| solver.union(a).len() as u64);
    let image_size = CosetPartition::new(subgroup.clone()).image_size_from_census();
    Ok(ZdfSpectrum::from_counts(n, per_shift, image_size))
}

/// Predicted `(n, (n-1)/k + 1, k - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZdbfParameters {
    pub n: u64,
    pub m: u64,
    pub lambda: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZdbfCheck {
    /// Every `g - 1` with `g ∈ G \ {1}` is a unit.
    pub holds: bool,
    pub predicted: Option<ZdbfParameters>,
}

pub fn check_zdbf_condition(subgroup: &UnitSubgroup) -> Result<ZdbfCheck> {
    let ring = subgroup.ring();
    let holds = subgroup
        .elements()
        .iter()
        .filter(|&&g| g != 1)
        .all(|&g| ring.is_unit(ring.sub(g, 1)));
    if !holds {
        return Ok(ZdbfCheck {
            holds,
            predicted: None,
        });
    }
    let n = ring.modulus();
    let k = subgroup.order();
    if !(n - 1).is_multiple_of(k) {
        return Err(Error::Inconsistency(format!(
            "unit condition holds but |G| = {k} does not divide n - 1 = {}",
            n - 1
        )));
    }
    Ok(ZdbfCheck {
        holds,
        predicted: Some(ZdbfParameters {
            n,
            m: (n - 1) / k + 1,
            lambda: k - 1,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::ResidueRing;

    fn ring(n: u64) -> ResidueRing {
        ResidueRing::new(n).unwrap()
    }

    fn subgroup(e: u64, n: u64) -> UnitSubgroup {
        UnitSubgroup::generated_by(e, ring(n)).unwrap()
    }

    fn function(e: u64, n: u64) -> CosetIndexFunction {
        CosetIndexFunction::from_generator(e, ring(n)).unwrap()
    }

    #[test]
    fn direct_examples() {
        let s = spectrum_direct(&function(3, 4));
        assert_eq!(s.per_shift(), &[0, 2, 0]);
        assert_eq!(s.values(), &[0, 2]);
        assert_eq!(s.image_size(), 3);
        assert_eq!(s.classification(), Classification::NontrivialZdf);

        let s = spectrum_direct(&function(2, 9));
        assert_eq!(s.per_shift(), &[3, 3, 7, 3, 3, 7, 3, 3]);
        assert_eq!(s.values(), &[3, 7]);

        let s = spectrum_direct(&function(4, 9));
        assert_eq!(s.per_shift(), &[0, 0, 6, 0, 0, 6, 0, 0]);
        assert_eq!(s.values(), &[0, 6]);
    }

    #[test]
    fn identity_subgroup_has_no_collisions() {
        let s = spectrum_direct(&function(1, 4));
        assert_eq!(s.values(), &[0]);
        assert_eq!(s.image_size(), 4);
        assert_eq!(s.classification(), Classification::Zdbf);
        assert_eq!(s.lambda(), Some(0));
    }

    #[test]
    fn solution_union_examples() {
        let u = solution_union(&subgroup(3, 8), 2).unwrap();
        assert_eq!(u.union_set, vec![1, 5]);
        assert_eq!(u.size, 2);

        let u = solution_union(&subgroup(3, 8), 1).unwrap();
        assert!(u.union_set.is_empty());

        let u = solution_union(&subgroup(2, 9), 3).unwrap();
        assert_eq!(u.size, 7);
    }

    #[test]
    fn solution_union_rejects_zero_shift() {
        assert!(solution_union(&subgroup(3, 8), 0).is_err());
        assert!(solution_union(&subgroup(3, 8), 8).is_err());
    }

    #[test]
    fn union_examples() {
        let s = spectrum_via_unions(&subgroup(3, 4)).unwrap();
        assert_eq!(s.values(), &[0, 2]);

        let s = spectrum_via_unions(&subgroup(9, 10)).unwrap();
        assert_eq!(s.values(), &[0, 2]);
        assert_eq!(s.image_size(), 6);

        let s = spectrum_via_unions(&subgroup(2, 7)).unwrap();
        assert_eq!(s.values(), &[2]);
        assert_eq!(s.classification(), Classification::Zdbf);
    }

    #[test]
    fn both_routes_and_both_executions_agree() {
        for (e, n) in [(3, 4), (2, 9), (4, 9), (9, 10), (2, 7), (16, 21), (10, 81)] {
            let f = function(e, n);
            let direct = spectrum_direct_with(&f, Execution::Sequential);
            assert_eq!(direct, spectrum_direct_with(&f, Execution::Parallel));
            assert_eq!(
                direct,
                spectrum_via_unions_with(f.subgroup(), Execution::Sequential).unwrap()
            );
            assert_eq!(
                direct,
                spectrum_via_unions_with(f.subgroup(), Execution::Parallel).unwrap()
            );
        }
    }

    #[test]
    fn zdbf_condition_examples() {
        let c = check_zdbf_condition(&subgroup(2, 7)).unwrap();
        assert!(c.holds);
        assert_eq!(
            c.predicted,
            Some(ZdbfParameters {
                n: 7,
                m: 3,
                lambda: 2
            })
        );

        let c = check_zdbf_condition(&subgroup(3, 8)).unwrap();
        assert!(!c.holds);
        assert_eq!(c.predicted, None);

        let c = check_zdbf_condition(&subgroup(1, 4)).unwrap();
        assert!(c.holds);
        assert_eq!(
            c.predicted,
            Some(ZdbfParameters {
                n: 4,
                m: 4,
                lambda: 0
            })
        );
    }

    #[test]
    fn raw_table_spectrum() {
        // a non-coset function on Z_5: f = [0, 0, 1, 1, 1]
        let s = spectrum_of_table(&[0, 0, 1, 1, 1], Execution::Sequential);
        let brute: Vec<u64> = (1..5)
            .map(|a| {
                (0..5)
                    .filter(|&x| [0, 0, 1, 1, 1][(x + a) % 5] == [0, 0, 1, 1, 1][x])
                    .count() as u64
            })
            .collect();
        assert_eq!(s.per_shift(), brute.as_slice());
        assert_eq!(s.image_size(), 2);
    }

    #[test]
    fn count_accessor() {
        let s = spectrum_direct(&function(2, 9));
        assert_eq!(s.count(0), None);
        assert_eq!(s.count(3), Some(7));
        assert_eq!(s.count(9), None);
        assert_eq!(s.shifts().nth(2), Some((3, 7)));
    }
}
