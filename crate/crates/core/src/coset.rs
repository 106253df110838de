//! Cyclic unit subgroups `G = <e>` of `Z_n`, the partition of `Z_n` into the
//! cosets `rG`, and the coset index function built on top of it.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::modular::{gcd_u64, ResidueRing};

/// The cyclic subgroup `<e>` of `Z_n^×`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnitSubgroup {
    ring: ResidueRing,
    generator: u64,
    /// Ascending.
    elements: Vec<u64>,
}

/// `e^0, e^1, ..., e^(k-1)` in power order.
fn power_cycle(e: u64, ring: ResidueRing) -> Vec<u64> {
    let one = 1 % ring.modulus();
    let mut powers = vec![one];
    let mut x = e;
    while x != one {
        powers.push(x);
        x = ring.mul(x, e);
    }
    powers
}

impl UnitSubgroup {
    pub fn generated_by(e: u64, ring: ResidueRing) -> Result<Self> {
        let e = ring.element(e)?;
        if !ring.is_unit(e) {
            return Err(Error::NotAUnit {
                element: e,
                modulus: ring.modulus(),
            });
        }
        let mut elements = power_cycle(e, ring);
        elements.sort_unstable();
        Ok(Self {
            ring,
            generator: e,
            elements,
        })
    }

    pub fn ring(&self) -> ResidueRing {
        self.ring
    }

    pub fn modulus(&self) -> u64 {
        self.ring.modulus()
    }

    /// The generator this subgroup was built from.
    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    /// `|G|`.
    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Every element that generates the same subgroup, ascending.
    pub fn generators(&self) -> Vec<u64> {
        let powers = power_cycle(self.generator, self.ring);
        let k = powers.len() as u64;
        let mut gens: Vec<u64> = powers
            .into_iter()
            .enumerate()
            .filter(|&(j, _)| gcd_u64(j as u64, k) == 1)
            .map(|(_, x)| x)
            .collect();
        gens.sort_unstable();
        gens
    }

    pub fn smallest_generator(&self) -> u64 {
        self.generators()[0]
    }

    /// Same subgroup, labelled by its smallest generator.
    pub fn canonical(&self) -> Self {
        Self {
            generator: self.smallest_generator(),
            ..self.clone()
        }
    }
}

pub fn build_subgroup(e: u64, ring: ResidueRing) -> Result<UnitSubgroup> {
    UnitSubgroup::generated_by(e, ring)
}

/// Every distinct cyclic subgroup of `Z_n^×`, each labelled by its smallest
/// generator and listed in ascending generator order.
pub fn cyclic_unit_subgroups(ring: ResidueRing) -> Vec<UnitSubgroup> {
    let n = ring.modulus() as usize;
    let mut seen = vec![false; n];
    let mut subgroups = Vec::new();
    for e in ring.units() {
        if seen[e as usize] {
            continue;
        }
        let powers = power_cycle(e, ring);
        let k = powers.len() as u64;
        for (j, &x) in powers.iter().enumerate() {
            if gcd_u64(j as u64, k) == 1 {
                seen[x as usize] = true;
            }
        }
        let mut elements = powers;
        elements.sort_unstable();
        subgroups.push(UnitSubgroup {
            ring,
            generator: e,
            elements,
        });
    }
    subgroups
}

/// The partition `{rG : r in Z_n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetPartition {
    subgroup: UnitSubgroup,
    /// Each coset ascending; cosets ordered by their minimal element.
    cosets: Vec<Vec<u64>>,
    /// Coset size `a` -> number of ring elements whose coset has size `a`.
    size_multiplicity: BTreeMap<u64, u64>,
}

impl CosetPartition {
    pub fn new(subgroup: UnitSubgroup) -> Self {
        let ring = subgroup.ring();
        let n = ring.modulus() as usize;
        let mut assigned = vec![false; n];
        let mut cosets = Vec::new();
        let mut size_multiplicity = BTreeMap::new();

        // scanning r upward makes r the minimum of its own coset
        for r in ring.elements() {
            if assigned[r as usize] {
                continue;
            }
            let mut coset: Vec<u64> = subgroup
                .elements()
                .iter()
                .map(|&g| ring.mul(r, g))
                .collect();
            coset.sort_unstable();
            coset.dedup();
            for &x in &coset {
                assigned[x as usize] = true;
            }
            *size_multiplicity.entry(coset.len() as u64).or_insert(0) += coset.len() as u64;
            cosets.push(coset);
        }
        Self {
            subgroup,
            cosets,
            size_multiplicity,
        }
    }

    pub fn ring(&self) -> ResidueRing {
        self.subgroup.ring()
    }

    pub fn subgroup(&self) -> &UnitSubgroup {
        &self.subgroup
    }

    pub fn cosets(&self) -> &[Vec<u64>] {
        &self.cosets
    }

    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    /// `d(G)`: the distinct coset sizes, ascending.
    pub fn coset_sizes(&self) -> impl Iterator<Item = u64> + '_ {
        self.size_multiplicity.keys().copied()
    }

    /// `M(G, a)` for every `a` in `d(G)`.
    pub fn size_multiplicity(&self) -> &BTreeMap<u64, u64> {
        &self.size_multiplicity
    }

    /// `M(G, a)`; zero when no coset has size `a`.
    pub fn multiplicity(&self, size: u64) -> u64 {
        self.size_multiplicity.get(&size).copied().unwrap_or(0)
    }

    /// `Σ_{a ∈ d(G)} M(G,a) / a`, the image size obtained from the size census.
    pub fn image_size_from_census(&self) -> u64 {
        self.size_multiplicity.iter().map(|(&a, &m)| m / a).sum()
    }
}

pub fn build_partition(subgroup: UnitSubgroup) -> CosetPartition {
    CosetPartition::new(subgroup)
}

/// `f_G`: sends `x` to the index of its coset, with cosets numbered `0..m` in
/// order of their minimal element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetIndexFunction {
    partition: CosetPartition,
    table: Vec<u32>,
}

impl CosetIndexFunction {
    pub fn new(partition: CosetPartition) -> Self {
        let mut table = vec![0u32; partition.ring().modulus() as usize];
        for (index, coset) in partition.cosets().iter().enumerate() {
            for &x in coset {
                table[x as usize] = index as u32;
            }
        }
        Self { partition, table }
    }

    /// Shorthand for subgroup -> partition -> index function.
    pub fn from_generator(e: u64, ring: ResidueRing) -> Result<Self> {
        Ok(Self::new(CosetPartition::new(UnitSubgroup::generated_by(
            e, ring,
        )?)))
    }

    pub fn ring(&self) -> ResidueRing {
        self.partition.ring()
    }

    pub fn partition(&self) -> &CosetPartition {
        &self.partition
    }

    pub fn subgroup(&self) -> &UnitSubgroup {
        self.partition.subgroup()
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    #[inline]
    pub fn eval(&self, x: u64) -> u32 {
        self.table[(x % self.ring().modulus()) as usize]
    }

    /// `m = |Im f_G|`.
    pub fn image_size(&self) -> u64 {
        self.partition.len() as u64
    }
}

pub fn build_coset_index_function(partition: CosetPartition) -> CosetIndexFunction {
    CosetIndexFunction::new(partition)
}
