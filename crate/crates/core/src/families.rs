//! Closed-form families of zero-difference functions on `Z_n`.
//!
//! Each constructor validates its parameters, picks the generator `e` of
//! `G = <e>`, and records the predicted `(n, m, S)` together with the
//! predicted count `N(G, a)` on each divisibility class of shifts `a`.
//! [`verify_family`] checks a descriptor against the brute-force spectrum.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::coset::{CosetIndexFunction, CosetPartition, UnitSubgroup};
use crate::error::{precondition, Error, Result};
use crate::exec::Execution;
use crate::modular::{
    crt_solve, euler_phi, factorize_u64, gcd_u64, is_prime_u64, primitive_root_from, ResidueRing,
};
use crate::spectrum::{
    spectrum_direct_with, spectrum_via_unions_with, Classification, ZdfSpectrum,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FamilyId {
    #[serde(rename = "Z4")]
    Z4,
    #[serde(rename = "TWO_POWER")]
    TwoPower,
    #[serde(rename = "P_SQUARED")]
    PSquared,
    #[serde(rename = "P_POWER_MINUS")]
    PPowerMinus,
    #[serde(rename = "P_POWER_PLUS_S")]
    PPowerPlusS,
    #[serde(rename = "MP_CRT")]
    MpCrt,
    #[serde(rename = "P1P2_CRT")]
    P1p2Crt,
}

impl FamilyId {
    pub const ALL: [FamilyId; 7] = [
        FamilyId::Z4,
        FamilyId::TwoPower,
        FamilyId::PSquared,
        FamilyId::PPowerMinus,
        FamilyId::PPowerPlusS,
        FamilyId::MpCrt,
        FamilyId::P1p2Crt,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyId::Z4 => "Z4",
            FamilyId::TwoPower => "TWO_POWER",
            FamilyId::PSquared => "P_SQUARED",
            FamilyId::PPowerMinus => "P_POWER_MINUS",
            FamilyId::PPowerPlusS => "P_POWER_PLUS_S",
            FamilyId::MpCrt => "MP_CRT",
            FamilyId::P1p2Crt => "P1P2_CRT",
        }
    }

    /// Kebab-case name used on the command line.
    pub fn cli_name(self) -> &'static str {
        match self {
            FamilyId::Z4 => "z4",
            FamilyId::TwoPower => "two-power",
            FamilyId::PSquared => "p-squared",
            FamilyId::PPowerMinus => "p-power-minus",
            FamilyId::PPowerPlusS => "p-power-plus-s",
            FamilyId::MpCrt => "mp-crt",
            FamilyId::P1p2Crt => "p1p2-crt",
        }
    }

    pub fn from_cli_name(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.cli_name() == name || f.as_str() == name)
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A set of nonzero shifts `a` singled out by divisibility.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShiftClass {
    DivisibleBy {
        divisor: u64,
    },
    NotDivisibleBy {
        divisor: u64,
    },
    /// `divisor | a` but `excluded ∤ a`.
    DivisibleByNotBy {
        divisor: u64,
        excluded: u64,
    },
    /// `p^i ∥ a`.
    ExactPower {
        prime: u64,
        exponent: u32,
    },
    CoprimeTo {
        modulus: u64,
    },
}

impl ShiftClass {
    pub fn contains(&self, a: u64) -> bool {
        match *self {
            ShiftClass::DivisibleBy { divisor } => a.is_multiple_of(divisor),
            ShiftClass::NotDivisibleBy { divisor } => !a.is_multiple_of(divisor),
            ShiftClass::DivisibleByNotBy { divisor, excluded } => {
                a.is_multiple_of(divisor) && !a.is_multiple_of(excluded)
            }
            ShiftClass::ExactPower { prime, exponent } => {
                let pi = prime.pow(exponent);
                a.is_multiple_of(pi) && !(a / pi).is_multiple_of(prime)
            }
            ShiftClass::CoprimeTo { modulus } => gcd_u64(a, modulus) == 1,
        }
    }
}

impl fmt::Display for ShiftClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShiftClass::DivisibleBy { divisor } => write!(f, "{divisor} | a"),
            ShiftClass::NotDivisibleBy { divisor } => write!(f, "{divisor} ∤ a"),
            ShiftClass::DivisibleByNotBy { divisor, excluded } => {
                write!(f, "{divisor} | a and {excluded} ∤ a")
            }
            ShiftClass::ExactPower { prime, exponent } => write!(f, "{prime}^{exponent} || a"),
            ShiftClass::CoprimeTo { modulus } => write!(f, "gcd(a, {modulus}) = 1"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassPrediction {
    pub class: ShiftClass,
    pub count: u64,
}

/// A concrete family instance with its predicted parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyDescriptor {
    pub family: FamilyId,
    pub parameters: BTreeMap<String, u64>,
    pub generator: u64,
    pub predicted_n: u64,
    pub predicted_m: u64,
    /// Ascending, deduplicated.
    pub predicted_s: Vec<u64>,
    pub predicted_per_class: Vec<ClassPrediction>,
    pub notes: Vec<String>,
}

impl FamilyDescriptor {
    fn new(family: FamilyId, parameters: &[(&str, u64)], generator: u64, n: u64, m: u64) -> Self {
        Self {
            family,
            parameters: parameters
                .iter()
                .map(|&(k, v)| (k.to_string(), v))
                .collect(),
            generator,
            predicted_n: n,
            predicted_m: m,
            predicted_s: Vec::new(),
            predicted_per_class: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn with_s(mut self, values: impl IntoIterator<Item = u64>) -> Self {
        self.predicted_s = values.into_iter().collect();
        self.predicted_s.sort_unstable();
        self.predicted_s.dedup();
        self
    }

    fn with_class(mut self, class: ShiftClass, count: u64) -> Self {
        self.predicted_per_class
            .push(ClassPrediction { class, count });
        self
    }

    pub fn ring(&self) -> Result<ResidueRing> {
        ResidueRing::new(self.predicted_n)
    }

    pub fn subgroup(&self) -> Result<UnitSubgroup> {
        UnitSubgroup::generated_by(self.generator, self.ring()?)
    }

    pub fn parameter(&self, name: &str) -> Option<u64> {
        self.parameters.get(name).copied()
    }
}

fn pow(base: u64, exp: u32) -> Result<u64> {
    base.checked_pow(exp)
        .ok_or(Error::Overflow("modulus too large"))
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(precondition(msg))
    }
}

fn exponent(k: u64) -> Result<u32> {
    u32::try_from(k).map_err(|_| Error::Overflow("exponent"))
}

/// Both subgroups of `Z_4^×`: `{1}` giving `(4,4,{0})` and `{1,3}` giving `(4,3,{0,2})`.
pub fn family_z4() -> Vec<FamilyDescriptor> {
    vec![
        FamilyDescriptor::new(FamilyId::Z4, &[], 1, 4, 4).with_s([0]),
        FamilyDescriptor::new(FamilyId::Z4, &[], 3, 4, 3).with_s([0, 2]),
    ]
}

/// `n = 2^k`, `e = 2^(k-1) - 1`: a `(2^k, 2^(k-1)+1, {0, 2})` ZDF.
pub fn family_two_power(k: u64) -> Result<FamilyDescriptor> {
    require(k > 2, "k must be greater than 2 (k = 2 is the Z4 family)")?;
    let n = pow(2, exponent(k)?)?;
    let half = n / 2;
    Ok(
        FamilyDescriptor::new(FamilyId::TwoPower, &[("k", k)], half - 1, n, half + 1)
            .with_s([0, 2])
            .with_class(ShiftClass::DivisibleBy { divisor: 2 }, 2)
            .with_class(ShiftClass::NotDivisibleBy { divisor: 2 }, 0),
    )
}

/// `n = p^2`, `e = p - 1`: a `(p^2, p, {p, p^2-p+1})` ZDF.
pub fn family_p_squared(p: u64) -> Result<FamilyDescriptor> {
    require(p > 2 && is_prime_u64(p), "p must be an odd prime")?;
    let n = pow(p, 2)?;
    let big = n - p + 1;
    Ok(
        FamilyDescriptor::new(FamilyId::PSquared, &[("p", p)], p - 1, n, p)
            .with_s([p, big])
            .with_class(ShiftClass::DivisibleBy { divisor: p }, big)
            .with_class(ShiftClass::NotDivisibleBy { divisor: p }, p),
    )
}

/// `n = p^k`, `e = p^(k-1) - 1`:
/// a `(p^k, (2p^(k-1) - p^(k-2) + 1)/2, {1, p, p^k - p^(k-1) + 1})` ZDF.
pub fn family_p_power_minus(p: u64, k: u64) -> Result<FamilyDescriptor> {
    require(p > 2 && is_prime_u64(p), "p must be an odd prime")?;
    require(k > 2, "k must be greater than 2")?;
    let k32 = exponent(k)?;
    let n = pow(p, k32)?;
    let top = pow(p, k32 - 1)?;
    let m = (2 * top - top / p).div_ceil(2);
    let big = n - top + 1;
    Ok(
        FamilyDescriptor::new(FamilyId::PPowerMinus, &[("k", k), ("p", p)], top - 1, n, m)
            .with_s([1, p, big])
            .with_class(ShiftClass::DivisibleBy { divisor: top }, big)
            .with_class(ShiftClass::NotDivisibleBy { divisor: p }, p)
            .with_class(
                ShiftClass::DivisibleByNotBy {
                    divisor: p,
                    excluded: top,
                },
                1,
            ),
    )
}

/// `n = p^k`, `e = p^(k-s) + 1`, `k >= 2s`:
/// a `(p^k, (sp+p-s)p^(k-s-1), {0} ∪ {Σ_{j=0}^{i} φ(p^(k-j)) : i < s})` ZDF.
///
/// Per class: `N = 0` when `p^i ∥ a` with `i < k-s`, and
/// `N = Σ_{j=0}^{i-(k-s)} φ(p^(k-j))` when `p^i ∥ a` with `k-s <= i < k`.
pub fn family_p_power_plus_s(p: u64, k: u64, s: u64) -> Result<FamilyDescriptor> {
    require(is_prime_u64(p), "p must be prime")?;
    require(s >= 1, "s must be at least 1")?;
    require(k >= 2 * s, "k must be at least 2s")?;
    let (k32, s32) = (exponent(k)?, exponent(s)?);
    let n = pow(p, k32)?;
    let e = pow(p, k32 - s32)? + 1;
    let m = (s * p + p - s) * pow(p, k32 - s32 - 1)?;

    // partial sums φ(p^k) + φ(p^(k-1)) + ... + φ(p^(k-i))
    let mut partial = Vec::with_capacity(s as usize);
    let mut acc = 0;
    for j in 0..s32 {
        acc += euler_phi(pow(p, k32 - j)?)?;
        partial.push(acc);
    }

    let mut desc = FamilyDescriptor::new(
        FamilyId::PPowerPlusS,
        &[("k", k), ("p", p), ("s", s)],
        e,
        n,
        m,
    )
    .with_s(std::iter::once(0).chain(partial.iter().copied()));
    for i in 0..k32 {
        let count = if i < k32 - s32 {
            0
        } else {
            partial[(i - (k32 - s32)) as usize]
        };
        desc = desc.with_class(
            ShiftClass::ExactPower {
                prime: p,
                exponent: i,
            },
            count,
        );
    }

    // image size from the per-class coset census, as written alongside the closed form
    let mut census = 1;
    for i in 0..s32 {
        census += euler_phi(pow(p, k32 - i)?)? / pow(p, s32 - i)?;
    }
    for i in s32..=k32 {
        census += euler_phi(pow(p, k32 - i)?)?;
    }
    if census != m {
        desc.notes.push(format!(
            "census summation Σ_(i<s) φ(p^(k-i))/p^(s-i) + Σ_(s<=i<=k) φ(p^(k-i)) + 1 = {census} \
             differs from the closed form (sp+p-s)p^(k-s-1) = {m}; the closed form is used"
        ));
    }
    Ok(desc)
}

/// Generator of `Z_p^×`: the smallest one, or the first found from `seed`.
fn generator_for(p: u64, seed: Option<u64>) -> Result<u64> {
    primitive_root_from(p, seed.unwrap_or(2))
}

pub fn family_mp_crt(m: u64, p: u64, s: u64, t: u64) -> Result<FamilyDescriptor> {
    family_mp_crt_seeded(m, p, s, t, None)
}

/// `n = mp`, `e ≡ 1 (mod m)`, `e ≡ g^t (mod p)`: an `(mp, m(1+t), {0, m(s-1)})` ZDF.
///
/// Per class: `N = m(s-1)` when `m | a`, and `N = 0` otherwise (in
/// particular whenever `p | a`).
pub fn family_mp_crt_seeded(
    m: u64,
    p: u64,
    s: u64,
    t: u64,
    seed: Option<u64>,
) -> Result<FamilyDescriptor> {
    require(is_prime_u64(p), "p must be prime")?;
    require(m >= 2, "m must be at least 2")?;
    require(gcd_u64(m, p) == 1, "gcd(m, p) must be 1")?;
    require(s >= 1 && t >= 1, "s and t must be positive")?;
    require(s.checked_mul(t) == Some(p - 1), "s * t must equal p - 1")?;
    let n = m.checked_mul(p).ok_or(Error::Overflow("m * p"))?;
    let g = generator_for(p, seed)?;
    let gt = ResidueRing::new(p)?.pow(g, t);
    let e = crt_solve(&[(1, m), (gt, p)])?.value;
    Ok(FamilyDescriptor::new(
        FamilyId::MpCrt,
        &[("g", g), ("m", m), ("p", p), ("s", s), ("t", t)],
        e,
        n,
        m * (1 + t),
    )
    .with_s([0, m * (s - 1)])
    .with_class(ShiftClass::DivisibleBy { divisor: p }, 0)
    // every g - 1 is a multiple of m, so only shifts divisible by m collide
    .with_class(ShiftClass::DivisibleBy { divisor: m }, m * (s - 1))
    .with_class(ShiftClass::NotDivisibleBy { divisor: m }, 0))
}

pub fn family_p1p2_crt(
    p1: u64,
    p2: u64,
    s1: u64,
    t1: u64,
    s2: u64,
    t2: u64,
) -> Result<FamilyDescriptor> {
    family_p1p2_crt_seeded(p1, p2, s1, t1, s2, t2, None)
}

/// `n = p1·p2`, `e ≡ g1^t1 (mod p1)`, `e ≡ g2^t2 (mod p2)`, `d = gcd(s1, s2)`:
/// a `(p1p2, 1 + t1 + t2 + d·t1·t2, {a0, a1, a2})` ZDF with
/// `a0 = (s1s2 - s1 - s2)/d + 1`, `a1 = (p1-1)s2/d - p1 + s2`,
/// `a2 = (p2-1)s1/d - p2 + s1`.
#[allow(clippy::too_many_arguments)]
pub fn family_p1p2_crt_seeded(
    p1: u64,
    p2: u64,
    s1: u64,
    t1: u64,
    s2: u64,
    t2: u64,
    seed: Option<u64>,
) -> Result<FamilyDescriptor> {
    require(
        is_prime_u64(p1) && is_prime_u64(p2),
        "p1 and p2 must be prime",
    )?;
    require(p1 != p2, "p1 and p2 must be distinct")?;
    require(
        s1 >= 1 && t1 >= 1 && s2 >= 1 && t2 >= 1,
        "s1, t1, s2, t2 must be positive",
    )?;
    require(
        s1.checked_mul(t1) == Some(p1 - 1),
        "s1 * t1 must equal p1 - 1",
    )?;
    require(
        s2.checked_mul(t2) == Some(p2 - 1),
        "s2 * t2 must equal p2 - 1",
    )?;
    let n = p1.checked_mul(p2).ok_or(Error::Overflow("p1 * p2"))?;
    let d = gcd_u64(s1, s2);
    let (g1, g2) = (generator_for(p1, seed)?, generator_for(p2, seed)?);
    let e = crt_solve(&[
        (ResidueRing::new(p1)?.pow(g1, t1), p1),
        (ResidueRing::new(p2)?.pow(g2, t2), p2),
    ])?
    .value;

    let (s1i, s2i, di) = (s1 as i128, s2 as i128, d as i128);
    let a0 = (s1i * s2i - s1i - s2i) / di + 1;
    let a1 = (p1 as i128 - 1) * s2i / di - p1 as i128 + s2i;
    let a2 = (p2 as i128 - 1) * s1i / di - p2 as i128 + s1i;
    let nonneg = |v: i128| {
        u64::try_from(v).map_err(|_| Error::Inconsistency(format!("negative predicted count {v}")))
    };
    let (a0, a1, a2) = (nonneg(a0)?, nonneg(a1)?, nonneg(a2)?);

    Ok(FamilyDescriptor::new(
        FamilyId::P1p2Crt,
        &[
            ("d", d),
            ("g1", g1),
            ("g2", g2),
            ("p1", p1),
            ("p2", p2),
            ("s1", s1),
            ("s2", s2),
            ("t1", t1),
            ("t2", t2),
        ],
        e,
        n,
        1 + t1 + t2 + d * t1 * t2,
    )
    .with_s([a0, a1, a2])
    .with_class(ShiftClass::CoprimeTo { modulus: n }, a0)
    .with_class(ShiftClass::DivisibleBy { divisor: p1 }, a1)
    .with_class(ShiftClass::DivisibleBy { divisor: p2 }, a2))
}

/// The rows of the summary table at their smallest parameters, with labels.
pub fn table_rows() -> Result<Vec<(&'static str, FamilyDescriptor)>> {
    Ok(vec![
        ("4", family_z4().swap_remove(1)),
        ("2^k", family_two_power(3)?),
        ("p^2", family_p_squared(3)?),
        ("p^k, e=p^(k-1)-1", family_p_power_minus(3, 3)?),
        ("p^k, e=p^(k-1)+1", family_p_power_plus_s(3, 2, 1)?),
        ("mp", family_mp_crt(2, 5, 2, 2)?),
        ("p1p2", family_p1p2_crt(5, 7, 2, 2, 3, 2)?),
    ])
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..)
        .take_while(|d| d * d <= n)
        .filter(|d| n.is_multiple_of(*d))
        .collect();
    let large: Vec<u64> = out
        .iter()
        .rev()
        .map(|d| n / d)
        .filter(|&q| q * q != n)
        .collect();
    out.extend(large);
    out
}

/// Every family instance (with default generators) living on `Z_n`.
pub fn candidate_instances(n: u64) -> Vec<FamilyDescriptor> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    if n == 4 {
        out.extend(family_z4());
    }
    let factors = factorize_u64(n);
    if let [(p, k)] = factors[..] {
        let k = k as u64;
        if p == 2 && k > 2 {
            out.extend(family_two_power(k));
        }
        if p > 2 && k == 2 {
            out.extend(family_p_squared(p));
        }
        if p > 2 && k > 2 {
            out.extend(family_p_power_minus(p, k));
        }
        for s in 1..=k / 2 {
            out.extend(family_p_power_plus_s(p, k, s));
        }
    }
    for &(p, k) in &factors {
        let m = n / p;
        if k != 1 || m < 2 {
            continue;
        }
        for s in divisors(p - 1) {
            out.extend(family_mp_crt(m, p, s, (p - 1) / s));
        }
    }
    if let [(p1, 1), (p2, 1)] = factors[..] {
        for s1 in divisors(p1 - 1) {
            for s2 in divisors(p2 - 1) {
                out.extend(family_p1p2_crt(
                    p1,
                    p2,
                    s1,
                    (p1 - 1) / s1,
                    s2,
                    (p2 - 1) / s2,
                ));
            }
        }
    }
    out
}

/// The first known family instance on the same ring whose subgroup equals
/// `subgroup` and whose predicted `(n, m, S)` equals the measured spectrum.
pub fn match_family(subgroup: &UnitSubgroup, spectrum: &ZdfSpectrum) -> Option<FamilyDescriptor> {
    let n = subgroup.modulus();
    candidate_instances(n).into_iter().find(|desc| {
        desc.predicted_m == spectrum.image_size()
            && desc.predicted_s == spectrum.values()
            && desc
                .subgroup()
                .map(|g| g.elements() == subgroup.elements())
                .unwrap_or(false)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassCheck {
    pub class: ShiftClass,
    pub predicted: u64,
    /// Distinct measured counts over the nonzero shifts in the class.
    pub observed: Vec<u64>,
    pub shifts: u64,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub descriptor: FamilyDescriptor,
    pub measured_n: u64,
    pub measured_m: u64,
    pub measured_s: Vec<u64>,
    pub classification: Classification,
    pub subgroup_order: u64,
    /// Direct counting and the congruence-union route gave identical spectra.
    pub routes_agree: bool,
    pub class_checks: Vec<ClassCheck>,
    pub per_class_match: bool,
    pub verdict: Verdict,
    pub mismatches: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verification {
    Verified(VerificationReport),
    /// `n` exceeds the brute-force bound; nothing was measured.
    Unverifiable {
        descriptor: FamilyDescriptor,
        brute_bound: u64,
    },
}

impl Verification {
    pub fn report(&self) -> Option<&VerificationReport> {
        match self {
            Verification::Verified(r) => Some(r),
            Verification::Unverifiable { .. } => None,
        }
    }

    pub fn is_pass(&self) -> bool {
        self.report().is_some_and(|r| r.verdict.is_pass())
    }
}

/// Compares a descriptor's predictions with a measured spectrum.
pub fn compare_with_spectrum(
    descriptor: &FamilyDescriptor,
    subgroup: &UnitSubgroup,
    spectrum: &ZdfSpectrum,
    routes_agree: bool,
) -> VerificationReport {
    let mut mismatches = Vec::new();
    if !routes_agree {
        mismatches.push("direct and union spectra differ".to_string());
    }
    if spectrum.modulus() != descriptor.predicted_n {
        mismatches.push(format!(
            "n: predicted {}, measured {}",
            descriptor.predicted_n,
            spectrum.modulus()
        ));
    }
    if spectrum.image_size() != descriptor.predicted_m {
        mismatches.push(format!(
            "m: predicted {}, measured {}",
            descriptor.predicted_m,
            spectrum.image_size()
        ));
    }
    if spectrum.values() != descriptor.predicted_s {
        mismatches.push(format!(
            "S: predicted {:?}, measured {:?}",
            descriptor.predicted_s,
            spectrum.values()
        ));
    }

    let class_checks: Vec<ClassCheck> = descriptor
        .predicted_per_class
        .iter()
        .map(|pred| {
            let mut observed: Vec<u64> = spectrum
                .shifts()
                .filter(|&(a, _)| pred.class.contains(a))
                .map(|(_, c)| c)
                .collect();
            let shifts = observed.len() as u64;
            observed.sort_unstable();
            observed.dedup();
            let matches = observed.iter().all(|&c| c == pred.count);
            ClassCheck {
                class: pred.class.clone(),
                predicted: pred.count,
                observed,
                shifts,
                matches,
            }
        })
        .collect();
    for c in class_checks.iter().filter(|c| !c.matches) {
        mismatches.push(format!(
            "N for {}: predicted {}, measured {:?}",
            c.class, c.predicted, c.observed
        ));
    }
    let per_class_match = class_checks.iter().all(|c| c.matches);

    VerificationReport {
        descriptor: descriptor.clone(),
        measured_n: spectrum.modulus(),
        measured_m: spectrum.image_size(),
        measured_s: spectrum.values().to_vec(),
        classification: spectrum.classification(),
        subgroup_order: subgroup.order(),
        routes_agree,
        class_checks,
        per_class_match,
        verdict: if mismatches.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        mismatches,
    }
}

/// Builds `f_G` for the descriptor, computes the spectrum by both routes and
/// compares everything the descriptor predicts.
pub fn verify_family(
    descriptor: &FamilyDescriptor,
    brute_bound: u64,
    exec: Execution,
) -> Result<Verification> {
    if descriptor.predicted_n > brute_bound {
        return Ok(Verification::Unverifiable {
            descriptor: descriptor.clone(),
            brute_bound,
        });
    }
    let subgroup = descriptor.subgroup()?;
    let f = CosetIndexFunction::new(CosetPartition::new(subgroup.clone()));
    let direct = spectrum_direct_with(&f, exec);
    let unions = spectrum_via_unions_with(&subgroup, exec)?;
    let routes_agree = direct == unions;
    Ok(Verification::Verified(compare_with_spectrum(
        descriptor,
        &subgroup,
        &direct,
        routes_agree,
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOUND: u64 = 4096;

    fn verified(desc: &FamilyDescriptor) -> VerificationReport {
        match verify_family(desc, BOUND, Execution::default()).unwrap() {
            Verification::Verified(r) => r,
            other => panic!("unexpected {other:?}"),
        }
    }

    fn triple(d: &FamilyDescriptor) -> (u64, u64, Vec<u64>) {
        (d.predicted_n, d.predicted_m, d.predicted_s.clone())
    }

    #[test]
    fn z4_rows() {
        let rows = family_z4();
        assert_eq!(rows[0].generator, 1);
        assert_eq!(triple(&rows[0]), (4, 4, vec![0]));
        assert_eq!(rows[1].generator, 3);
        assert_eq!(triple(&rows[1]), (4, 3, vec![0, 2]));
        for r in &rows {
            assert!(verified(r).verdict.is_pass());
        }
    }

    #[test]
    fn two_power_examples() {
        let d = family_two_power(3).unwrap();
        assert_eq!((d.generator, triple(&d)), (3, (8, 5, vec![0, 2])));
        let d = family_two_power(4).unwrap();
        assert_eq!((d.generator, triple(&d)), (7, (16, 9, vec![0, 2])));
        assert!(verified(&family_two_power(3).unwrap()).verdict.is_pass());
        assert!(matches!(family_two_power(2), Err(Error::Precondition(_))));
        assert!(family_two_power(64).is_err());
    }

    #[test]
    fn p_squared_examples() {
        let d = family_p_squared(3).unwrap();
        assert_eq!((d.generator, triple(&d)), (2, (9, 3, vec![3, 7])));
        let d = family_p_squared(5).unwrap();
        assert_eq!((d.generator, triple(&d)), (4, (25, 5, vec![5, 21])));
        assert!(verified(&family_p_squared(3).unwrap()).verdict.is_pass());
        assert_eq!(
            family_p_squared(4).unwrap_err().to_string(),
            "invalid parameters: p must be an odd prime"
        );
        assert!(family_p_squared(2).is_err());
    }

    #[test]
    fn p_power_minus_examples() {
        let d = family_p_power_minus(3, 3).unwrap();
        assert_eq!((d.generator, triple(&d)), (8, (27, 8, vec![1, 3, 19])));
        let d = family_p_power_minus(5, 3).unwrap();
        assert_eq!((d.generator, triple(&d)), (24, (125, 23, vec![1, 5, 101])));
        assert!(verified(&family_p_power_minus(3, 3).unwrap())
            .verdict
            .is_pass());
        assert!(family_p_power_minus(3, 2).is_err());
        assert!(family_p_power_minus(2, 4).is_err());
    }

    #[test]
    fn p_power_plus_s_examples() {
        let d = family_p_power_plus_s(3, 2, 1).unwrap();
        assert_eq!((d.generator, triple(&d)), (4, (9, 5, vec![0, 6])));
        let d = family_p_power_plus_s(2, 2, 1).unwrap();
        assert_eq!((d.generator, triple(&d)), (3, (4, 3, vec![0, 2])));
        let d = family_p_power_plus_s(3, 4, 2).unwrap();
        assert_eq!((d.generator, triple(&d)), (10, (81, 21, vec![0, 54, 72])));
        assert!(verified(&d).verdict.is_pass());
        assert!(family_p_power_plus_s(3, 3, 2).is_err());
        assert!(family_p_power_plus_s(3, 2, 0).is_err());
        assert!(family_p_power_plus_s(4, 2, 1).is_err());
    }

    #[test]
    fn p_power_plus_s_records_census_discrepancy() {
        let d = family_p_power_plus_s(3, 2, 1).unwrap();
        assert_eq!(d.notes.len(), 1);
        assert!(d.notes[0].contains("= 6"), "{}", d.notes[0]);
    }

    #[test]
    fn s_equal_one_matches_two_parameter_form() {
        for p in [2u64, 3, 5] {
            for k in [2u32, 3] {
                let d = family_p_power_plus_s(p, k as u64, 1).unwrap();
                let n = p.pow(k);
                assert_eq!(d.generator, p.pow(k - 1) + 1);
                assert_eq!(d.predicted_n, n);
                assert_eq!(d.predicted_m, 2 * p.pow(k - 1) - p.pow(k - 2));
                assert_eq!(d.predicted_s, vec![0, n - p.pow(k - 1)]);
            }
        }
    }

    #[test]
    fn mp_crt_examples() {
        let d = family_mp_crt(2, 5, 2, 2).unwrap();
        assert_eq!(
            (d.parameter("g"), d.generator, triple(&d)),
            (Some(2), 9, (10, 6, vec![0, 2]))
        );
        let d = family_mp_crt(3, 7, 3, 2).unwrap();
        assert_eq!(
            (d.parameter("g"), d.generator, triple(&d)),
            (Some(3), 16, (21, 9, vec![0, 6]))
        );
        let d = family_mp_crt(2, 5, 4, 1).unwrap();
        assert_eq!((d.generator, triple(&d)), (7, (10, 4, vec![0, 6])));
        assert!(family_mp_crt(1, 5, 2, 2).is_err());
        assert!(family_mp_crt(5, 5, 2, 2).is_err());
        assert!(family_mp_crt(2, 5, 3, 1).is_err());
        assert!(family_mp_crt(2, 9, 4, 2).is_err());
    }

    #[test]
    fn p1p2_crt_examples() {
        let d = family_p1p2_crt(5, 7, 2, 2, 3, 2).unwrap();
        assert_eq!(
            (d.parameter("d"), d.generator, triple(&d)),
            (Some(1), 9, (35, 9, vec![2, 7, 10]))
        );
        assert_eq!(d.subgroup().unwrap().order(), 6);

        let d = family_p1p2_crt(3, 5, 2, 1, 2, 2).unwrap();
        assert_eq!(
            (d.parameter("d"), d.predicted_m, d.predicted_s.clone()),
            (Some(2), 8, vec![1])
        );

        let d = family_p1p2_crt(3, 7, 1, 2, 1, 6).unwrap();
        assert_eq!(d.generator, 1);
        assert_eq!(d.predicted_s, vec![0]);
        assert!(verified(&d).verdict.is_pass());

        assert!(family_p1p2_crt(5, 5, 2, 2, 2, 2).is_err());
        assert!(family_p1p2_crt(5, 7, 2, 2, 3, 3).is_err());
    }

    #[test]
    fn seeded_generators_preserve_predictions() {
        // 3 and 5 both generate Z_7^×
        for seed in [3, 5] {
            let d = family_mp_crt_seeded(3, 7, 3, 2, Some(seed)).unwrap();
            assert_eq!(d.parameter("g"), Some(seed));
            let r = verified(&d);
            assert!(r.verdict.is_pass(), "{:?}", r.mismatches);
        }
        let d = family_p1p2_crt_seeded(5, 7, 2, 2, 3, 2, Some(3)).unwrap();
        assert_eq!((d.parameter("g1"), d.parameter("g2")), (Some(3), Some(3)));
        assert!(verified(&d).verdict.is_pass());
    }

    #[test]
    fn corrupted_prediction_fails() {
        let mut d = family_two_power(3).unwrap();
        d.predicted_m += 1;
        let r = verified(&d);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.mismatches, vec!["m: predicted 6, measured 5".to_string()]);

        let mut d = family_p_squared(3).unwrap();
        d.predicted_per_class[0].count = 6;
        let r = verified(&d);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(!r.per_class_match);
    }

    #[test]
    fn over_bound_is_unverifiable_not_fail() {
        let d = family_two_power(10).unwrap();
        let v = verify_family(&d, 512, Execution::default()).unwrap();
        assert!(matches!(
            v,
            Verification::Unverifiable {
                brute_bound: 512,
                ..
            }
        ));
        assert!(!v.is_pass());
    }

    #[test]
    fn shift_classes() {
        let c = ShiftClass::ExactPower {
            prime: 3,
            exponent: 1,
        };
        assert_eq!(
            (1..27).filter(|&a| c.contains(a)).collect::<Vec<_>>(),
            vec![3, 6, 12, 15, 21, 24]
        );
        let c = ShiftClass::DivisibleByNotBy {
            divisor: 3,
            excluded: 9,
        };
        assert!(c.contains(6) && !c.contains(18) && !c.contains(4));
        assert!(ShiftClass::CoprimeTo { modulus: 35 }.contains(4));
        assert_eq!(c.to_string(), "3 | a and 9 ∤ a");
    }

    #[test]
    fn family_names_round_trip() {
        for f in FamilyId::ALL {
            assert_eq!(FamilyId::from_cli_name(f.cli_name()), Some(f));
            assert_eq!(FamilyId::from_cli_name(f.as_str()), Some(f));
        }
        assert_eq!(FamilyId::from_cli_name("nope"), None);
    }

    #[test]
    fn matching_prefers_listed_order() {
        let ring = ResidueRing::new(9).unwrap();
        let g = UnitSubgroup::generated_by(2, ring).unwrap();
        let f = CosetIndexFunction::new(CosetPartition::new(g.clone()));
        let s = crate::spectrum::spectrum_direct(&f);
        assert_eq!(
            match_family(&g, &s).map(|d| d.family),
            Some(FamilyId::PSquared)
        );

        let g = UnitSubgroup::generated_by(4, ring).unwrap();
        let f = CosetIndexFunction::new(CosetPartition::new(g.clone()));
        let s = crate::spectrum::spectrum_direct(&f);
        assert_eq!(
            match_family(&g, &s).map(|d| d.family),
            Some(FamilyId::PPowerPlusS)
        );
    }

    #[test]
    fn divisors_are_sorted() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(16), vec![1, 2, 4, 8, 16]);
        assert_eq!(divisors(1), vec![1]);
    }
}
