//! Exact integer arithmetic over `Z_n`.
//!
//! Everything here is a pure function of its arguments. Products are widened
//! to `u128` before reduction, so any `u64` modulus is handled without
//! overflow; factorization and primality use trial division and are meant for
//! moduli below `2^31` or so.

use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};

/// Greatest common divisor. `gcd(0, 0)` is rejected.
pub fn gcd(a: u64, b: u64) -> Result<u64> {
    if a == 0 && b == 0 {
        return Err(Error::GcdOfZeros);
    }
    Ok(gcd_u64(a, b))
}

/// Euclid without the zero check; `gcd_u64(0, 0) == 0`.
pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Least common multiple of two positive integers.
pub fn lcm(a: u64, b: u64) -> Result<u64> {
    if a == 0 || b == 0 {
        return Err(Error::Zero {
            what: "lcm argument",
        });
    }
    (a / gcd_u64(a, b))
        .checked_mul(b)
        .ok_or(Error::Overflow("lcm"))
}

/// Returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b)`.
pub fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Inverse of `a` modulo `n`, if it exists. Modulo 1 every value inverts to 0.
pub fn mod_inverse(a: u64, n: u64) -> Option<u64> {
    if n == 0 {
        return None;
    }
    if n == 1 {
        return Some(0);
    }
    let (g, x, _) = extended_gcd((a % n) as i128, n as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(n as i128) as u64)
}

/// The residue ring `Z_n`, `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ResidueRing {
    modulus: u64,
}

impl ResidueRing {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::ModulusTooSmall(modulus));
        }
        Ok(Self { modulus })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Checks that `value` already lies in `[0, n)`.
    pub fn element(&self, value: u64) -> Result<u64> {
        if value < self.modulus {
            Ok(value)
        } else {
            Err(Error::OutOfRange {
                value,
                modulus: self.modulus,
            })
        }
    }

    #[inline]
    pub fn reduce(&self, value: u64) -> u64 {
        value % self.modulus
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.modulus as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let (a, b) = (a % self.modulus, b % self.modulus);
        if a >= b {
            a - b
        } else {
            self.modulus - (b - a)
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut base = base % self.modulus;
        let mut acc = 1 % self.modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn is_unit(&self, x: u64) -> bool {
        gcd_u64(x % self.modulus, self.modulus) == 1
    }

    pub fn elements(&self) -> Range<u64> {
        0..self.modulus
    }

    pub fn units(&self) -> impl Iterator<Item = u64> + '_ {
        self.elements().filter(move |&x| self.is_unit(x))
    }
}

/// All solutions of `a*x ≡ b (mod n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceSolution {
    /// Ascending; empty or exactly `gcd_divisor` long.
    pub solutions: Vec<u64>,
    /// `d = gcd(a, n)`.
    pub gcd_divisor: u64,
}

impl CongruenceSolution {
    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }
}

/// A congruence `a*x ≡ · (mod n)` with its coefficient preprocessed, so that
/// solving for many right-hand sides costs `O(d)` each.
///
/// With `d = gcd(a, n)` and `n' = n/d`, a solution exists iff `d | b`, and
/// then the solutions are `x0 + i*n'` for `i in 0..d`, where
/// `x0 = (b/d) * (a/d)^{-1} mod n'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearCongruence {
    ring: ResidueRing,
    coefficient: u64,
    divisor: u64,
    step: u64,
    reduced_inverse: u64,
}

impl LinearCongruence {
    pub fn new(coefficient: u64, ring: ResidueRing) -> Result<Self> {
        let coefficient = ring.element(coefficient)?;
        let n = ring.modulus();
        let divisor = gcd_u64(coefficient, n);
        let step = n / divisor;
        let reduced_inverse = mod_inverse(coefficient / divisor, step).ok_or_else(|| {
            Error::Inconsistency(format!("{coefficient}/{divisor} not invertible mod {step}"))
        })?;
        Ok(Self {
            ring,
            coefficient,
            divisor,
            step,
            reduced_inverse,
        })
    }

    pub fn coefficient(&self) -> u64 {
        self.coefficient
    }

    /// `gcd(a, n)`.
    pub fn divisor(&self) -> u64 {
        self.divisor
    }

    /// Smallest solution, or `None` when `gcd(a, n)` does not divide `rhs`.
    pub fn base_solution(&self, rhs: u64) -> Option<u64> {
        if !rhs.is_multiple_of(self.divisor) {
            return None;
        }
        let reduced_rhs = (rhs / self.divisor) % self.step;
        Some(((reduced_rhs as u128 * self.reduced_inverse as u128) % self.step as u128) as u64)
    }

    /// Ascending iterator over every solution for `rhs`.
    pub fn solutions(&self, rhs: u64) -> impl Iterator<Item = u64> {
        let step = self.step;
        let (start, count) = match self.base_solution(rhs) {
            Some(x0) => (x0, self.divisor),
            None => (0, 0),
        };
        (0..count).map(move |i| start + i * step)
    }

    pub fn solve(&self, rhs: u64) -> Result<CongruenceSolution> {
        let rhs = self.ring.element(rhs)?;
        Ok(CongruenceSolution {
            solutions: self.solutions(rhs).collect(),
            gcd_divisor: self.divisor,
        })
    }
}

/// All `x` in `Z_n` with `a*x ≡ b (mod n)`.
pub fn solve_linear_congruence(a: u64, b: u64, ring: ResidueRing) -> Result<CongruenceSolution> {
    LinearCongruence::new(a, ring)?.solve(b)
}

/// Deterministic trial-division primality.
pub fn is_prime(n: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::Zero { what: "n" });
    }
    Ok(is_prime_u64(n))
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Prime factorization as ascending `(prime, exponent)` pairs; `factorize(1)` is empty.
pub fn factorize(n: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::Zero { what: "n" });
    }
    Ok(factorize_u64(n))
}

pub(crate) fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut factors = Vec::new();
    let mut push = |n: &mut u64, p: u64| {
        let mut e = 0;
        while (*n).is_multiple_of(p) {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(&mut n, 2);
    push(&mut n, 3);
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        push(&mut n, d);
        push(&mut n, d + 2);
        d += 6;
    }
    if n > 1 {
        factors.push((n, 1));
    }
    factors
}

/// Number of units of `Z_n`, with `φ(1) = 1`.
pub fn euler_phi(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Zero { what: "n" });
    }
    Ok(factorize_u64(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1)))
}

/// Smallest `t >= 1` with `e^t ≡ 1 (mod n)`.
pub fn multiplicative_order(e: u64, ring: ResidueRing) -> Result<u64> {
    let e = ring.element(e)?;
    if !ring.is_unit(e) {
        return Err(Error::NotAUnit {
            element: e,
            modulus: ring.modulus(),
        });
    }
    let mut order = euler_phi(ring.modulus())?;
    for (q, _) in factorize_u64(order) {
        while order % q == 0 && ring.pow(e, order / q) == 1 {
            order /= q;
        }
    }
    Ok(order)
}

fn is_primitive_root(g: u64, p: u64, ring: ResidueRing, phi_factors: &[(u64, u32)]) -> bool {
    !g.is_multiple_of(p)
        && phi_factors
            .iter()
            .all(|&(q, _)| ring.pow(g, (p - 1) / q) != 1)
}

/// Smallest generator of `Z_p^×`. For `p = 2` this is 1.
pub fn primitive_root(p: u64) -> Result<u64> {
    primitive_root_from(p, 2)
}

/// First generator of `Z_p^×` met when scanning upward from `seed mod p`,
/// wrapping around within `[1, p)`.
pub fn primitive_root_from(p: u64, seed: u64) -> Result<u64> {
    if !is_prime(p)? {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Ok(1);
    }
    let ring = ResidueRing::new(p)?;
    let phi_factors = factorize_u64(p - 1);
    let start = seed % p;
    (0..p)
        .map(|i| (start + i) % p)
        .find(|&g| is_primitive_root(g, p, ring, &phi_factors))
        .ok_or_else(|| Error::Inconsistency(format!("no primitive root modulo {p}")))
}

/// Solution of a CRT system: the unique `value` modulo `modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CrtSolution {
    pub value: u64,
    pub modulus: u64,
}

/// Solves `x ≡ r_i (mod m_i)` for pairwise coprime `m_i`.
pub fn crt_solve(residues: &[(u64, u64)]) -> Result<CrtSolution> {
    if residues.is_empty() {
        return Err(Error::EmptySystem);
    }
    for (i, &(r, m)) in residues.iter().enumerate() {
        if m == 0 {
            return Err(Error::Zero {
                what: "CRT modulus",
            });
        }
        if r >= m {
            return Err(Error::OutOfRange {
                value: r,
                modulus: m,
            });
        }
        for &(_, other) in &residues[..i] {
            if gcd_u64(m, other) != 1 {
                return Err(Error::NonCoprimeModuli(other, m));
            }
        }
    }

    let (mut value, mut modulus) = (0u64, 1u64);
    for &(r, m) in residues {
        // x = value + modulus * k with modulus * k ≡ r - value (mod m)
        let inv = mod_inverse(modulus % m, m)
            .ok_or_else(|| Error::Inconsistency(format!("{modulus} not invertible mod {m}")))?;
        let diff = (r as i128 - value as i128).rem_euclid(m as i128) as u128;
        let k = (diff * inv as u128 % m as u128) as u64;
        let next_modulus = modulus
            .checked_mul(m)
            .ok_or(Error::Overflow("CRT modulus product"))?;
        value = ((value as u128 + modulus as u128 * k as u128) % next_modulus as u128) as u64;
        modulus = next_modulus;
    }
    Ok(CrtSolution { value, modulus })
}
