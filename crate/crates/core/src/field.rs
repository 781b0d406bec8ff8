//! Prime search and arithmetic modulo a prime `p ≡ 1 (mod 4)`.
//!
//! Every residue handled by this crate is a canonical `u64` in `[0, p)`. The
//! modulus is capped at 2^31 so that products of two residues always fit in a
//! `u64` without widening.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest modulus (exclusive) the arithmetic in this crate supports.
pub const MODULUS_BUDGET: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("dimension {d} too large: the factorial threshold does not fit below 2^31")]
    DimensionTooLarge { d: usize },
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("no admissible prime below 2^31 at or above {0}")]
    PrimeOutOfRange(u64),
    #[error("{0} is not a prime congruent to 1 mod 4")]
    NotOneModFour(u64),
    #[error("{p} is not admissible for d = {d}: need a prime p ≡ 1 (mod 4) with p > (d+1)!")]
    NotAdmissible { p: u64, d: usize },
    #[error("zero has no inverse")]
    ZeroInverse,
}

/// How far above `(d+1)!` the construction prime has to sit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimeThreshold {
    /// `p > (d+1)!`, the only bound any algebraic step relies on.
    #[default]
    Factorial,
    /// `p > 10 (d+1)!`.
    TenFactorial,
}

impl PrimeThreshold {
    /// The strict lower bound on `p` for dimension `d`, if it fits the budget.
    pub fn bound(self, d: usize) -> Result<u64, FieldError> {
        if d < 2 {
            return Err(FieldError::DimensionTooSmall(d));
        }
        let mut fact: u64 = 1;
        for k in 2..=(d as u64 + 1) {
            fact = fact
                .checked_mul(k)
                .filter(|&f| f < MODULUS_BUDGET)
                .ok_or(FieldError::DimensionTooLarge { d })?;
        }
        match self {
            PrimeThreshold::Factorial => Ok(fact),
            PrimeThreshold::TenFactorial => Some(fact * 10)
                .filter(|&f| f < MODULUS_BUDGET)
                .ok_or(FieldError::DimensionTooLarge { d }),
        }
    }
}

pub fn mod_mul(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

pub fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Inverse of `x` modulo the prime `p`, by the extended Euclidean algorithm.
pub fn mod_inverse(x: u64, p: u64) -> Result<u64, FieldError> {
    let x = x % p;
    if x == 0 {
        return Err(FieldError::ZeroInverse);
    }
    let (mut r0, mut r1) = (p as i64, x as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "modulus must be prime");
    Ok(s0.rem_euclid(p as i64) as u64)
}

/// Deterministic Miller-Rabin; the witness set {2, 7, 61} is exact below 4.7e9.
pub fn is_prime(n: u64) -> bool {
    assert!(n < MODULUS_BUDGET * 2, "primality test limited to 32-bit inputs");
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 61] {
        if n % small == 0 {
            return n == small;
        }
    }
    let mut odd = n - 1;
    let mut twos = 0;
    while odd % 2 == 0 {
        odd /= 2;
        twos += 1;
    }
    'witness: for a in [2u64, 7, 61] {
        let mut x = mod_pow(a, odd, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..twos {
            x = x * x % n;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `p ≥ n` with `p ≡ 1 (mod 4)` and `p` above the factorial threshold.
pub fn find_construction_prime(n: u64, d: usize) -> Result<u64, FieldError> {
    find_construction_prime_with(n, d, PrimeThreshold::Factorial)
}

pub fn find_construction_prime_with(
    n: u64,
    d: usize,
    threshold: PrimeThreshold,
) -> Result<u64, FieldError> {
    let start = n.max(threshold.bound(d)? + 1);
    next_admissible_from(start)
}

/// The next admissible prime strictly greater than `p` for the same dimension.
pub fn next_admissible_prime(p: u64) -> Result<u64, FieldError> {
    next_admissible_from(p + 1)
}

fn next_admissible_from(start: u64) -> Result<u64, FieldError> {
    // first candidate ≡ 1 (mod 4) at or above `start`
    let mut c = start + (4 - (start + 3) % 4) % 4;
    if c == 1 {
        c = 5;
    }
    while c < MODULUS_BUDGET {
        if is_prime(c) {
            return Ok(c);
        }
        c += 4;
    }
    Err(FieldError::PrimeOutOfRange(start))
}

/// The smaller square root of −1 modulo `p`.
///
/// Computed as `a^((p-1)/4)` for the least quadratic non-residue `a` and then
/// checked by squaring.
pub fn sqrt_minus_one(p: u64) -> Result<u64, FieldError> {
    if p % 4 != 1 || !is_prime(p) {
        return Err(FieldError::NotOneModFour(p));
    }
    let half = (p - 1) / 2;
    let non_residue = (2..p)
        .find(|&a| mod_pow(a, half, p) == p - 1)
        .expect("a prime has quadratic non-residues");
    let root = mod_pow(non_residue, (p - 1) / 4, p);
    assert_eq!(root * root % p, p - 1, "square root of -1 failed to verify");
    Ok(root.min(p - root))
}

/// A square root of `a` modulo the odd prime `p` by Tonelli-Shanks, or `None`
/// for a non-residue.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if mod_pow(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| mod_pow(z, (p - 1) / 2, p) == p - 1)?;
    let mut m = s;
    let mut c = mod_pow(z, q, p);
    let mut t = mod_pow(a, q, p);
    let mut r = mod_pow(a, (q + 1) / 2, p);
    while t != 1 {
        // least i with t^(2^i) = 1
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = t2 * t2 % p;
            i += 1;
        }
        let b = mod_pow(c, 1 << (m - i - 1), p);
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    Some(r)
}

/// A prime modulus `p ≡ 1 (mod 4)` above `(d+1)!`, with a certified `α² = −1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldContext {
    p: u64,
    alpha: u64,
    d: usize,
}

impl FieldContext {
    pub fn new(p: u64, d: usize) -> Result<Self, FieldError> {
        let bound = PrimeThreshold::Factorial.bound(d)?;
        if p >= MODULUS_BUDGET || p <= bound || p % 4 != 1 || !is_prime(p) {
            return Err(FieldError::NotAdmissible { p, d });
        }
        let alpha = sqrt_minus_one(p)?;
        assert_eq!((alpha * alpha + 1) % p, 0);
        Ok(FieldContext { p, alpha, d })
    }

    /// Context for a prime `p ≡ 1 (mod 4)` below the budget, not tied to any
    /// dimension (`d()` is 0). Used to check point sets over `F_p`.
    pub fn prime_field(p: u64) -> Result<Self, FieldError> {
        if p >= MODULUS_BUDGET {
            return Err(FieldError::PrimeOutOfRange(p));
        }
        let alpha = sqrt_minus_one(p)?;
        Ok(FieldContext { p, alpha, d: 0 })
    }

    /// Context for the smallest admissible prime at or above `n`.
    pub fn for_grid(n: u64, d: usize, threshold: PrimeThreshold) -> Result<Self, FieldError> {
        FieldContext::new(find_construction_prime_with(n, d, threshold)?, d)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.p
    }

    /// Canonical residue of a signed integer.
    #[inline]
    pub fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mod_mul(a, b, self.p)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        mod_pow(a, e, self.p)
    }

    pub fn inv(&self, a: u64) -> Result<u64, FieldError> {
        mod_inverse(a, self.p)
    }
}
