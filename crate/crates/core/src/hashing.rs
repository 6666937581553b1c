//! Pairwise-independent hashing and the geometric bucket map used to gate
//! sketch updates.
//!
//! `h(x) = ((a·x + b) mod P) mod K` with a uniform in [1, P) and b uniform
//! in [0, P) is pairwise independent over the prime field; folding mod K
//! skews marginals by at most K/P, which is why P is chosen as the smallest
//! prime above 2·domain_bound rather than a fixed word-size prime.

use rand::Rng;

use crate::error::{Error, Result};
use crate::seeding;

/// Deterministic Miller–Rabin, exact for every u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Smallest prime strictly above `x`.
pub fn smallest_prime_above(x: u64) -> Result<u64> {
    let mut c = x
        .checked_add(1)
        .ok_or_else(|| Error::param("domain_bound", "prime search would overflow u64"))?;
    loop {
        if is_prime_u64(c) {
            return Ok(c);
        }
        c = c
            .checked_add(1)
            .ok_or_else(|| Error::param("domain_bound", "prime search would overflow u64"))?;
    }
}

/// Pairwise-independent hash {0..domain_bound} → {0..k−1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseHash {
    p: u64,
    a: u64,
    b: u64,
    k: u64,
}

impl PairwiseHash {
    /// Coefficients are drawn deterministically from `seed`; P is the
    /// smallest prime above 2·domain_bound, so the mod-K fold distorts any
    /// single bucket probability by less than K/P.
    pub fn new(seed: u64, domain_bound: u64, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("k", "hash range must be positive"));
        }
        let doubled = domain_bound
            .max(1)
            .checked_mul(2)
            .ok_or_else(|| Error::param("domain_bound", "2*domain_bound overflows u64"))?;
        let p = smallest_prime_above(doubled)?;
        let mut rng = seeding::rng(seed);
        let a = 1 + rng.random::<u64>() % (p - 1);
        let b = rng.random::<u64>() % p;
        Ok(PairwiseHash { p, a, b, k })
    }

    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        let ax = mul_mod(self.a, x % self.p, self.p);
        (((ax as u128 + self.b as u128) % self.p as u128) % self.k as u128) as u64
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn range(&self) -> u64 {
        self.k
    }
}

/// Bucket index ⌊z / (ε·r)⌋ of a nonnegative value.
pub fn bucket(z: f64, eps: f64, r: f64) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("eps", format!("must lie in (0,1), got {eps}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::param("r", format!("must be positive and finite, got {r}")));
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::param("z", format!("must be nonnegative and finite, got {z}")));
    }
    let q = (z / (eps * r)).floor();
    if q > u64::MAX as f64 / 2.0 {
        return Err(Error::param("z", "bucket index overflows"));
    }
    Ok(q as u64)
}

/// Largest ε' = 1/t with ε' ≤ ε (up to one ulp of slack, so that inputs that
/// are themselves rounded reciprocals snap to their own t). Returns (ε', t).
pub fn snap_unit_fraction(eps: f64) -> Result<(f64, u64)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("eps", format!("must lie in (0,1), got {eps}")));
    }
    let t = (1.0 / eps - 1e-9).ceil() as u64;
    let t = t.max(2); // ε < 1 forces t ≥ 2
    Ok((1.0 / t as f64, t))
}
