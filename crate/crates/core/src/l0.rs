//! Exactly linear ℓ₀ sampling sketch.
//!
//! Structure: L = ⌈log₂ n⌉ + 1 subsampling levels crossed with R = Θ(log 1/δ)
//! independent repetitions. Repetition t hashes every index to a 64-bit word;
//! the index participates in level j iff the word's top j bits are zero, so
//! level j keeps each index with probability 2^(−j) and the level sets are
//! nested. Each (level, repetition) cell is a one-sparse tester
//! (count, index-weighted sum, polynomial fingerprint) over the prime field
//! 2^61 − 1. Every counter is a linear functional of the frequency vector, so
//! sketches of concatenated streams merge by componentwise addition.
//!
//! A query scans cells in a fixed order and returns the first index that a
//! tester recovers and its fingerprint confirms; conditioned on not failing,
//! that index is uniform on the support by exchangeability of the membership
//! words. Soundness error (a confirmed wrong index) is at most n/2^61 per
//! cell. `Zero` is declared from the level-0 testers, which see every update.

use crate::error::{Error, Result};
use crate::seeding;

/// Mersenne prime field modulus for fingerprints.
pub const FIELD_PRIME: u64 = (1 << 61) - 1;

/// Row-count bound constant: rows ≤ C·(log₂n + 1)·(log₂(1/δ) + 1).
pub const ROW_BOUND_CONST: f64 = 16.0;

/// Serialized-size bound constant, in bits, against
/// 512 + C·(log₂n + 1)·(log₂(1/δ) + 1)·(log₂(n·m) + 1).
///
/// Cells are fixed 24-byte words regardless of n·m, so at tiny n·m the
/// log₂(n·m) factor understates the word width and the constant absorbs
/// the difference. At n = 2¹⁶, m = 2³¹ the bound still has ~6x slack.
pub const SPACE_BOUND_CONST: f64 = 160.0;

const MAGIC: [u8; 4] = *b"L0SK";
const VERSION: u32 = 1;
const TAG_MEMBERSHIP: u64 = 0x6d656d;
const TAG_FINGERPRINT: u64 = 0x667020;

#[inline]
fn fadd(a: u64, b: u64) -> u64 {
    let s = a + b; // both < 2^61, no overflow
    if s >= FIELD_PRIME {
        s - FIELD_PRIME
    } else {
        s
    }
}

#[inline]
fn fmul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % FIELD_PRIME as u128) as u64
}

fn fpow(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = fmul(acc, base);
        }
        base = fmul(base, base);
        exp >>= 1;
    }
    acc
}

fn finv(a: u64) -> u64 {
    fpow(a, FIELD_PRIME - 2)
}

#[inline]
fn fembed(delta: i64) -> u64 {
    delta.rem_euclid(FIELD_PRIME as i64) as u64
}

/// Exact dyadic decomposition of an f64 in (0, 1): value = num / 2^log2_den.
fn f64_to_dyadic(x: f64) -> (u64, u32) {
    debug_assert!(x > 0.0 && x < 1.0);
    let bits = x.to_bits();
    let exp_raw = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mant, mut e) =
        if exp_raw == 0 { (frac, -1074i64) } else { (frac | (1 << 52), exp_raw - 1075) };
    let tz = mant.trailing_zeros() as i64;
    mant >>= tz;
    e += tz;
    (mant, (-e) as u32)
}

fn dyadic_to_f64(num: u64, log2_den: u32) -> f64 {
    num as f64 * 2f64.powi(-(log2_den as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Tester {
    count: i64,
    wsum: u64,
    fp: u64,
}

/// Outcome of an ℓ₀ sample query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleOutcome {
    /// A support index, uniform over supp(x) conditioned on not failing.
    Index(usize),
    /// The frequency vector is exactly zero.
    Zero,
    /// No cell recovered; happens with probability at most δ.
    Fail,
}

/// Linear ℓ₀ sampling sketch over frequency vectors in Z^n with entries
/// bounded by m_bound in magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct L0Sampler {
    n: usize,
    m_bound: i64,
    delta: f64,
    seed: u64,
    levels: u32,
    reps: u32,
    z: u64,          // fingerprint base, derived from seed
    mem_seed: u64,   // membership PRF seed, derived from seed
    testers: Vec<Tester>, // index j * reps + t
}

fn levels_for(n: usize) -> u32 {
    if n <= 1 {
        1
    } else {
        (usize::BITS - (n - 1).leading_zeros()) + 1 // ⌈log₂ n⌉ + 1
    }
}

fn reps_for(delta: f64) -> u32 {
    // per-repetition miss probability at the critical level is at most 3/4
    ((1.0 / delta).ln() / (4.0f64 / 3.0).ln()).ceil().max(1.0) as u32
}

impl L0Sampler {
    pub fn new(n: usize, delta: f64, seed: u64, m_bound: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "dimension must be positive"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param("delta", format!("failure budget must lie in (0,1), got {delta}")));
        }
        if m_bound < 1 {
            return Err(Error::param("m_bound", "magnitude bound must be at least 1"));
        }
        if (n as u128) * (m_bound as u128) >= FIELD_PRIME as u128 {
            return Err(Error::param("m_bound", "n * m_bound must stay below the field prime 2^61 - 1"));
        }
        let levels = levels_for(n);
        let reps = reps_for(delta);
        let z = seeding::derive(seed, TAG_FINGERPRINT) % (FIELD_PRIME - 1) + 1;
        let mem_seed = seeding::derive(seed, TAG_MEMBERSHIP);
        Ok(L0Sampler {
            n,
            m_bound,
            delta,
            seed,
            levels,
            reps,
            z,
            mem_seed,
            testers: vec![Tester::default(); (levels * reps) as usize],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn m_bound(&self) -> i64 {
        self.m_bound
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn reps(&self) -> u32 {
        self.reps
    }

    /// Number of linear measurements (3 per tester cell).
    pub fn rows(&self) -> usize {
        3 * self.testers.len()
    }

    /// Deepest level index i participates in under repetition t; level j
    /// membership is `survival_level(t, i) >= j`, with probability 2^(−j).
    pub fn survival_level(&self, rep: u32, i: usize) -> u32 {
        let w = seeding::prf2(self.mem_seed, rep as u64, i as u64);
        w.leading_zeros().min(self.levels - 1)
    }

    /// Applies x[i] += delta to the sketched vector.
    pub fn update(&mut self, i: usize, delta: i64) -> Result<()> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        if delta == 0 {
            return Ok(());
        }
        let d = fembed(delta);
        let dw = fmul(d, (i + 1) as u64);
        let dfp = fmul(d, fpow(self.z, (i + 1) as u64));
        for t in 0..self.reps {
            let top = self.survival_level(t, i);
            for j in 0..=top {
                let cell = &mut self.testers[(j * self.reps + t) as usize];
                cell.count += delta;
                cell.wsum = fadd(cell.wsum, dw);
                cell.fp = fadd(cell.fp, dfp);
            }
        }
        Ok(())
    }

    fn try_recover(&self, cell: &Tester) -> Option<usize> {
        if cell.count == 0 {
            return None;
        }
        // |count| ≤ n·m_bound < P, so a nonzero count is nonzero mod P
        let c = fembed(cell.count);
        let cand = fmul(cell.wsum, finv(c));
        if cand == 0 || cand > self.n as u64 {
            return None;
        }
        if cell.fp == fmul(c, fpow(self.z, cand)) {
            Some((cand - 1) as usize)
        } else {
            None
        }
    }

    /// Samples a support index. Scan order over (level, repetition) cells is
    /// fixed, so the result is a deterministic function of the state.
    pub fn sample(&self) -> SampleOutcome {
        let zero = (0..self.reps).all(|t| self.testers[t as usize] == Tester::default());
        if zero {
            return SampleOutcome::Zero;
        }
        for j in 0..self.levels {
            for t in 0..self.reps {
                if let Some(i) = self.try_recover(&self.testers[(j * self.reps + t) as usize]) {
                    return SampleOutcome::Index(i);
                }
            }
        }
        SampleOutcome::Fail
    }

    /// Componentwise sum: the sketch of the concatenated streams.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        if self.n != other.n
            || self.m_bound != other.m_bound
            || self.delta.to_bits() != other.delta.to_bits()
            || self.seed != other.seed
        {
            return Err(Error::Incompatible {
                reason: "ℓ₀ samplers must share (n, m_bound, delta, seed) to merge".into(),
            });
        }
        let mut out = self.clone();
        for (c, o) in out.testers.iter_mut().zip(&other.testers) {
            c.count = c.count.checked_add(o.count).ok_or(Error::Incompatible {
                reason: "merged counts overflow i64".into(),
            })?;
            c.wsum = fadd(c.wsum, o.wsum);
            c.fp = fadd(c.fp, o.fp);
        }
        Ok(out)
    }

    /// The sketch as an explicit matrix over the field: 3 rows per cell in
    /// (count, wsum, fp) order, scanning levels outer and repetitions inner.
    /// State must equal this matrix applied to the frequency vector mod P
    /// (counts are additionally exact over Z).
    pub fn linear_coefficients(&self) -> Vec<Vec<u64>> {
        let mut rows = Vec::with_capacity(self.rows());
        for j in 0..self.levels {
            for t in 0..self.reps {
                let mut count_row = vec![0u64; self.n];
                let mut wsum_row = vec![0u64; self.n];
                let mut fp_row = vec![0u64; self.n];
                for i in 0..self.n {
                    if self.survival_level(t, i) >= j {
                        count_row[i] = 1;
                        wsum_row[i] = (i + 1) as u64;
                        fp_row[i] = fpow(self.z, (i + 1) as u64);
                    }
                }
                rows.push(count_row);
                rows.push(wsum_row);
                rows.push(fp_row);
            }
        }
        rows
    }

    pub fn serialize(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(52 + self.testers.len() * 24);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        out.extend_from_slice(&self.m_bound.to_le_bytes());
        let (num, den) = f64_to_dyadic(self.delta);
        out.extend_from_slice(&num.to_le_bytes());
        out.extend_from_slice(&den.to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&self.levels.to_le_bytes());
        out.extend_from_slice(&self.reps.to_le_bytes());
        for cell in &self.testers {
            out.extend_from_slice(&cell.count.to_le_bytes());
            out.extend_from_slice(&cell.wsum.to_le_bytes());
            out.extend_from_slice(&cell.fp.to_le_bytes());
        }
        out
    }

    pub fn deserialize(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, at: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::param("bytes", "bad magic; not an ℓ₀ sampler"));
        }
        if u32::from_le_bytes(r.take(4)?.try_into().unwrap()) != VERSION {
            return Err(Error::param("bytes", "unsupported version"));
        }
        let n = u64::from_le_bytes(r.take(8)?.try_into().unwrap()) as usize;
        let m_bound = i64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let num = u64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let den = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
        let seed = u64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let levels = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
        let reps = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
        let delta = dyadic_to_f64(num, den);
        let mut out = L0Sampler::new(n, delta, seed, m_bound)?;
        if out.levels != levels || out.reps != reps {
            return Err(Error::param("bytes", "level/rep counts disagree with (n, delta)"));
        }
        for cell in out.testers.iter_mut() {
            cell.count = i64::from_le_bytes(r.take(8)?.try_into().unwrap());
            cell.wsum = u64::from_le_bytes(r.take(8)?.try_into().unwrap());
            cell.fp = u64::from_le_bytes(r.take(8)?.try_into().unwrap());
            if cell.wsum >= FIELD_PRIME || cell.fp >= FIELD_PRIME {
                return Err(Error::param("bytes", "field element out of range"));
            }
        }
        if r.at != bytes.len() {
            return Err(Error::param("bytes", "trailing bytes after sketch"));
        }
        Ok(out)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.at + len > self.bytes.len() {
            return Err(Error::param("bytes", "truncated sketch"));
        }
        let s = &self.bytes[self.at..self.at + len];
        self.at += len;
        Ok(s)
    }
}

/// Row bound rows ≤ C·(log₂n + 1)·(log₂(1/δ) + 1) with C = ROW_BOUND_CONST.
pub fn row_bound(n: usize, delta: f64) -> f64 {
    ROW_BOUND_CONST * ((n.max(2) as f64).log2() + 1.0) * ((1.0 / delta).log2() + 1.0)
}

/// Serialized-size bound in bits.
pub fn space_bound_bits(n: usize, delta: f64, m_bound: i64) -> f64 {
    512.0
        + SPACE_BOUND_CONST
            * ((n.max(2) as f64).log2() + 1.0)
            * ((1.0 / delta).log2() + 1.0)
            * ((n as f64 * m_bound as f64).log2() + 1.0)
}
