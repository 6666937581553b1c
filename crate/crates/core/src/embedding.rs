//! Embedding of a finite metric into ℓ∞ with odd distortion 2q−1.
//!
//! Coordinates are distances to random anchor subsets, drawn at q density
//! scales: scale j includes each point independently with probability
//! min(1, n^{−(j−1)/q}), and each scale contributes max(1, ⌊C·n^{1/q}·ln n⌋)
//! subsets. Stored coordinates are scaled by 2q−1, which makes the
//! non-expansion side ‖g(i)−g(j)‖∞ ≤ (2q−1)·d(i,j) an exact consequence of
//! the triangle inequality, while the non-contraction side
//! d(i,j) ≤ ‖g(i)−g(j)‖∞ holds with high probability and is certified here by
//! exhaustive verification, rebuilding with fresh randomness up to 3 times.
//!
//! q = 1 is the classical isometric special case: the n singleton anchors
//! give distortion exactly 1 deterministically.

use rand::Rng;

use crate::error::{Error, Result};
use crate::metric::FiniteMetric;
use crate::seeding;

/// Verified builds retry at most this many times before giving up.
pub const MAX_BUILD_ATTEMPTS: u32 = 3;

/// Default oversampling constant for the per-scale subset count.
pub const DEFAULT_C_EMB: f64 = 24.0;

const TAG_ATTEMPT: u64 = 0x656d62;

#[derive(Debug, Clone)]
pub struct LinfEmbedding {
    n: usize,
    q: u32,
    c_emb: f64,
    seed: u64,
    d: usize,
    anchors: Vec<Vec<u32>>, // d subsets of [n], each sorted and nonempty
    coords: Vec<f64>,       // row-major n×d, scaled by 2q−1
}

/// Dimension bound matching the construction: d = q·max(1, ⌊C·n^{1/q}·ln n⌋).
pub fn embed_dim_bound(n: usize, q: u32, c_emb: f64) -> f64 {
    q as f64 * (c_emb * (n as f64).powf(1.0 / q as f64) * (n as f64).ln()).max(1.0)
}

impl LinfEmbedding {
    /// Builds and certifies an embedding: draws anchors, verifies both
    /// distortion sides exactly over all pairs, and retries with fresh
    /// randomness (derived attempt seeds) up to MAX_BUILD_ATTEMPTS times.
    pub fn build(m: &FiniteMetric, q: u32, seed: u64, c_emb: f64) -> Result<Self> {
        let bound = (2 * q as u64 - 1) as f64;
        for attempt in 0..MAX_BUILD_ATTEMPTS {
            let e = Self::build_raw(m, q, seeding::derive(seed, TAG_ATTEMPT ^ attempt as u64), c_emb)?;
            let (expansion, contraction) = e.verify_distortion(m);
            if expansion <= bound && contraction <= bound {
                return Ok(e);
            }
        }
        Err(Error::DistortionUnverified { bound, attempts: MAX_BUILD_ATTEMPTS as usize })
    }

    /// Single unverified draw. The non-expansion side still holds
    /// unconditionally; only non-contraction is left unchecked.
    pub fn build_raw(m: &FiniteMetric, q: u32, seed: u64, c_emb: f64) -> Result<Self> {
        if q == 0 {
            return Err(Error::param("q", "number of scales must be at least 1"));
        }
        if !(c_emb > 0.0 && c_emb.is_finite()) {
            return Err(Error::param("c_emb", "oversampling constant must be positive and finite"));
        }
        if !m.is_connected() {
            return Err(Error::InfiniteDistance);
        }
        let n = m.n();
        let mut anchors: Vec<Vec<u32>> = Vec::new();
        if q == 1 {
            anchors.extend((0..n).map(|i| vec![i as u32]));
        } else {
            let per_scale = ((c_emb * (n as f64).powf(1.0 / q as f64) * (n as f64).ln()).floor()
                as usize)
                .max(1);
            let mut rng = seeding::rng(seed);
            for j in 1..=q {
                let p = (n as f64).powf(-((j - 1) as f64) / q as f64).min(1.0);
                for _ in 0..per_scale {
                    // redraw until nonempty; dist(i, ∅) is undefined
                    let set = loop {
                        let s: Vec<u32> =
                            (0..n as u32).filter(|_| rng.random::<f64>() < p).collect();
                        if !s.is_empty() {
                            break s;
                        }
                    };
                    anchors.push(set);
                }
            }
        }
        let d = anchors.len();
        let scale = (2 * q as u64 - 1) as f64;
        let mut coords = vec![0.0f64; n * d];
        for i in 0..n {
            for (j, set) in anchors.iter().enumerate() {
                let dist = set
                    .iter()
                    .map(|&s| m.dist(i, s as usize))
                    .fold(f64::INFINITY, f64::min);
                coords[i * d + j] = scale * dist;
            }
        }
        Ok(LinfEmbedding { n, q, c_emb, seed, d, anchors, coords })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn c_emb(&self) -> f64 {
        self.c_emb
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// The distortion guarantee 2q−1 the verifier certifies against.
    pub fn distortion_bound(&self) -> f64 {
        (2 * self.q as u64 - 1) as f64
    }

    pub fn anchors(&self) -> &[Vec<u32>] {
        &self.anchors
    }

    /// Scaled coordinate vector of point i.
    pub fn point(&self, i: usize) -> Result<&[f64]> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        Ok(&self.coords[i * self.d..(i + 1) * self.d])
    }

    pub fn to_points(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.coords[i * self.d..(i + 1) * self.d].to_vec()).collect()
    }

    /// Exact maxima over all pairs, both normalized so that a successful
    /// build has both values ≤ 2q−1:
    /// expansion = max ‖g(i)−g(j)‖∞ / d(i,j),
    /// contraction = max d(i,j)·(2q−1) / ‖g(i)−g(j)‖∞.
    pub fn verify_distortion(&self, m: &FiniteMetric) -> (f64, f64) {
        let bound = self.distortion_bound();
        let mut expansion = 0.0f64;
        let mut contraction = 0.0f64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let d = m.dist(i, j);
                let g = self.embedded_dist(i, j);
                expansion = expansion.max(g / d);
                contraction = contraction.max(if g > 0.0 { d * bound / g } else { f64::INFINITY });
            }
        }
        (expansion, contraction)
    }

    /// ℓ∞ distance between embedded points.
    pub fn embedded_dist(&self, i: usize, j: usize) -> f64 {
        let a = &self.coords[i * self.d..(i + 1) * self.d];
        let b = &self.coords[j * self.d..(j + 1) * self.d];
        a.iter().zip(b).fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
    }
}
