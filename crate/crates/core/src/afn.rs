//! Streaming approximate furthest neighbor (AFN) gap decisions in ℓ∞^k.
//!
//! The sketch tracks a turnstile multiset over a known finite universe of
//! points. Each of T independent runs carves every coordinate axis into
//! buckets of width ε·r, keeps a point's coordinate iff a pairwise-independent
//! hash sends its bucket to 0, and feeds the surviving indices to one
//! ℓ₀ sampler per coordinate. At query time each sampler proposes a support
//! index; the answer is Far as soon as any proposed point lies at ℓ∞ distance
//! strictly greater than r from the query, so every Far comes with a
//! recomputable witness. Close/Far are each correct with probability ≥ 1−δ
//! when the instance respects the (r, (1+ε)r) gap.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hashing::{self, PairwiseHash};
use crate::l0::{L0Sampler, SampleOutcome};
use crate::seeding;

/// Repetition count is ⌈REP·ln(1/δ)/ε⌉; REP = 24 matches the per-run success
/// lower bound of ε/24 on gap instances.
pub const DEFAULT_REP_CONSTANT: f64 = 24.0;

/// Row bound constant: rows ≤ C·k·log₂n·log₂k·log₂(1/δ)/ε, factors clamped
/// below by 1.
pub const ROW_BOUND_CONST: f64 = 512.0;

/// Default magnitude bound for the per-coordinate samplers.
pub const DEFAULT_M_BOUND: i64 = 1 << 31;

const MAGIC: [u8; 4] = *b"AFNS";
const VERSION: u32 = 1;
// disjoint tag namespaces: high bits select the component, low bits the index
const TAG_RUN_HASH: u64 = 1 << 40;
const TAG_SAMPLER: u64 = 2 << 40;

/// A finite universe of n points in ℓ∞^k, stored raw plus normalized so the
/// minimum positive pairwise distance is 1 and coordinates are nonnegative.
/// Normalization is a shift plus a uniform scale, so distance ratios are
/// preserved.
#[derive(Debug, Clone)]
pub struct PointUniverse {
    n: usize,
    k: usize,
    raw: Vec<f64>,  // row-major n×k
    norm: Vec<f64>, // row-major n×k, (raw - shift) * scale
    scale: f64,
    min_dist: f64, // raw; 0.0 when no positive pairwise distance exists
    max_dist: f64, // raw
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
}

impl PointUniverse {
    pub fn new(points: &[Vec<f64>]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::param("points", "universe must contain at least one point"));
        }
        let k = points[0].len();
        if k == 0 {
            return Err(Error::param("points", "points must have at least one coordinate"));
        }
        let n = points.len();
        let mut raw = Vec::with_capacity(n * k);
        for (i, p) in points.iter().enumerate() {
            if p.len() != k {
                return Err(Error::param("points", format!("point {i} has {} coordinates, expected {k}", p.len())));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::param("points", format!("point {i} has a non-finite coordinate")));
            }
            raw.extend_from_slice(p);
        }
        let mut min_dist = f64::INFINITY;
        let mut max_dist = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                let d = linf(&raw[i * k..(i + 1) * k], &raw[j * k..(j + 1) * k]);
                if d > 0.0 {
                    min_dist = min_dist.min(d);
                }
                max_dist = max_dist.max(d);
            }
        }
        if !min_dist.is_finite() {
            min_dist = 0.0; // all points coincide (or n = 1)
        }
        let scale = if min_dist > 0.0 { 1.0 / min_dist } else { 1.0 };
        let mut shift = vec![f64::INFINITY; k];
        for i in 0..n {
            for l in 0..k {
                shift[l] = shift[l].min(raw[i * k + l]);
            }
        }
        let norm: Vec<f64> = (0..n * k).map(|id| (raw[id] - shift[id % k]) * scale).collect();
        Ok(PointUniverse { n, k, raw, norm, scale, min_dist, max_dist })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Scale factor applied during normalization (1 / min positive distance).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Minimum positive pairwise ℓ∞ distance in raw units (0 if none).
    pub fn min_dist(&self) -> f64 {
        self.min_dist
    }

    /// Maximum pairwise ℓ∞ distance in raw units.
    pub fn max_dist(&self) -> f64 {
        self.max_dist
    }

    /// Aspect ratio Δ = max distance / min positive distance (0 for a
    /// universe with no positive distance).
    pub fn spread(&self) -> f64 {
        if self.min_dist > 0.0 {
            self.max_dist / self.min_dist
        } else {
            0.0
        }
    }

    pub fn raw_point(&self, i: usize) -> &[f64] {
        &self.raw[i * self.k..(i + 1) * self.k]
    }

    pub fn normalized_point(&self, i: usize) -> &[f64] {
        &self.norm[i * self.k..(i + 1) * self.k]
    }

    /// Raw ℓ∞ distance between universe points.
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        linf(self.raw_point(i), self.raw_point(j))
    }

    /// Raw ℓ∞ distance from an arbitrary query point to universe point i.
    pub fn dist_to(&self, q: &[f64], i: usize) -> f64 {
        linf(q, self.raw_point(i))
    }
}

/// Answer of an AFN query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AfnAnswer {
    /// Some tracked point is at distance > r; `witness` identifies one,
    /// verified against the universe at query time.
    Far { witness: usize },
    Close,
}

#[derive(Debug, Clone)]
struct AfnRun {
    hash: PairwiseHash,
    samplers: Vec<L0Sampler>,
}

impl AfnRun {
    /// Forward (i, delta) to every coordinate sampler whose gate is open.
    fn apply(&mut self, buckets: &[u64], k: usize, i: usize, delta: i64) -> Result<()> {
        for l in 0..k {
            if self.hash.eval(buckets[i * k + l]) == 0 {
                self.samplers[l].update(i, delta)?;
            }
        }
        Ok(())
    }
}

/// AFN gap decision sketch with threshold r and gap parameter ε.
#[derive(Debug, Clone)]
pub struct AfnSketch {
    universe: Arc<PointUniverse>,
    r: f64,
    r_norm: f64,
    eps: f64,
    t: u64, // eps = 1/t
    delta: f64,
    seed: u64,
    m_bound: i64,
    rep_constant: f64,
    buckets: Vec<u64>, // n×k bucket of each normalized coordinate
    runs: Vec<AfnRun>,
}

impl AfnSketch {
    pub fn new(universe: Arc<PointUniverse>, r: f64, eps: f64, delta: f64, seed: u64) -> Result<Self> {
        Self::with_rep_constant(universe, r, eps, delta, seed, DEFAULT_REP_CONSTANT, DEFAULT_M_BOUND)
    }

    /// As `new`, with explicit repetition constant and sampler magnitude
    /// bound. Smaller constants trade failure probability for space.
    pub fn with_rep_constant(
        universe: Arc<PointUniverse>,
        r: f64,
        eps: f64,
        delta: f64,
        seed: u64,
        rep_constant: f64,
        m_bound: i64,
    ) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::param("r", format!("threshold must be positive and finite, got {r}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param("delta", format!("failure budget must lie in (0,1), got {delta}")));
        }
        if !(rep_constant > 0.0 && rep_constant.is_finite()) {
            return Err(Error::param("rep_constant", "must be positive and finite"));
        }
        let (eps, t) = hashing::snap_unit_fraction(eps)?;
        let n = universe.n();
        let k = universe.k();
        // Bucket width ε·r_norm stays positive for any r > 0; guarantees are
        // calibrated for r at or above the minimum pairwise distance
        // (r_norm ≥ 1), below which only Far completeness degrades.
        let r_norm = r * universe.scale();
        let mut sketch = AfnSketch {
            universe,
            r,
            r_norm,
            eps,
            t,
            delta,
            seed,
            m_bound,
            rep_constant,
            buckets: Vec::new(),
            runs: Vec::new(),
        };
        let mut buckets = Vec::with_capacity(n * k);
        for i in 0..n {
            for &z in sketch.universe.normalized_point(i) {
                buckets.push(hashing::bucket(z, eps, r_norm)?);
            }
        }
        let domain_bound = buckets.iter().copied().max().unwrap_or(0);
        let hash_range = 4 * t + 2; // K = ⌈4/ε + 2⌉ for ε = 1/t
        let num_runs = (rep_constant * (1.0 / delta).ln() * t as f64).ceil().max(1.0) as usize;
        let sampler_delta = 1.0 / (2.0 * k as f64);
        let mut runs = Vec::with_capacity(num_runs);
        for run_id in 0..num_runs {
            let hash_seed = seeding::derive(sketch.seed, TAG_RUN_HASH | run_id as u64);
            let hash = PairwiseHash::new(hash_seed, domain_bound, hash_range)?;
            let mut samplers = Vec::with_capacity(k);
            for l in 0..k {
                let s_seed = seeding::derive(
                    sketch.seed,
                    TAG_SAMPLER | ((run_id as u64) << 20) | l as u64,
                );
                samplers.push(L0Sampler::new(n, sampler_delta, s_seed, m_bound)?);
            }
            runs.push(AfnRun { hash, samplers });
        }
        sketch.buckets = buckets;
        sketch.runs = runs;
        Ok(sketch)
    }

    pub fn universe(&self) -> &Arc<PointUniverse> {
        &self.universe
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Threshold in the universe's normalized coordinates (r / min distance).
    pub fn normalized_r(&self) -> f64 {
        self.r_norm
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn num_runs(&self) -> usize {
        self.runs.len()
    }

    /// Hash range K = 4t + 2 shared by all runs.
    pub fn hash_range(&self) -> u64 {
        4 * self.t + 2
    }

    /// Whether run `run`'s gate admits coordinate `l` of point `i`.
    pub fn gate_open(&self, run: usize, i: usize, l: usize) -> bool {
        self.runs[run].hash.eval(self.buckets[i * self.universe.k() + l]) == 0
    }

    /// Total ℓ₀-sampler rows across all runs and coordinates.
    pub fn rows(&self) -> usize {
        self.runs.iter().map(|r| r.samplers.iter().map(|s| s.rows()).sum::<usize>()).sum()
    }

    /// Applies x[i] += sign; sign must be ±1 (turnstile unit updates).
    pub fn update(&mut self, i: usize, sign: i64) -> Result<()> {
        if sign != 1 && sign != -1 {
            return Err(Error::param("sign", format!("updates must be ±1, got {sign}")));
        }
        self.update_by(i, sign)
    }

    /// Applies x[i] += delta for arbitrary delta (the sketch is linear);
    /// magnitude limits are enforced by the underlying samplers.
    pub fn update_by(&mut self, i: usize, delta: i64) -> Result<()> {
        if i >= self.universe.n() {
            return Err(Error::IndexOutOfRange { index: i, n: self.universe.n() });
        }
        if delta == 0 {
            return Ok(());
        }
        let k = self.universe.k();
        for run in self.runs.iter_mut() {
            run.apply(&self.buckets, k, i, delta)?;
        }
        Ok(())
    }

    /// Gap decision for query point q (raw coordinates). Ties ‖q−u‖∞ = r
    /// count as Close; a sampler Fail contributes no vote.
    pub fn query(&self, q: &[f64]) -> Result<AfnAnswer> {
        if q.len() != self.universe.k() {
            return Err(Error::param("q", format!("query has {} coordinates, expected {}", q.len(), self.universe.k())));
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("q", "query coordinates must be finite"));
        }
        for run in &self.runs {
            for sampler in &run.samplers {
                if let SampleOutcome::Index(i) = sampler.sample() {
                    if self.universe.dist_to(q, i) > self.r {
                        return Ok(AfnAnswer::Far { witness: i });
                    }
                }
            }
        }
        Ok(AfnAnswer::Close)
    }

    /// Componentwise merge; both sketches must share every parameter.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        if self.universe.n() != other.universe.n()
            || self.universe.k() != other.universe.k()
            || self.r.to_bits() != other.r.to_bits()
            || self.t != other.t
            || self.delta.to_bits() != other.delta.to_bits()
            || self.seed != other.seed
            || self.m_bound != other.m_bound
            || self.runs.len() != other.runs.len()
        {
            return Err(Error::Incompatible {
                reason: "AFN sketches must share (universe shape, r, eps, delta, seed, m_bound) to merge".into(),
            });
        }
        let mut out = self.clone();
        for (mine, theirs) in out.runs.iter_mut().zip(&other.runs) {
            for (s, o) in mine.samplers.iter_mut().zip(&theirs.samplers) {
                *s = s.merge(o)?;
            }
        }
        Ok(out)
    }

    pub fn serialize(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.universe.n() as u64).to_le_bytes());
        out.extend_from_slice(&(self.universe.k() as u64).to_le_bytes());
        out.extend_from_slice(&self.r.to_bits().to_le_bytes());
        out.extend_from_slice(&self.t.to_le_bytes());
        out.extend_from_slice(&self.delta.to_bits().to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&self.m_bound.to_le_bytes());
        out.extend_from_slice(&self.rep_constant.to_bits().to_le_bytes());
        out.extend_from_slice(&(self.runs.len() as u32).to_le_bytes());
        for run in &self.runs {
            for sampler in &run.samplers {
                let bytes = sampler.serialize();
                out.extend_from_slice(&(bytes.len() as u64).to_le_bytes());
                out.extend_from_slice(&bytes);
            }
        }
        out
    }

    /// Rebuilds a sketch from bytes; the (non-serialized) universe must be
    /// supplied and match the recorded shape.
    pub fn deserialize(bytes: &[u8], universe: Arc<PointUniverse>) -> Result<Self> {
        let need = |cond: bool, what: &str| -> Result<()> {
            if cond {
                Ok(())
            } else {
                Err(Error::param("bytes", what.to_string()))
            }
        };
        need(bytes.len() >= 76, "truncated sketch header")?;
        need(bytes[0..4] == MAGIC, "bad magic; not an AFN sketch")?;
        let rd_u32 = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
        let rd_u64 = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
        need(rd_u32(4) == VERSION, "unsupported version")?;
        let n = rd_u64(8) as usize;
        let k = rd_u64(16) as usize;
        let r = f64::from_bits(rd_u64(24));
        let t = rd_u64(32);
        let delta = f64::from_bits(rd_u64(40));
        let seed = rd_u64(48);
        let m_bound = rd_u64(56) as i64;
        let rep_constant = f64::from_bits(rd_u64(64));
        need(universe.n() == n && universe.k() == k, "universe shape disagrees with sketch")?;
        let mut sk = AfnSketch::with_rep_constant(universe, r, 1.0 / t as f64, delta, seed, rep_constant, m_bound)?;
        let runs = rd_u32(72) as usize;
        need(runs == sk.runs.len(), "run count disagrees with parameters")?;
        let mut at = 76;
        for run in sk.runs.iter_mut() {
            for sampler in run.samplers.iter_mut() {
                need(at + 8 <= bytes.len(), "truncated sampler length")?;
                let len = rd_u64(at) as usize;
                at += 8;
                need(at + len <= bytes.len(), "truncated sampler body")?;
                *sampler = L0Sampler::deserialize(&bytes[at..at + len])?;
                at += len;
            }
        }
        need(at == bytes.len(), "trailing bytes after sketch")?;
        Ok(sk)
    }
}

/// Row bound C·k·log₂n·log₂k·log₂(1/δ)/ε with factors clamped below by 1.
pub fn afn_row_bound(k: usize, n: usize, eps: f64, delta: f64) -> f64 {
    ROW_BOUND_CONST
        * k as f64
        * (n as f64).log2().max(1.0)
        * (k as f64).log2().max(1.0)
        * (1.0 / delta).log2().max(1.0)
        / eps
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn grid_universe(n: usize, k: usize, step: f64) -> Arc<PointUniverse> {
        // points i·step·(1,…,1): pairwise distances are multiples of step
        let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 * step; k]).collect();
        Arc::new(PointUniverse::new(&pts).unwrap())
    }

    fn random_universe(n: usize, k: usize, extent: f64, seed: u64) -> Arc<PointUniverse> {
        let mut rng = seeding::rng(seed);
        let pts: Vec<Vec<f64>> =
            (0..n).map(|_| (0..k).map(|_| rng.random::<f64>() * extent).collect()).collect();
        Arc::new(PointUniverse::new(&pts).unwrap())
    }

    #[test]
    fn universe_normalizes_min_distance_to_one() {
        let pts = vec![vec![3.0, -1.0], vec![3.5, -1.2], vec![10.0, 4.0]];
        let u = PointUniverse::new(&pts).unwrap();
        assert!((u.min_dist() - 0.5).abs() < 1e-12);
        let mut norm_min = f64::INFINITY;
        for i in 0..3 {
            for l in 0..2 {
                assert!(u.normalized_point(i)[l] >= 0.0);
            }
            for j in i + 1..3 {
                let d = linf(u.normalized_point(i), u.normalized_point(j));
                norm_min = norm_min.min(d);
                // distance ratios preserved by shift-and-scale
                let ratio = d / u.dist(i, j);
                assert!((ratio - u.scale()).abs() < 1e-9 * u.scale());
            }
        }
        assert!((norm_min - 1.0).abs() < 1e-9);
        assert!((u.spread() - u.max_dist() / u.min_dist()).abs() < 1e-12);
    }

    #[test]
    fn universe_rejects_degenerate_input() {
        assert!(PointUniverse::new(&[]).is_err());
        assert!(PointUniverse::new(&[vec![]]).is_err());
        assert!(PointUniverse::new(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(PointUniverse::new(&[vec![f64::NAN]]).is_err());
        // coincident points are fine; there is just no positive distance
        let u = PointUniverse::new(&[vec![2.0], vec![2.0]]).unwrap();
        assert_eq!(u.min_dist(), 0.0);
        assert_eq!(u.scale(), 1.0);
        assert_eq!(u.spread(), 0.0);
    }

    #[test]
    fn threshold_below_min_distance_stays_sound() {
        // r below the minimum pairwise distance: empty and singleton supports
        // must still answer Close, and a genuine far point must still be found
        let u = grid_universe(10, 2, 2.0); // min distance 2
        let sk = AfnSketch::new(u.clone(), 1.0, 0.5, 0.1, 3).unwrap(); // r_norm = 0.5 < 1
        assert!(sk.rows() > 0);
        assert_eq!(sk.query(&[0.0, 0.0]).unwrap(), AfnAnswer::Close);
        let mut sk2 = sk.clone();
        sk2.update(3, 1).unwrap();
        let q: Vec<f64> = u.raw_point(3).to_vec();
        assert_eq!(sk2.query(&q).unwrap(), AfnAnswer::Close);
        sk2.update(0, 1).unwrap(); // distance 6 > r from point 3
        assert_eq!(sk2.query(&q).unwrap(), AfnAnswer::Far { witness: 0 });
    }

    #[test]
    fn reference_parameters_have_frozen_row_count() {
        // k=5, n=500, ε=0.5, δ=0.05:
        //   T = ⌈24·ln(20)·2⌉ = 144 runs
        //   per sampler (δ=1/10): 10 levels × 9 reps × 3 rows = 270
        //   total 144·5·270 = 194,400
        let u = random_universe(500, 5, 100.0, 1);
        let sk = AfnSketch::new(u, 50.0, 0.5, 0.05, 7).unwrap();
        assert_eq!(sk.num_runs(), 144);
        assert_eq!(sk.rows(), 194_400);
        assert!((sk.rows() as f64) <= afn_row_bound(5, 500, 0.5, 0.05));
    }

    #[test]
    fn same_seed_gives_identical_bytes() {
        let u = random_universe(60, 3, 10.0, 2);
        let mut a = AfnSketch::new(u.clone(), 1.5, 0.5, 0.1, 11).unwrap();
        let mut b = AfnSketch::new(u, 1.5, 0.5, 0.1, 11).unwrap();
        for i in 0..30 {
            a.update(i, 1).unwrap();
            b.update(i, 1).unwrap();
        }
        assert_eq!(a.serialize(), b.serialize());
    }

    #[test]
    fn insert_then_delete_restores_fresh_state() {
        let u = random_universe(60, 3, 10.0, 2);
        let fresh = AfnSketch::new(u.clone(), 1.5, 0.5, 0.1, 11).unwrap();
        let mut sk = AfnSketch::new(u, 1.5, 0.5, 0.1, 11).unwrap();
        sk.update(7, 1).unwrap();
        sk.update(7, -1).unwrap();
        assert_eq!(sk.serialize(), fresh.serialize());
        assert!(sk.update(60, 1).is_err());
        assert!(sk.update(0, 2).is_err());
    }

    #[test]
    fn hash_range_one_gates_every_coordinate_in() {
        // a range-1 hash is constantly 0, so every update reaches all k samplers
        let hash = PairwiseHash::new(9, 100, 1).unwrap();
        let samplers: Vec<L0Sampler> =
            (0..4).map(|l| L0Sampler::new(20, 0.125, 100 + l, 1 << 20).unwrap()).collect();
        let mut run = AfnRun { hash, samplers };
        let fresh: Vec<Vec<u8>> = run.samplers.iter().map(|s| s.serialize()).collect();
        let buckets: Vec<u64> = (0..20 * 4).map(|v| v as u64 % 7).collect();
        run.apply(&buckets, 4, 3, 1).unwrap();
        for (l, s) in run.samplers.iter().enumerate() {
            assert_ne!(s.serialize(), fresh[l], "sampler {l} untouched");
        }
    }

    #[test]
    fn gates_match_offline_recomputation() {
        let u = random_universe(100, 3, 50.0, 13);
        let sk = AfnSketch::new(u.clone(), 5.0, 0.25, 0.3, 21).unwrap();
        let r_norm = 5.0 * u.scale();
        for run in 0..sk.num_runs().min(10) {
            for i in 0..100 {
                for l in 0..3 {
                    let bucket = (u.normalized_point(i)[l] / (0.25 * r_norm)).floor() as u64;
                    let expect = sk.runs[run].hash.eval(bucket) == 0;
                    assert_eq!(sk.gate_open(run, i, l), expect, "run {run} point {i} coord {l}");
                }
            }
        }
    }

    #[test]
    fn tracked_vectors_equal_gated_shadow() {
        // each sampler's state must be exactly the sketch of the gated stream
        let u = random_universe(40, 2, 20.0, 17);
        let mut sk = AfnSketch::new(u, 3.0, 0.5, 0.4, 31).unwrap();
        let mut x = vec![0i64; 40];
        let mut rng = seeding::rng(99);
        let mut stream = Vec::new();
        for _ in 0..200 {
            let i = rng.random_range(0..40usize);
            let sign = if rng.random::<bool>() && x[i] > 0 { -1 } else { 1 };
            x[i] += sign;
            stream.push((i, sign));
            sk.update(i, sign).unwrap();
        }
        for (t, run) in sk.runs.iter().enumerate() {
            for (l, sampler) in run.samplers.iter().enumerate() {
                let mut shadow = L0Sampler::new(40, sampler.delta(), sampler.seed(), sampler.m_bound()).unwrap();
                for &(i, sign) in &stream {
                    if sk.gate_open(t, i, l) {
                        shadow.update(i, sign).unwrap();
                    }
                }
                assert_eq!(sampler.serialize(), shadow.serialize(), "run {t} coord {l}");
            }
        }
    }

    #[test]
    fn empty_multiset_answers_close() {
        let u = random_universe(50, 5, 10.0, 23);
        let sk = AfnSketch::new(u, 2.0, 0.5, 0.05, 3).unwrap();
        assert_eq!(sk.query(&[0.0; 5]).unwrap(), AfnAnswer::Close);
    }

    #[test]
    fn query_validates_input() {
        let u = random_universe(50, 5, 10.0, 23);
        let sk = AfnSketch::new(u, 2.0, 0.5, 0.05, 3).unwrap();
        assert!(sk.query(&[0.0; 4]).is_err());
        assert!(sk.query(&[0.0, 0.0, 0.0, 0.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn close_instances_answer_close() {
        // all points within r of the query
        let mut close = 0;
        for seed in 0..60u64 {
            let u = random_universe(80, 5, 10.0, 1000 + seed); // diameter ≤ 10
            let mut sk = AfnSketch::new(u, 12.0, 0.5, 0.05, seed).unwrap();
            for i in 0..80 {
                sk.update(i, 1).unwrap();
            }
            if sk.query(&[5.0; 5]).unwrap() == AfnAnswer::Close {
                close += 1;
            }
        }
        assert!(close >= 54, "{close}/60 close answers");
    }

    #[test]
    fn planted_far_point_is_detected() {
        let mut far = 0;
        for seed in 0..60u64 {
            let mut rng = seeding::rng(2000 + seed);
            let mut pts: Vec<Vec<f64>> =
                (0..79).map(|_| (0..5).map(|_| rng.random::<f64>() * 10.0).collect()).collect();
            pts.push(vec![40.0; 5]); // ≥ (1+ε)r = 30 from the query below
            let u = Arc::new(PointUniverse::new(&pts).unwrap());
            let mut sk = AfnSketch::new(u, 20.0, 0.5, 0.05, seed).unwrap();
            for i in 0..80 {
                sk.update(i, 1).unwrap();
            }
            match sk.query(&[5.0; 5]).unwrap() {
                AfnAnswer::Far { witness } => {
                    far += 1;
                    // witness must be genuine
                    assert!(sk.universe().dist_to(&[5.0; 5], witness) > 20.0);
                }
                AfnAnswer::Close => {}
            }
        }
        assert!(far >= 54, "{far}/60 far answers");
    }

    #[test]
    fn per_run_far_success_meets_lower_bound() {
        // planted gap instance in ℓ∞^1: per-run Far probability must clear
        // 0.7·ε/24 empirically (10⁴ single-run sketches)
        let eps = 0.5;
        let mut pts: Vec<Vec<f64>> = (0..199).map(|i| vec![i as f64]).collect();
        pts.push(vec![382.5]); // > (1+ε)·r from the query at 0
        let u = Arc::new(PointUniverse::new(&pts).unwrap());
        let r = 250.0;
        let trials = 10_000;
        let mut far = 0;
        for seed in 0..trials {
            // δ = 0.98 makes T = ⌈24·ln(1/0.98)·2⌉ = 1: exactly one run
            let mut sk = AfnSketch::new(u.clone(), r, eps, 0.98, seed).unwrap();
            assert_eq!(sk.num_runs(), 1);
            for i in 0..200 {
                sk.update(i, 1).unwrap();
            }
            if matches!(sk.query(&[0.0]).unwrap(), AfnAnswer::Far { .. }) {
                far += 1;
            }
        }
        let rate = far as f64 / trials as f64;
        let bound = eps / 24.0;
        assert!(rate >= 0.7 * bound, "per-run far rate {rate} below 0.7·{bound}");
    }

    #[test]
    fn far_answers_carry_genuine_witnesses() {
        let mut rng = seeding::rng(5);
        for trial in 0..40u64 {
            let u = random_universe(60, 3, 30.0, 3000 + trial);
            let r = 4.0 + rng.random::<f64>() * 6.0;
            let mut sk = AfnSketch::new(u.clone(), r, 0.5, 0.1, trial).unwrap();
            let mut x = vec![0i64; 60];
            for _ in 0..100 {
                let i = rng.random_range(0..60usize);
                let sign = if rng.random::<bool>() && x[i] > 0 { -1 } else { 1 };
                x[i] += sign;
                sk.update(i, sign).unwrap();
            }
            let q: Vec<f64> = (0..3).map(|_| rng.random::<f64>() * 30.0).collect();
            if let AfnAnswer::Far { witness: w } = sk.query(&q).unwrap() {
                assert!(u.dist_to(&q, w) > r, "trial {trial}: witness at distance ≤ r");
                // witness in support up to fingerprint error (~2^-40): assert outright
                assert!(x[w] != 0, "trial {trial}: witness not in support");
            }
        }
    }

    #[test]
    fn merge_matches_concatenated_stream() {
        let u = random_universe(50, 4, 25.0, 41);
        let mut a = AfnSketch::new(u.clone(), 6.0, 0.5, 0.2, 9).unwrap();
        let mut b = AfnSketch::new(u.clone(), 6.0, 0.5, 0.2, 9).unwrap();
        let mut whole = AfnSketch::new(u.clone(), 6.0, 0.5, 0.2, 9).unwrap();
        let mut rng = seeding::rng(55);
        for _ in 0..80 {
            let i = rng.random_range(0..50usize);
            a.update(i, 1).unwrap();
            whole.update(i, 1).unwrap();
        }
        for _ in 0..80 {
            let i = rng.random_range(0..50usize);
            b.update(i, 1).unwrap();
            whole.update(i, 1).unwrap();
        }
        assert_eq!(a.merge(&b).unwrap().serialize(), whole.serialize());
        let other = AfnSketch::new(u, 3.5, 0.5, 0.2, 9).unwrap();
        assert!(a.merge(&other).is_err());
    }

    #[test]
    fn serialization_round_trips() {
        let u = random_universe(70, 3, 15.0, 47);
        let mut sk = AfnSketch::new(u.clone(), 2.5, 0.25, 0.15, 13).unwrap();
        for i in 0..40 {
            sk.update(i, 1).unwrap();
        }
        let bytes = sk.serialize();
        let back = AfnSketch::deserialize(&bytes, u.clone()).unwrap();
        assert_eq!(back.serialize(), bytes);
        assert!(AfnSketch::deserialize(&bytes[..30], u.clone()).is_err());
        let wrong = random_universe(71, 3, 15.0, 48);
        assert!(AfnSketch::deserialize(&bytes, wrong).is_err());
    }
}
