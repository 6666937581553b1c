//! Turnstile diameter sketches: gap decision and value estimation.
//!
//! The decision sketch pairs one global ℓ₀ sampler with one AFN sketch on the
//! same update stream. At query time the global sample supplies the AFN query
//! point: any support point works, because the furthest point from it is at
//! least half the diameter away. With threshold r and gap ε the sketch
//! decides diam ≤ r versus diam ≥ 2(1+ε)·r, each side with probability
//! ≥ 1−δ; an empty multiset is Close, and a failed global sample falls back
//! to Close (a missing vote can only hurt the Far side).
//!
//! The estimator turns gap decisions into a value η with
//! diam/c < η ≤ diam. It embeds the metric into ℓ∞ with distortion 2q−1
//! (q = ⌊(c−2)/4⌋, verified), lays a geometric grid of thresholds
//! r_t = d_min·(1+ε)^t up to (2q−1)·d_max, runs one decision sketch per
//! threshold at the embedded scale (2q−1)·r_t with failure budget δ/|grid|,
//! and outputs the largest Far threshold. Far answers are certified by
//! recomputed witness distances, so η ≤ diam holds essentially always; the
//! ε rule 2(1+ε)²(2q−1) ≤ c makes the grid fine enough for the lower side.
//! When no threshold fires but two distinct support indices were observed,
//! η floors at d_min, which covers every diameter below c·d_min.

use std::sync::Arc;

use crate::afn::{AfnAnswer, AfnSketch, PointUniverse, DEFAULT_M_BOUND, DEFAULT_REP_CONSTANT};
use crate::embedding::LinfEmbedding;
use crate::error::{Error, Result};
use crate::l0::{L0Sampler, SampleOutcome};
use crate::metric::FiniteMetric;
use crate::seeding;

const MAGIC: [u8; 4] = *b"DDSK";
const VERSION: u32 = 1;
const TAG_GLOBAL: u64 = 3 << 40;
const TAG_AFN: u64 = 4 << 40;
const TAG_EMBED: u64 = 5 << 40;
const TAG_GRID: u64 = 6 << 40;

/// Two-sided verdict of a gap sketch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Close,
    Far,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Decision::Close => "close",
            Decision::Far => "far",
        })
    }
}

/// Decision plus the evidence behind it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideOutcome {
    pub decision: Decision,
    /// Support index used as the AFN query (None if the global sample was
    /// Zero or Fail).
    pub query_point: Option<usize>,
    /// AFN witness index behind a Far answer.
    pub witness: Option<usize>,
}

/// Diameter gap decision sketch: diam ≤ r vs diam ≥ 2(1+ε)r = c·r.
#[derive(Debug, Clone)]
pub struct DiamDecisionSketch {
    universe: Arc<PointUniverse>,
    r: f64,
    delta: f64,
    seed: u64,
    global: L0Sampler,
    afn: AfnSketch,
}

impl DiamDecisionSketch {
    pub fn new(universe: Arc<PointUniverse>, r: f64, eps: f64, delta: f64, seed: u64) -> Result<Self> {
        Self::with_rep_constant(universe, r, eps, delta, seed, DEFAULT_REP_CONSTANT, DEFAULT_M_BOUND)
    }

    pub fn with_rep_constant(
        universe: Arc<PointUniverse>,
        r: f64,
        eps: f64,
        delta: f64,
        seed: u64,
        rep_constant: f64,
        m_bound: i64,
    ) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param("delta", format!("failure budget must lie in (0,1), got {delta}")));
        }
        // each component receives half the failure budget
        let half = delta / 2.0;
        let global = L0Sampler::new(universe.n(), half, seeding::derive(seed, TAG_GLOBAL), m_bound)?;
        let afn = AfnSketch::with_rep_constant(
            universe.clone(),
            r,
            eps,
            half,
            seeding::derive(seed, TAG_AFN),
            rep_constant,
            m_bound,
        )?;
        Ok(DiamDecisionSketch { universe, r, delta, seed, global, afn })
    }

    pub fn universe(&self) -> &Arc<PointUniverse> {
        &self.universe
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn eps(&self) -> f64 {
        self.afn.eps()
    }

    /// Gap factor c = 2(1+ε).
    pub fn c(&self) -> f64 {
        2.0 * (1.0 + self.afn.eps())
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rows(&self) -> usize {
        self.global.rows() + self.afn.rows()
    }

    pub fn update(&mut self, i: usize, sign: i64) -> Result<()> {
        if sign != 1 && sign != -1 {
            return Err(Error::param("sign", format!("updates must be ±1, got {sign}")));
        }
        self.update_by(i, sign)
    }

    /// Arbitrary-delta update; the sketch is linear in x.
    pub fn update_by(&mut self, i: usize, delta: i64) -> Result<()> {
        self.global.update(i, delta)?;
        self.afn.update_by(i, delta)
    }

    /// Post-stream diameter gap decision.
    pub fn decide(&self) -> DecideOutcome {
        match self.global.sample() {
            // empty multiset: the diameter is trivially 0
            SampleOutcome::Zero => {
                DecideOutcome { decision: Decision::Close, query_point: None, witness: None }
            }
            // lost vote: fall back to Close rather than fabricate a witness
            SampleOutcome::Fail => {
                DecideOutcome { decision: Decision::Close, query_point: None, witness: None }
            }
            SampleOutcome::Index(i) => {
                let q = self.universe.raw_point(i);
                match self.afn.query(q).expect("query point comes from the universe") {
                    AfnAnswer::Far { witness } => DecideOutcome {
                        decision: Decision::Far,
                        query_point: Some(i),
                        witness: Some(witness),
                    },
                    AfnAnswer::Close => DecideOutcome {
                        decision: Decision::Close,
                        query_point: Some(i),
                        witness: None,
                    },
                }
            }
        }
    }

    pub fn merge(&self, other: &Self) -> Result<Self> {
        if self.r.to_bits() != other.r.to_bits()
            || self.delta.to_bits() != other.delta.to_bits()
            || self.seed != other.seed
        {
            return Err(Error::Incompatible {
                reason: "diameter sketches must share (r, delta, seed) to merge".into(),
            });
        }
        Ok(DiamDecisionSketch {
            universe: self.universe.clone(),
            r: self.r,
            delta: self.delta,
            seed: self.seed,
            global: self.global.merge(&other.global)?,
            afn: self.afn.merge(&other.afn)?,
        })
    }

    pub fn serialize(&self) -> Vec<u8> {
        let global = self.global.serialize();
        let afn = self.afn.serialize();
        let mut out = Vec::with_capacity(44 + global.len() + afn.len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.r.to_bits().to_le_bytes());
        out.extend_from_slice(&self.delta.to_bits().to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&(global.len() as u64).to_le_bytes());
        out.extend_from_slice(&global);
        out.extend_from_slice(&(afn.len() as u64).to_le_bytes());
        out.extend_from_slice(&afn);
        out
    }

    pub fn deserialize(bytes: &[u8], universe: Arc<PointUniverse>) -> Result<Self> {
        let bad = |what: &str| Error::param("bytes", what.to_string());
        if bytes.len() < 40 {
            return Err(bad("truncated sketch header"));
        }
        if bytes[0..4] != MAGIC {
            return Err(bad("bad magic; not a diameter decision sketch"));
        }
        let rd_u64 = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
        if u32::from_le_bytes(bytes[4..8].try_into().unwrap()) != VERSION {
            return Err(bad("unsupported version"));
        }
        let r = f64::from_bits(rd_u64(8));
        let delta = f64::from_bits(rd_u64(16));
        let seed = rd_u64(24);
        let glen = rd_u64(32) as usize;
        if 40 + glen + 8 > bytes.len() {
            return Err(bad("truncated global sampler"));
        }
        let global = L0Sampler::deserialize(&bytes[40..40 + glen])?;
        let alen = rd_u64(40 + glen) as usize;
        let astart = 48 + glen;
        if astart + alen != bytes.len() {
            return Err(bad("sketch length mismatch"));
        }
        let afn = AfnSketch::deserialize(&bytes[astart..], universe.clone())?;
        if global.n() != universe.n() {
            return Err(bad("global sampler dimension disagrees with universe"));
        }
        Ok(DiamDecisionSketch { universe, r, delta, seed, global, afn })
    }
}

/// Constants governing estimator size; the defaults are sized for desk-scale
/// experiments. `paper_constants` restores the conservative analysis-driven
/// values (an order of magnitude more space for the same inputs).
#[derive(Debug, Clone, Copy)]
pub struct EstimatorParams {
    /// Oversampling constant for the embedding dimension.
    pub c_emb: f64,
    /// Repetition constant for AFN runs (T = ⌈rep·ln(1/δ)/ε⌉).
    pub afn_rep_constant: f64,
    /// Magnitude bound forwarded to every sampler.
    pub m_bound: i64,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        EstimatorParams { c_emb: 8.0, afn_rep_constant: 2.0, m_bound: DEFAULT_M_BOUND }
    }
}

impl EstimatorParams {
    pub fn paper_constants() -> Self {
        EstimatorParams {
            c_emb: crate::embedding::DEFAULT_C_EMB,
            afn_rep_constant: DEFAULT_REP_CONSTANT,
            m_bound: DEFAULT_M_BOUND,
        }
    }
}

/// Per-threshold outcome of an estimate.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdReport {
    /// Metric-scale threshold r_t.
    pub r: f64,
    /// Embedded-scale threshold (2q−1)·r_t the sketch actually used.
    pub sketch_threshold: f64,
    pub decision: Decision,
    pub query_point: Option<usize>,
    pub witness: Option<usize>,
}

/// Result of `DiamEstimator::estimate`.
#[derive(Debug, Clone)]
pub struct DiamEstimate {
    /// Estimated diameter: max Far threshold, floored at d_min when at least
    /// two distinct support indices were certified; 0 otherwise.
    pub eta: f64,
    /// Whether the support floor was available.
    pub distinct_support: bool,
    pub reports: Vec<ThresholdReport>,
}

/// End-to-end c-approximate diameter estimator over a finite metric.
#[derive(Debug, Clone)]
pub struct DiamEstimator {
    n: usize,
    c: f64,
    q: u32,
    eps: f64,
    delta: f64,
    seed: u64,
    d_min: f64,
    embedding: LinfEmbedding,
    universe: Arc<PointUniverse>,
    kept_coords: Vec<u32>,
    grid: Vec<f64>,
    sketches: Vec<DiamDecisionSketch>,
    params: EstimatorParams,
}

impl DiamEstimator {
    pub fn new(m: &FiniteMetric, c: f64, delta: f64, seed: u64) -> Result<Self> {
        Self::with_params(m, c, delta, seed, EstimatorParams::default())
    }

    pub fn with_params(
        m: &FiniteMetric,
        c: f64,
        delta: f64,
        seed: u64,
        params: EstimatorParams,
    ) -> Result<Self> {
        if !c.is_finite() || c <= 6.0 {
            return Err(Error::ApproximationTooSmall { c });
        }
        let q = ((c - 2.0) / 4.0).floor() as u32;
        if q < 2 {
            return Err(Error::ApproximationTooSmall { c });
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param("delta", format!("failure budget must lie in (0,1), got {delta}")));
        }
        let dd = (2 * q as u64 - 1) as f64; // distortion 2q−1
        // largest ε = 1/t with c − 2ε ≥ 4q − 2 and 2(1+ε)²·(2q−1) ≤ c;
        // both constraints relax as ε shrinks, so scan t upward
        let mut eps = None;
        for t in 2u64..=1_000 {
            let e = 1.0 / t as f64;
            if c - 2.0 * e >= (4 * q - 2) as f64 && 2.0 * (1.0 + e) * (1.0 + e) * dd <= c {
                eps = Some(e);
                break;
            }
        }
        let eps = eps.ok_or(Error::ApproximationTooSmall { c })?;
        let embedding = LinfEmbedding::build(m, q, seeding::derive(seed, TAG_EMBED), params.c_emb)?;
        // drop constant coordinates: they never achieve a pairwise max, so
        // embedded distances are unchanged (one column is kept regardless so
        // the universe stays well-formed)
        let points = embedding.to_points();
        let n = m.n();
        let full_d = embedding.dim();
        let mut kept_coords: Vec<u32> = (0..full_d as u32)
            .filter(|&col| {
                let c0 = points[0][col as usize];
                points.iter().any(|p| p[col as usize] != c0)
            })
            .collect();
        if kept_coords.is_empty() {
            kept_coords.push(0);
        }
        let pruned: Vec<Vec<f64>> = points
            .iter()
            .map(|p| kept_coords.iter().map(|&cidx| p[cidx as usize]).collect())
            .collect();
        let universe = Arc::new(PointUniverse::new(&pruned)?);
        let d_min = m.min_positive_distance().unwrap_or(0.0);
        let d_max = m.max_finite_distance();
        let mut grid = Vec::new();
        if d_min > 0.0 {
            let mut r = d_min;
            let top = dd * d_max * (1.0 + 1e-9);
            while r <= top {
                grid.push(r);
                r *= 1.0 + eps;
            }
        }
        let per_sketch_delta = if grid.is_empty() { delta } else { delta / grid.len() as f64 };
        let mut sketches = Vec::with_capacity(grid.len());
        for (t, &r_t) in grid.iter().enumerate() {
            sketches.push(DiamDecisionSketch::with_rep_constant(
                universe.clone(),
                dd * r_t,
                eps,
                per_sketch_delta,
                seeding::derive(seed, TAG_GRID | t as u64),
                params.afn_rep_constant,
                params.m_bound,
            )?);
        }
        Ok(DiamEstimator {
            n,
            c,
            q,
            eps,
            delta,
            seed,
            d_min,
            embedding,
            universe,
            kept_coords,
            grid,
            sketches,
            params,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn params(&self) -> EstimatorParams {
        self.params
    }

    pub fn embedding(&self) -> &LinfEmbedding {
        &self.embedding
    }

    pub fn universe(&self) -> &Arc<PointUniverse> {
        &self.universe
    }

    /// Embedding coordinates retained after constant-column pruning.
    pub fn kept_coords(&self) -> &[u32] {
        &self.kept_coords
    }

    /// Metric-scale thresholds r_t.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn sketches(&self) -> &[DiamDecisionSketch] {
        &self.sketches
    }

    pub fn rows(&self) -> usize {
        self.sketches.iter().map(|s| s.rows()).sum()
    }

    pub fn serialized_bytes(&self) -> usize {
        self.sketches.iter().map(|s| s.serialize().len()).sum()
    }

    pub fn update(&mut self, i: usize, sign: i64) -> Result<()> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        for sk in self.sketches.iter_mut() {
            sk.update(i, sign)?;
        }
        Ok(())
    }

    /// Post-stream estimate; see `DiamEstimate`.
    pub fn estimate(&self) -> DiamEstimate {
        let mut reports = Vec::with_capacity(self.sketches.len());
        let mut eta = 0.0f64;
        let mut seen: Option<usize> = None;
        let mut distinct = false;
        for (t, sk) in self.sketches.iter().enumerate() {
            let out = sk.decide();
            for idx in [out.query_point, out.witness].into_iter().flatten() {
                match seen {
                    None => seen = Some(idx),
                    Some(prev) if prev != idx => distinct = true,
                    _ => {}
                }
            }
            if out.decision == Decision::Far {
                eta = eta.max(self.grid[t]);
            }
            reports.push(ThresholdReport {
                r: self.grid[t],
                sketch_threshold: sk.r(),
                decision: out.decision,
                query_point: out.query_point,
                witness: out.witness,
            });
        }
        if distinct {
            // two certified distinct support points are at distance ≥ d_min
            eta = eta.max(self.d_min);
        }
        DiamEstimate { eta, distinct_support: distinct, reports }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::random_connected_metric;
    use crate::metric;
    use rand::Rng;

    fn two_point_universe(gap: f64, k: usize) -> Arc<PointUniverse> {
        let a = vec![0.0; k];
        let b = vec![gap; k];
        Arc::new(PointUniverse::new(&[a, b]).unwrap())
    }

    #[test]
    fn empty_multiset_is_close() {
        let u = two_point_universe(3.0, 5);
        let sk = DiamDecisionSketch::new(u, 1.0, 0.5, 0.1, 3).unwrap();
        let out = sk.decide();
        assert_eq!(out.decision, Decision::Close);
        assert_eq!(out.query_point, None);
    }

    #[test]
    fn pair_at_three_r_is_far() {
        let mut far = 0;
        for seed in 0..60u64 {
            let u = two_point_universe(3.0, 5);
            let mut sk = DiamDecisionSketch::new(u, 1.0, 0.5, 0.05, seed).unwrap();
            sk.update(0, 1).unwrap();
            sk.update(1, 1).unwrap();
            let out = sk.decide();
            if out.decision == Decision::Far {
                far += 1;
                let w = out.witness.unwrap();
                let q = out.query_point.unwrap();
                assert!(sk.universe().dist(q, w) > 1.0);
            }
        }
        assert!(far >= 54, "{far}/60 far");
    }

    #[test]
    fn clustered_support_is_close() {
        // diam ≤ r makes Far impossible: it would need a witness at distance
        // > r from a support point
        let mut rng = crate::seeding::rng(8);
        for seed in 0..30u64 {
            let pts: Vec<Vec<f64>> =
                (0..40).map(|_| (0..5).map(|_| rng.random::<f64>()).collect()).collect();
            let u = Arc::new(PointUniverse::new(&pts).unwrap());
            let mut sk = DiamDecisionSketch::new(u, 1.5, 0.5, 0.05, seed).unwrap();
            for i in 0..40 {
                sk.update(i, 1).unwrap();
            }
            assert_eq!(sk.decide().decision, Decision::Close, "seed {seed}");
        }
    }

    #[test]
    fn decision_sketch_round_trips_and_merges() {
        let u = two_point_universe(4.0, 3);
        let mut a = DiamDecisionSketch::new(u.clone(), 1.0, 0.5, 0.1, 7).unwrap();
        let mut b = DiamDecisionSketch::new(u.clone(), 1.0, 0.5, 0.1, 7).unwrap();
        let mut whole = DiamDecisionSketch::new(u.clone(), 1.0, 0.5, 0.1, 7).unwrap();
        a.update(0, 1).unwrap();
        whole.update(0, 1).unwrap();
        b.update(1, 1).unwrap();
        whole.update(1, 1).unwrap();
        assert_eq!(a.merge(&b).unwrap().serialize(), whole.serialize());
        let bytes = whole.serialize();
        let back = DiamDecisionSketch::deserialize(&bytes, u.clone()).unwrap();
        assert_eq!(back.serialize(), bytes);
        assert!(DiamDecisionSketch::deserialize(&bytes[..20], u).is_err());
    }

    #[test]
    fn estimator_rejects_small_c() {
        let m = random_connected_metric(12, 3.0, 1).unwrap();
        for c in [3.0, 6.0, 6.5, 9.99] {
            assert!(matches!(
                DiamEstimator::new(&m, c, 0.1, 1),
                Err(Error::ApproximationTooSmall { .. })
            ));
        }
        assert!(DiamEstimator::new(&m, 10.0, 0.1, 1).is_ok());
    }

    #[test]
    fn eps_rule_picks_largest_admissible_unit_fraction() {
        let m = random_connected_metric(12, 3.0, 1).unwrap();
        let e10 = DiamEstimator::new(&m, 10.0, 0.1, 1).unwrap();
        assert_eq!(e10.q(), 2);
        assert_eq!(e10.eps(), 0.25); // t=4: 2·(1.25)²·3 = 9.375 ≤ 10; t=3 gives 10.67
        let e14 = DiamEstimator::new(&m, 14.0, 0.1, 1).unwrap();
        assert_eq!(e14.q(), 3);
        assert_eq!(e14.eps(), 1.0 / 6.0); // t=6: 2·(7/6)²·5 = 13.61 ≤ 14; t=5 gives 14.4
    }

    #[test]
    fn single_support_point_estimates_zero() {
        let m = random_connected_metric(16, 3.0, 2).unwrap();
        let mut est = DiamEstimator::new(&m, 10.0, 0.1, 5).unwrap();
        est.update(3, 1).unwrap();
        let out = est.estimate();
        assert_eq!(out.eta, 0.0);
        assert!(!out.distinct_support);
        // no Far is possible with a single support point
        assert!(out.reports.iter().all(|r| r.decision == Decision::Close));
    }

    #[test]
    fn adjacent_pair_floors_at_min_distance() {
        // support = two adjacent vertices of a path graph: diam = d_min = 1;
        // soundness forbids any Far, so η must come from the support floor
        let edges: Vec<(usize, usize)> = (0..15).map(|i| (i, i + 1)).collect();
        let m = FiniteMetric::from_undirected_edges(16, &edges).unwrap();
        for seed in 0..12u64 {
            let mut est = DiamEstimator::new(&m, 10.0, 0.1, 100 + seed).unwrap();
            est.update(7, 1).unwrap();
            est.update(8, 1).unwrap();
            let out = est.estimate();
            assert!(out.reports.iter().all(|r| r.decision == Decision::Close), "seed {seed}");
            assert!(out.distinct_support, "seed {seed}: support pair not observed");
            assert_eq!(out.eta, 1.0, "seed {seed}");
            assert!(out.eta > 1.0 / 10.0 && out.eta <= 1.0);
        }
    }

    use crate::error::Error;
    use crate::metric::FiniteMetric;

    #[test]
    fn estimate_contract_holds_on_random_metrics() {
        let mut ok = 0;
        let trials = 6;
        for seed in 0..trials {
            let m = random_connected_metric(24, 4.0, 300 + seed).unwrap();
            let mut est = DiamEstimator::new(&m, 10.0, 0.2, seed).unwrap();
            // grid size matches the documented bound
            let bound = ((est.grid().last().unwrap() / est.grid()[0]).ln()
                / (1.0 + est.eps()).ln())
            .ceil() as usize
                + 1;
            assert!(est.grid().len() <= bound);
            let mut rng = crate::seeding::rng(900 + seed);
            let mut support: Vec<usize> = (0..24).collect();
            for i in (1..24usize).rev() {
                support.swap(i, rng.random_range(0..=i));
            }
            support.truncate(rng.random_range(2..=10));
            let mut fx = metric::FrequencyVector::new(24, 1 << 31).unwrap();
            for &i in &support {
                est.update(i, 1).unwrap();
                fx.update(i, 1).unwrap();
            }
            let diam = metric::diam_oracle(&m, &fx).unwrap();
            let out = est.estimate();
            // soundness is unconditional
            assert!(out.eta <= diam + 1e-9, "seed {seed}: eta {} > diam {diam}", out.eta);
            if out.eta > diam / 10.0 {
                ok += 1;
            }
        }
        assert!(ok >= trials - 1, "{ok}/{trials} contract hits");
    }

    #[test]
    fn estimator_is_deterministic() {
        let m = random_connected_metric(20, 4.0, 11).unwrap();
        let run = || {
            let mut est = DiamEstimator::new(&m, 10.0, 0.2, 77).unwrap();
            for i in [2usize, 5, 9, 14] {
                est.update(i, 1).unwrap();
            }
            let out = est.estimate();
            (out.eta, out.reports.iter().map(|r| r.decision).collect::<Vec<_>>())
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn update_is_linear_across_grid() {
        let m = random_connected_metric(20, 4.0, 13).unwrap();
        let fresh = DiamEstimator::new(&m, 10.0, 0.2, 21).unwrap();
        let mut est = DiamEstimator::new(&m, 10.0, 0.2, 21).unwrap();
        est.update(4, 1).unwrap();
        est.update(4, -1).unwrap();
        let a: Vec<Vec<u8>> = fresh.sketches().iter().map(|s| s.serialize()).collect();
        let b: Vec<Vec<u8>> = est.sketches().iter().map(|s| s.serialize()).collect();
        assert_eq!(a, b);
        assert!(est.update(20, 1).is_err());
    }

    #[test]
    fn pruning_preserves_embedded_distances() {
        let m = random_connected_metric(24, 4.0, 17).unwrap();
        let est = DiamEstimator::new(&m, 10.0, 0.2, 31).unwrap();
        let emb = est.embedding();
        for i in 0..24 {
            for j in i + 1..24 {
                let full = emb.embedded_dist(i, j);
                let pruned = est.universe().dist(i, j);
                assert!((full - pruned).abs() < 1e-12, "pair ({i},{j})");
            }
        }
    }
}
