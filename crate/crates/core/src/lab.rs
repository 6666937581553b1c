//! Finite-scale lower-bound laboratory.
//!
//! Everything here makes the hardness story executable at desk scale: the
//! hard input distribution over a random bipartite graph, the exact claim
//! that the hidden index determines the diameter, knowledge-graph extraction
//! with brute-force minrank, and the fooling-vector / dual-matrix algebra
//! that turns a too-small sketch matrix into a low-rank certificate. Kernel
//! and span questions are decided in exact rational arithmetic; floats only
//! appear in the final dual matrix and in reports.

use std::collections::HashSet;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::afn::PointUniverse;
use crate::diam::{Decision, DiamDecisionSketch};
use crate::embedding::LinfEmbedding;
use crate::error::{Error, Result};
use crate::exact;
use crate::metric::{self, BipartiteGraph, FiniteMetric, FrequencyVector, GapAnswer};
use crate::seeding;
use rand::Rng;

const TAG_LAB_EMBED: u64 = 7 << 40;
const TAG_LAB_TRIAL: u64 = 8 << 40;
const TAG_LAB_DRAW: u64 = 9 << 40;

/// Default coin magnitude. The analysis wants an astronomically large value
/// to defeat arbitrary sketches; experiments only need the support pattern.
pub const DEFAULT_P_VAL: i64 = 1;
/// Default spread of the neighbor coordinates.
pub const DEFAULT_U_VAL: i64 = 1_000_000;
/// Brute-force minrank enumerates 2^(free entries); 5 vertices is the cap.
pub const MINRANK_MAX_VERTICES: usize = 5;

/// One draw from the hard input distribution of a bipartite instance:
/// a hidden index i, a coin deciding x_i ∈ {0, p_val}, and uniform values
/// on the neighborhood N(v_i). All other coordinates are zero; the vector
/// lives on 2n coordinates with the v-side half identically zero.
#[derive(Debug, Clone)]
pub struct HardSample {
    i: usize,
    coin: bool,
    p_val: i64,
    u_val: i64,
    x: FrequencyVector,
}

impl HardSample {
    pub fn i(&self) -> usize {
        self.i
    }

    /// True when the hidden coordinate was set to p_val.
    pub fn coin(&self) -> bool {
        self.coin
    }

    pub fn p_val(&self) -> i64 {
        self.p_val
    }

    pub fn u_val(&self) -> i64 {
        self.u_val
    }

    pub fn x(&self) -> &FrequencyVector {
        &self.x
    }

    /// Field-level invariant check: support confined to {i} ∪ N(v_i),
    /// x_i ∈ {0, p_val}, neighbor values in 1..=p_val·u_val, v-side zero.
    pub fn respects_invariants(&self, g: &BipartiteGraph) -> bool {
        let n = g.n();
        if self.x.n() != 2 * n || self.i >= n {
            return false;
        }
        let e = self.x.entries();
        let top = self.p_val * self.u_val;
        let want_i = if self.coin { self.p_val } else { 0 };
        if e[self.i] != want_i {
            return false;
        }
        for j in 0..n {
            let in_nbhd = g.has_edge(j, self.i);
            let ok = if j == self.i {
                // i ∈ I* is never adjacent to v_i
                !in_nbhd
            } else if in_nbhd {
                e[j] >= 1 && e[j] <= top
            } else {
                e[j] == 0
            };
            if !ok {
                return false;
            }
        }
        e[n..].iter().all(|&v| v == 0)
    }
}

/// Draws one hard sample: i uniform on I*, a fair coin for x_i ∈ {0, p_val},
/// then each neighbor coordinate of v_i uniform on {1, …, p_val·u_val} in
/// ascending index order. Errors when I* is empty or the drawn index has an
/// empty neighborhood (the draw consumed is reported, so callers can retry
/// with a fresh seed).
pub fn sample_hard(
    g: &BipartiteGraph,
    k: usize,
    p_val: i64,
    u_val: i64,
    seed: u64,
) -> Result<HardSample> {
    if p_val < 1 {
        return Err(Error::param("p_val", format!("coin magnitude must be >= 1, got {p_val}")));
    }
    if u_val < 1 {
        return Err(Error::param("u_val", format!("value spread must be >= 1, got {u_val}")));
    }
    let top = p_val
        .checked_mul(u_val)
        .ok_or_else(|| Error::param("u_val", "p_val * u_val overflows i64".to_string()))?;
    let istar = metric::istar(g, k);
    if istar.is_empty() {
        return Err(Error::EmptyIstar);
    }
    let mut rng = seeding::rng(seed);
    let i = istar[rng.random_range(0..istar.len())];
    let nbrs = g.neighbors_of_v(i);
    if nbrs.is_empty() {
        return Err(Error::EmptyNeighborhood { i });
    }
    let coin = rng.random_range(0..2u8) == 1;
    let n = g.n();
    let mut x = FrequencyVector::new(2 * n, top)?;
    if coin {
        x.update(i, p_val)?;
    }
    for &j in &nbrs {
        x.update(j, rng.random_range(1..=top))?;
    }
    Ok(HardSample { i, coin, p_val, u_val, x })
}

/// Retries `sample_hard` with derived seeds until a draw satisfies the
/// neighborhood precondition; other errors propagate immediately.
pub fn sample_hard_valid(
    g: &BipartiteGraph,
    k: usize,
    p_val: i64,
    u_val: i64,
    seed: u64,
    max_attempts: usize,
) -> Result<HardSample> {
    let mut last = None;
    for attempt in 0..max_attempts.max(1) {
        match sample_hard(g, k, p_val, u_val, seeding::derive(seed, TAG_LAB_DRAW | attempt as u64)) {
            Err(Error::EmptyNeighborhood { i }) => last = Some(Error::EmptyNeighborhood { i }),
            other => return other,
        }
    }
    Err(last.unwrap())
}

/// Exact statement behind the hard distribution: the gap decision at
/// thresholds (2, 2k) on the shortest-path metric equals 1{x_i > 0}.
/// Errors when the sample's hidden index is not in I*(g, k).
pub fn check_index_determines_diam(g: &BipartiteGraph, sample: &HardSample, k: usize) -> Result<bool> {
    let istar = metric::istar(g, k);
    if !istar.contains(&sample.i) {
        return Err(Error::IndexOutsideIstar { i: sample.i });
    }
    let m = metric::shortest_path_metric(g);
    let want_far = sample.x.entries()[sample.i] > 0;
    Ok(match metric::diam_decision_oracle(&m, &sample.x, 2.0, k as f64)? {
        GapAnswer::Far => want_far,
        GapAnswer::Close => !want_far,
        GapAnswer::Indeterminate => false,
    })
}

/// Directed graph on the I* indices of an instance, with edge (i, j)
/// exactly when (u_j, v_i) is a non-edge; also buildable directly for
/// minrank experiments.
#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    labels: Vec<usize>,
    adj: Vec<bool>, // t×t row-major, adj[i*t+j] = edge (i, j)
}

impl KnowledgeGraph {
    pub fn from_instance(g: &BipartiteGraph, k: usize) -> Self {
        let labels = metric::istar(g, k);
        let t = labels.len();
        let mut adj = vec![false; t * t];
        for (a, &i) in labels.iter().enumerate() {
            for (b, &j) in labels.iter().enumerate() {
                adj[a * t + b] = !g.has_edge(j, i);
            }
        }
        KnowledgeGraph { labels, adj }
    }

    pub fn from_edges(t: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![false; t * t];
        for &(i, j) in edges {
            if i >= t {
                return Err(Error::IndexOutOfRange { index: i, n: t });
            }
            if j >= t {
                return Err(Error::IndexOutOfRange { index: j, n: t });
            }
            adj[i * t + j] = true;
        }
        Ok(KnowledgeGraph { labels: (0..t).collect(), adj })
    }

    pub fn edgeless(t: usize) -> Self {
        KnowledgeGraph { labels: (0..t).collect(), adj: vec![false; t * t] }
    }

    /// All ordered pairs (i, j), i ≠ j.
    pub fn complete(t: usize) -> Self {
        let mut adj = vec![true; t * t];
        for i in 0..t {
            adj[i * t + i] = false;
        }
        KnowledgeGraph { labels: (0..t).collect(), adj }
    }

    /// Edges i → (i+1) mod t.
    pub fn directed_cycle(t: usize) -> Self {
        let mut adj = vec![false; t * t];
        if t > 1 {
            for i in 0..t {
                adj[i * t + (i + 1) % t] = true;
            }
        }
        KnowledgeGraph { labels: (0..t).collect(), adj }
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    /// Original instance indices behind the local vertex numbers.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.order() + j]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let t = self.order();
        let mut out = Vec::new();
        for i in 0..t {
            for j in 0..t {
                if self.adj[i * t + j] {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

fn rank_f2(rows: &mut [u8]) -> u32 {
    let mut rank = 0usize;
    for col in 0..8 {
        if let Some(p) = (rank..rows.len()).find(|&r| rows[r] >> col & 1 == 1) {
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && *row >> col & 1 == 1 {
                    *row ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank as u32
}

/// Minimum rank over F₂ of matrices with nonzero diagonal and support
/// confined to the diagonal and the graph's edges, by enumerating every
/// assignment of the free (off-diagonal edge) entries. Capped at
/// `MINRANK_MAX_VERTICES` vertices.
pub fn minrank_f2(kg: &KnowledgeGraph) -> Result<u32> {
    let t = kg.order();
    if t > MINRANK_MAX_VERTICES {
        return Err(Error::BruteForceCap { t, max: MINRANK_MAX_VERTICES });
    }
    if t == 0 {
        return Ok(0);
    }
    let free: Vec<(usize, usize)> =
        kg.edges().into_iter().filter(|&(i, j)| i != j).collect();
    let mut best = t as u32;
    for mask in 0u64..(1 << free.len()) {
        let mut rows = [0u8; MINRANK_MAX_VERTICES];
        for (i, row) in rows.iter_mut().take(t).enumerate() {
            *row = 1 << i; // diagonal is forced nonzero, i.e. 1 over F₂
        }
        for (b, &(i, j)) in free.iter().enumerate() {
            if mask >> b & 1 == 1 {
                rows[i] |= 1 << j;
            }
        }
        best = best.min(rank_f2(&mut rows[..t]));
        if best == 1 {
            break; // the diagonal keeps every candidate at rank ≥ 1
        }
    }
    Ok(best)
}

/// Integer sketch matrix T (s rows, n columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SketchMatrix {
    s: usize,
    n: usize,
    rows: Vec<Vec<i64>>,
}

impl SketchMatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let s = rows.len();
        if s == 0 {
            return Err(Error::param("rows", "matrix needs at least one row"));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::param("rows", "matrix needs at least one column"));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::param(
                "rows",
                format!("row {bad} has {} entries, expected {n}", rows[bad].len()),
            ));
        }
        Ok(SketchMatrix { s, n, rows })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        SketchMatrix { s: n, n, rows }
    }

    /// Entries uniform on {−entry_bound, …, entry_bound}.
    pub fn random(s: usize, n: usize, entry_bound: i64, seed: u64) -> Result<Self> {
        if entry_bound < 1 {
            return Err(Error::param("entry_bound", "bound must be >= 1"));
        }
        let mut rng = seeding::rng(seed);
        let rows = (0..s)
            .map(|_| (0..n).map(|_| rng.random_range(-entry_bound..=entry_bound)).collect())
            .collect();
        SketchMatrix::new(rows)
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn entry_bound(&self) -> i64 {
        self.rows.iter().flatten().map(|v| v.abs()).max().unwrap_or(0)
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    fn rational_column(&self, j: usize) -> Vec<BigRational> {
        self.rows
            .iter()
            .map(|r| BigRational::from_integer(r[j].into()))
            .collect()
    }

    /// s×|cols| rational matrix whose columns are the selected columns of T.
    fn rational_submatrix(&self, cols: &[usize]) -> Vec<Vec<BigRational>> {
        (0..self.s)
            .map(|r| cols.iter().map(|&j| BigRational::from_integer(self.rows[r][j].into())).collect())
            .collect()
    }
}

/// Searches for a kernel vector of T with z_i = 1 supported on
/// {i} ∪ N(v_i). One exists exactly when column T^{(i)} lies in the span of
/// the other neighbor columns {T^{(j)} : j ∈ N(v_i) \ {i}} (z_i is pinned to
/// 1, so column i itself contributes no freedom even when (u_i, v_i) ∈ E);
/// the returned z satisfies T·z = 0 in exact rational arithmetic.
pub fn fooling_vector(
    t: &SketchMatrix,
    g: &BipartiteGraph,
    i: usize,
) -> Result<Option<Vec<BigRational>>> {
    if t.n() != g.n() {
        return Err(Error::Incompatible {
            reason: format!("sketch matrix has {} columns, instance has n = {}", t.n(), g.n()),
        });
    }
    if i >= t.n() {
        return Err(Error::IndexOutOfRange { index: i, n: t.n() });
    }
    let nbrs: Vec<usize> = g.neighbors_of_v(i).into_iter().filter(|&j| j != i).collect();
    let a = t.rational_submatrix(&nbrs);
    let b = t.rational_column(i);
    Ok(exact::solve(&a, &b).map(|w| {
        let mut z = vec![BigRational::zero(); t.n()];
        z[i] = BigRational::from_integer(1.into());
        for (idx, &j) in nbrs.iter().enumerate() {
            z[j] = -w[idx].clone();
        }
        z
    }))
}

/// Builds the dual certificate M = H·T: row h_i is T^{(i)}/‖T^{(i)}‖² for
/// unconstrained i, and for i in `constrained` the normalized projection of
/// T^{(i)} onto the orthocomplement of its neighbor columns' span, so that
/// M_ii = 1, M_ij = 0 whenever i is constrained and (u_j, v_i) ∈ E, and
/// rank(M) ≤ s. Computed exactly, emitted as f64.
///
/// Errors when a constrained index admits a fooling vector (the projection
/// would vanish; the witness is returned), a constrained index is adjacent
/// to its own right vertex (the two requirements on M conflict), or an
/// unconstrained column is zero.
pub fn build_dual_matrix(
    t: &SketchMatrix,
    g: &BipartiteGraph,
    constrained: &[usize],
) -> Result<Vec<Vec<f64>>> {
    if t.n() != g.n() {
        return Err(Error::Incompatible {
            reason: format!("sketch matrix has {} columns, instance has n = {}", t.n(), g.n()),
        });
    }
    let n = t.n();
    let mut in_set = vec![false; n];
    for &i in constrained {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        if g.has_edge(i, i) {
            // M_ii = 1 and the zero constraint at j = i cannot both hold
            return Err(Error::param(
                "constrained",
                format!("index {i} is adjacent to its own right vertex v_{i}"),
            ));
        }
        in_set[i] = true;
    }
    let cols: Vec<Vec<BigRational>> = (0..n).map(|j| t.rational_column(j)).collect();
    let mut m = Vec::with_capacity(n);
    for i in 0..n {
        let h = if in_set[i] {
            if let Some(z) = fooling_vector(t, g, i)? {
                return Err(Error::FoolingVectorExists { i, witness: z });
            }
            let nbrs = g.neighbors_of_v(i);
            let a = t.rational_submatrix(&nbrs);
            // normal equations AᵀA w = Aᵀ b are always consistent
            let at_a: Vec<Vec<BigRational>> = (0..nbrs.len())
                .map(|r| {
                    (0..nbrs.len())
                        .map(|c| exact::dot(&cols[nbrs[r]], &cols[nbrs[c]]))
                        .collect()
                })
                .collect();
            let at_b: Vec<BigRational> =
                (0..nbrs.len()).map(|r| exact::dot(&cols[nbrs[r]], &cols[i])).collect();
            let w = exact::solve(&at_a, &at_b).expect("normal equations are consistent");
            let aw = exact::mat_vec(&a, &w);
            let p: Vec<BigRational> =
                cols[i].iter().zip(&aw).map(|(b, v)| b - v).collect();
            let denom = exact::dot(&p, &cols[i]); // equals ‖p‖², nonzero here
            debug_assert!(!denom.is_zero());
            p.into_iter().map(|v| v / denom.clone()).collect::<Vec<_>>()
        } else {
            let norm2 = exact::dot(&cols[i], &cols[i]);
            if norm2.is_zero() {
                return Err(Error::ZeroColumn { i });
            }
            cols[i].iter().map(|v| v / norm2.clone()).collect::<Vec<_>>()
        };
        m.push(
            (0..n)
                .map(|j| exact::dot(&h, &cols[j]).to_f64().unwrap_or(f64::NAN))
                .collect::<Vec<f64>>(),
        );
    }
    Ok(m)
}

/// Exact structural statistics of an instance against the asymptotic
/// thresholds the analysis needs; reported, never asserted.
#[derive(Debug, Clone)]
pub struct GraphPropertiesReport {
    pub n: usize,
    pub p: f64,
    pub k: usize,
    pub istar_size: usize,
    pub istar_threshold: f64,
    pub istar_ok: bool,
    pub min_neighborhood: usize,
    pub neighborhood_threshold: f64,
    pub neighborhood_ok: bool,
    pub max_shared_neighbors: usize,
    pub shared_threshold: f64,
    pub shared_ok: bool,
}

impl std::fmt::Display for GraphPropertiesReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "instance: n={} p={} k={}", self.n, self.p, self.k)?;
        writeln!(
            f,
            "|I*| = {} (threshold 0.9n = {:.1}) {}",
            self.istar_size,
            self.istar_threshold,
            if self.istar_ok { "ok" } else { "below" }
        )?;
        writeln!(
            f,
            "min |N(v_i)| = {} (threshold pn/2 = {:.2}) {}",
            self.min_neighborhood,
            self.neighborhood_threshold,
            if self.neighborhood_ok { "ok" } else { "below" }
        )?;
        write!(
            f,
            "max |N(v_i) ∩ N(v_j)| = {} (threshold log2(n)·max(np², 1) = {:.2}) {}",
            self.max_shared_neighbors,
            self.shared_threshold,
            if self.shared_ok { "ok" } else { "above" }
        )
    }
}

pub fn verify_graph_properties(g: &BipartiteGraph, k: usize) -> GraphPropertiesReport {
    let n = g.n();
    let p = g.p();
    let istar_size = metric::istar(g, k).len();
    let nbhds: Vec<Vec<usize>> = (0..n).map(|i| g.neighbors_of_v(i)).collect();
    let min_neighborhood = nbhds.iter().map(|v| v.len()).min().unwrap_or(0);
    let mut max_shared = 0usize;
    for i in 0..n {
        let set: HashSet<usize> = nbhds[i].iter().copied().collect();
        for j in (i + 1)..n {
            let shared = nbhds[j].iter().filter(|u| set.contains(u)).count();
            max_shared = max_shared.max(shared);
        }
    }
    let nf = n as f64;
    let istar_threshold = 0.9 * nf;
    let neighborhood_threshold = p * nf / 2.0;
    let shared_threshold = nf.log2() * (nf * p * p).max(1.0);
    GraphPropertiesReport {
        n,
        p,
        k,
        istar_size,
        istar_threshold,
        istar_ok: istar_size as f64 >= istar_threshold,
        min_neighborhood,
        neighborhood_threshold,
        neighborhood_ok: min_neighborhood as f64 >= neighborhood_threshold,
        max_shared_neighbors: max_shared,
        shared_threshold,
        shared_ok: (max_shared as f64) <= shared_threshold,
    }
}

/// Sketch pipeline configuration for adversarial evaluation on the hard
/// distribution. Small defaults on purpose: the point of the experiment is
/// measuring how a tiny sketch fares against inputs built to defeat it.
#[derive(Debug, Clone, Copy)]
pub struct AdversaryConfig {
    pub q: u32,
    pub c_emb: f64,
    pub eps: f64,
    pub delta: f64,
    pub rep_constant: f64,
    /// Close-side threshold in metric units; the claim separates diameter
    /// ≤ 2 from ≥ 2k, so 2.0 is the natural setting.
    pub threshold: f64,
    pub p_val: i64,
    pub u_val: i64,
    pub m_bound: i64,
    /// Resampling budget for draws that hit an empty neighborhood.
    pub max_draw_attempts: usize,
}

impl Default for AdversaryConfig {
    fn default() -> Self {
        AdversaryConfig {
            q: 2,
            c_emb: 2.0,
            eps: 0.5,
            delta: 0.25,
            rep_constant: 1.0,
            threshold: 2.0,
            p_val: DEFAULT_P_VAL,
            u_val: DEFAULT_U_VAL,
            m_bound: 1 << 31,
            max_draw_attempts: 10_000,
        }
    }
}

/// Outcome of an adversarial run: how often a predictor disagreed with the
/// ground truth 1{x_i > 0}.
#[derive(Debug, Clone, Copy)]
pub struct AdversaryOutcome {
    pub trials: usize,
    pub failures: usize,
}

impl AdversaryOutcome {
    pub fn rate(&self) -> f64 {
        self.failures as f64 / self.trials as f64
    }
}

/// Runs the full sketch pipeline against `trials` hard samples: embed the
/// 2n-point shortest-path metric (sentinel-completed when disconnected)
/// into ℓ∞, feed each sample through a fresh decision sketch at the
/// embedded close-side threshold, and predict x_i > 0 exactly when the
/// sketch answers Far. Far answers are witness-certified, so errors are
/// one-sided in practice: the interesting measurement is how often the
/// sketch misses the far side.
pub fn adversary_eval(
    g: &BipartiteGraph,
    k: usize,
    cfg: &AdversaryConfig,
    trials: usize,
    seed: u64,
) -> Result<AdversaryOutcome> {
    if trials == 0 {
        return Err(Error::param("trials", "adversarial rate needs at least one trial"));
    }
    let n = g.n();
    let m = metric::shortest_path_metric(g);
    let (dense, _connected) = m.dense_with_sentinel();
    let finite = FiniteMetric::from_dense(2 * n, dense)?;
    let emb = LinfEmbedding::build(&finite, cfg.q, seeding::derive(seed, TAG_LAB_EMBED), cfg.c_emb)?;
    let universe = Arc::new(PointUniverse::new(&emb.to_points())?);
    let scale = (2 * cfg.q as u64 - 1) as f64;
    let mut failures = 0usize;
    for trial in 0..trials {
        let trial_seed = seeding::derive(seed, TAG_LAB_TRIAL | trial as u64);
        let sample = sample_hard_valid(g, k, cfg.p_val, cfg.u_val, trial_seed, cfg.max_draw_attempts)?;
        let mut sketch = DiamDecisionSketch::with_rep_constant(
            universe.clone(),
            scale * cfg.threshold,
            cfg.eps,
            cfg.delta,
            seeding::derive(trial_seed, 1),
            cfg.rep_constant,
            cfg.m_bound,
        )?;
        let entries = sample.x().entries();
        for (j, &v) in entries.iter().enumerate() {
            if v != 0 {
                sketch.update_by(j, v)?;
            }
        }
        let predict_far = sketch.decide().decision == Decision::Far;
        let truly_far = entries[sample.i()] > 0;
        if predict_far != truly_far {
            failures += 1;
        }
    }
    Ok(AdversaryOutcome { trials, failures })
}

/// Cheating baseline for the same experiment: predict with the exact BFS
/// gap oracle instead of a sketch. The hidden index determines the diameter
/// exactly, so this never errs.
pub fn oracle_baseline(
    g: &BipartiteGraph,
    k: usize,
    cfg: &AdversaryConfig,
    trials: usize,
    seed: u64,
) -> Result<AdversaryOutcome> {
    if trials == 0 {
        return Err(Error::param("trials", "adversarial rate needs at least one trial"));
    }
    let m = metric::shortest_path_metric(g);
    let mut failures = 0usize;
    for trial in 0..trials {
        let trial_seed = seeding::derive(seed, TAG_LAB_TRIAL | trial as u64);
        let sample = sample_hard_valid(g, k, cfg.p_val, cfg.u_val, trial_seed, cfg.max_draw_attempts)?;
        let predict_far =
            metric::diam_decision_oracle(&m, sample.x(), 2.0, k as f64)? == GapAnswer::Far;
        if predict_far != (sample.x().entries()[sample.i()] > 0) {
            failures += 1;
        }
    }
    Ok(AdversaryOutcome { trials, failures })
}
