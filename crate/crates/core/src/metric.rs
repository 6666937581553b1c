//! Finite metric spaces, turnstile frequency vectors, and the exact oracles
//! the sketches are measured against.
//!
//! Metrics are either dense matrices or unweighted graphs; graph distances
//! are filled lazily, one BFS row per source, and cached. Distances may be
//! infinite (disconnected graphs); dense exports replace infinities with the
//! sentinel `2 * (largest finite distance) + 1` plus a connectivity flag so
//! downstream sketches only ever see finite arithmetic.

use std::sync::OnceLock;

use rand::Rng;

use crate::error::{Error, Result};
use crate::seeding;

/// Answer of a gap promise problem: `Close` ≙ 0 (below the lower threshold),
/// `Far` ≙ 1 (at or above the upper threshold), `Indeterminate` ≙ ∗ (the
/// input is outside the promise, including negative frequency entries).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapAnswer {
    Close,
    Far,
    Indeterminate,
}

/// Random bipartite graph G(n, n, p) with sides U and V of n vertices each;
/// edge (u_i, v_j) is present independently with probability p. Instances
/// regenerate identically from (n, p, seed) on any platform.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    n: usize,
    p: f64,
    seed: u64,
    bits: Vec<u64>, // row-major n*n edge bits, bit i*n+j = edge (u_i, v_j)
}

impl BipartiteGraph {
    pub fn gen(n: usize, p: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "side size must be positive"));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param("p", format!("edge probability must lie in (0, 1), got {p}")));
        }
        let mut bits = vec![0u64; (n * n).div_ceil(64)];
        let mut rng = seeding::rng(seed);
        for i in 0..n {
            for j in 0..n {
                if rng.random::<f64>() < p {
                    let b = i * n + j;
                    bits[b / 64] |= 1 << (b % 64);
                }
            }
        }
        Ok(BipartiteGraph { n, p, seed, bits })
    }

    /// Rebuilds an instance from an explicit edge list (file input, tests).
    /// `p` and `seed` are carried as header metadata only.
    pub fn from_edges(n: usize, p: f64, seed: u64, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "side size must be positive"));
        }
        let mut bits = vec![0u64; (n * n).div_ceil(64)];
        for &(i, j) in edges {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
            let b = i * n + j;
            bits[b / 64] |= 1 << (b % 64);
        }
        Ok(BipartiteGraph { n, p, seed, bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Edge (u_i, v_j).
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let b = i * self.n + j;
        self.bits[b / 64] >> (b % 64) & 1 == 1
    }

    /// N(v_j): the U-side neighborhood {i : (u_i, v_j) ∈ E}, ascending.
    pub fn neighbors_of_v(&self, j: usize) -> Vec<usize> {
        (0..self.n).filter(|&i| self.has_edge(i, j)).collect()
    }

    /// V-side neighborhood of u_i, ascending.
    pub fn neighbors_of_u(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.has_edge(i, j)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for i in 0..self.n {
            for j in 0..self.n {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// `-p auto`: p = n^(−1+1/(2k−1)) / log₂ n, the density at which the hard
/// instances concentrate.
pub fn auto_edge_probability(n: usize, k: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("n", "auto probability needs n >= 2"));
    }
    if k == 0 {
        return Err(Error::param("k", "gap parameter must be positive"));
    }
    let nf = n as f64;
    let exponent = -1.0 + 1.0 / (2.0 * k as f64 - 1.0);
    Ok(nf.powf(exponent) / nf.log2())
}

const UNREACHABLE: u32 = u32::MAX;

fn bfs(adj: &[Vec<u32>], src: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; adj.len()];
    let mut queue = std::collections::VecDeque::new();
    dist[src] = 0;
    queue.push_back(src as u32);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v as usize];
        for &w in &adj[v as usize] {
            if dist[w as usize] == UNREACHABLE {
                dist[w as usize] = dv + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

enum Backing {
    Dense(Vec<f64>),
    Graph { adj: Vec<Vec<u32>>, rows: Vec<OnceLock<Vec<u32>>> },
}

/// A finite metric on points {0, …, n−1}. Distances are f64 and may be
/// `f64::INFINITY` for disconnected graph pairs.
pub struct FiniteMetric {
    n: usize,
    backing: Backing,
}

impl FiniteMetric {
    /// Dense symmetric matrix with zero diagonal; entries must be
    /// nonnegative (infinity allowed, NaN rejected).
    pub fn from_dense(n: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::param("d", format!("expected {} entries, got {}", n * n, d.len())));
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(Error::MetricAxiom(format!("d({i},{i}) = {} != 0", d[i * n + i])));
            }
            for j in 0..n {
                let v = d[i * n + j];
                if v.is_nan() || v < 0.0 {
                    return Err(Error::MetricAxiom(format!("d({i},{j}) = {v} is not a distance")));
                }
                if d[i * n + j] != d[j * n + i] {
                    return Err(Error::MetricAxiom(format!("d({i},{j}) != d({j},{i})")));
                }
            }
        }
        Ok(FiniteMetric { n, backing: Backing::Dense(d) })
    }

    /// Shortest-path metric of an undirected unweighted graph.
    pub fn from_undirected_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n {
                return Err(Error::IndexOutOfRange { index: a, n });
            }
            if b >= n {
                return Err(Error::IndexOutOfRange { index: b, n });
            }
            if a == b {
                return Err(Error::param("edges", format!("self loop at {a}")));
            }
            adj[a].push(b as u32);
            adj[b].push(a as u32);
        }
        Ok(Self::from_adjacency(adj))
    }

    fn from_adjacency(adj: Vec<Vec<u32>>) -> Self {
        let n = adj.len();
        let rows = (0..n).map(|_| OnceLock::new()).collect();
        FiniteMetric { n, backing: Backing::Graph { adj, rows } }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.n && j < self.n);
        match &self.backing {
            Backing::Dense(d) => d[i * self.n + j],
            Backing::Graph { adj, rows } => {
                let row = rows[i].get_or_init(|| bfs(adj, i));
                match row[j] {
                    UNREACHABLE => f64::INFINITY,
                    h => h as f64,
                }
            }
        }
    }

    /// True when every pairwise distance is finite.
    pub fn is_connected(&self) -> bool {
        match &self.backing {
            Backing::Dense(d) => d.iter().all(|v| v.is_finite()),
            Backing::Graph { adj, rows } => {
                if self.n == 0 {
                    return true;
                }
                let row = rows[0].get_or_init(|| bfs(adj, 0));
                row.iter().all(|&h| h != UNREACHABLE)
            }
        }
    }

    /// Smallest positive distance; `None` when n < 2 or all pairs coincide.
    pub fn min_positive_distance(&self) -> Option<f64> {
        let mut best = f64::INFINITY;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let d = self.dist(i, j);
                if d > 0.0 && d < best {
                    best = d;
                }
            }
        }
        best.is_finite().then_some(best)
    }

    pub fn max_finite_distance(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let d = self.dist(i, j);
                if d.is_finite() && d > best {
                    best = d;
                }
            }
        }
        best
    }

    /// Aspect ratio Δ = (max distance)/(min positive distance); errors on
    /// infinite distances, which have no finite aspect ratio.
    pub fn aspect_ratio(&self) -> Result<f64> {
        if !self.is_connected() {
            return Err(Error::InfiniteDistance);
        }
        let lo = self.min_positive_distance().ok_or(Error::MetricAxiom(
            "aspect ratio needs at least two distinct points".into(),
        ))?;
        Ok(self.max_finite_distance() / lo)
    }

    /// Dense export with the finite sentinel `2*(largest finite distance)+1`
    /// replacing infinities; the flag reports whether the metric was already
    /// fully finite.
    pub fn dense_with_sentinel(&self) -> (Vec<f64>, bool) {
        let sentinel = 2.0 * self.max_finite_distance() + 1.0;
        let mut out = Vec::with_capacity(self.n * self.n);
        let mut connected = true;
        for i in 0..self.n {
            for j in 0..self.n {
                let d = self.dist(i, j);
                if d.is_finite() {
                    out.push(d);
                } else {
                    connected = false;
                    out.push(sentinel);
                }
            }
        }
        (out, connected)
    }

    /// Checks all metric axioms exhaustively: zero diagonal, positivity and
    /// symmetry on pairs, triangle inequality on all triples. O(n³); meant
    /// for instances up to a few hundred points.
    pub fn verify_axioms(&self) -> Result<()> {
        for i in 0..self.n {
            if self.dist(i, i) != 0.0 {
                return Err(Error::MetricAxiom(format!("d({i},{i}) != 0")));
            }
            for j in (i + 1)..self.n {
                let d = self.dist(i, j);
                if d.is_nan() || d <= 0.0 {
                    return Err(Error::MetricAxiom(format!("d({i},{j}) = {d} must be positive")));
                }
                if d != self.dist(j, i) {
                    return Err(Error::MetricAxiom(format!("d({i},{j}) != d({j},{i})")));
                }
            }
        }
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    let lhs = self.dist(i, k);
                    let rhs = self.dist(i, j) + self.dist(j, k);
                    if lhs > rhs {
                        return Err(Error::MetricAxiom(format!(
                            "triangle violated: d({i},{k}) = {lhs} > {rhs} = d({i},{j}) + d({j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Shortest-path metric of a bipartite instance: points 0..n are u_0..u_{n-1}
/// and points n..2n are v_0..v_{n-1}.
pub fn shortest_path_metric(g: &BipartiteGraph) -> FiniteMetric {
    let n = g.n();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); 2 * n];
    for i in 0..n {
        for j in 0..n {
            if g.has_edge(i, j) {
                adj[i].push((n + j) as u32);
                adj[n + j].push(i as u32);
            }
        }
    }
    FiniteMetric::from_adjacency(adj)
}

/// Turnstile frequency vector over n coordinates; accepted updates keep
/// every entry within ±m_bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyVector {
    entries: Vec<i64>,
    m_bound: i64,
}

impl FrequencyVector {
    pub fn new(n: usize, m_bound: i64) -> Result<Self> {
        if m_bound < 1 {
            return Err(Error::param("m_bound", "magnitude bound must be at least 1"));
        }
        Ok(FrequencyVector { entries: vec![0; n], m_bound })
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn m_bound(&self) -> i64 {
        self.m_bound
    }

    /// Applies x[i] += delta, rejecting the update (without applying it)
    /// when the result would leave [−m_bound, m_bound].
    pub fn update(&mut self, i: usize, delta: i64) -> Result<()> {
        let n = self.entries.len();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        let next = self.entries[i]
            .checked_add(delta)
            .ok_or(Error::MagnitudeBound { index: i, bound: self.m_bound })?;
        if next.abs() > self.m_bound {
            return Err(Error::MagnitudeBound { index: i, bound: self.m_bound });
        }
        self.entries[i] = next;
        Ok(())
    }

    pub fn get(&self, i: usize) -> i64 {
        self.entries[i]
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    /// Indices with nonzero frequency, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.entries.len()).filter(|&i| self.entries[i] != 0).collect()
    }

    pub fn support_len(&self) -> usize {
        self.entries.iter().filter(|&&v| v != 0).count()
    }

    fn first_negative(&self) -> Option<(usize, i64)> {
        self.entries.iter().enumerate().find(|(_, &v)| v < 0).map(|(i, &v)| (i, v))
    }
}

/// Exact diameter of the support multiset: max d(i,j) over support pairs,
/// 0 when the support has at most one point. Negative entries are invalid
/// input for the value oracle and error out.
pub fn diam_oracle(m: &FiniteMetric, x: &FrequencyVector) -> Result<f64> {
    if x.n() != m.n() {
        return Err(Error::param("x", format!("vector has {} coords, metric {}", x.n(), m.n())));
    }
    if let Some((index, value)) = x.first_negative() {
        return Err(Error::NegativeEntry { index, value });
    }
    let supp = x.support();
    let mut best = 0.0f64;
    for (a, &i) in supp.iter().enumerate() {
        for &j in &supp[a + 1..] {
            best = best.max(m.dist(i, j));
        }
    }
    Ok(best)
}

/// Gap decision diam^{r,c}: `Far` when diam ≥ c·r, `Close` when diam ≤ r,
/// `Indeterminate` otherwise, including vectors with negative entries,
/// which fall outside the promise.
pub fn diam_decision_oracle(m: &FiniteMetric, x: &FrequencyVector, r: f64, c: f64) -> Result<GapAnswer> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::param("r", format!("threshold must be positive and finite, got {r}")));
    }
    if !(c >= 1.0) {
        return Err(Error::param("c", format!("gap factor must be at least 1, got {c}")));
    }
    if x.first_negative().is_some() {
        return Ok(GapAnswer::Indeterminate);
    }
    let d = diam_oracle(m, x)?;
    Ok(if d >= c * r {
        GapAnswer::Far
    } else if d <= r {
        GapAnswer::Close
    } else {
        GapAnswer::Indeterminate
    })
}

/// Exact furthest-neighbor distance from query point q over the support;
/// 0 when the support is empty.
pub fn afn_oracle(m: &FiniteMetric, x: &FrequencyVector, q: usize) -> Result<f64> {
    if q >= m.n() {
        return Err(Error::IndexOutOfRange { index: q, n: m.n() });
    }
    if x.n() != m.n() {
        return Err(Error::param("x", format!("vector has {} coords, metric {}", x.n(), m.n())));
    }
    if let Some((index, value)) = x.first_negative() {
        return Err(Error::NegativeEntry { index, value });
    }
    Ok(x.support().into_iter().map(|i| m.dist(q, i)).fold(0.0, f64::max))
}

/// I*(g, k) = { i : d(u_i, v_i) ≥ 2k+1 } in the shortest-path metric of g
/// (infinite distances qualify).
pub fn istar(g: &BipartiteGraph, k: usize) -> Vec<usize> {
    let m = shortest_path_metric(g);
    let n = g.n();
    let bar = (2 * k + 1) as f64;
    (0..n).filter(|&i| m.dist(i, n + i) >= bar).collect()
}
