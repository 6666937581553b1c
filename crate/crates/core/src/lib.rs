//! Linear sketches for diameter and approximate-furthest-neighbor (AFN)
//! decisions over dynamic (turnstile) streams on finite metric spaces.
//!
//! A stream of `+i` / `-i` updates maintains a frequency vector `x` over the
//! points of a fixed metric; the multiset of interest is the support of `x`.
//! The sketches here answer gap promise problems about that multiset:
//!
//! * [`l0::L0Sampler`]: exactly linear ℓ₀ sampler returning a uniform
//!   support index, or `Zero`, or (rarely) `Fail`.
//! * [`afn::AfnSketch`]: for points in ℓ∞^k, is some support point further
//!   than `r` from a query, or are all within `r`?
//! * [`diam::DiamDecisionSketch`]: diameter gap decision for ℓ∞ point sets.
//! * [`embedding::LinfEmbedding`]: verified (2q−1)-distortion embedding of a
//!   finite metric into ℓ∞, which lifts the ℓ∞ machinery to general metrics.
//! * [`diam::DiamEstimator`]: end-to-end c-approximate diameter estimate
//!   over a threshold grid.
//! * [`lab`]: constructions around the matching lower bound, from hard input
//!   distributions over random bipartite graphs to exact rational fooling
//!   vectors, dual matrices, and brute-force minrank.
//!
//! The `examples/` directory has one runnable program per capability; the
//! `diamsketch` binary exposes the same flows as subcommands.

pub mod afn;
pub mod diam;
pub mod embedding;
mod error;
pub mod exact;
pub mod harness;
pub mod hashing;
pub mod io;
pub mod l0;
pub mod lab;
pub mod metric;
pub mod seeding;

pub use diam::{DiamDecisionSketch, DiamEstimator, EstimatorParams};
pub use error::{Error, Result};
pub use metric::{BipartiteGraph, FiniteMetric, FrequencyVector, GapAnswer};
