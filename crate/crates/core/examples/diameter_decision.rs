//! Diameter gap decisions (diam ≤ r vs diam ≥ 2(1+ε)r) on point sets in ℓ∞,
//! including a merge of two partial streams and a serialization round trip.

use std::sync::Arc;

use diamsketch::afn::PointUniverse;
use diamsketch::diam::{Decision, DiamDecisionSketch};
use rand::Rng;

fn main() -> diamsketch::Result<()> {
    let k = 3usize;
    let r = 5.0;
    let mut rng = diamsketch::seeding::rng(4242);

    // universe: a tight cluster (indices 0..50) plus a distant outlier (50)
    let mut pts: Vec<Vec<f64>> =
        (0..50).map(|_| (0..k).map(|_| rng.random::<f64>() * 4.0).collect()).collect();
    pts.push(vec![100.0; k]);
    let universe = Arc::new(PointUniverse::new(&pts)?);

    let mut sketch = DiamDecisionSketch::new(universe.clone(), r, 0.5, 0.05, 1)?;
    println!("sketch: r = {r}, c = {}, {} rows", sketch.c(), sketch.rows());

    for i in 0..50 {
        sketch.update(i, 1)?;
    }
    report("cluster only (diam ≤ 4)", sketch.decide());

    sketch.update(50, 1)?;
    report("cluster + outlier (diam ≥ 96)", sketch.decide());

    sketch.update(50, -1)?;
    report("outlier deleted again", sketch.decide());

    // linearity: two half-streams merge into the same state as one pass
    let mut left = DiamDecisionSketch::new(universe.clone(), r, 0.5, 0.05, 1)?;
    let mut right = DiamDecisionSketch::new(universe.clone(), r, 0.5, 0.05, 1)?;
    for i in 0..25 {
        left.update(i, 1)?;
    }
    for i in 25..50 {
        right.update(i, 1)?;
    }
    let merged = left.merge(&right)?;
    println!("merged halves agree with one pass: {}", merged.serialize() == sketch.serialize());

    let bytes = sketch.serialize();
    let back = DiamDecisionSketch::deserialize(&bytes, universe)?;
    println!("serialized {} bytes, round trip agrees: {}", bytes.len(), back.serialize() == bytes);
    Ok(())
}

fn report(label: &str, out: diamsketch::diam::DecideOutcome) {
    match (out.decision, out.query_point, out.witness) {
        (Decision::Far, Some(q), Some(w)) => {
            println!("{label}: far (query point {q}, witness {w})");
        }
        (Decision::Close, Some(q), _) => println!("{label}: close (query point {q})"),
        (decision, _, _) => println!("{label}: {decision} (empty support)"),
    }
}
