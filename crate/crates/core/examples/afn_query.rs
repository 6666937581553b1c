//! Approximate-furthest-neighbor gap queries over a turnstile stream,
//! reported as `trial,answer,witness,ms` CSV on stdout.
//!
//! Each trial tracks a cluster of points inside an ℓ∞ ball of radius r around
//! the query; odd trials additionally insert one point at distance 3r. The
//! sketch should answer close on even trials and far (with a verified
//! witness) on odd ones.

use std::sync::Arc;
use std::time::Instant;

use diamsketch::afn::{AfnAnswer, AfnSketch, PointUniverse};
use rand::Rng;

fn main() -> diamsketch::Result<()> {
    let k = 4usize;
    let r = 10.0;
    let q = vec![50.0; k];

    println!("trial,answer,witness,ms");
    for trial in 0..20u64 {
        let planted_far = trial % 2 == 1;
        let mut rng = diamsketch::seeding::rng(900 + trial);
        let mut pts: Vec<Vec<f64>> = (0..80)
            .map(|_| (0..k).map(|l| q[l] + (rng.random::<f64>() - 0.5) * 2.0 * r * 0.9).collect())
            .collect();
        if planted_far {
            pts.push((0..k).map(|l| q[l] + 3.0 * r).collect());
        }
        let universe = Arc::new(PointUniverse::new(&pts)?);
        let mut sketch = AfnSketch::new(universe.clone(), r, 0.5, 0.05, trial)?;
        for i in 0..pts.len() {
            sketch.update(i, 1)?;
        }

        let start = Instant::now();
        let answer = sketch.query(&q)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match answer {
            AfnAnswer::Far { witness } => {
                assert!(universe.dist_to(&q, witness) > r, "witness must be genuine");
                println!("{trial},far,{witness},{ms:.3}");
            }
            AfnAnswer::Close => println!("{trial},close,,{ms:.3}"),
        }
        assert_eq!(matches!(answer, AfnAnswer::Far { .. }), planted_far, "trial {trial}");
    }
    Ok(())
}
