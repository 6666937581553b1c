//! Embeds a finite metric into ℓ∞ with verified distortion 2q−1: embedded
//! distances land in [d, (2q−1)·d] for every pair. Prints the anchor-set
//! layout and a sample of coordinates.

use diamsketch::embedding::{embed_dim_bound, LinfEmbedding};
use diamsketch::harness::random_connected_metric;

fn main() -> diamsketch::Result<()> {
    let n = 64usize;
    let q = 2u32;
    let m = random_connected_metric(n, 5.0, 99)?;
    let emb = LinfEmbedding::build(&m, q, 13, 8.0)?;

    println!(
        "n = {n}, q = {q}: {} coordinates (bound at the default constant: {:.0})",
        emb.dim(),
        embed_dim_bound(n, q, 8.0)
    );
    // scale 1 samples every point (distance-0 coordinates, later pruned by
    // consumers); the sparser second scale is the informative one
    let per_scale = emb.dim() / q as usize;
    println!("anchor sets at the second scale (first 4 of {per_scale} shown):");
    for (idx, anchors) in emb.anchors().iter().skip(per_scale).take(4).enumerate() {
        println!("  set {}: {} anchors {:?}", per_scale + idx, anchors.len(), anchors);
    }

    let (expansion, contraction) = emb.verify_distortion(&m);
    let bound = emb.distortion_bound();
    println!("max expansion g/d = {expansion:.4}, max contraction (2q−1)·d/g = {contraction:.4}");
    println!("both within the distortion bound {bound}: {}", expansion <= bound && contraction <= bound);

    println!("point,6 second-scale coordinates");
    for i in (0..n).step_by(16) {
        let coords: Vec<String> =
            emb.point(i)?[per_scale..per_scale + 6].iter().map(|v| format!("{v:.2}")).collect();
        println!("{i},{}", coords.join(","));
    }
    Ok(())
}
