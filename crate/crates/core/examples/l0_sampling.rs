//! Draws uniform support samples from a turnstile stream with an ℓ₀ sampler.
//!
//! The stream inserts 64 items, churns 300 insert/delete pairs that cancel,
//! and deletes half of the original items again. The surviving support has 32
//! elements; a histogram over independently seeded samplers should be flat.

use diamsketch::l0::{L0Sampler, SampleOutcome};

fn main() -> diamsketch::Result<()> {
    let n = 256usize;
    let m_bound = 1 << 20;
    let updates = build_stream(n);

    let mut hist = vec![0usize; n];
    let mut zero = 0usize;
    let mut fail = 0usize;
    let draws = 2_000u64;
    for seed in 0..draws {
        let mut s = L0Sampler::new(n, 0.1, seed, m_bound)?;
        for &(i, delta) in &updates {
            s.update(i, delta)?;
        }
        match s.sample() {
            SampleOutcome::Index(i) => hist[i] += 1,
            SampleOutcome::Zero => zero += 1,
            SampleOutcome::Fail => fail += 1,
        }
    }

    let support: Vec<usize> = (0..n).filter(|&i| i % 2 == 0 && i < 64).collect();
    let hits: usize = support.iter().map(|&i| hist[i]).sum();
    let stray: usize = hist.iter().sum::<usize>() - hits;
    println!("{draws} draws over a support of {}", support.len());
    println!("  in-support {hits}, stray {stray}, zero {zero}, fail {fail}");
    let (lo, hi) = support
        .iter()
        .map(|&i| hist[i])
        .fold((usize::MAX, 0), |(lo, hi), c| (lo.min(c), hi.max(c)));
    println!("  per-element counts range {lo}..={hi} (uniform mean {:.1})", hits as f64 / support.len() as f64);

    // a sampler is a linear sketch: merging two halves equals one pass
    let (first, second) = updates.split_at(updates.len() / 2);
    let mut a = L0Sampler::new(n, 0.1, 7, m_bound)?;
    let mut b = L0Sampler::new(n, 0.1, 7, m_bound)?;
    let mut whole = L0Sampler::new(n, 0.1, 7, m_bound)?;
    for &(i, d) in first {
        a.update(i, d)?;
    }
    for &(i, d) in second {
        b.update(i, d)?;
    }
    for &(i, d) in &updates {
        whole.update(i, d)?;
    }
    let merged = a.merge(&b)?;
    println!("merge of halves == full pass: {}", merged.serialize() == whole.serialize());

    let bytes = whole.serialize();
    let back = L0Sampler::deserialize(&bytes)?;
    println!("serialized {} bytes ({} rows), round trip intact: {}", bytes.len(), whole.rows(), back == whole);

    // deleting everything returns the sampler to a verifiable zero state
    let mut drain = whole.clone();
    for &(i, d) in &updates {
        drain.update(i, -d)?;
    }
    println!("after cancelling the whole stream: {:?}", drain.sample());
    Ok(())
}

fn build_stream(n: usize) -> Vec<(usize, i64)> {
    let mut updates = Vec::new();
    for i in 0..64 {
        updates.push((i, 1));
    }
    for round in 0..300 {
        let i = (round * 37) % n;
        updates.push((i, 1));
        updates.push((i, -1));
    }
    for i in (0..64).filter(|i| i % 2 == 1) {
        updates.push((i, -1));
    }
    updates
}
