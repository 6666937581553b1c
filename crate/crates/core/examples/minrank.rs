//! Minimum rank over F₂ of small knowledge graphs: the index-coding quantity
//! that lower-bounds sketch dimension for the hard instances. Exhaustive
//! search, so graphs are capped at 5 vertices.

use diamsketch::lab::{minrank_f2, KnowledgeGraph};
use diamsketch::metric::auto_edge_probability;
use diamsketch::BipartiteGraph;

fn main() -> diamsketch::Result<()> {
    for t in 2..=5usize {
        println!(
            "t = {t}: edgeless {}, complete {}, directed cycle {}",
            minrank_f2(&KnowledgeGraph::edgeless(t))?,
            minrank_f2(&KnowledgeGraph::complete(t))?,
            minrank_f2(&KnowledgeGraph::directed_cycle(t))?
        );
    }

    // knowledge graphs induced by small dense hard instances; the search is
    // exhaustive in the free entries, so instances whose I* exceeds the cap
    // are reported and skipped
    let k = 1usize;
    println!("auto edge probability at n = 6, k = 1: {:.4}", auto_edge_probability(6, k)?);
    for seed in 0..8u64 {
        let g = BipartiteGraph::gen(6, 0.5, 60 + seed)?;
        let kg = KnowledgeGraph::from_instance(&g, k);
        match minrank_f2(&kg) {
            Ok(mr) => println!(
                "seed {seed}: I* = {:?}, {} edges, minrank {mr}",
                kg.labels(),
                kg.edges().len()
            ),
            Err(e) => println!("seed {seed}: {e}"),
        }
    }
    Ok(())
}
