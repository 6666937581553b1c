//! Hard-input generator: random bipartite graphs whose shortest-path metric
//! makes the diameter hinge on a single hidden coordinate, plus the
//! end-to-end adversarial evaluation of the sketch pipeline against them.

use diamsketch::lab::{
    adversary_eval, check_index_determines_diam, oracle_baseline, sample_hard_valid,
    verify_graph_properties, AdversaryConfig,
};
use diamsketch::metric::{auto_edge_probability, istar};
use diamsketch::BipartiteGraph;

fn main() -> diamsketch::Result<()> {
    let n = 40usize;
    let k = 2usize;
    let p = auto_edge_probability(n, k)?;
    let g = BipartiteGraph::gen(n, p, 11)?;

    println!("{}", verify_graph_properties(&g, k));
    println!("|I*| = {} of {n} indices hide the diameter", istar(&g, k).len());

    // draws whose hidden index has a nonempty neighborhood; the support of x
    // determines diam(x) through x_i alone: positive ⇒ ≥ 2k, zero ⇒ ≤ 2
    let mut determined = 0usize;
    for trial in 0..20u64 {
        let s = sample_hard_valid(&g, k, 1, 1_000_000, 500 + trial, 10_000)?;
        assert!(s.respects_invariants(&g));
        if check_index_determines_diam(&g, &s, k)? {
            determined += 1;
        }
    }
    println!("index determines the diameter in {determined}/20 draws");

    let cfg = AdversaryConfig::default();
    let trials = 25usize;
    let sketch_run = adversary_eval(&g, k, &cfg, trials, 3)?;
    let oracle_run = oracle_baseline(&g, k, &cfg, trials, 3)?;
    println!(
        "adversarial trials: sketch missed {}/{} (rate {:.3}), exact oracle {}/{}",
        sketch_run.failures,
        sketch_run.trials,
        sketch_run.rate(),
        oracle_run.failures,
        oracle_run.trials
    );
    Ok(())
}
