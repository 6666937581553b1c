//! Exact linear algebra behind the lower-bound argument: fooling vectors
//! (kernel vectors a sketch matrix cannot distinguish from zero on a
//! neighborhood-supported set) and the dual certificate matrix built when no
//! fooling vector exists.

use diamsketch::exact;
use diamsketch::lab::{build_dual_matrix, fooling_vector, SketchMatrix};
use diamsketch::BipartiteGraph;
use num_traits::Zero;

fn main() -> diamsketch::Result<()> {
    let n = 10usize;
    let g = BipartiteGraph::gen(n, 0.3, 21)?;
    let t = SketchMatrix::random(3, n, 5, 8)?;
    println!("sketch matrix: {} rows x {n} columns, entries in [-5, 5]", t.s());

    let tq = exact::from_int_rows(t.rows());
    let mut fooled = Vec::new();
    for i in 0..n {
        match fooling_vector(&t, &g, i)? {
            Some(z) => {
                assert!(exact::mat_vec(&tq, &z).iter().all(|v| v.is_zero()));
                let support: Vec<usize> =
                    (0..n).filter(|&j| !z[j].is_zero()).collect();
                println!("i = {i}: fooling vector exists, support {support:?} (T·z = 0 verified)");
                fooled.push(i);
            }
            None => println!("i = {i}: column T^({i}) independent of its neighborhood span"),
        }
    }

    let constrained: Vec<usize> =
        (0..n).filter(|&i| !fooled.contains(&i) && !g.has_edge(i, i)).collect();
    let m = build_dual_matrix(&t, &g, &constrained)?;
    println!("dual certificate for constrained set {constrained:?}:");

    let unit_diag = (0..n).all(|i| m[i][i] == 1.0);
    let zeroed = constrained
        .iter()
        .all(|&i| g.neighbors_of_v(i).iter().all(|&j| m[i][j].abs() <= 1e-9));
    println!("  unit diagonal: {unit_diag}");
    println!("  zero at constrained neighborhoods: {zeroed}");
    println!("  numeric rank {} <= sketch rows {}", exact::numeric_rank(&m, 1e-7), t.s());
    Ok(())
}
