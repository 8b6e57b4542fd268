//! The four scan statistics and the linear-time prefix maximization.
//!
//! Run with `cargo run --example scan_statistics`.

use anomq::graph::AttributedGraph;
use anomq::stats::{
    bj_score, ebp_score, hc_score, kulldorff_score, ltss_prefix_max, npss_score, priority_sort,
    ScoreSpec, Statistic,
};

fn main() -> anomq::Result<()> {
    // Count-based statistics compare an observed aggregate C to a baseline B.
    println!("ebp_score(C=10, B=5)              = {:.5}", ebp_score(10.0, 5.0)?);
    println!(
        "kulldorff_score(C=4, B=1 | 4, 10) = {:.5}",
        kulldorff_score(4.0, 1.0, 4.0, 10.0)?
    );

    // Nonparametric statistics count p-values at or below a level alpha.
    println!("bj_score(alpha=0.1, 5 of 10)      = {:.5}", bj_score(0.1, 5, 10)?);
    println!("hc_score(alpha=0.05, 10 of 100)   = {:.5}", hc_score(0.05, 10, 100)?);

    // npss_score maximizes over the alpha grid for a whole subset.
    let spec = ScoreSpec::new(Statistic::Bj);
    let sv = npss_score(&[0.01, 0.02, 0.5], &spec)?;
    println!(
        "npss over {{0.01, 0.02, 0.5}}: value {:.5} at alpha* = {:?} ({} of {})",
        sv.value, sv.alpha_star, sv.n_alpha, sv.n_total
    );

    // With vertices sorted by priority, the unconstrained optimum over all
    // 2^n - 1 subsets is attained at one of n prefixes.
    let pvals = vec![0.01, 0.6, 0.03, 0.9, 0.12, 0.4, 0.05, 0.7];
    let n = pvals.len();
    let mut g = AttributedGraph::from_edges(n, &[(0, 1)])?;
    g.set_pvalues(pvals.clone())?;
    let order = priority_sort(&g, &spec)?;
    println!("priority order (most anomalous first): {:?}", order.order());
    let (k, best) = ltss_prefix_max(&order, &pvals, &spec, n)?;
    println!(
        "best prefix: first {k} vertices, score {:.5} at alpha* = {:?}",
        best.value, best.alpha_star
    );
    Ok(())
}
