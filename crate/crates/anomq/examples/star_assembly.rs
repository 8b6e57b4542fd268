//! A look inside one search iteration: decompose the query into stars,
//! match each star around the candidate roots, and watch the greedy
//! assembly union matches while the edit distance falls.
//!
//! Run with `cargo run --example star_assembly`.

use anomq::engine::{decompose_stars, max_q, star_match_table};
use anomq::ged::GedConfig;
use anomq::graph::AttributedGraph;
use anomq::query::QueryGraph;
use anomq::stats::{priority_sort, ScoreSpec, Statistic, SubsetScorer};

fn main() -> anomq::Result<()> {
    // Two candidate regions: a clean 4-ring on 0..4 and a denser blob.
    let edges = [
        (0, 1), (1, 2), (2, 3), (0, 3),         // planted ring(4)
        (4, 5), (5, 6), (4, 6), (4, 7), (6, 7), // background blob
        (3, 4), (7, 8), (8, 9),
    ];
    let pvals = vec![0.02, 0.04, 0.03, 0.05, 0.3, 0.6, 0.4, 0.5, 0.9, 0.8];
    let mut graph = AttributedGraph::from_edges(10, &edges)?;
    graph.set_pvalues(pvals)?;

    let query = QueryGraph::ring(4)?;
    let spec = ScoreSpec::new(Statistic::Bj);
    let scorer = SubsetScorer::new(&graph, &spec)?;

    let patterns = decompose_stars(&query);
    println!("query stars (center degree per query vertex):");
    for p in &patterns {
        println!("  query vertex {} needs {} leaves", p.center, p.leaf_count);
    }

    let order = priority_sort(&graph, &spec)?;
    let roots = &order.order()[..query.vertex_count()];
    println!("roots (highest priority first): {roots:?}");

    let table = star_match_table(&graph, &scorer, roots, &patterns);
    println!("star matches:");
    for m in &table {
        println!(
            "  root {} / pattern {} -> vertices {:?} (score {:.4})",
            m.root, m.pattern_index, m.vertices, m.score
        );
    }

    let assembly = max_q(&graph, &scorer, roots, &query, &patterns, &GedConfig::default());
    println!(
        "assembled {:?} at edit distance {} using {} matches",
        assembly.subgraph.vertices(),
        assembly.ged,
        assembly.used.len()
    );
    Ok(())
}
