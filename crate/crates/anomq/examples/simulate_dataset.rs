//! Write a synthetic dataset to disk in the formats the loaders read, then
//! load it back and verify the round trip.
//!
//! Run with `cargo run --example simulate_dataset [out_dir]`.

use anomq::graph::AttributedGraph;
use anomq::query::{QuerySpec, ShapeSpec};
use anomq::sim::{generate_noisy, read_truth, write_dataset, SimConfig, SimTopology};

fn main() -> anomq::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "target/simulated".to_string());

    let mut cfg = SimConfig::new(
        256,
        SimTopology::KingGrid,
        QuerySpec::Shape(ShapeSpec::Bipartite { a: 2, b: 3 }),
    );
    cfg.noise_percent = 10.0;
    cfg.seed = 99;
    let (graph, truth) = generate_noisy(&cfg)?;
    write_dataset(&dir, &graph, &truth)?;
    println!(
        "wrote {} vertices / {} edges to {dir}/(edges.tsv, pvalues.csv, truth.json)",
        graph.vertex_count(),
        graph.edge_count()
    );

    let (mut reloaded, stats) = AttributedGraph::load_edge_list(format!("{dir}/edges.tsv"))?;
    reloaded.load_pvalues(format!("{dir}/pvalues.csv"))?;
    let truth2 = read_truth(format!("{dir}/truth.json"))?;
    println!(
        "reloaded {} vertices / {} edges, truth covers {:?}",
        stats.vertices, stats.edges, truth2.planted_vertices
    );
    assert_eq!(truth, truth2);
    assert_eq!(
        graph.edges().collect::<Vec<_>>(),
        reloaded.edges().collect::<Vec<_>>()
    );
    println!("round trip ok");
    Ok(())
}
