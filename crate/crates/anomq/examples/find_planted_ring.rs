//! End-to-end search: plant a ring of anomalous vertices in a noisy grid,
//! then ask the engine to find the most anomalous ring-shaped subgraph.
//!
//! Run with `cargo run --example find_planted_ring`.

use anomq::engine::{anomaly_max_q, EngineParams};
use anomq::eval::precision;
use anomq::query::{QuerySpec, ShapeSpec};
use anomq::sim::{generate_noisy, SimConfig, SimTopology};
use anomq::stats::{ScoreSpec, Statistic};

fn main() -> anomq::Result<()> {
    let shape = QuerySpec::Shape(ShapeSpec::Ring { k: 3 });
    let mut cfg = SimConfig::new(400, SimTopology::KingGrid, shape.clone());
    cfg.noise_percent = 5.0;
    cfg.seed = 42;
    let (graph, truth) = generate_noisy(&cfg)?;
    println!(
        "generated {} vertices / {} edges, planted ring on {:?}",
        graph.vertex_count(),
        graph.edge_count(),
        truth.planted_vertices
    );

    let query = shape.build()?;
    let spec = ScoreSpec::new(Statistic::Bj);
    let result = anomaly_max_q(&graph, &query, &spec, &EngineParams::default())?;

    println!(
        "found {:?} with score {:.4} (ged {} in {} iterations, {:.2} ms)",
        result.vertices, result.score, result.ged, result.iterations, result.runtime_ms
    );
    println!(
        "precision against the planted vertices: {:.2}",
        precision(&result.vertices, &truth.planted_vertices)
    );
    println!("{}", serde_json::to_string_pretty(&result.to_json()).unwrap());
    Ok(())
}
