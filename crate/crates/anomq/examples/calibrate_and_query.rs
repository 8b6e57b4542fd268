//! From raw per-vertex time series to a query: calibrate empirical p-values
//! against a baseline window, then search with both a nonparametric and a
//! count-based statistic.
//!
//! Run with `cargo run --example calibrate_and_query`.

use anomq::engine::{anomaly_max_q, EngineParams};
use anomq::graph::{AttrMatrix, AttributedGraph};
use anomq::query::QueryGraph;
use anomq::stats::{calibrate_pvalues, ScoreSpec, Statistic};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> anomq::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 64;

    // A ring of n vertices plus some chords.
    let mut edges: Vec<(u32, u32)> = (0..n as u32).map(|i| (i, (i + 1) % n as u32)).collect();
    edges.extend((0..n as u32 / 4).map(|i| (4 * i, (4 * i + 2) % n as u32)));
    let mut graph = AttributedGraph::from_edges(n, &edges)?;

    // Twenty baseline steps around 10.0; the final step spikes for vertices
    // 10, 11, 12 (adjacent along the ring).
    let t = 21;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|v| {
            (0..t)
                .map(|step| {
                    let base = 10.0 + rng.gen::<f64>();
                    if step == t - 1 && (10..=12).contains(&v) {
                        base + 25.0
                    } else {
                        base
                    }
                })
                .collect()
        })
        .collect();
    graph.set_attrs(AttrMatrix::from_rows(rows)?)?;

    let spec = ScoreSpec::new(Statistic::Bj).with_window(0..t - 1, t - 1);
    let pvals = calibrate_pvalues(&graph, &spec)?;
    println!(
        "calibrated p-values for the spiking vertices: {:?}",
        &pvals[10..=12]
    );
    graph.set_pvalues(pvals)?;

    let query = QueryGraph::line(3)?;
    let result = anomaly_max_q(&graph, &query, &spec, &EngineParams::default())?;
    println!(
        "BJ query found {:?} (score {:.4}, ged {})",
        result.vertices, result.score, result.ged
    );

    // The count-based statistics read the attribute matrix directly.
    let ebp_spec = ScoreSpec::new(Statistic::Ebp).with_window(0..t - 1, t - 1);
    let result = anomaly_max_q(&graph, &query, &ebp_spec, &EngineParams::default())?;
    println!(
        "EBP query found {:?} (score {:.4}, ged {})",
        result.vertices, result.score, result.ged
    );
    Ok(())
}
