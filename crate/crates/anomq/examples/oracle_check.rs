//! Compare the engine against the exhaustive constrained optimum on small
//! planted instances.
//!
//! Run with `cargo run --example oracle_check`.

use anomq::engine::{anomaly_max_q, EngineParams};
use anomq::eval::oracle_search;
use anomq::query::{QuerySpec, ShapeSpec};
use anomq::sim::{generate_noisy, SimConfig, SimTopology};
use anomq::stats::{ScoreSpec, Statistic};

fn main() -> anomq::Result<()> {
    let spec = ScoreSpec::new(Statistic::Bj);
    let shape = QuerySpec::Shape(ShapeSpec::Ring { k: 3 });
    let query = shape.build()?;

    let mut agree = 0;
    let mut feasible = 0;
    for seed in 0..20 {
        let mut cfg = SimConfig::new(12, SimTopology::Random, shape.clone());
        cfg.sparsity = 0.3;
        cfg.seed = seed;
        let (graph, _) = generate_noisy(&cfg)?;

        let engine = anomaly_max_q(&graph, &query, &spec, &EngineParams::default())?;
        let oracle = oracle_search(&graph, &query, &spec, None)?;
        match (&oracle, engine.feasible && engine.ged == 0) {
            (Some((sub, sv)), true) => {
                feasible += 1;
                let hit = engine.vertices == sub.vertices();
                if hit {
                    agree += 1;
                }
                println!(
                    "seed {seed:>2}: engine {:?} ({:.3}) vs oracle {:?} ({:.3}){}",
                    engine.vertices,
                    engine.score,
                    sub.vertices(),
                    sv.value,
                    if hit { "" } else { "  <- differs" }
                );
            }
            (None, _) => println!("seed {seed:>2}: no ring-shaped subgraph exists"),
            (Some(_), false) => println!("seed {seed:>2}: engine result not exactly isomorphic"),
        }
    }
    println!("exact agreement on {agree}/{feasible} feasible instances");
    Ok(())
}
