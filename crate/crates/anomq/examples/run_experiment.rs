//! A small robustness experiment: recovery precision across query shapes
//! and noise levels, aggregated over trials.
//!
//! Run with `cargo run --example run_experiment`.

use anomq::eval::{run_experiment, DatasetSpec, ExperimentSpec};
use anomq::query::{QuerySpec, ShapeSpec};
use anomq::sim::{SimConfig, SimTopology};
use anomq::stats::Statistic;

fn main() -> anomq::Result<()> {
    let spec = ExperimentSpec {
        dataset: DatasetSpec::Sim(SimConfig::new(
            400,
            SimTopology::KingGrid,
            QuerySpec::Shape(ShapeSpec::Ring { k: 3 }),
        )),
        queries: vec![
            QuerySpec::Shape(ShapeSpec::Ring { k: 3 }),
            QuerySpec::Shape(ShapeSpec::Line { k: 4 }),
            QuerySpec::Shape(ShapeSpec::Star { k: 4 }),
        ],
        statistics: vec![Statistic::Bj, Statistic::Hc],
        noise_levels: vec![5.0, 10.0, 20.0],
        trials: 5,
        seed: 2024,
        alpha_max: 0.15,
        epsilon: 1e-6,
        max_iters: None,
        measure_runtime: true,
    };

    let result = run_experiment(&spec)?;
    println!(
        "{:<12} {:<5} {:>6} {:>12} {:>10} {:>12}",
        "query", "stat", "noise", "precision", "+/- std", "runtime(ms)"
    );
    for c in &result.aggregates {
        println!(
            "{:<12} {:<5} {:>6} {:>12.3} {:>10.3} {:>12.3}",
            c.query,
            c.statistic,
            c.noise,
            c.precision_mean.unwrap_or(f64::NAN),
            c.precision_std.unwrap_or(f64::NAN),
            c.runtime_ms_mean
        );
    }
    println!("({} rows total)", result.rows.len());
    Ok(())
}
