//! Query wall time across graph sizes with a fitted log-log slope. Use a
//! release build for representative numbers:
//! `cargo run --release --example bench_scaling`.

use anomq::eval::bench_scaling;
use anomq::query::{QuerySpec, ShapeSpec};
use anomq::stats::Statistic;

fn main() -> anomq::Result<()> {
    let sizes = [100, 1_000, 10_000, 100_000];
    let result = bench_scaling(
        &sizes,
        &QuerySpec::Shape(ShapeSpec::Ring { k: 3 }),
        Statistic::Bj,
        1,
        5,
    )?;
    println!("{:>9} {:>16} {:>14} {:>12}", "n", "generation(ms)", "query(ms)", "iterations");
    for r in &result.rows {
        match &r.error {
            None => println!(
                "{:>9} {:>16.3} {:>14.3} {:>12}",
                r.n, r.generation_ms, r.query_ms, r.iterations
            ),
            Some(e) => println!("{:>9} failed: {e}", r.n),
        }
    }
    match result.loglog_slope {
        Some(s) => println!("log-log slope: {s:.3} (near-linear when close to 1)"),
        None => println!("not enough successful sizes for a slope"),
    }
    Ok(())
}
