//! Exact and bounded graph edit distance between the standard query shapes.
//!
//! Run with `cargo run --example graph_edit_distance`.

use anomq::ged::{ged_bounded, ged_exact, GedConfig, Topology};
use anomq::query::QueryGraph;

fn main() -> anomq::Result<()> {
    let shapes = [
        ("ring(3)", QueryGraph::ring(3)?),
        ("ring(4)", QueryGraph::ring(4)?),
        ("line(4)", QueryGraph::line(4)?),
        ("star(3)", QueryGraph::star(3)?),
        ("bipartite(2x2)", QueryGraph::bipartite(2, 2)?),
    ];
    let cfg = GedConfig::default();

    println!("pairwise exact edit distances (unit costs):");
    print!("{:>16}", "");
    for (name, _) in &shapes {
        print!("{name:>16}");
    }
    println!();
    for (name_a, a) in &shapes {
        print!("{name_a:>16}");
        let ta = Topology::from_query(a);
        for (_, b) in &shapes {
            let tb = Topology::from_query(b);
            let r = ged_exact(&ta, &tb, &cfg)?;
            print!("{:>16}", r.distance);
        }
        println!();
    }

    // The greedy bound never undershoots and often matches exactly.
    let a = Topology::from_query(&QueryGraph::ring(4)?);
    let b = Topology::from_query(&QueryGraph::bipartite(2, 2)?);
    let exact = ged_exact(&a, &b, &cfg)?;
    let bound = ged_bounded(&a, &b);
    println!(
        "\nring(4) vs bipartite(2x2): exact {} (mapping {:?}), greedy bound {}",
        exact.distance, exact.mapping, bound.distance
    );
    Ok(())
}
