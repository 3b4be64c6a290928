//! Evaluate both policies on one scenario and print the full metric report
//! side by side.
//!
//! ```bash
//! cargo run -p fogplace --example compare_policies
//! ```

use fogplace::engine::{simulate, EngineConfig};
use fogplace::metrics::{assemble_report, HopMode};
use fogplace::scenarios::build_cell;
use fogplace::{run_edgewards, run_pop};

fn main() {
    let scenario = build_cell(2, 2, 2, 2).unwrap();
    println!("scenario {}", scenario.meta().name);
    println!("{:<22} {:>12} {:>12}", "metric", "pop", "edgewards");

    let mut reports = Vec::new();
    for state in [run_pop(&scenario), run_edgewards(&scenario)] {
        let trace = simulate(&scenario, &state, &EngineConfig::default()).unwrap();
        reports.push(assemble_report(&scenario, &state, &trace, HopMode::PerPair).unwrap());
    }
    let (pop, edge) = (&reports[0], &reports[1]);

    println!(
        "{:<22} {:>12.4} {:>12.4}",
        "weighted hop", pop.weighted_hop, edge.weighted_hop
    );
    println!(
        "{:<22} {:>12.4} {:>12.4}",
        "arithmetic hop", pop.arithmetic_hop, edge.arithmetic_hop
    );
    println!(
        "{:<22} {:>12.2} {:>12.2}",
        "network usage", pop.network_usage, edge.network_usage
    );
    for (app, latency) in &pop.loop_latency_per_app {
        println!(
            "{:<22} {:>12.3} {:>12.3}",
            format!("loop latency {}", scenario.app(*app).name()),
            latency,
            edge.loop_latency_per_app[app]
        );
    }
    println!(
        "{:<22} {:>12} {:>12}",
        "migrations", pop.migrations, edge.migrations
    );
}
