//! Evaluate a placement with the steady-state flow engine: link transfers,
//! per-instance loads, network usage, and loop latencies.
//!
//! ```bash
//! cargo run -p fogplace --example simulate_flows
//! ```

use fogplace::engine::{network_usage, simulate, EngineConfig};
use fogplace::run_pop;
use fogplace::scenarios::build_cell;

fn main() {
    let scenario = build_cell(3, 2, 2, 2).unwrap();
    let state = run_pop(&scenario);
    let trace = simulate(&scenario, &state, &EngineConfig::default()).unwrap();

    println!(
        "{}: {} link transfers, network usage {:.2}",
        scenario.meta().name,
        trace.link_transfers.len(),
        network_usage(&trace, scenario.simulation_time_ms())
    );

    // Aggregate per link for a readable picture.
    let mut per_link: std::collections::BTreeMap<(u32, u32), (f64, f64)> = Default::default();
    for t in &trace.link_transfers {
        let entry = per_link.entry((t.from.0, t.to.0)).or_insert((0.0, 0.0));
        entry.0 += t.rate_per_ms;
        entry.1 += t.latency_ms * t.bytes * t.rate_per_ms;
    }
    for ((from, to), (rate, usage)) in per_link {
        println!("  link {from} -> {to}: {rate:.3} req/ms, usage {usage:.2}");
    }

    for ((app, _), latency) in &trace.loop_latencies {
        println!(
            "  loop latency {}: {latency:.3} ms",
            scenario.app(*app).name()
        );
    }

    // Responses can be mirrored and client ingress included when the study
    // calls for it.
    let config = EngineConfig {
        mirror_responses: true,
        include_ingress: true,
        client_link_latency_ms: 1.0,
    };
    let trace = simulate(&scenario, &state, &config).unwrap();
    println!(
        "with mirrored responses + ingress: usage {:.2}",
        network_usage(&trace, scenario.simulation_time_ms())
    );
}
