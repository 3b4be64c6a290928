//! Sweep all four grid axes (users, apps, levels, children) and print one
//! comparison line per cell.
//!
//! ```bash
//! cargo run -p fogplace --example sweep_grid
//! ```

use fogplace::engine::{network_usage, simulate, EngineConfig};
use fogplace::metrics::{migration_count, weighted_hop_count};
use fogplace::scenarios::{generate_grid, SweepAxis, SweepSpec};
use fogplace::{run_edgewards, run_pop};

fn main() {
    println!(
        "{:<42} {:>9} {:>9} {:>11} {:>11} {:>5} {:>5}",
        "cell", "w-hop p", "w-hop e", "usage p", "usage e", "mig p", "mig e"
    );
    for axis in SweepAxis::all() {
        for scenario in generate_grid(&SweepSpec::new(axis)).unwrap() {
            let pop = run_pop(&scenario);
            let edge = run_edgewards(&scenario);
            let trace_p = simulate(&scenario, &pop, &EngineConfig::default()).unwrap();
            let trace_e = simulate(&scenario, &edge, &EngineConfig::default()).unwrap();
            println!(
                "{:<42} {:>9.4} {:>9.4} {:>11.2} {:>11.2} {:>5} {:>5}",
                scenario.meta().name,
                weighted_hop_count(&scenario, &pop).unwrap(),
                weighted_hop_count(&scenario, &edge).unwrap(),
                network_usage(&trace_p, scenario.simulation_time_ms()),
                network_usage(&trace_e, scenario.simulation_time_ms()),
                migration_count(&pop),
                migration_count(&edge),
            );
        }
    }
}
