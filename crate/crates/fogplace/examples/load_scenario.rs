//! Load a scenario from its JSON description — here the bundled Sock Shop
//! file — and evaluate it.
//!
//! ```bash
//! cargo run -p fogplace --example load_scenario
//! cargo run -p fogplace --example load_scenario -- path/to/scenario.json
//! ```

use fogplace::engine::{network_usage, simulate, EngineConfig};
use fogplace::model::{load_scenario, scenario_from_json};
use fogplace::run_pop;
use fogplace::scenarios::SOCK_SHOP_SCENARIO_JSON;

fn main() {
    let scenario = match std::env::args().nth(1) {
        Some(path) => load_scenario(&path).expect("scenario file must parse"),
        None => scenario_from_json(SOCK_SHOP_SCENARIO_JSON, "sock_shop").unwrap(),
    };

    println!(
        "loaded {}: {} devices, {} apps, {} clients, window {} ms",
        scenario.meta().name,
        scenario.topology().device_count(),
        scenario.apps().count(),
        scenario.client_count(),
        scenario.simulation_time_ms()
    );
    for app in scenario.apps() {
        println!(
            "  app {}: {} services, entry {}",
            app.name(),
            app.services().len(),
            app.service_name(app.entry())
        );
    }

    let state = run_pop(&scenario);
    let trace = simulate(&scenario, &state, &EngineConfig::default()).unwrap();
    println!(
        "pop placement: {} instances, network usage {:.2}",
        state.instance_count(),
        network_usage(&trace, scenario.simulation_time_ms())
    );
}
