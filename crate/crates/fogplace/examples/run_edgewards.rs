//! Run the Edgewards-style baseline on the same cell as the `run_pop`
//! example, for a side-by-side look at its path-walking placement.
//!
//! ```bash
//! cargo run -p fogplace --example run_edgewards
//! ```

use fogplace::model::resource_usage;
use fogplace::run_edgewards;
use fogplace::scenarios::build_cell;

fn main() {
    let scenario = build_cell(2, 2, 2, 2).unwrap();
    let state = run_edgewards(&scenario);

    println!(
        "scenario {}: {} placed instances",
        scenario.meta().name,
        state.instance_count()
    );
    for device in scenario.topology().devices() {
        let services = state.services_on(device.id);
        if services.is_empty() {
            continue;
        }
        let usage = resource_usage(&scenario, &state, device.id).cpu_used_mips;
        let labels: Vec<String> = services
            .iter()
            .map(|(a, s)| {
                format!(
                    "{}/{}",
                    scenario.app(*a).name(),
                    scenario.app(*a).service_name(*s)
                )
            })
            .collect();
        println!(
            "device {} (level {}): {:.0} MIPS used — {}",
            device.id,
            device.level,
            usage,
            labels.join(", ")
        );
    }
    println!("migrations: {}", fogplace::metrics::migration_count(&state));
}
