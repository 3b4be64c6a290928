//! Run the popularity-driven placement on one grid cell and show where
//! every service instance landed, plus the migration log.
//!
//! ```bash
//! cargo run -p fogplace --example run_pop
//! ```

use fogplace::model::resource_usage;
use fogplace::placement::MigrationTrigger;
use fogplace::policy::pop;
use fogplace::scenarios::build_cell;

fn main() {
    let scenario = build_cell(2, 2, 2, 2).unwrap();
    let (state, stats) = pop::run_with_stats(&scenario);

    println!(
        "scenario {}: {} clients, {} placed instances, {:?}",
        scenario.meta().name,
        scenario.client_count(),
        state.instance_count(),
        stats
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

    println!("migration log:");
    for record in state.migration_log() {
        if record.trigger == MigrationTrigger::Initial {
            continue;
        }
        let app = scenario.app(record.app);
        println!(
            "  {} {}/{} {} -> {}",
            record.trigger,
            app.name(),
            app.service_name(record.service),
            record.from.map(|d| d.to_string()).unwrap_or_default(),
            record.to
        );
    }
}
