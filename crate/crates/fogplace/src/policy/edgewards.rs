//! First-in-first-allocated baseline in the style of iFogSim's Edgewards
//! placement.
//!
//! Paths are processed gateway by gateway (ascending id). For each app
//! requested at the gateway, services are walked in topological order from
//! the entry and placed on the lowest path device with enough headroom. A
//! capacity refusal moves the placement cursor one device up — and the
//! cursor never comes back down, so every service downstream of a refused
//! one starts from the raised floor.
//!
//! Instances are merged across paths: a path that finds an existing instance
//! of a service at or above its cursor reuses it, even when lower devices
//! still have room. An instance stranded *below* the cursor is migrated up
//! to the cursor's level so the execution flow never descends.

use std::collections::BTreeSet;

use crate::model::{resource_usage, AppId, DeviceId, Scenario, ServiceId};
use crate::placement::{MigrationRecord, MigrationTrigger, PlacementState};

/// Place every app along every client path, first-in-first-allocated.
pub fn run(scenario: &Scenario) -> PlacementState {
    let mut state = PlacementState::new();
    let topology = scenario.topology();

    // Gateways that actually serve clients, ascending; each with the apps
    // requested there, ascending.
    let mut gateways: BTreeSet<DeviceId> = BTreeSet::new();
    for client in scenario.clients() {
        gateways.insert(client.gateway);
    }

    for gateway in gateways {
        let mut path = vec![gateway];
        path.extend(
            topology
                .shortest_path_to_cloud(gateway)
                .expect("scenario gateways reach the cloud"),
        );
        let apps: BTreeSet<AppId> = scenario
            .clients()
            .filter(|c| c.gateway == gateway)
            .map(|c| c.app)
            .collect();

        for app_id in apps {
            let app = scenario.app(app_id);
            let mut cursor = 0usize;
            for service in app.topo_order().to_vec() {
                cursor = place_service(scenario, &mut state, &path, cursor, app_id, service);
            }
        }
    }
    state
}

/// Place one service along `path` starting at `cursor`; returns the new
/// cursor (the index the service ended up on).
fn place_service(
    scenario: &Scenario,
    state: &mut PlacementState,
    path: &[DeviceId],
    cursor: usize,
    app: AppId,
    service: ServiceId,
) -> usize {
    // Reuse an instance at or above the cursor.
    if let Some(offset) = path[cursor..]
        .iter()
        .position(|d| state.instance_at(*d, app, service).is_some())
    {
        return cursor + offset;
    }

    // An instance below the cursor is merged upward: it moves to the lowest
    // feasible device at or above the cursor.
    if let Some(below) = path[..cursor]
        .iter()
        .position(|d| state.instance_at(*d, app, service).is_some())
    {
        let old_device = path[below];
        let instance = state
            .instance_at(old_device, app, service)
            .expect("just found");
        state.deallocate(instance);
        let target = lowest_feasible(scenario, state, path, cursor, app, service);
        state.record(MigrationRecord {
            instance,
            app,
            service,
            from: Some(old_device),
            to: path[target],
            trigger: MigrationTrigger::Evicted,
        });
        state.allocate(instance, app, service, path[target]);
        return target;
    }

    // Fresh placement: climb from the cursor until a device admits it,
    // logging one shift per refused device.
    let instance = state.new_instance();
    let mut at = cursor;
    while !fits(scenario, state, path[at], app, service) {
        state.record(MigrationRecord {
            instance,
            app,
            service,
            from: Some(path[at]),
            to: path[at + 1],
            trigger: MigrationTrigger::Shifted,
        });
        at += 1;
    }
    if at == cursor {
        state.record(MigrationRecord {
            instance,
            app,
            service,
            from: None,
            to: path[at],
            trigger: MigrationTrigger::Initial,
        });
    }
    state.allocate(instance, app, service, path[at]);
    at
}

fn lowest_feasible(
    scenario: &Scenario,
    state: &PlacementState,
    path: &[DeviceId],
    from: usize,
    app: AppId,
    service: ServiceId,
) -> usize {
    (from..path.len())
        .find(|idx| fits(scenario, state, path[*idx], app, service))
        .expect("the cloud admits everything")
}

fn fits(
    scenario: &Scenario,
    state: &PlacementState,
    device: DeviceId,
    app: AppId,
    service: ServiceId,
) -> bool {
    let info = scenario
        .topology()
        .device(device)
        .expect("path devices exist");
    if info.is_cloud {
        return true;
    }
    let demand =
        scenario.app(app).cpu_demand(service) * scenario.device_request_rate(device, app, service);
    let used = resource_usage(scenario, state, device).cpu_used_mips;
    demand < info.cpu.headroom(used)
}
