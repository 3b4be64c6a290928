//! A scenario bundles one topology, a set of applications, and the clients
//! requesting them — the complete input to a placement policy.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{AppId, AppModel, ClientId, DeviceId, ServiceId, Topology};
use crate::placement::PlacementState;

/// A client attached to one gateway, requesting one application's entry
/// service at a fixed rate (requests per ms).
#[derive(Debug, Clone)]
pub struct Client {
    pub id: ClientId,
    pub gateway: DeviceId,
    pub app: AppId,
    pub entry_rate: f64,
}

/// Where a scenario came from: its name and, for generated sweep cells, the
/// grid coordinates. Echoed into every report row.
#[derive(Debug, Clone, Default)]
pub struct ScenarioMeta {
    pub name: String,
    pub users: Option<u32>,
    pub apps: Option<u32>,
    pub levels: Option<u32>,
    pub children: Option<u32>,
}

impl ScenarioMeta {
    pub fn named(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }
}

/// CPU load on a device, in MIPS (MI/ms).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResourceUsage {
    pub cpu_used_mips: f64,
}

/// Validated simulation input. Construction checks cross-references and
/// precomputes the request-rate tables, so everything downstream can treat
/// rates as cheap lookups.
///
/// Request rates are static over the full client population: the rate a
/// device sees for a service is the sum over all clients whose shortest path
/// to the cloud crosses that device, regardless of where instances end up.
#[derive(Debug, Clone)]
pub struct Scenario {
    topology: Topology,
    apps: BTreeMap<AppId, AppModel>,
    clients: BTreeMap<ClientId, Client>,
    simulation_time_ms: f64,
    meta: ScenarioMeta,
    // Derived.
    client_rates: BTreeMap<(ClientId, ServiceId), f64>,
    device_rates: BTreeMap<(DeviceId, AppId, ServiceId), f64>,
    client_paths: BTreeMap<ClientId, Vec<DeviceId>>,
}

impl Scenario {
    pub fn new(
        topology: Topology,
        apps: Vec<AppModel>,
        clients: Vec<Client>,
        simulation_time_ms: f64,
        meta: ScenarioMeta,
    ) -> Result<Self> {
        if !(simulation_time_ms > 0.0 && simulation_time_ms.is_finite()) {
            return Err(Error::InvalidScenario(
                "simulation time must be positive".into(),
            ));
        }

        let mut app_map = BTreeMap::new();
        let mut service_owner: BTreeMap<ServiceId, AppId> = BTreeMap::new();
        for app in apps {
            for service in app.services() {
                if let Some(other) = service_owner.insert(*service, app.id()) {
                    return Err(Error::InvalidScenario(format!(
                        "service id {service} appears in both app {other} and app {}",
                        app.id()
                    )));
                }
            }
            let id = app.id();
            if app_map.insert(id, app).is_some() {
                return Err(Error::InvalidScenario(format!("duplicate app id {id}")));
            }
        }

        let mut client_map = BTreeMap::new();
        for client in clients {
            if !app_map.contains_key(&client.app) {
                return Err(Error::InvalidScenario(format!(
                    "client {} requests unknown app {}",
                    client.id, client.app
                )));
            }
            if !topology.gateways().contains(&client.gateway) {
                return Err(Error::InvalidScenario(format!(
                    "client {} is attached to {}, which is not a gateway",
                    client.id, client.gateway
                )));
            }
            if !(client.entry_rate >= 0.0 && client.entry_rate.is_finite()) {
                return Err(Error::InvalidScenario(format!(
                    "client {} has an invalid request rate",
                    client.id
                )));
            }
            let id = client.id;
            if client_map.insert(id, client).is_some() {
                return Err(Error::InvalidScenario(format!("duplicate client id {id}")));
            }
        }

        let mut scenario = Self {
            topology,
            apps: app_map,
            clients: client_map,
            simulation_time_ms,
            meta,
            client_rates: BTreeMap::new(),
            device_rates: BTreeMap::new(),
            client_paths: BTreeMap::new(),
        };
        scenario.index_rates()?;
        Ok(scenario)
    }

    fn index_rates(&mut self) -> Result<()> {
        for (cid, client) in &self.clients {
            let app = &self.apps[&client.app];
            let mut path = vec![client.gateway];
            path.extend(self.topology.shortest_path_to_cloud(client.gateway)?);
            for service in app.services() {
                let rate = app.rate_per_entry(*service) * client.entry_rate;
                self.client_rates.insert((*cid, *service), rate);
                for device in &path {
                    *self
                        .device_rates
                        .entry((*device, client.app, *service))
                        .or_insert(0.0) += rate;
                }
            }
            self.client_paths.insert(*cid, path);
        }
        Ok(())
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn apps(&self) -> impl Iterator<Item = &AppModel> {
        self.apps.values()
    }

    pub fn app(&self, id: AppId) -> &AppModel {
        &self.apps[&id]
    }

    pub fn clients(&self) -> impl Iterator<Item = &Client> {
        self.clients.values()
    }

    pub fn client(&self, id: ClientId) -> &Client {
        &self.clients[&id]
    }

    pub fn client_count(&self) -> usize {
        self.clients.len()
    }

    pub fn simulation_time_ms(&self) -> f64 {
        self.simulation_time_ms
    }

    pub fn meta(&self) -> &ScenarioMeta {
        &self.meta
    }

    /// Requests per ms that `device` observes for `service`: the sum over
    /// all clients whose gateway-to-cloud path contains the device.
    pub fn device_request_rate(&self, device: DeviceId, app: AppId, service: ServiceId) -> f64 {
        self.device_rates
            .get(&(device, app, service))
            .copied()
            .unwrap_or(0.0)
    }

    /// Requests per ms that one client generates for `service`, derived from
    /// its entry rate through the app's edge selectivities.
    pub fn client_service_rate(&self, client: ClientId, service: ServiceId) -> f64 {
        self.client_rates
            .get(&(client, service))
            .copied()
            .unwrap_or(0.0)
    }

    /// The client's gateway-to-cloud path, gateway first, cloud last.
    pub fn client_path(&self, client: ClientId) -> &[DeviceId] {
        &self.client_paths[&client]
    }

    /// 1-based position of `device` on the client's path (gateway = 1, the
    /// cloud = number of path devices). `None` when off the path.
    pub fn hop_of(&self, client: ClientId, device: DeviceId) -> Option<u32> {
        self.client_paths[&client]
            .iter()
            .position(|d| *d == device)
            .map(|idx| idx as u32 + 1)
    }
}

/// Total CPU load on `device` under `placement`: the sum over its hosted
/// services of per-invocation demand times the device request rate.
/// Recomputed from scratch on every call — there is no cached state to go
/// stale when the placement changes.
pub fn resource_usage(
    scenario: &Scenario,
    placement: &PlacementState,
    device: DeviceId,
) -> ResourceUsage {
    let mut cpu_used_mips = 0.0;
    for (app_id, service) in placement.services_on(device) {
        let app = scenario.app(app_id);
        cpu_used_mips +=
            app.cpu_demand(service) * scenario.device_request_rate(device, app_id, service);
    }
    ResourceUsage { cpu_used_mips }
}
