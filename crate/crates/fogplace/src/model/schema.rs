//! Scenario file format: a JSON document describing the topology, the apps,
//! and the clients. Unknown keys are rejected everywhere.
//!
//! ```json
//! {
//!   "topology": { "tree": { "levels": 2, "children": 2 } },
//!   "apps": [
//!     {
//!       "name": "shop",
//!       "services": ["edge", "frontend"],
//!       "entry": "edge",
//!       "edges": [
//!         { "from": "edge", "to": "frontend", "cpu_mi": 1000.0,
//!           "bytes": 10.0, "selectivity": 1.0 }
//!       ],
//!       "loop": ["edge", "frontend"]
//!     }
//!   ],
//!   "clients": [
//!     { "gateway": 3, "app": "shop", "rate_req_per_ms": 0.1 }
//!   ],
//!   "simulation_time_ms": 10000.0
//! }
//! ```
//!
//! Topologies are either generated trees (`"tree"`) or explicit device/link
//! lists (`"explicit"`). In explicit topologies the cloud is the device with
//! `"cloud": true` and must omit `cpu_mips` (its capacity is unlimited).

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{
    AppId, AppModel, Client, ClientId, CpuCapacity, Device, DeviceId, Link, Scenario, ScenarioMeta,
    ServiceEdge, ServiceId, Topology, TreeLinkConfig,
};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    topology: TopologySpec,
    apps: Vec<AppSpec>,
    clients: Vec<ClientSpec>,
    simulation_time_ms: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
enum TopologySpec {
    Tree(TreeSpec),
    Explicit(ExplicitSpec),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeSpec {
    levels: u32,
    children: u32,
    #[serde(default = "default_fog_cpu")]
    fog_cpu_mips: f64,
    #[serde(default = "default_fog_ram")]
    fog_ram_mb: f64,
    #[serde(default = "default_fog_latency")]
    fog_link_latency_ms: f64,
    #[serde(default = "default_cloud_latency")]
    cloud_link_latency_ms: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitSpec {
    devices: Vec<DeviceSpec>,
    links: Vec<LinkSpec>,
    gateways: Vec<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeviceSpec {
    id: u32,
    #[serde(default)]
    cloud: bool,
    /// Required for fog devices; must be omitted for the cloud.
    #[serde(default)]
    cpu_mips: Option<f64>,
    #[serde(default = "default_fog_ram")]
    ram_mb: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkSpec {
    a: u32,
    b: u32,
    latency_ms: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AppSpec {
    name: String,
    services: Vec<String>,
    entry: String,
    #[serde(default = "default_cpu_mi")]
    entry_cpu_mi: f64,
    #[serde(default = "default_bytes")]
    entry_bytes: f64,
    edges: Vec<EdgeSpec>,
    #[serde(default, rename = "loop")]
    loop_services: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeSpec {
    from: String,
    to: String,
    #[serde(default = "default_cpu_mi")]
    cpu_mi: f64,
    #[serde(default = "default_bytes")]
    bytes: f64,
    #[serde(default = "default_selectivity")]
    selectivity: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClientSpec {
    gateway: u32,
    app: String,
    rate_req_per_ms: f64,
}

fn default_fog_cpu() -> f64 {
    2800.0
}
fn default_fog_ram() -> f64 {
    4000.0
}
fn default_fog_latency() -> f64 {
    2.0
}
fn default_cloud_latency() -> f64 {
    100.0
}
fn default_cpu_mi() -> f64 {
    1000.0
}
fn default_bytes() -> f64 {
    10.0
}
fn default_selectivity() -> f64 {
    1.0
}

/// Parse a scenario from JSON text. `name` seeds the scenario metadata.
pub fn scenario_from_json(json: &str, name: &str) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(json)?;
    build(file, name)
}

/// Load a scenario file from disk. The file stem becomes the scenario name.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("scenario");
    scenario_from_json(&text, name)
}

fn build(file: ScenarioFile, name: &str) -> Result<Scenario> {
    let topology = match file.topology {
        TopologySpec::Tree(tree) => Topology::build_tree(
            tree.levels,
            tree.children,
            &TreeLinkConfig {
                fog_cpu_mips: tree.fog_cpu_mips,
                fog_ram_mb: tree.fog_ram_mb,
                fog_link_latency_ms: tree.fog_link_latency_ms,
                cloud_link_latency_ms: tree.cloud_link_latency_ms,
            },
        )?,
        TopologySpec::Explicit(spec) => {
            let mut devices = Vec::new();
            for d in spec.devices {
                let cpu = if d.cloud {
                    if d.cpu_mips.is_some() {
                        return Err(Error::InvalidTopology(format!(
                            "device {}: the cloud's capacity is unlimited, omit cpu_mips",
                            d.id
                        )));
                    }
                    CpuCapacity::Unlimited
                } else {
                    CpuCapacity::Finite(d.cpu_mips.ok_or_else(|| {
                        Error::InvalidTopology(format!("device {}: cpu_mips is required", d.id))
                    })?)
                };
                devices.push(Device {
                    id: DeviceId(d.id),
                    cpu,
                    ram_mb: d.ram_mb,
                    uplink_latency_ms: 0.0,
                    is_cloud: d.cloud,
                    level: 0,
                });
            }
            let links = spec
                .links
                .iter()
                .map(|l| Link {
                    a: DeviceId(l.a),
                    b: DeviceId(l.b),
                    latency_ms: l.latency_ms,
                })
                .collect();
            let gateways = spec.gateways.iter().map(|g| DeviceId(*g)).collect();
            let mut topology = Topology::new(devices, links, gateways)?;
            // Fill uplink latencies from the computed fathers.
            let uplinks: Vec<(DeviceId, f64)> = topology
                .devices()
                .filter(|d| !d.is_cloud)
                .map(|d| {
                    let father = topology.father(d.id).expect("validated");
                    (d.id, topology.link_latency(d.id, father).expect("adjacent"))
                })
                .collect();
            topology = topology.with_uplinks(&uplinks);
            topology
        }
    };

    let mut apps = Vec::new();
    let mut app_ids: std::collections::BTreeMap<String, AppId> = Default::default();
    let mut next_service = 0u32;
    for (i, spec) in file.apps.into_iter().enumerate() {
        let app_id = AppId(i as u32);
        if app_ids.insert(spec.name.clone(), app_id).is_some() {
            return Err(Error::InvalidScenario(format!(
                "duplicate app name {:?}",
                spec.name
            )));
        }
        let mut by_name: std::collections::BTreeMap<String, ServiceId> = Default::default();
        let mut services = Vec::new();
        for service_name in &spec.services {
            let sid = ServiceId(next_service);
            next_service += 1;
            if by_name.insert(service_name.clone(), sid).is_some() {
                return Err(Error::InvalidApp(format!(
                    "app {}: duplicate service name {service_name:?}",
                    spec.name
                )));
            }
            services.push((sid, service_name.clone()));
        }
        let resolve = |n: &str| -> Result<ServiceId> {
            by_name.get(n).copied().ok_or_else(|| {
                Error::InvalidApp(format!("app {}: unknown service {n:?}", spec.name))
            })
        };
        let entry = resolve(&spec.entry)?;
        let mut edges = Vec::new();
        for e in &spec.edges {
            edges.push(ServiceEdge {
                from: resolve(&e.from)?,
                to: resolve(&e.to)?,
                cpu_mi: e.cpu_mi,
                bytes: e.bytes,
                selectivity: e.selectivity,
            });
        }
        let mut app = AppModel::new(app_id, spec.name.clone(), services, entry, edges)?
            .with_ingress(spec.entry_cpu_mi, spec.entry_bytes)?;
        if !spec.loop_services.is_empty() {
            let loop_ids = spec
                .loop_services
                .iter()
                .map(|n| resolve(n))
                .collect::<Result<Vec<_>>>()?;
            app = app.with_loop(loop_ids)?;
        }
        apps.push(app);
    }

    let mut clients = Vec::new();
    for (i, spec) in file.clients.into_iter().enumerate() {
        let app = *app_ids.get(&spec.app).ok_or_else(|| {
            Error::InvalidScenario(format!("client {i} requests unknown app {:?}", spec.app))
        })?;
        clients.push(Client {
            id: ClientId(i as u32),
            gateway: DeviceId(spec.gateway),
            app,
            entry_rate: spec.rate_req_per_ms,
        });
    }

    Scenario::new(
        topology,
        apps,
        clients,
        file.simulation_time_ms,
        ScenarioMeta::named(name),
    )
}
