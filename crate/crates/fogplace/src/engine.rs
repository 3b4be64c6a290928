//! Steady-state request-flow evaluation of a placement.
//!
//! Instead of an event-driven queueing model, the engine propagates request
//! rates: each client's requests resolve to the first instance on its
//! gateway-to-cloud path, every app edge forwards its upstream rate times
//! the edge selectivity, and every inter-device hop becomes a link transfer.
//! Processing time uses the hosting device's full capacity (no sharing), so
//! the whole evaluation is a pure function of (scenario, placement).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{AppId, ClientId, DeviceId, InstanceId, Scenario, ServiceId, Topology};
use crate::placement::PlacementState;

/// Evaluation knobs. Defaults measure the fog network only: request-direction
/// traffic between fog devices (and to the cloud), no client ingress links.
#[derive(Debug, Clone)]
pub struct EngineConfig {
    /// Count client-to-gateway ingress in the trace and in network usage.
    pub include_ingress: bool,
    /// Mirror every request transfer with a response of the same size.
    pub mirror_responses: bool,
    /// Latency assumed for client ingress links when they are included.
    pub client_link_latency_ms: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            include_ingress: false,
            mirror_responses: false,
            client_link_latency_ms: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferKind {
    Request,
    Response,
}

impl std::fmt::Display for TransferKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TransferKind::Request => write!(f, "request"),
            TransferKind::Response => write!(f, "response"),
        }
    }
}

/// One directed flow over one link: `rate_per_ms` messages of `bytes` each.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkTransfer {
    pub from: DeviceId,
    pub to: DeviceId,
    pub latency_ms: f64,
    pub bytes: f64,
    pub rate_per_ms: f64,
    pub kind: TransferKind,
}

/// Client-to-gateway ingress flow (tracked separately: clients are not
/// topology devices).
#[derive(Debug, Clone, PartialEq)]
pub struct IngressTransfer {
    pub client: ClientId,
    pub gateway: DeviceId,
    pub latency_ms: f64,
    pub bytes: f64,
    pub rate_per_ms: f64,
}

/// Everything the flow model observes for one (scenario, placement) pair.
#[derive(Debug, Clone, Default)]
pub struct FlowTrace {
    pub link_transfers: Vec<LinkTransfer>,
    pub ingress: Vec<IngressTransfer>,
    /// Arrival rate at each placed instance, requests per ms.
    pub per_instance_load: BTreeMap<InstanceId, f64>,
    /// Loop latency per (app, loop index); filled for apps that declare one.
    pub loop_latencies: BTreeMap<(AppId, u32), f64>,
}

/// An ordered service chain whose end-to-end time defines an app's latency.
#[derive(Debug, Clone)]
pub struct LoopSpec {
    pub app: AppId,
    pub services: Vec<ServiceId>,
}

/// The device that serves `client`'s requests for `service`: the first
/// device on the client's gateway-to-cloud path hosting an instance.
pub fn resolve_instance(
    scenario: &Scenario,
    placement: &PlacementState,
    client: ClientId,
    service: ServiceId,
) -> Result<DeviceId> {
    let app = scenario.client(client).app;
    scenario
        .client_path(client)
        .iter()
        .find(|d| placement.instance_at(**d, app, service).is_some())
        .copied()
        .ok_or(Error::CoverageViolation {
            client,
            app,
            service,
        })
}

/// Shortest-path router with a memo, shared across one simulation.
struct Router<'a> {
    topology: &'a Topology,
    routes: BTreeMap<(DeviceId, DeviceId), Vec<DeviceId>>,
}

impl<'a> Router<'a> {
    fn new(topology: &'a Topology) -> Self {
        Self {
            topology,
            routes: BTreeMap::new(),
        }
    }

    fn route(&mut self, from: DeviceId, to: DeviceId) -> &[DeviceId] {
        self.routes.entry((from, to)).or_insert_with(|| {
            self.topology
                .route(from, to)
                .expect("devices are connected")
        })
    }

    fn latency(&mut self, from: DeviceId, to: DeviceId) -> f64 {
        let route = self.route(from, to).to_vec();
        route
            .windows(2)
            .map(|pair| {
                self.topology
                    .link_latency(pair[0], pair[1])
                    .expect("adjacent")
            })
            .sum()
    }
}

/// Propagate every client's request flow through its app and collect link
/// transfers, instance loads, and loop latencies.
pub fn simulate(
    scenario: &Scenario,
    placement: &PlacementState,
    config: &EngineConfig,
) -> Result<FlowTrace> {
    let mut trace = FlowTrace::default();
    let mut router = Router::new(scenario.topology());

    for client in scenario.clients() {
        let app = scenario.app(client.app);
        let entry = app.entry();
        let entry_rate = client.entry_rate;

        let mut resolved: BTreeMap<ServiceId, DeviceId> = BTreeMap::new();
        for service in app.services() {
            resolved.insert(
                *service,
                resolve_instance(scenario, placement, client.id, *service)?,
            );
        }

        if config.include_ingress {
            trace.ingress.push(IngressTransfer {
                client: client.id,
                gateway: client.gateway,
                latency_ms: config.client_link_latency_ms,
                bytes: app.entry_bytes(),
                rate_per_ms: entry_rate,
            });
        }

        // Entry leg: the request enters at the gateway and travels to the
        // entry's instance.
        emit(
            &mut trace,
            &mut router,
            client.gateway,
            resolved[&entry],
            app.entry_bytes(),
            entry_rate,
            config.mirror_responses,
        );

        for edge in app.edges() {
            let rate = scenario.client_service_rate(client.id, edge.from) * edge.selectivity;
            if rate == 0.0 {
                continue;
            }
            emit(
                &mut trace,
                &mut router,
                resolved[&edge.from],
                resolved[&edge.to],
                edge.bytes,
                rate,
                config.mirror_responses,
            );
        }

        for service in app.services() {
            let arrival = scenario.client_service_rate(client.id, *service);
            if arrival == 0.0 {
                continue;
            }
            let instance = placement
                .instance_at(resolved[service], client.app, *service)
                .expect("resolved devices host the service");
            *trace.per_instance_load.entry(instance).or_insert(0.0) += arrival;
        }
    }

    for app in scenario.apps() {
        if app.loop_services().is_empty() {
            continue;
        }
        let spec = LoopSpec {
            app: app.id(),
            services: app.loop_services().to_vec(),
        };
        let latency = loop_latency(scenario, placement, &spec)?;
        trace.loop_latencies.insert((app.id(), 0), latency);
    }

    Ok(trace)
}

fn emit(
    trace: &mut FlowTrace,
    router: &mut Router<'_>,
    from: DeviceId,
    to: DeviceId,
    bytes: f64,
    rate: f64,
    mirror: bool,
) {
    if from == to {
        return;
    }
    let route = router.route(from, to).to_vec();
    for pair in route.windows(2) {
        let latency = router
            .topology
            .link_latency(pair[0], pair[1])
            .expect("route hops are adjacent");
        trace.link_transfers.push(LinkTransfer {
            from: pair[0],
            to: pair[1],
            latency_ms: latency,
            bytes,
            rate_per_ms: rate,
            kind: TransferKind::Request,
        });
        if mirror {
            trace.link_transfers.push(LinkTransfer {
                from: pair[1],
                to: pair[0],
                latency_ms: latency,
                bytes,
                rate_per_ms: rate,
                kind: TransferKind::Response,
            });
        }
    }
}

/// Mean end-to-end time of one loop execution, averaged over the clients of
/// the loop's app weighted by their entry rates: per-service processing time
/// (demand over device capacity, zero at the cloud) plus the path latency
/// between consecutive resolved instances.
pub fn loop_latency(
    scenario: &Scenario,
    placement: &PlacementState,
    spec: &LoopSpec,
) -> Result<f64> {
    let app = scenario.app(spec.app);
    let mut router = Router::new(scenario.topology());
    let mut weighted = 0.0;
    let mut total_rate = 0.0;

    for client in scenario.clients().filter(|c| c.app == spec.app) {
        let mut time = 0.0;
        let mut previous: Option<DeviceId> = None;
        for service in &spec.services {
            let device = resolve_instance(scenario, placement, client.id, *service)?;
            if let Some(prev) = previous {
                time += router.latency(prev, device);
            }
            let cpu = scenario
                .topology()
                .device(device)
                .expect("resolved devices exist")
                .cpu;
            if !cpu.is_unlimited() {
                time += app.cpu_demand(*service) / cpu.mips();
            }
            previous = Some(device);
        }
        weighted += client.entry_rate * time;
        total_rate += client.entry_rate;
    }

    if total_rate == 0.0 {
        return Ok(0.0);
    }
    Ok(weighted / total_rate)
}

/// Network usage over the simulation window: for every transfer, link
/// latency times message size, summed over all messages sent during the
/// window, divided by the window length.
pub fn network_usage(trace: &FlowTrace, simulation_time_ms: f64) -> f64 {
    assert!(simulation_time_ms > 0.0, "simulation time must be positive");
    let mut total = 0.0;
    for t in &trace.link_transfers {
        total += t.latency_ms * t.bytes * (t.rate_per_ms * simulation_time_ms);
    }
    for t in &trace.ingress {
        total += t.latency_ms * t.bytes * (t.rate_per_ms * simulation_time_ms);
    }
    total / simulation_time_ms
}
