//! Application model: a DAG of services joined by consumption edges, plus
//! the derived per-service request rates and CPU demands.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{AppId, ServiceId};

/// A consumption edge: every invocation of `from` triggers `selectivity`
/// invocations of `to`, each carrying `bytes` over the network and costing
/// `cpu_mi` million instructions at the device hosting `to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceEdge {
    pub from: ServiceId,
    pub to: ServiceId,
    pub cpu_mi: f64,
    pub bytes: f64,
    pub selectivity: f64,
}

/// A microservice application: a directed acyclic graph of services reached
/// from a single entry service that clients request directly.
///
/// Requests enter through `entry` at the client's rate; the ingress carries
/// `entry_cpu_mi` of work and `entry_bytes` on the wire, mirroring how an
/// app edge feeds every other service. Internal rates follow from edge
/// selectivities: the rate of a service is the sum over its incoming edges
/// of the upstream rate times the edge selectivity.
#[derive(Debug, Clone)]
pub struct AppModel {
    id: AppId,
    name: String,
    services: BTreeSet<ServiceId>,
    names: BTreeMap<ServiceId, String>,
    by_name: BTreeMap<String, ServiceId>,
    edges: Vec<ServiceEdge>,
    entry: ServiceId,
    entry_cpu_mi: f64,
    entry_bytes: f64,
    loop_services: Vec<ServiceId>,
    // Derived at construction.
    per_entry_rate: BTreeMap<ServiceId, f64>,
    cpu_demand: BTreeMap<ServiceId, f64>,
    topo_order: Vec<ServiceId>,
}

impl AppModel {
    /// Build and validate an app. Ingress defaults to 1000 MI / 10 bytes;
    /// override with [`AppModel::with_ingress`].
    pub fn new(
        id: AppId,
        name: impl Into<String>,
        services: Vec<(ServiceId, String)>,
        entry: ServiceId,
        edges: Vec<ServiceEdge>,
    ) -> Result<Self> {
        let mut app = Self {
            id,
            name: name.into(),
            services: BTreeSet::new(),
            names: BTreeMap::new(),
            by_name: BTreeMap::new(),
            edges,
            entry,
            entry_cpu_mi: 1000.0,
            entry_bytes: 10.0,
            loop_services: Vec::new(),
            per_entry_rate: BTreeMap::new(),
            cpu_demand: BTreeMap::new(),
            topo_order: Vec::new(),
        };
        for (sid, sname) in services {
            if !app.services.insert(sid) {
                return Err(Error::InvalidApp(format!(
                    "app {}: duplicate service id {sid}",
                    app.name
                )));
            }
            if app.by_name.insert(sname.clone(), sid).is_some() {
                return Err(Error::InvalidApp(format!(
                    "app {}: duplicate service name {sname:?}",
                    app.name
                )));
            }
            app.names.insert(sid, sname);
        }
        app.finalize()?;
        Ok(app)
    }

    /// Set the CPU cost and message size of the client-to-entry ingress.
    pub fn with_ingress(mut self, cpu_mi: f64, bytes: f64) -> Result<Self> {
        self.entry_cpu_mi = cpu_mi;
        self.entry_bytes = bytes;
        self.finalize()?;
        Ok(self)
    }

    /// Declare the service chain whose end-to-end time defines this app's
    /// loop latency. Consecutive services must be joined by edges.
    pub fn with_loop(mut self, loop_services: Vec<ServiceId>) -> Result<Self> {
        self.loop_services = loop_services;
        self.finalize()?;
        Ok(self)
    }

    fn finalize(&mut self) -> Result<()> {
        let label = self.name.clone();
        let fail = |msg: String| Err(Error::InvalidApp(format!("app {label}: {msg}")));

        if self.services.is_empty() {
            return fail("no services".into());
        }
        if !self.services.contains(&self.entry) {
            return fail(format!("entry service {} not declared", self.entry));
        }
        if !(self.entry_cpu_mi > 0.0 && self.entry_cpu_mi.is_finite()) {
            return fail("entry cpu demand must be positive".into());
        }
        if !(self.entry_bytes >= 0.0 && self.entry_bytes.is_finite()) {
            return fail("entry bytes must be non-negative".into());
        }

        self.edges.sort_by_key(|e| (e.from, e.to));
        let mut seen = BTreeSet::new();
        for edge in &self.edges {
            if edge.from == edge.to {
                return fail(format!("self-edge on service {}", edge.from));
            }
            for end in [edge.from, edge.to] {
                if !self.services.contains(&end) {
                    return fail(format!("edge references unknown service {end}"));
                }
            }
            if !seen.insert((edge.from, edge.to)) {
                return fail(format!("duplicate edge {} -> {}", edge.from, edge.to));
            }
            if !(edge.cpu_mi > 0.0 && edge.cpu_mi.is_finite()) {
                return fail(format!(
                    "edge {} -> {} must have positive cpu demand",
                    edge.from, edge.to
                ));
            }
            if !(edge.bytes >= 0.0 && edge.bytes.is_finite()) {
                return fail(format!(
                    "edge {} -> {} must have non-negative bytes",
                    edge.from, edge.to
                ));
            }
            if !(edge.selectivity >= 0.0 && edge.selectivity.is_finite()) {
                return fail(format!(
                    "edge {} -> {} must have non-negative selectivity",
                    edge.from, edge.to
                ));
            }
        }

        // Kahn's algorithm; the ready set is a BTreeSet so ties resolve to
        // ascending service ids.
        let mut indegree: BTreeMap<ServiceId, usize> =
            self.services.iter().map(|s| (*s, 0)).collect();
        for edge in &self.edges {
            *indegree.get_mut(&edge.to).unwrap() += 1;
        }
        let mut ready: BTreeSet<ServiceId> = indegree
            .iter()
            .filter(|(_, deg)| **deg == 0)
            .map(|(s, _)| *s)
            .collect();
        let mut order = Vec::with_capacity(self.services.len());
        while let Some(next) = ready.iter().next().copied() {
            ready.remove(&next);
            order.push(next);
            for edge in self.edges.iter().filter(|e| e.from == next) {
                let deg = indegree.get_mut(&edge.to).unwrap();
                *deg -= 1;
                if *deg == 0 {
                    ready.insert(edge.to);
                }
            }
        }
        if order.len() != self.services.len() {
            return fail("service graph has a cycle".into());
        }
        self.topo_order = order;

        let closure = self.transitive_closure(self.entry);
        if closure.len() != self.services.len() {
            let missing = self
                .services
                .difference(&closure)
                .next()
                .expect("some service is unreachable");
            return fail(format!("service {missing} is not reachable from the entry"));
        }

        // Per-entry rates: one request into the entry propagates through
        // edge selectivities along every DAG path.
        let mut rate: BTreeMap<ServiceId, f64> = self.services.iter().map(|s| (*s, 0.0)).collect();
        rate.insert(self.entry, 1.0);
        for service in self.topo_order.clone() {
            let upstream = rate[&service];
            for edge in self.edges.iter().filter(|e| e.from == service) {
                *rate.get_mut(&edge.to).unwrap() += upstream * edge.selectivity;
            }
        }
        self.per_entry_rate = rate;

        // Per-invocation CPU demand. The entry costs its ingress demand;
        // every other service costs the rate-weighted mean of its incoming
        // edge demands (exact when all incoming edges agree, which is the
        // common configuration).
        let mut demand = BTreeMap::new();
        for service in &self.services {
            let value = if *service == self.entry {
                self.entry_cpu_mi
            } else {
                let incoming: Vec<&ServiceEdge> =
                    self.edges.iter().filter(|e| e.to == *service).collect();
                let weighted: f64 = incoming
                    .iter()
                    .map(|e| self.per_entry_rate[&e.from] * e.selectivity * e.cpu_mi)
                    .sum();
                let total = self.per_entry_rate[service];
                if total > 0.0 {
                    weighted / total
                } else if incoming.is_empty() {
                    0.0
                } else {
                    incoming.iter().map(|e| e.cpu_mi).sum::<f64>() / incoming.len() as f64
                }
            };
            demand.insert(*service, value);
        }
        self.cpu_demand = demand;

        if !self.loop_services.is_empty() {
            if self.loop_services.len() < 2 {
                return fail("a loop needs at least two services".into());
            }
            for pair in self.loop_services.windows(2) {
                if !self
                    .edges
                    .iter()
                    .any(|e| e.from == pair[0] && e.to == pair[1])
                {
                    return fail(format!(
                        "loop services {} -> {} are not joined by an edge",
                        pair[0], pair[1]
                    ));
                }
            }
        }
        Ok(())
    }

    /// All services executed (directly or transitively) when `service` is
    /// requested, including `service` itself.
    pub fn transitive_closure(&self, service: ServiceId) -> BTreeSet<ServiceId> {
        assert!(
            self.services.contains(&service),
            "service {service} does not belong to app {}",
            self.name
        );
        let mut closure = BTreeSet::new();
        let mut stack = vec![service];
        while let Some(at) = stack.pop() {
            if !closure.insert(at) {
                continue;
            }
            for edge in self.edges.iter().filter(|e| e.from == at) {
                stack.push(edge.to);
            }
        }
        closure
    }

    pub fn id(&self) -> AppId {
        self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn services(&self) -> &BTreeSet<ServiceId> {
        &self.services
    }

    pub fn service_name(&self, service: ServiceId) -> &str {
        self.names.get(&service).map(String::as_str).unwrap_or("?")
    }

    pub fn service_by_name(&self, name: &str) -> Option<ServiceId> {
        self.by_name.get(name).copied()
    }

    /// Edges sorted by (from, to).
    pub fn edges(&self) -> &[ServiceEdge] {
        &self.edges
    }

    pub fn entry(&self) -> ServiceId {
        self.entry
    }

    pub fn entry_cpu_mi(&self) -> f64 {
        self.entry_cpu_mi
    }

    pub fn entry_bytes(&self) -> f64 {
        self.entry_bytes
    }

    pub fn loop_services(&self) -> &[ServiceId] {
        &self.loop_services
    }

    /// Invocations of `service` per single request into the entry.
    pub fn rate_per_entry(&self, service: ServiceId) -> f64 {
        self.per_entry_rate.get(&service).copied().unwrap_or(0.0)
    }

    /// Million instructions consumed per invocation of `service`.
    pub fn cpu_demand(&self, service: ServiceId) -> f64 {
        self.cpu_demand.get(&service).copied().unwrap_or(0.0)
    }

    /// Services in topological order from sources to sinks, ties by id.
    pub fn topo_order(&self) -> &[ServiceId] {
        &self.topo_order
    }
}
