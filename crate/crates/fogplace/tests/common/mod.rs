//! Shared fixtures and independent brute-force oracles. Everything here
//! recomputes results from first principles (exhaustive path enumeration,
//! matrix reachability, per-request walks) so the library's iterative
//! implementations have something honest to be checked against.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use fogplace::engine::{FlowTrace, TransferKind};
use fogplace::model::{
    AppId, AppModel, Client, ClientId, CpuCapacity, Device, DeviceId, Link, Scenario, ScenarioMeta,
    ServiceEdge, ServiceId, Topology, TreeLinkConfig,
};
use fogplace::placement::PlacementState;
use rand::rngs::StdRng;
use rand::Rng;

// ---------------------------------------------------------------- fixtures

pub fn edge(from: u32, to: u32, selectivity: f64) -> ServiceEdge {
    edge_full(from, to, 1000.0, 10.0, selectivity)
}

pub fn edge_full(from: u32, to: u32, cpu_mi: f64, bytes: f64, selectivity: f64) -> ServiceEdge {
    ServiceEdge {
        from: ServiceId(from),
        to: ServiceId(to),
        cpu_mi,
        bytes,
        selectivity,
    }
}

pub fn named_services(ids: &[u32]) -> Vec<(ServiceId, String)> {
    ids.iter()
        .map(|i| (ServiceId(*i), format!("s{i}")))
        .collect()
}

/// The six-service fan-out app used for the candidate-set worked example:
/// s1 -> {s2, s5}, s2 -> {s3, s6}, s5 -> {s4, s6}.
pub fn fanout_app() -> AppModel {
    AppModel::new(
        AppId(0),
        "fanout",
        named_services(&[1, 2, 3, 4, 5, 6]),
        ServiceId(1),
        vec![
            edge(1, 2, 1.0),
            edge(1, 5, 1.0),
            edge(2, 3, 1.0),
            edge(2, 6, 1.0),
            edge(5, 4, 1.0),
            edge(5, 6, 1.0),
        ],
    )
    .unwrap()
}

pub fn fog_device(id: u32, cpu: f64) -> Device {
    Device {
        id: DeviceId(id),
        cpu: CpuCapacity::Finite(cpu),
        ram_mb: 4000.0,
        uplink_latency_ms: 0.0,
        is_cloud: false,
        level: 0,
    }
}

pub fn cloud_device(id: u32) -> Device {
    Device {
        id: DeviceId(id),
        cpu: CpuCapacity::Unlimited,
        ram_mb: f64::INFINITY,
        uplink_latency_ms: 0.0,
        is_cloud: true,
        level: 0,
    }
}

pub fn link(a: u32, b: u32, latency_ms: f64) -> Link {
    Link {
        a: DeviceId(a),
        b: DeviceId(b),
        latency_ms,
    }
}

/// A non-tree topology: gateway 4 reaches the cloud 0 through two unequal
/// branches (4-1-0 and 4-2-0) plus a slow direct shortcut 4-3-0.
pub fn diamond_topology() -> Topology {
    Topology::new(
        vec![
            cloud_device(0),
            fog_device(1, 2000.0),
            fog_device(2, 2000.0),
            fog_device(3, 2000.0),
            fog_device(4, 2000.0),
        ],
        vec![
            link(4, 1, 3.0),
            link(4, 2, 2.0),
            link(4, 3, 10.0),
            link(1, 0, 4.0),
            link(2, 0, 5.0),
            link(3, 0, 10.0),
        ],
        vec![DeviceId(4)],
    )
    .unwrap()
}

// ------------------------------------------------------------ path oracles

fn raw_adjacency(topo: &Topology) -> BTreeMap<DeviceId, Vec<(DeviceId, f64)>> {
    let mut adj: BTreeMap<DeviceId, Vec<(DeviceId, f64)>> = BTreeMap::new();
    for l in topo.links() {
        adj.entry(l.a).or_default().push((l.b, l.latency_ms));
        adj.entry(l.b).or_default().push((l.a, l.latency_ms));
    }
    adj
}

/// Every simple path between two devices, with its total latency.
pub fn enumerate_paths(topo: &Topology, from: DeviceId, to: DeviceId) -> Vec<(Vec<DeviceId>, f64)> {
    let adj = raw_adjacency(topo);
    let mut paths = Vec::new();
    let mut stack = vec![from];
    let mut visited = BTreeSet::from([from]);
    fn dfs(
        adj: &BTreeMap<DeviceId, Vec<(DeviceId, f64)>>,
        at: DeviceId,
        to: DeviceId,
        latency: f64,
        stack: &mut Vec<DeviceId>,
        visited: &mut BTreeSet<DeviceId>,
        paths: &mut Vec<(Vec<DeviceId>, f64)>,
    ) {
        if at == to {
            paths.push((stack.clone(), latency));
            return;
        }
        let Some(neighbors) = adj.get(&at) else {
            return;
        };
        for (next, weight) in neighbors {
            if visited.insert(*next) {
                stack.push(*next);
                dfs(adj, *next, to, latency + weight, stack, visited, paths);
                stack.pop();
                visited.remove(next);
            }
        }
    }
    dfs(&adj, from, to, 0.0, &mut stack, &mut visited, &mut paths);
    paths
}

/// Lexicographically smallest minimum-latency route (endpoints included).
pub fn oracle_route(topo: &Topology, from: DeviceId, to: DeviceId) -> Vec<DeviceId> {
    if from == to {
        return vec![from];
    }
    let paths = enumerate_paths(topo, from, to);
    let best = paths
        .iter()
        .map(|(_, lat)| *lat)
        .fold(f64::INFINITY, f64::min);
    paths
        .into_iter()
        .filter(|(_, lat)| *lat <= best + 1e-9)
        .map(|(path, _)| path)
        .min()
        .expect("connected fixtures")
}

/// Oracle for `shortest_path_to_cloud`: route minus the starting device.
pub fn oracle_path_to_cloud(topo: &Topology, device: DeviceId) -> Vec<DeviceId> {
    oracle_route(topo, device, topo.cloud())[1..].to_vec()
}

pub fn oracle_route_latency(topo: &Topology, from: DeviceId, to: DeviceId) -> f64 {
    let route = oracle_route(topo, from, to);
    route
        .windows(2)
        .map(|pair| {
            topo.links()
                .iter()
                .find(|l| (l.a == pair[0] && l.b == pair[1]) || (l.a == pair[1] && l.b == pair[0]))
                .expect("route hops are links")
                .latency_ms
        })
        .sum()
}

// ------------------------------------------------------------- app oracles

/// Reachability (including self) by boolean matrix iteration.
pub fn oracle_closure(app: &AppModel, service: ServiceId) -> BTreeSet<ServiceId> {
    let ids: Vec<ServiceId> = app.services().iter().copied().collect();
    let index: BTreeMap<ServiceId, usize> = ids.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let n = ids.len();
    let mut reach = vec![vec![false; n]; n];
    for (i, _) in ids.iter().enumerate() {
        reach[i][i] = true;
    }
    for e in app.edges() {
        reach[index[&e.from]][index[&e.to]] = true;
    }
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if !reach[i][j] && (0..n).any(|k| reach[i][k] && reach[k][j]) {
                    reach[i][j] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let row = index[&service];
    ids.iter()
        .enumerate()
        .filter(|(j, _)| reach[row][*j])
        .map(|(_, s)| *s)
        .collect()
}

/// Rate of one service per entry request: sum over all DAG paths from the
/// entry of the product of selectivities, by exhaustive path enumeration.
pub fn oracle_rate_per_entry(app: &AppModel, service: ServiceId) -> f64 {
    fn walk(app: &AppModel, at: ServiceId, target: ServiceId, product: f64, acc: &mut f64) {
        if at == target {
            *acc += product;
            return;
        }
        for e in app.edges().iter().filter(|e| e.from == at) {
            walk(app, e.to, target, product * e.selectivity, acc);
        }
    }
    let mut acc = 0.0;
    walk(app, app.entry(), service, 1.0, &mut acc);
    acc
}

/// Eq-by-eq device request rate: clients whose exhaustively-enumerated
/// shortest path contains the device, times their path-product rates.
pub fn oracle_device_rate(
    scenario: &Scenario,
    device: DeviceId,
    app: AppId,
    service: ServiceId,
) -> f64 {
    let mut total = 0.0;
    for client in scenario.clients().filter(|c| c.app == app) {
        let mut path = vec![client.gateway];
        path.extend(oracle_path_to_cloud(scenario.topology(), client.gateway));
        if path.contains(&device) {
            total += client.entry_rate * oracle_rate_per_entry(scenario.app(app), service);
        }
    }
    total
}

/// Migration candidate subsets from raw set algebra.
pub fn oracle_candidates(
    scenario: &Scenario,
    placement: &PlacementState,
    device: DeviceId,
    app: AppId,
) -> BTreeSet<BTreeSet<ServiceId>> {
    let hosted: BTreeSet<ServiceId> = placement
        .services_on(device)
        .into_iter()
        .filter(|(a, _)| *a == app)
        .map(|(_, s)| s)
        .collect();
    hosted
        .iter()
        .map(|s| {
            oracle_closure(scenario.app(app), *s)
                .intersection(&hosted)
                .copied()
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------- flow oracles

/// One expected link transfer (request direction, default engine options).
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTransfer {
    pub from: DeviceId,
    pub to: DeviceId,
    pub bytes: f64,
    pub rate: f64,
}

fn oracle_resolve(
    scenario: &Scenario,
    placement: &PlacementState,
    client: &Client,
    service: ServiceId,
) -> DeviceId {
    let mut path = vec![client.gateway];
    path.extend(oracle_path_to_cloud(scenario.topology(), client.gateway));
    path.into_iter()
        .find(|d| placement.instance_at(*d, client.app, service).is_some())
        .expect("oracle fixtures satisfy coverage")
}

/// Expected transfer multiset: per client, walk the entry leg and every app
/// edge between exhaustively-resolved hosts.
pub fn oracle_transfers(scenario: &Scenario, placement: &PlacementState) -> Vec<OracleTransfer> {
    let mut out = Vec::new();
    let mut emit = |from: DeviceId, to: DeviceId, bytes: f64, rate: f64| {
        if from == to || rate == 0.0 {
            return;
        }
        let route = oracle_route(scenario.topology(), from, to);
        for pair in route.windows(2) {
            out.push(OracleTransfer {
                from: pair[0],
                to: pair[1],
                bytes,
                rate,
            });
        }
    };
    for client in scenario.clients() {
        let app = scenario.app(client.app);
        let entry_host = oracle_resolve(scenario, placement, client, app.entry());
        emit(
            client.gateway,
            entry_host,
            app.entry_bytes(),
            client.entry_rate,
        );
        for e in app.edges() {
            let rate = client.entry_rate * oracle_rate_per_entry(app, e.from) * e.selectivity;
            let from = oracle_resolve(scenario, placement, client, e.from);
            let to = oracle_resolve(scenario, placement, client, e.to);
            emit(from, to, e.bytes, rate);
        }
    }
    out
}

pub fn sort_oracle_transfers(mut transfers: Vec<OracleTransfer>) -> Vec<OracleTransfer> {
    transfers.sort_by(|a, b| {
        (a.from, a.to)
            .cmp(&(b.from, b.to))
            .then(a.bytes.total_cmp(&b.bytes))
            .then(a.rate.total_cmp(&b.rate))
    });
    transfers
}

pub fn trace_as_oracle_transfers(trace: &FlowTrace) -> Vec<OracleTransfer> {
    trace
        .link_transfers
        .iter()
        .filter(|t| t.kind == TransferKind::Request)
        .map(|t| OracleTransfer {
            from: t.from,
            to: t.to,
            bytes: t.bytes,
            rate: t.rate_per_ms,
        })
        .collect()
}

pub fn assert_transfers_match(actual: Vec<OracleTransfer>, expected: Vec<OracleTransfer>) {
    let actual = sort_oracle_transfers(actual);
    let expected = sort_oracle_transfers(expected);
    assert_eq!(
        actual.len(),
        expected.len(),
        "transfer multiset size differs"
    );
    for (a, e) in actual.iter().zip(expected.iter()) {
        assert_eq!((a.from, a.to), (e.from, e.to));
        assert!((a.bytes - e.bytes).abs() <= 1e-9 * e.bytes.abs().max(1.0));
        assert!(
            (a.rate - e.rate).abs() <= 1e-9 * e.rate.abs().max(1.0),
            "rate mismatch on {:?}: {} vs {}",
            (a.from, a.to),
            a.rate,
            e.rate
        );
    }
}

/// Request-enumeration network usage: every transfer sends `rate * T`
/// messages of `bytes` over a link of known latency.
pub fn oracle_network_usage(
    scenario: &Scenario,
    transfers: &[OracleTransfer],
    simulation_time_ms: f64,
) -> f64 {
    let mut total = 0.0;
    for t in transfers {
        let latency = scenario
            .topology()
            .link_latency(t.from, t.to)
            .expect("transfers use links");
        let messages = t.rate * simulation_time_ms;
        total += latency * t.bytes * messages;
    }
    total / simulation_time_ms
}

/// Direct double-sum weighted hop count over (client, service) pairs, using
/// oracle rates, oracle resolution, and oracle path positions.
pub fn oracle_weighted_hop(scenario: &Scenario, placement: &PlacementState) -> f64 {
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    for client in scenario.clients() {
        let app = scenario.app(client.app);
        let mut path = vec![client.gateway];
        path.extend(oracle_path_to_cloud(scenario.topology(), client.gateway));
        for service in app.services() {
            let rate = client.entry_rate * oracle_rate_per_entry(app, *service);
            let host = oracle_resolve(scenario, placement, client, *service);
            let hop = path.iter().position(|d| *d == host).unwrap() + 1;
            numerator += rate * hop as f64;
            denominator += rate;
        }
    }
    if denominator == 0.0 {
        0.0
    } else {
        numerator / denominator
    }
}

// ------------------------------------------------- random scenario factory

/// A random tree scenario: up to `max_levels` fog levels, up to three
/// children, one or two random DAG apps of at most eight services, and a
/// handful of clients with random rates.
pub fn random_scenario(rng: &mut StdRng, max_levels: u32) -> Scenario {
    let levels = rng.gen_range(1..=max_levels);
    let children = rng.gen_range(1..=3);
    let config = TreeLinkConfig {
        fog_cpu_mips: rng.gen_range(300.0..3000.0),
        ..TreeLinkConfig::default()
    };
    let topology = Topology::build_tree(levels, children, &config).unwrap();

    let app_count = rng.gen_range(1..=2u32);
    let mut apps = Vec::new();
    let mut next_service = 0u32;
    for app_idx in 0..app_count {
        let n = rng.gen_range(2..=8u32);
        let first = next_service;
        next_service += n;
        let ids: Vec<u32> = (first..first + n).collect();
        // A spine guarantees reachability; extra forward edges add fan-out.
        let mut edges = Vec::new();
        for i in 1..n {
            edges.push(edge_full(
                first + i - 1,
                first + i,
                *pick(rng, &[200.0, 500.0, 1000.0]),
                *pick(rng, &[1.0, 10.0, 100.0]),
                *pick(rng, &[0.25, 0.5, 1.0, 1.0, 2.0]),
            ));
        }
        for from in 0..n {
            for to in (from + 2)..n {
                if rng.gen_bool(0.25) {
                    edges.push(edge_full(
                        first + from,
                        first + to,
                        *pick(rng, &[200.0, 500.0, 1000.0]),
                        *pick(rng, &[1.0, 10.0, 100.0]),
                        *pick(rng, &[0.0, 0.25, 0.5, 1.0]),
                    ));
                }
            }
        }
        apps.push(
            AppModel::new(
                AppId(app_idx),
                format!("app{app_idx}"),
                named_services(&ids),
                ServiceId(first),
                edges,
            )
            .unwrap()
            .with_ingress(*pick(rng, &[500.0, 1000.0]), 10.0)
            .unwrap(),
        );
    }

    let gateways: Vec<DeviceId> = topology.gateways().iter().copied().collect();
    let client_count = rng.gen_range(1..=4u32);
    let clients = (0..client_count)
        .map(|i| Client {
            id: ClientId(i),
            gateway: *pick(rng, &gateways),
            app: AppId(rng.gen_range(0..app_count)),
            entry_rate: rng.gen_range(0.005..0.2),
        })
        .collect();

    Scenario::new(
        topology,
        apps,
        clients,
        10_000.0,
        ScenarioMeta::named("random"),
    )
    .unwrap()
}

fn pick<'a, T>(rng: &mut StdRng, items: &'a [T]) -> &'a T {
    &items[rng.gen_range(0..items.len())]
}
