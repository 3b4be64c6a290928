//! Bundled experiment scenarios: the Sock Shop demo application, replica
//! generation with staggered request rates, and the four-axis sweep grid.

use crate::error::{Error, Result};
use crate::model::{
    AppId, AppModel, Client, ClientId, Scenario, ScenarioMeta, ServiceEdge, ServiceId, Topology,
    TreeLinkConfig,
};

/// Per-replica entry request rates (requests per ms), highest first.
pub const DEFAULT_REQUEST_RATES: [f64; 5] =
    [1.0 / 10.0, 1.0 / 20.0, 1.0 / 25.0, 1.0 / 30.0, 1.0 / 35.0];

/// Default simulation window, ms.
pub const DEFAULT_SIMULATION_TIME_MS: f64 = 10_000.0;

/// The Sock Shop demo scenario bundled as a data file (two replicas on the
/// default 2x2 tree). Load with [`crate::model::scenario_from_json`].
pub const SOCK_SHOP_SCENARIO_JSON: &str = include_str!("../data/sock_shop.json");

const SOCK_SHOP_SERVICES: [&str; 9] = [
    "edge",
    "frontend",
    "orders",
    "catalogue",
    "carts",
    "payment",
    "shipping",
    "user",
    "accounts",
];

// (from, to) wiring; all edges carry 1000 MI, 10 bytes, selectivity 1.
// `accounts` is reached by three unit paths, all starting inside the
// edge -> frontend -> orders chain, so it sees 3.0 invocations per entry
// request — the hottest service of the app. The order-fulfilment services
// hang off `orders` as a processing pipeline, so co-located pipeline stages
// keep their traffic local wherever placement splits an app across levels.
const SOCK_SHOP_EDGES: [(usize, usize); 10] = [
    (0, 1), // edge -> frontend
    (0, 8), // edge -> accounts
    (1, 2), // frontend -> orders
    (1, 8), // frontend -> accounts
    (2, 8), // orders -> accounts
    (2, 3), // orders -> catalogue
    (3, 4), // catalogue -> carts
    (4, 5), // carts -> payment
    (5, 6), // payment -> shipping
    (6, 7), // shipping -> user
];

/// The modeled Sock Shop application with its `edge -> frontend -> orders ->
/// accounts` latency loop. Service ids start at `first_service`.
pub fn sock_shop(id: AppId, name: &str, first_service: u32) -> AppModel {
    let sid = |idx: usize| ServiceId(first_service + idx as u32);
    let services: Vec<(ServiceId, String)> = SOCK_SHOP_SERVICES
        .iter()
        .enumerate()
        .map(|(i, n)| (sid(i), (*n).to_string()))
        .collect();
    let edge = |from: usize, to: usize| ServiceEdge {
        from: sid(from),
        to: sid(to),
        cpu_mi: 1000.0,
        bytes: 10.0,
        selectivity: 1.0,
    };
    let edges: Vec<ServiceEdge> = SOCK_SHOP_EDGES.iter().map(|(f, t)| edge(*f, *t)).collect();

    AppModel::new(id, name, services, sid(0), edges)
        .and_then(|app| app.with_ingress(1000.0, 10.0))
        .and_then(|app| app.with_loop(vec![sid(0), sid(1), sid(2), sid(8)]))
        .expect("the bundled sock shop model is valid")
}

/// `n` structurally identical replicas of `base`, each paired with the
/// request rate its clients use: replica `k` runs at `rates[k]`. Replicas
/// get fresh app ids `0..n` and contiguous service-id blocks, so they can
/// coexist in one scenario.
pub fn replicate_apps(base: &AppModel, n: u32, rates: &[f64]) -> Result<Vec<(AppModel, f64)>> {
    if n as usize > rates.len() {
        return Err(Error::InvalidConfig(format!(
            "{n} app replicas requested but only {} request rates are configured",
            rates.len()
        )));
    }
    let ids: Vec<ServiceId> = base.services().iter().copied().collect();
    let span = ids.len() as u32;
    let mut replicas = Vec::new();
    for k in 0..n {
        let remap = |s: ServiceId| {
            let idx = ids.binary_search(&s).expect("edge endpoints are services") as u32;
            ServiceId(k * span + idx)
        };
        let services = ids
            .iter()
            .map(|s| (remap(*s), base.service_name(*s).to_string()))
            .collect();
        let edges = base
            .edges()
            .iter()
            .map(|e| ServiceEdge {
                from: remap(e.from),
                to: remap(e.to),
                ..*e
            })
            .collect();
        let app = AppModel::new(
            AppId(k),
            format!("{}-{k}", base.name()),
            services,
            remap(base.entry()),
            edges,
        )?
        .with_ingress(base.entry_cpu_mi(), base.entry_bytes())?
        .with_loop(base.loop_services().iter().map(|s| remap(*s)).collect())?;
        replicas.push((app, rates[k as usize]));
    }
    Ok(replicas)
}

/// Sock Shop replicas at the default staggered rates.
pub fn replicate_sock_shop(n: u32, rates: &[f64]) -> Result<Vec<(AppModel, f64)>> {
    replicate_apps(&sock_shop(AppId(0), "sock-shop", 0), n, rates)
}

/// One sweep axis of the experiment grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SweepAxis {
    Users,
    Apps,
    Levels,
    Children,
}

impl SweepAxis {
    pub fn all() -> [SweepAxis; 4] {
        [
            SweepAxis::Users,
            SweepAxis::Apps,
            SweepAxis::Levels,
            SweepAxis::Children,
        ]
    }
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let label = match self {
            SweepAxis::Users => "users",
            SweepAxis::Apps => "apps",
            SweepAxis::Levels => "levels",
            SweepAxis::Children => "children",
        };
        write!(f, "{label}")
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "users" => Ok(SweepAxis::Users),
            "apps" => Ok(SweepAxis::Apps),
            "levels" => Ok(SweepAxis::Levels),
            "children" => Ok(SweepAxis::Children),
            other => Err(Error::InvalidConfig(format!(
                "unknown sweep axis {other:?} (expected users, apps, levels, or children)"
            ))),
        }
    }
}

/// The held-constant grid coordinates; the plotted fixtures keep every
/// non-swept parameter at 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedParams {
    pub users: u32,
    pub apps: u32,
    pub levels: u32,
    pub children: u32,
}

impl Default for FixedParams {
    fn default() -> Self {
        Self {
            users: 2,
            apps: 2,
            levels: 2,
            children: 2,
        }
    }
}

/// One sweep: vary `axis` over `values` with everything else per `fixed`.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<u32>,
    pub fixed: FixedParams,
}

impl SweepSpec {
    /// The default five-point sweep 1..=5 along one axis.
    pub fn new(axis: SweepAxis) -> Self {
        Self {
            axis,
            values: (1..=5).collect(),
            fixed: FixedParams::default(),
        }
    }
}

/// Canonical name of a grid cell, e.g. `users-3_apps-2_levels-2_children-2`.
pub fn cell_name(users: u32, apps: u32, levels: u32, children: u32) -> String {
    format!("users-{users}_apps-{apps}_levels-{levels}_children-{children}")
}

/// Parse a canonical cell name back into its coordinates.
pub fn parse_cell_name(name: &str) -> Option<(u32, u32, u32, u32)> {
    let mut users = None;
    let mut apps = None;
    let mut levels = None;
    let mut children = None;
    for part in name.split('_') {
        let (key, value) = part.split_once('-')?;
        let value: u32 = value.parse().ok()?;
        let slot = match key {
            "users" => &mut users,
            "apps" => &mut apps,
            "levels" => &mut levels,
            "children" => &mut children,
            _ => return None,
        };
        if slot.replace(value).is_some() {
            return None;
        }
    }
    Some((users?, apps?, levels?, children?))
}

/// Build one grid cell: a `levels` x `children` tree with `users` clients
/// per gateway for each of `apps` Sock Shop replicas. Every client requests
/// every replica, so each gateway carries `users x apps` clients.
///
/// Client ids are assigned app-major (replica, then gateway, then user), so
/// policies that follow client order process one replica's whole wave before
/// the next.
pub fn build_cell(users: u32, apps: u32, levels: u32, children: u32) -> Result<Scenario> {
    let topology = Topology::build_tree(levels, children, &TreeLinkConfig::default())?;
    let replicas = replicate_sock_shop(apps, &DEFAULT_REQUEST_RATES)?;

    let mut clients = Vec::new();
    let mut next = 0u32;
    for (app, rate) in &replicas {
        for gateway in topology.gateways().iter().copied().collect::<Vec<_>>() {
            for _user in 0..users {
                clients.push(Client {
                    id: ClientId(next),
                    gateway,
                    app: app.id(),
                    entry_rate: *rate,
                });
                next += 1;
            }
        }
    }

    Scenario::new(
        topology,
        replicas.into_iter().map(|(app, _)| app).collect(),
        clients,
        DEFAULT_SIMULATION_TIME_MS,
        ScenarioMeta {
            name: cell_name(users, apps, levels, children),
            users: Some(users),
            apps: Some(apps),
            levels: Some(levels),
            children: Some(children),
        },
    )
}

/// Build the cell named by a canonical cell name, if it parses.
pub fn cell_by_name(name: &str) -> Option<Result<Scenario>> {
    let (users, apps, levels, children) = parse_cell_name(name)?;
    Some(build_cell(users, apps, levels, children))
}

/// All scenarios of one sweep, in axis-value order.
pub fn generate_grid(spec: &SweepSpec) -> Result<Vec<Scenario>> {
    let mut cells = Vec::new();
    for value in &spec.values {
        let f = spec.fixed;
        let (users, apps, levels, children) = match spec.axis {
            SweepAxis::Users => (*value, f.apps, f.levels, f.children),
            SweepAxis::Apps => (f.users, *value, f.levels, f.children),
            SweepAxis::Levels => (f.users, f.apps, *value, f.children),
            SweepAxis::Children => (f.users, f.apps, f.levels, *value),
        };
        cells.push(build_cell(users, apps, levels, children)?);
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accounts_sees_three_invocations_per_entry_request() {
        let app = sock_shop(AppId(0), "sock-shop", 0);
        let accounts = app.service_by_name("accounts").unwrap();
        assert_eq!(app.rate_per_entry(accounts), 3.0);
        assert_eq!(app.cpu_demand(accounts), 1000.0);
    }

    #[test]
    fn the_latency_loop_is_the_hot_chain() {
        let app = sock_shop(AppId(0), "sock-shop", 0);
        let names: Vec<&str> = app
            .loop_services()
            .iter()
            .map(|s| app.service_name(*s))
            .collect();
        assert_eq!(names, vec!["edge", "frontend", "orders", "accounts"]);
    }

    #[test]
    fn every_edge_uses_the_standard_parameters() {
        let app = sock_shop(AppId(0), "sock-shop", 0);
        for edge in app.edges() {
            assert_eq!(edge.cpu_mi, 1000.0);
            assert_eq!(edge.bytes, 10.0);
            assert_eq!(edge.selectivity, 1.0);
        }
        assert_eq!(app.entry_cpu_mi(), 1000.0);
        assert_eq!(app.entry_bytes(), 10.0);
    }

    #[test]
    fn replicas_are_structurally_isomorphic() {
        let replicas = replicate_sock_shop(5, &DEFAULT_REQUEST_RATES).unwrap();
        assert_eq!(replicas.len(), 5);
        let rates: Vec<f64> = replicas.iter().map(|(_, r)| *r).collect();
        assert_eq!(rates, DEFAULT_REQUEST_RATES.to_vec());
        let base = &replicas[0].0;
        for (app, _) in &replicas[1..] {
            assert_eq!(app.services().len(), base.services().len());
            assert_eq!(app.edges().len(), base.edges().len());
            // Same shape relative to each app's own first service id.
            let offset = |x: &AppModel, s: ServiceId| s.0 - x.services().iter().next().unwrap().0;
            let shape = |x: &AppModel| {
                x.edges()
                    .iter()
                    .map(|e| (offset(x, e.from), offset(x, e.to)))
                    .collect::<Vec<_>>()
            };
            assert_eq!(shape(app), shape(base));
        }
    }

    #[test]
    fn too_many_replicas_is_a_config_error() {
        let err = replicate_sock_shop(6, &DEFAULT_REQUEST_RATES).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }

    #[test]
    fn any_app_can_be_replicated() {
        let base = AppModel::new(
            AppId(9),
            "tiny",
            vec![(ServiceId(40), "in".into()), (ServiceId(44), "out".into())],
            ServiceId(40),
            vec![ServiceEdge {
                from: ServiceId(40),
                to: ServiceId(44),
                cpu_mi: 500.0,
                bytes: 4.0,
                selectivity: 2.0,
            }],
        )
        .unwrap();
        let replicas = replicate_apps(&base, 2, &[0.1, 0.05]).unwrap();
        assert_eq!(replicas.len(), 2);
        assert_eq!(replicas[0].1, 0.1);
        for (k, (app, _)) in replicas.iter().enumerate() {
            assert_eq!(app.id(), AppId(k as u32));
            assert_eq!(app.services().len(), 2);
            let entry = app.entry();
            let out = app.service_by_name("out").unwrap();
            assert_eq!(app.rate_per_entry(out), 2.0);
            assert_eq!(app.service_name(entry), "in");
        }
        // Fresh contiguous id blocks, no collisions between replicas.
        let all: std::collections::BTreeSet<ServiceId> = replicas
            .iter()
            .flat_map(|(app, _)| app.services().iter().copied())
            .collect();
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn users_sweep_produces_five_cells() {
        let cells = generate_grid(&SweepSpec::new(SweepAxis::Users)).unwrap();
        assert_eq!(cells.len(), 5);
        for (i, cell) in cells.iter().enumerate() {
            assert_eq!(cell.meta().users, Some(i as u32 + 1));
            assert_eq!(cell.meta().apps, Some(2));
            // 4 gateways x users x 2 apps clients.
            assert_eq!(cell.client_count(), 4 * (i + 1) * 2);
        }
    }

    #[test]
    fn level_five_tree_has_sixty_two_fog_devices() {
        let spec = SweepSpec::new(SweepAxis::Levels);
        let cells = generate_grid(&spec).unwrap();
        let cell = &cells[4];
        assert_eq!(cell.meta().levels, Some(5));
        // 2 + 4 + 8 + 16 + 32 fog devices + cloud.
        assert_eq!(cell.topology().device_count(), 63);
    }

    #[test]
    fn grid_generation_is_deterministic() {
        let a = generate_grid(&SweepSpec::new(SweepAxis::Apps)).unwrap();
        let b = generate_grid(&SweepSpec::new(SweepAxis::Apps)).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.meta().name, y.meta().name);
            assert_eq!(x.client_count(), y.client_count());
            let cx: Vec<_> = x.clients().map(|c| (c.id, c.gateway, c.app)).collect();
            let cy: Vec<_> = y.clients().map(|c| (c.id, c.gateway, c.app)).collect();
            assert_eq!(cx, cy);
        }
    }

    #[test]
    fn workload_totals_scale_with_the_grid() {
        let cell = build_cell(3, 2, 2, 2).unwrap();
        let gateways = cell.topology().gateways().len() as f64;
        let expected = gateways * 3.0 * (DEFAULT_REQUEST_RATES[0] + DEFAULT_REQUEST_RATES[1]);
        let total: f64 = cell.clients().map(|c| c.entry_rate).sum();
        assert!((total - expected).abs() < 1e-12);
    }

    #[test]
    fn cell_names_round_trip() {
        let name = cell_name(3, 2, 4, 5);
        assert_eq!(name, "users-3_apps-2_levels-4_children-5");
        assert_eq!(parse_cell_name(&name), Some((3, 2, 4, 5)));
        assert_eq!(parse_cell_name("users-3"), None);
        assert_eq!(parse_cell_name("nope"), None);
        let cell = cell_by_name(&name).unwrap().unwrap();
        assert_eq!(cell.meta().name, name);
    }

    #[test]
    fn bundled_scenario_matches_the_programmatic_model() {
        let scenario =
            crate::model::scenario_from_json(SOCK_SHOP_SCENARIO_JSON, "sock_shop").unwrap();
        let built = build_cell(2, 2, 2, 2).unwrap();
        assert_eq!(scenario.client_count(), built.client_count());
        assert_eq!(
            scenario.topology().device_count(),
            built.topology().device_count()
        );
        for (a, b) in scenario.apps().zip(built.apps()) {
            assert_eq!(a.services().len(), b.services().len());
            assert_eq!(a.edges().len(), b.edges().len());
            let accounts = a.service_by_name("accounts").unwrap();
            assert_eq!(a.rate_per_entry(accounts), 3.0);
            assert_eq!(a.loop_services().len(), 4);
        }
        let clients_a: Vec<_> = scenario
            .clients()
            .map(|c| (c.gateway, c.app, c.entry_rate))
            .collect();
        let clients_b: Vec<_> = built
            .clients()
            .map(|c| (c.gateway, c.app, c.entry_rate))
            .collect();
        assert_eq!(clients_a, clients_b);
    }
}
