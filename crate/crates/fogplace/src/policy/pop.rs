//! Popularity-driven decentralized placement.
//!
//! Every client connection issues one allocation request per service of its
//! app, aimed at the client's gateway, most requested service first. Each
//! device decides locally:
//!
//! 1. a request for a service it already hosts merges into that instance;
//! 2. the cloud accepts everything;
//! 3. a request that fits in the free headroom is allocated;
//! 4. a request larger than the whole device shifts to the father;
//! 5. otherwise the device tries to evict dependency closures of strictly
//!    less requested services (lowest aggregate rate first) until the freed
//!    capacity covers the deficit; evicted instances are re-requested at the
//!    father. If no qualifying closures exist, the request itself shifts.
//!
//! Evictions move whole closures — `alloc(device) ∩ closure(service)` — so a
//! service never stays below one of its callers, which would bounce the
//! execution flow between devices.
//!
//! Requests only ever move toward the cloud and the cloud accepts
//! unconditionally, so placement always terminates.

use std::collections::BTreeSet;

use crate::model::{resource_usage, AppId, ClientId, DeviceId, InstanceId, Scenario, ServiceId};
use crate::placement::{MigrationRecord, MigrationTrigger, PlacementState};

/// A request to host one service instance on a device. Shifted toward the
/// cloud whenever the target refuses it; the instance id stays stable across
/// the whole journey.
#[derive(Debug, Clone)]
pub struct AllocationRequest {
    pub instance: InstanceId,
    pub app: AppId,
    pub service: ServiceId,
    pub target: DeviceId,
    pub client: ClientId,
    /// True once the request has moved off the device it was created for;
    /// only never-moved allocations log an `initial` record.
    shifted: bool,
}

impl AllocationRequest {
    pub fn new(
        instance: InstanceId,
        app: AppId,
        service: ServiceId,
        target: DeviceId,
        client: ClientId,
    ) -> Self {
        Self {
            instance,
            app,
            service,
            target,
            client,
            shifted: false,
        }
    }
}

/// Counters for the termination bound: processing steps never exceed issued
/// requests times the longest path.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PopStats {
    pub requests_issued: u64,
    pub requests_processed: u64,
}

/// One evictable unit: the services of a single app on one device that form
/// `alloc(device) ∩ closure(source)`, with their aggregate request rate.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSubset {
    pub app: AppId,
    pub members: BTreeSet<ServiceId>,
    pub rate: f64,
}

/// Eviction candidates for a device, ascending by (rate, size, members).
#[derive(Debug, Clone, Default)]
pub struct MigrationCandidateSet {
    pub subsets: Vec<CandidateSubset>,
}

/// Run the policy over every client, ascending client id.
pub fn run(scenario: &Scenario) -> PlacementState {
    run_with_stats(scenario).0
}

pub fn run_with_stats(scenario: &Scenario) -> (PlacementState, PopStats) {
    let mut state = PlacementState::new();
    let mut stats = PopStats::default();
    let clients: Vec<ClientId> = scenario.clients().map(|c| c.id).collect();
    for client in clients {
        on_client_connect(scenario, &mut state, client, &mut stats);
    }
    (state, stats)
}

/// Issue one allocation request per service of the client's app at its
/// gateway, most requested first (ties by ascending service id). Services
/// that already have an instance somewhere on the client's path are covered
/// and issue nothing, which makes a duplicate connect a no-op.
pub fn on_client_connect(
    scenario: &Scenario,
    state: &mut PlacementState,
    client_id: ClientId,
    stats: &mut PopStats,
) {
    let client = scenario.client(client_id);
    let app = scenario.app(client.app);
    let path = scenario.client_path(client_id).to_vec();

    let mut services: Vec<ServiceId> = app.transitive_closure(app.entry()).into_iter().collect();
    services.sort_by(|a, b| {
        scenario
            .client_service_rate(client_id, *b)
            .total_cmp(&scenario.client_service_rate(client_id, *a))
            .then(a.cmp(b))
    });

    for service in services {
        if state.allocated_on_path(&path, client.app, service) {
            continue;
        }
        let instance = state.new_instance();
        stats.requests_issued += 1;
        let request =
            AllocationRequest::new(instance, client.app, service, client.gateway, client_id);
        place(scenario, state, request, stats);
    }
}

/// Process one allocation request at its target device (see the module doc
/// for the decision order).
pub fn place(
    scenario: &Scenario,
    state: &mut PlacementState,
    request: AllocationRequest,
    stats: &mut PopStats,
) {
    stats.requests_processed += 1;
    let device = request.target;

    if state
        .instance_at(device, request.app, request.service)
        .is_some()
    {
        return;
    }

    let topology = scenario.topology();
    if device == topology.cloud() {
        finish_allocation(state, &request, device);
        return;
    }

    let rate = scenario.device_request_rate(device, request.app, request.service);
    let demand = scenario.app(request.app).cpu_demand(request.service) * rate;
    let cpu = topology.device(device).expect("request targets exist").cpu;
    let used = resource_usage(scenario, state, device).cpu_used_mips;

    if demand < cpu.headroom(used) {
        finish_allocation(state, &request, device);
        return;
    }

    let father = topology
        .father(device)
        .expect("non-cloud devices have a father");

    // A service larger than the whole device can never fit here, evictions
    // or not.
    if demand >= cpu.mips() {
        shift(scenario, state, request, father, stats);
        return;
    }

    // Mark closures for eviction, cheapest first, while they are strictly
    // less requested than the candidate, until the deficit is covered.
    let mut to_free = demand - cpu.headroom(used);
    let mut pool: BTreeSet<(AppId, ServiceId)> = state.services_on(device).into_iter().collect();
    let mut marked: Vec<CandidateSubset> = Vec::new();
    while to_free > 0.0 {
        let family = candidate_family(scenario, device, &pool);
        let Some(subset) = family.into_iter().next() else {
            break;
        };
        if rate > subset.rate {
            for member in &subset.members {
                pool.remove(&(subset.app, *member));
                to_free -= scenario.app(subset.app).cpu_demand(*member)
                    * scenario.device_request_rate(device, subset.app, *member);
            }
            marked.push(subset);
        } else {
            break;
        }
    }

    if to_free <= 0.0 {
        // Commit: delete the marked instances, re-request each at the
        // father, then take the freed room.
        let mut reissues = Vec::new();
        for subset in &marked {
            for member in &subset.members {
                let instance = state
                    .instance_at(device, subset.app, *member)
                    .expect("marked services are allocated on the device");
                state.deallocate(instance);
                state.record(MigrationRecord {
                    instance,
                    app: subset.app,
                    service: *member,
                    from: Some(device),
                    to: father,
                    trigger: MigrationTrigger::Evicted,
                });
                let mut reissue =
                    AllocationRequest::new(instance, subset.app, *member, father, request.client);
                reissue.shifted = true;
                reissues.push(reissue);
            }
        }
        for reissue in reissues {
            stats.requests_issued += 1;
            place(scenario, state, reissue, stats);
        }
        finish_allocation(state, &request, device);
    } else {
        shift(scenario, state, request, father, stats);
    }
}

fn shift(
    scenario: &Scenario,
    state: &mut PlacementState,
    mut request: AllocationRequest,
    father: DeviceId,
    stats: &mut PopStats,
) {
    state.record(MigrationRecord {
        instance: request.instance,
        app: request.app,
        service: request.service,
        from: Some(request.target),
        to: father,
        trigger: MigrationTrigger::Shifted,
    });
    request.target = father;
    request.shifted = true;
    place(scenario, state, request, stats);
}

fn finish_allocation(state: &mut PlacementState, request: &AllocationRequest, device: DeviceId) {
    if !request.shifted {
        state.record(MigrationRecord {
            instance: request.instance,
            app: request.app,
            service: request.service,
            from: None,
            to: device,
            trigger: MigrationTrigger::Initial,
        });
    }
    state.allocate(request.instance, request.app, request.service, device);
}

/// Eviction candidates for one app on a device: one subset per hosted
/// service of that app, `alloc(device) ∩ closure(service)`, duplicates
/// collapsed.
pub fn migration_candidates(
    scenario: &Scenario,
    placement: &PlacementState,
    device: DeviceId,
    app: AppId,
) -> MigrationCandidateSet {
    let pool: BTreeSet<(AppId, ServiceId)> = placement
        .services_on(device)
        .into_iter()
        .filter(|(a, _)| *a == app)
        .collect();
    MigrationCandidateSet {
        subsets: candidate_family(scenario, device, &pool),
    }
}

/// Aggregate device request rate of a subset of one app's services.
pub fn subset_rate(
    scenario: &Scenario,
    device: DeviceId,
    app: AppId,
    members: &BTreeSet<ServiceId>,
) -> f64 {
    members
        .iter()
        .map(|m| scenario.device_request_rate(device, app, *m))
        .sum()
}

/// Candidate subsets over an arbitrary pool of (app, service) pairs (the
/// eviction loop shrinks the pool as it marks subsets). Sorted ascending by
/// rate, then subset size, then member ids.
fn candidate_family(
    scenario: &Scenario,
    device: DeviceId,
    pool: &BTreeSet<(AppId, ServiceId)>,
) -> Vec<CandidateSubset> {
    let mut seen: BTreeSet<(AppId, Vec<ServiceId>)> = BTreeSet::new();
    let mut subsets = Vec::new();
    for (app_id, service) in pool {
        let closure = scenario.app(*app_id).transitive_closure(*service);
        let members: BTreeSet<ServiceId> = pool
            .iter()
            .filter(|(a, s)| a == app_id && closure.contains(s))
            .map(|(_, s)| *s)
            .collect();
        if !seen.insert((*app_id, members.iter().copied().collect())) {
            continue;
        }
        let rate = subset_rate(scenario, device, *app_id, &members);
        subsets.push(CandidateSubset {
            app: *app_id,
            members,
            rate,
        });
    }
    subsets.sort_by(|a, b| {
        a.rate
            .total_cmp(&b.rate)
            .then(a.members.len().cmp(&b.members.len()))
            .then(a.members.cmp(&b.members))
            .then(a.app.cmp(&b.app))
    });
    subsets
}
