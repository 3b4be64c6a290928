//! Comparison metrics: hop counts, network usage, loop latencies, and
//! migration counts, assembled into one report per (scenario, policy) pair.

use std::collections::BTreeMap;

use crate::engine::{network_usage, resolve_instance, FlowTrace};
use crate::error::Result;
use crate::model::{AppId, Scenario, ScenarioMeta};
use crate::placement::{MigrationTrigger, PlacementState};

/// How the weighted hop count is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HopMode {
    /// Weight each (client, service) pair by that client's own rate for the
    /// service, normalized over all pairs.
    #[default]
    PerPair,
    /// Same numerator, but normalize by the device-aggregated rates of all
    /// hosted instances (which counts a client's rate once per path device
    /// hosting the service). Kept for sensitivity checks.
    LiteralDenominator,
}

#[derive(Debug, Clone, Default)]
pub struct MetricsReport {
    pub weighted_hop: f64,
    pub arithmetic_hop: f64,
    pub network_usage: f64,
    pub loop_latency_per_app: BTreeMap<AppId, f64>,
    pub migrations: usize,
    pub scenario_params: ScenarioMeta,
}

/// Rate-weighted mean hop distance between clients and the instances that
/// serve them: 1.0 means every request is served at its gateway; the maximum
/// is the path length to the cloud.
pub fn weighted_hop_count(scenario: &Scenario, placement: &PlacementState) -> Result<f64> {
    weighted_hop_count_with(scenario, placement, HopMode::PerPair)
}

pub fn weighted_hop_count_with(
    scenario: &Scenario,
    placement: &PlacementState,
    mode: HopMode,
) -> Result<f64> {
    let mut numerator = 0.0;
    let mut per_pair_total = 0.0;
    for client in scenario.clients() {
        let app = scenario.app(client.app);
        for service in app.services() {
            let rate = scenario.client_service_rate(client.id, *service);
            let device = resolve_instance(scenario, placement, client.id, *service)?;
            let hop = scenario
                .hop_of(client.id, device)
                .expect("resolved instances lie on the client's path");
            numerator += rate * f64::from(hop);
            per_pair_total += rate;
        }
    }
    let denominator = match mode {
        HopMode::PerPair => per_pair_total,
        HopMode::LiteralDenominator => {
            let mut total = 0.0;
            for (device, app, service) in placement.allocation_set() {
                total += scenario.device_request_rate(device, app, service);
            }
            total
        }
    };
    if denominator == 0.0 {
        return Ok(0.0);
    }
    Ok(numerator / denominator)
}

/// Unweighted mean hop distance over all (client, service) pairs.
pub fn arithmetic_hop_count(scenario: &Scenario, placement: &PlacementState) -> Result<f64> {
    let mut total = 0.0;
    let mut pairs = 0u64;
    for client in scenario.clients() {
        let app = scenario.app(client.app);
        for service in app.services() {
            let device = resolve_instance(scenario, placement, client.id, *service)?;
            let hop = scenario
                .hop_of(client.id, device)
                .expect("resolved instances lie on the client's path");
            total += f64::from(hop);
            pairs += 1;
        }
    }
    if pairs == 0 {
        return Ok(0.0);
    }
    Ok(total / pairs as f64)
}

/// Number of placement moves: every `evicted` or `shifted` log entry.
/// Initial gateway placements are not migrations.
pub fn migration_count(placement: &PlacementState) -> usize {
    placement
        .migration_log()
        .iter()
        .filter(|r| r.trigger != MigrationTrigger::Initial)
        .count()
}

/// Assemble the full report for one evaluated placement.
pub fn assemble_report(
    scenario: &Scenario,
    placement: &PlacementState,
    trace: &FlowTrace,
    mode: HopMode,
) -> Result<MetricsReport> {
    let mut loop_latency_per_app = BTreeMap::new();
    for ((app, _), latency) in &trace.loop_latencies {
        loop_latency_per_app.insert(*app, *latency);
    }
    Ok(MetricsReport {
        weighted_hop: weighted_hop_count_with(scenario, placement, mode)?,
        arithmetic_hop: arithmetic_hop_count(scenario, placement)?,
        network_usage: network_usage(trace, scenario.simulation_time_ms()),
        loop_latency_per_app,
        migrations: migration_count(placement),
        scenario_params: scenario.meta().clone(),
    })
}
