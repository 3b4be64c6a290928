//! CSV serialization of reports, migration logs, and flow traces. All
//! writers emit a mandatory header row, stable column order, and `\n` line
//! endings, so identical runs produce byte-identical files.

use std::fmt::Write as _;

use crate::engine::FlowTrace;
use crate::metrics::MetricsReport;
use crate::model::{AppId, Scenario};
use crate::placement::PlacementState;

pub const REPORT_HEADER: &str = "scenario,policy,users,apps,levels,children,weighted_hop,arithmetic_hop,network_usage,loop_latency_highest_ms,loop_latency_lowest_ms,migrations";

pub const MIGRATIONS_HEADER: &str = "instance,app,service,from_device,to_device,trigger";

pub const TRACE_HEADER: &str = "kind,from,to,latency_ms,bytes,rate_per_ms";

pub const SUMMARY_HEADER: &str = "scenario,users,apps,levels,children,weighted_hop_pop,weighted_hop_edgewards,arithmetic_hop_pop,arithmetic_hop_edgewards,network_usage_pop,network_usage_edgewards,network_usage_edgewards_over_pop,loop_latency_highest_pop,loop_latency_highest_edgewards,migrations_pop,migrations_edgewards";

/// One report row: a scenario evaluated under one policy.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub policy: String,
    pub report: MetricsReport,
    /// Loop latency of the highest- and lowest-rate apps (by total client
    /// entry rate, ties to the smaller app id); empty when no app declares a
    /// loop.
    pub loop_latency_highest: Option<f64>,
    pub loop_latency_lowest: Option<f64>,
}

impl ReportRow {
    pub fn new(scenario: &Scenario, policy: &str, report: MetricsReport) -> Self {
        let (highest, lowest) = extreme_rate_apps(scenario);
        let latency_of =
            |app: Option<AppId>| app.and_then(|a| report.loop_latency_per_app.get(&a).copied());
        Self {
            policy: policy.to_string(),
            loop_latency_highest: latency_of(highest),
            loop_latency_lowest: latency_of(lowest),
            report,
        }
    }
}

/// Apps with the highest and lowest total client entry rate.
fn extreme_rate_apps(scenario: &Scenario) -> (Option<AppId>, Option<AppId>) {
    let mut totals: std::collections::BTreeMap<AppId, f64> = std::collections::BTreeMap::new();
    for app in scenario.apps() {
        totals.insert(app.id(), 0.0);
    }
    for client in scenario.clients() {
        *totals.get_mut(&client.app).expect("validated") += client.entry_rate;
    }
    let highest = totals
        .iter()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(id, _)| *id);
    let lowest = totals
        .iter()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(b.0)))
        .map(|(id, _)| *id);
    (highest, lowest)
}

fn opt_u32(v: Option<u32>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn report_csv(rows: &[ReportRow]) -> String {
    let mut out = String::new();
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for row in rows {
        let p = &row.report.scenario_params;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            p.name,
            row.policy,
            opt_u32(p.users),
            opt_u32(p.apps),
            opt_u32(p.levels),
            opt_u32(p.children),
            row.report.weighted_hop,
            row.report.arithmetic_hop,
            row.report.network_usage,
            opt_f64(row.loop_latency_highest),
            opt_f64(row.loop_latency_lowest),
            row.report.migrations,
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// The full migration log, one row per record, in event order.
pub fn migrations_csv(scenario: &Scenario, placement: &PlacementState) -> String {
    let mut out = String::new();
    out.push_str(MIGRATIONS_HEADER);
    out.push('\n');
    for record in placement.migration_log() {
        let app = scenario.app(record.app);
        writeln!(
            out,
            "{},{},{},{},{},{}",
            record.instance,
            app.name(),
            app.service_name(record.service),
            record.from.map(|d| d.to_string()).unwrap_or_default(),
            record.to,
            record.trigger,
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// All link transfers (and any ingress rows) of a flow trace.
pub fn trace_csv(trace: &FlowTrace) -> String {
    let mut out = String::new();
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for t in &trace.link_transfers {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            t.kind, t.from, t.to, t.latency_ms, t.bytes, t.rate_per_ms
        )
        .expect("writing to a String cannot fail");
    }
    for t in &trace.ingress {
        writeln!(
            out,
            "ingress,client-{},{},{},{},{}",
            t.client, t.gateway, t.latency_ms, t.bytes, t.rate_per_ms
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Side-by-side policy comparison, one row per scenario. `pairs` holds
/// (pop row, edgewards row) per cell.
pub fn summary_csv(pairs: &[(ReportRow, ReportRow)]) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for (pop, edge) in pairs {
        let p = &pop.report.scenario_params;
        let ratio = if pop.report.network_usage > 0.0 {
            (edge.report.network_usage / pop.report.network_usage).to_string()
        } else {
            String::new()
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.name,
            opt_u32(p.users),
            opt_u32(p.apps),
            opt_u32(p.levels),
            opt_u32(p.children),
            pop.report.weighted_hop,
            edge.report.weighted_hop,
            pop.report.arithmetic_hop,
            edge.report.arithmetic_hop,
            pop.report.network_usage,
            edge.report.network_usage,
            ratio,
            opt_f64(pop.loop_latency_highest),
            opt_f64(edge.loop_latency_highest),
            pop.report.migrations,
            edge.report.migrations,
        )
        .expect("writing to a String cannot fail");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{simulate, EngineConfig};
    use crate::metrics::{assemble_report, HopMode};
    use crate::policy;
    use crate::scenarios::build_cell;

    #[test]
    fn report_csv_has_the_pinned_header_and_one_row_per_policy() {
        let scenario = build_cell(1, 1, 1, 1).unwrap();
        let mut rows = Vec::new();
        for (name, state) in [
            ("pop", policy::run_pop(&scenario)),
            ("edgewards", policy::run_edgewards(&scenario)),
        ] {
            let trace = simulate(&scenario, &state, &EngineConfig::default()).unwrap();
            let report = assemble_report(&scenario, &state, &trace, HopMode::PerPair).unwrap();
            rows.push(ReportRow::new(&scenario, name, report));
        }
        let csv = report_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], REPORT_HEADER);
        assert!(lines[1].starts_with("users-1_apps-1_levels-1_children-1,pop,1,1,1,1,"));
        assert!(lines[2].starts_with("users-1_apps-1_levels-1_children-1,edgewards,"));
    }

    #[test]
    fn migration_csv_lists_all_records() {
        let scenario = build_cell(2, 2, 2, 2).unwrap();
        let state = policy::run_pop(&scenario);
        let csv = migrations_csv(&scenario, &state);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], MIGRATIONS_HEADER);
        assert_eq!(lines.len(), state.migration_log().len() + 1);
        // Initial rows have an empty from_device column.
        let initial = lines.iter().find(|l| l.ends_with(",initial")).unwrap();
        let fields: Vec<&str> = initial.split(',').collect();
        assert_eq!(fields.len(), 6);
        assert!(fields[3].is_empty());
    }

    #[test]
    fn highest_and_lowest_rate_apps_are_identified() {
        let scenario = build_cell(2, 3, 2, 2).unwrap();
        let (highest, lowest) = extreme_rate_apps(&scenario);
        assert_eq!(highest, Some(AppId(0)));
        assert_eq!(lowest, Some(AppId(2)));
    }
}
