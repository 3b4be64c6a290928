//! Command-line front end: evaluate one scenario or sweep the experiment
//! grid, writing CSV reports either way.
//!
//! Exactly one of `--scenario` / `--axis` selects the mode:
//!
//! ```bash
//! fogplace --scenario users-2_apps-2_levels-2_children-2 --policy both --out results/
//! fogplace --scenario my_scenario.json --policy pop --out results/
//! fogplace --axis users --out sweep/
//! fogplace --axis all --out battery/
//! ```
//!
//! Exit codes: 0 on success, 2 for unparseable input (bad flags or malformed
//! scenario JSON), 1 for everything else. A coverage violation is reported
//! as an internal error — placements are supposed to make that impossible.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgGroup, Parser};

use crate::engine::{simulate, EngineConfig};
use crate::error::{Error, Result};
use crate::metrics::{assemble_report, HopMode};
use crate::model::{load_scenario, Scenario};
use crate::placement::PlacementState;
use crate::policy;
use crate::report::{migrations_csv, report_csv, summary_csv, trace_csv, ReportRow};
use crate::scenarios::{
    cell_by_name, generate_grid, parse_cell_name, FixedParams, SweepAxis, SweepSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PolicyChoice {
    Pop,
    Edgewards,
    Both,
}

impl PolicyChoice {
    fn members(self) -> &'static [PolicyKind] {
        match self {
            PolicyChoice::Pop => &[PolicyKind::Pop],
            PolicyChoice::Edgewards => &[PolicyKind::Edgewards],
            PolicyChoice::Both => &[PolicyKind::Pop, PolicyKind::Edgewards],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PolicyKind {
    Pop,
    Edgewards,
}

impl PolicyKind {
    fn name(self) -> &'static str {
        match self {
            PolicyKind::Pop => "pop",
            PolicyKind::Edgewards => "edgewards",
        }
    }

    fn run(self, scenario: &Scenario) -> PlacementState {
        match self {
            PolicyKind::Pop => policy::run_pop(scenario),
            PolicyKind::Edgewards => policy::run_edgewards(scenario),
        }
    }
}

/// Where a scenario comes from: a JSON file on disk, or a canonical grid
/// cell name like `users-3_apps-2_levels-2_children-2`.
#[derive(Debug, Clone)]
pub enum ScenarioSource {
    File(PathBuf),
    Cell(String),
}

impl ScenarioSource {
    pub fn parse(raw: &str) -> Self {
        if parse_cell_name(raw).is_some() {
            ScenarioSource::Cell(raw.to_string())
        } else {
            ScenarioSource::File(PathBuf::from(raw))
        }
    }

    pub fn load(&self) -> Result<Scenario> {
        match self {
            ScenarioSource::File(path) => load_scenario(path),
            ScenarioSource::Cell(name) => {
                cell_by_name(name).expect("cell names were validated by parse")
            }
        }
    }
}

/// Options for a single-scenario run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: ScenarioSource,
    pub policy: PolicyChoice,
    pub out_dir: PathBuf,
    pub include_ingress: bool,
    pub mirror_responses: bool,
    pub literal_eq6: bool,
}

/// Options for a grid sweep.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub axes: Vec<SweepAxis>,
    pub fixed: FixedParams,
    pub policy: PolicyChoice,
    pub out_dir: PathBuf,
    pub include_ingress: bool,
    pub mirror_responses: bool,
    pub literal_eq6: bool,
}

fn engine_config(include_ingress: bool, mirror_responses: bool) -> EngineConfig {
    EngineConfig {
        include_ingress,
        mirror_responses,
        client_link_latency_ms: 0.0,
    }
}

fn hop_mode(literal_eq6: bool) -> HopMode {
    if literal_eq6 {
        HopMode::LiteralDenominator
    } else {
        HopMode::PerPair
    }
}

fn evaluate(
    scenario: &Scenario,
    kind: PolicyKind,
    engine: &EngineConfig,
    mode: HopMode,
) -> Result<(PlacementState, crate::engine::FlowTrace, ReportRow)> {
    let state = kind.run(scenario);
    let trace = simulate(scenario, &state, engine)?;
    let report = assemble_report(scenario, &state, &trace, mode)?;
    let row = ReportRow::new(scenario, kind.name(), report);
    Ok((state, trace, row))
}

fn summary_line(row: &ReportRow) -> String {
    format!(
        "{} {}: weighted_hop={:.4} arithmetic_hop={:.4} network_usage={:.4} migrations={}",
        row.report.scenario_params.name,
        row.policy,
        row.report.weighted_hop,
        row.report.arithmetic_hop,
        row.report.network_usage,
        row.report.migrations,
    )
}

/// Evaluate one scenario and write `report.csv`, `migrations_<policy>.csv`,
/// and `trace_<policy>.csv` under the output directory.
pub fn cmd_run(config: &RunConfig) -> Result<()> {
    let scenario = config.scenario.load()?;
    std::fs::create_dir_all(&config.out_dir)?;
    let engine = engine_config(config.include_ingress, config.mirror_responses);
    let mode = hop_mode(config.literal_eq6);

    let mut rows = Vec::new();
    for kind in config.policy.members() {
        let (state, trace, row) = evaluate(&scenario, *kind, &engine, mode)?;
        std::fs::write(
            config
                .out_dir
                .join(format!("migrations_{}.csv", kind.name())),
            migrations_csv(&scenario, &state),
        )?;
        std::fs::write(
            config.out_dir.join(format!("trace_{}.csv", kind.name())),
            trace_csv(&trace),
        )?;
        println!("{}", summary_line(&row));
        rows.push(row);
    }
    std::fs::write(config.out_dir.join("report.csv"), report_csv(&rows))?;
    Ok(())
}

/// Sweep the requested axes (five cells each) and write `report.csv`, plus
/// `summary.csv` with side-by-side columns when both policies run.
pub fn cmd_sweep(config: &SweepConfig) -> Result<()> {
    std::fs::create_dir_all(&config.out_dir)?;
    let engine = engine_config(config.include_ingress, config.mirror_responses);
    let mode = hop_mode(config.literal_eq6);

    let mut rows = Vec::new();
    let mut pairs = Vec::new();
    for axis in &config.axes {
        let spec = SweepSpec {
            axis: *axis,
            values: (1..=5).collect(),
            fixed: config.fixed,
        };
        for scenario in generate_grid(&spec)? {
            let mut cell_rows = Vec::new();
            for kind in config.policy.members() {
                let (_, _, row) = evaluate(&scenario, *kind, &engine, mode)?;
                println!("{}", summary_line(&row));
                cell_rows.push(row);
            }
            if config.policy == PolicyChoice::Both {
                pairs.push((cell_rows[0].clone(), cell_rows[1].clone()));
            }
            rows.extend(cell_rows);
        }
    }
    std::fs::write(config.out_dir.join("report.csv"), report_csv(&rows))?;
    if config.policy == PolicyChoice::Both {
        std::fs::write(config.out_dir.join("summary.csv"), summary_csv(&pairs))?;
    }
    Ok(())
}

#[derive(Debug, Parser)]
#[command(
    name = "fogplace",
    version,
    about = "Deterministic fog service placement simulator",
    group(ArgGroup::new("mode").required(true).args(["scenario", "axis"]))
)]
struct Cli {
    /// Scenario JSON file, or a grid cell name like
    /// users-2_apps-2_levels-2_children-2.
    #[arg(long)]
    scenario: Option<String>,

    /// Sweep one grid axis (users | apps | levels | children), or `all` for
    /// the full four-axis battery. Non-swept parameters stay at 2.
    #[arg(long)]
    axis: Option<String>,

    /// Placement policy to evaluate.
    #[arg(long, value_enum, default_value_t = PolicyChoice::Both)]
    policy: PolicyChoice,

    /// Directory the CSV files are written to.
    #[arg(long, default_value = ".")]
    out: PathBuf,

    /// Count client-to-gateway ingress links in traces and network usage.
    #[arg(long)]
    include_ingress: bool,

    /// Mirror every request transfer with an equal-size response.
    #[arg(long)]
    mirror_responses: bool,

    /// Normalize the weighted hop count by device-aggregated instance rates
    /// instead of per-client rates.
    #[arg(long)]
    literal_eq6: bool,
}

fn parse_axes(raw: &str) -> Result<Vec<SweepAxis>> {
    if raw == "all" {
        return Ok(SweepAxis::all().to_vec());
    }
    Ok(vec![raw.parse()?])
}

fn dispatch(cli: Cli) -> Result<()> {
    if let Some(axis) = &cli.axis {
        cmd_sweep(&SweepConfig {
            axes: parse_axes(axis)?,
            fixed: FixedParams::default(),
            policy: cli.policy,
            out_dir: cli.out,
            include_ingress: cli.include_ingress,
            mirror_responses: cli.mirror_responses,
            literal_eq6: cli.literal_eq6,
        })
    } else {
        let raw = cli.scenario.as_deref().expect("mode group requires one");
        cmd_run(&RunConfig {
            scenario: ScenarioSource::parse(raw),
            policy: cli.policy,
            out_dir: cli.out,
            include_ingress: cli.include_ingress,
            mirror_responses: cli.mirror_responses,
            literal_eq6: cli.literal_eq6,
        })
    }
}

fn exit_code(error: &Error) -> i32 {
    match error {
        Error::ScenarioParse(_) => 2,
        _ => 1,
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return err.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            match &err {
                Error::CoverageViolation { .. } => eprintln!("internal error: {err}"),
                _ => eprintln!("error: {err}"),
            }
            exit_code(&err)
        }
    }
}

/// Convenience for tests and examples: run with string arguments (program
/// name supplied).
pub fn run_with(args: &[&str]) -> i32 {
    let mut argv: Vec<OsString> = vec!["fogplace".into()];
    argv.extend(args.iter().map(OsString::from));
    run_from_args(argv)
}
