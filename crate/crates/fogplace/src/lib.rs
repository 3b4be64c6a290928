//! Deterministic service placement simulation for fog computing topologies.
//!
//! `fogplace` models a hierarchy of capacity-constrained fog devices between
//! client gateways and an elastic cloud, places microservice applications on
//! those devices with pluggable policies, and evaluates the result with a
//! steady-state request-flow model (hop counts, network usage, loop latency,
//! migration counts).
//!
//! Two placement policies are provided:
//!
//! - [`policy::pop`] — decentralized, popularity-driven placement. Each
//!   device accepts the service allocation requests it can afford, evicts
//!   whole dependency closures of less requested services when it cannot,
//!   and shifts the rest toward the cloud.
//! - [`policy::edgewards`] — a first-in-first-allocated baseline in the
//!   style of iFogSim's Edgewards strategy: walk each gateway-to-cloud path
//!   in service order, merge instances upward across paths.
//!
//! Everything is deterministic: identical inputs produce identical
//! placements, traces, and CSV reports, byte for byte.
//!
//! The `examples/` directory contains one runnable program per capability
//! (topology construction, app modeling, placement, flow simulation, policy
//! comparison, sweeps, scenario files). Start with:
//!
//! ```bash
//! cargo run -p fogplace --example compare_policies
//! ```

pub mod cli;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod model;
pub mod placement;
pub mod policy;
pub mod report;
pub mod scenarios;

pub use error::{Error, Result};
pub use model::{
    resource_usage, AppId, AppModel, Client, ClientId, CpuCapacity, Device, DeviceId, InstanceId,
    Link, ResourceUsage, Scenario, ScenarioMeta, ServiceEdge, ServiceId, Topology, TreeLinkConfig,
};
pub use placement::{MigrationRecord, MigrationTrigger, PlacementState};
pub use policy::{run_edgewards, run_pop};
