//! System model: devices, topologies, applications, clients, and the
//! request-rate bookkeeping every policy and metric builds on.
//!
//! Everything in this module is immutable once a [`Scenario`] is constructed,
//! so scenarios can be shared freely across threads evaluating different
//! placements.

mod app;
mod scenario;
pub mod schema;
mod topology;

pub use app::{AppModel, ServiceEdge};
pub use scenario::{resource_usage, Client, ResourceUsage, Scenario, ScenarioMeta};
pub use schema::{load_scenario, scenario_from_json};
pub use topology::{CpuCapacity, Device, Link, Topology, TreeLinkConfig};

macro_rules! define_id {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
        pub struct $name(pub u32);

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                write!(f, "{}", self.0)
            }
        }

        impl From<u32> for $name {
            fn from(raw: u32) -> Self {
                Self(raw)
            }
        }
    };
}

define_id!(
    /// A device in the topology (fog device, gateway, or the cloud).
    DeviceId
);
define_id!(
    /// A service of an application. Unique across the whole scenario, so a
    /// service id also identifies its application.
    ServiceId
);
define_id!(
    /// An application (one replica of a modeled app is one `AppId`).
    AppId
);
define_id!(
    /// A client attached to a gateway, requesting one application.
    ClientId
);
define_id!(
    /// One placed (or requested) copy of a service on a device.
    InstanceId
);
