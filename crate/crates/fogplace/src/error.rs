//! Error type shared across the crate.

use crate::model::{AppId, ClientId, DeviceId, ServiceId};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid app model: {0}")]
    InvalidApp(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown device {0}")]
    UnknownDevice(DeviceId),

    #[error("device {0} has no path to the cloud")]
    CloudUnreachable(DeviceId),

    #[error("father() is undefined for the cloud device")]
    FatherOfCloud,

    /// A client's request could not be resolved to any instance on its path.
    /// This indicates a bug in a placement policy, not bad input.
    #[error("coverage violation: no instance of service {service} (app {app}) on the path of client {client}")]
    CoverageViolation {
        client: ClientId,
        app: AppId,
        service: ServiceId,
    },

    #[error("failed to parse scenario JSON: {0}")]
    ScenarioParse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
