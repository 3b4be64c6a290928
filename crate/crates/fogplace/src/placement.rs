//! Placement state shared by all policies: which instance lives on which
//! device, plus the migration log that records how it got there.
//!
//! Log conventions:
//! - `initial` — an instance allocated at the device it was first requested
//!   on (its client's gateway), without ever moving. `from` is empty.
//! - `shifted` — an unallocated request hopped one device toward the cloud
//!   (one record per hop).
//! - `evicted` — an allocated instance was deallocated to make room and
//!   re-requested at the recorded destination.
//!
//! An instance id is stable across its whole history, so the last record
//! mentioning an instance names its final destination. A request absorbed by
//! an existing instance of the same (app, service) simply stops appearing in
//! the allocation map.

use std::collections::BTreeMap;

use crate::model::{AppId, DeviceId, InstanceId, ServiceId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MigrationTrigger {
    Initial,
    Evicted,
    Shifted,
}

impl std::fmt::Display for MigrationTrigger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let label = match self {
            MigrationTrigger::Initial => "initial",
            MigrationTrigger::Evicted => "evicted",
            MigrationTrigger::Shifted => "shifted",
        };
        write!(f, "{label}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MigrationRecord {
    pub instance: InstanceId,
    pub app: AppId,
    pub service: ServiceId,
    pub from: Option<DeviceId>,
    pub to: DeviceId,
    pub trigger: MigrationTrigger,
}

/// Mutable mapping of service instances to devices. At most one instance of
/// a given (app, service) may live on a device; policies must check before
/// allocating.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlacementState {
    allocations: BTreeMap<InstanceId, DeviceId>,
    instance_service: BTreeMap<InstanceId, (AppId, ServiceId)>,
    device_index: BTreeMap<DeviceId, BTreeMap<(AppId, ServiceId), InstanceId>>,
    migration_log: Vec<MigrationRecord>,
    next_instance: u32,
}

impl PlacementState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Mint the id a new allocation request will carry.
    pub fn new_instance(&mut self) -> InstanceId {
        let id = InstanceId(self.next_instance);
        self.next_instance += 1;
        id
    }

    /// Place `instance` on `device`. Panics if the device already hosts an
    /// instance of the same (app, service) or the instance is already
    /// placed — callers guard with [`PlacementState::instance_at`].
    pub fn allocate(
        &mut self,
        instance: InstanceId,
        app: AppId,
        service: ServiceId,
        device: DeviceId,
    ) {
        assert!(
            !self.allocations.contains_key(&instance),
            "instance {instance} is already allocated"
        );
        let slot = self
            .device_index
            .entry(device)
            .or_default()
            .insert((app, service), instance);
        assert!(
            slot.is_none(),
            "device {device} already hosts service {service} of app {app}"
        );
        self.allocations.insert(instance, device);
        self.instance_service.insert(instance, (app, service));
    }

    /// Remove `instance` from its device and return where it was.
    pub fn deallocate(&mut self, instance: InstanceId) -> DeviceId {
        let device = self
            .allocations
            .remove(&instance)
            .expect("deallocating an instance that is not placed");
        let key = self.instance_service[&instance];
        self.device_index
            .get_mut(&device)
            .expect("device index out of sync")
            .remove(&key);
        device
    }

    pub fn record(&mut self, record: MigrationRecord) {
        self.migration_log.push(record);
    }

    pub fn migration_log(&self) -> &[MigrationRecord] {
        &self.migration_log
    }

    pub fn instance_at(
        &self,
        device: DeviceId,
        app: AppId,
        service: ServiceId,
    ) -> Option<InstanceId> {
        self.device_index
            .get(&device)?
            .get(&(app, service))
            .copied()
    }

    pub fn device_of(&self, instance: InstanceId) -> Option<DeviceId> {
        self.allocations.get(&instance).copied()
    }

    pub fn service_of(&self, instance: InstanceId) -> Option<(AppId, ServiceId)> {
        self.instance_service.get(&instance).copied()
    }

    /// Services hosted on a device, sorted by (app, service).
    pub fn services_on(&self, device: DeviceId) -> Vec<(AppId, ServiceId)> {
        self.device_index
            .get(&device)
            .map(|slots| slots.keys().copied().collect())
            .unwrap_or_default()
    }

    /// Whether any device of `path` hosts (app, service).
    pub fn allocated_on_path(&self, path: &[DeviceId], app: AppId, service: ServiceId) -> bool {
        path.iter()
            .any(|d| self.instance_at(*d, app, service).is_some())
    }

    /// All placed instances, ascending by id.
    pub fn allocations(&self) -> impl Iterator<Item = (InstanceId, DeviceId)> + '_ {
        self.allocations.iter().map(|(i, d)| (*i, *d))
    }

    pub fn instance_count(&self) -> usize {
        self.allocations.len()
    }

    /// The placement as a comparable set of (device, app, service) triples,
    /// independent of instance ids.
    pub fn allocation_set(&self) -> std::collections::BTreeSet<(DeviceId, AppId, ServiceId)> {
        self.device_index
            .iter()
            .flat_map(|(device, slots)| slots.keys().map(move |(a, s)| (*device, *a, *s)))
            .collect()
    }
}
