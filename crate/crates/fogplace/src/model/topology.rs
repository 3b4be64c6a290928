//! Device graph: capacities, links, and deterministic shortest paths to the
//! cloud.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use crate::error::{Error, Result};
use crate::model::DeviceId;

/// Compute capacity of a device, in MI per ms (the configuration files call
/// this MIPS, following simulator convention).
///
/// The cloud is `Unlimited` — a sentinel, never a large finite number, so it
/// can absorb any load without accidental saturation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CpuCapacity {
    Finite(f64),
    Unlimited,
}

impl CpuCapacity {
    /// Capacity left after `used` MIPS are consumed.
    pub fn headroom(&self, used: f64) -> f64 {
        match self {
            CpuCapacity::Finite(cap) => cap - used,
            CpuCapacity::Unlimited => f64::INFINITY,
        }
    }

    pub fn mips(&self) -> f64 {
        match self {
            CpuCapacity::Finite(cap) => *cap,
            CpuCapacity::Unlimited => f64::INFINITY,
        }
    }

    pub fn is_unlimited(&self) -> bool {
        matches!(self, CpuCapacity::Unlimited)
    }
}

#[derive(Debug, Clone)]
pub struct Device {
    pub id: DeviceId,
    pub cpu: CpuCapacity,
    pub ram_mb: f64,
    /// Latency of the link toward this device's father, in ms. Zero for the
    /// cloud.
    pub uplink_latency_ms: f64,
    pub is_cloud: bool,
    /// Hop depth measured from the gateways: gateway = 1, cloud = top level.
    /// Zero for devices that sit on no gateway-to-cloud path.
    pub level: u32,
}

/// An undirected network link.
#[derive(Debug, Clone, Copy)]
pub struct Link {
    pub a: DeviceId,
    pub b: DeviceId,
    pub latency_ms: f64,
}

/// Capacities and latencies used by [`Topology::build_tree`]. Defaults match
/// the usual fog testbed configuration: 2800 MIPS fog devices, 2 ms fog
/// links, and a 100 ms cloud uplink.
#[derive(Debug, Clone)]
pub struct TreeLinkConfig {
    pub fog_cpu_mips: f64,
    pub fog_ram_mb: f64,
    pub fog_link_latency_ms: f64,
    pub cloud_link_latency_ms: f64,
}

impl Default for TreeLinkConfig {
    fn default() -> Self {
        Self {
            fog_cpu_mips: 2800.0,
            fog_ram_mb: 4000.0,
            fog_link_latency_ms: 2.0,
            cloud_link_latency_ms: 100.0,
        }
    }
}

/// The device graph. Construction validates the invariants (exactly one
/// cloud, positive capacities and latencies, every device connected to the
/// cloud) and precomputes every device's shortest path to the cloud.
///
/// Shortest paths are deterministic: among equal-latency paths the
/// lexicographically smallest device-id sequence wins, which makes
/// [`Topology::father`] a function.
#[derive(Debug, Clone)]
pub struct Topology {
    devices: BTreeMap<DeviceId, Device>,
    links: Vec<Link>,
    adjacency: BTreeMap<DeviceId, Vec<(DeviceId, f64)>>,
    cloud: DeviceId,
    gateways: BTreeSet<DeviceId>,
    /// Path from each device (exclusive) to the cloud (inclusive).
    paths: BTreeMap<DeviceId, Vec<DeviceId>>,
    dist_to_cloud: BTreeMap<DeviceId, f64>,
}

impl Topology {
    pub fn new(devices: Vec<Device>, links: Vec<Link>, gateways: Vec<DeviceId>) -> Result<Self> {
        let mut device_map = BTreeMap::new();
        let mut cloud = None;
        for device in devices {
            if device.is_cloud {
                if cloud.is_some() {
                    return Err(Error::InvalidTopology("more than one cloud device".into()));
                }
                if !device.cpu.is_unlimited() {
                    return Err(Error::InvalidTopology(format!(
                        "cloud device {} must have unlimited capacity",
                        device.id
                    )));
                }
                cloud = Some(device.id);
            } else {
                match device.cpu {
                    CpuCapacity::Finite(cap) if cap > 0.0 && cap.is_finite() => {}
                    _ => {
                        return Err(Error::InvalidTopology(format!(
                            "device {} must have finite positive capacity",
                            device.id
                        )))
                    }
                }
            }
            if device_map.insert(device.id, device).is_some() {
                return Err(Error::InvalidTopology("duplicate device id".into()));
            }
        }
        let cloud = cloud.ok_or_else(|| Error::InvalidTopology("no cloud device".into()))?;

        let mut adjacency: BTreeMap<DeviceId, Vec<(DeviceId, f64)>> =
            device_map.keys().map(|id| (*id, Vec::new())).collect();
        let mut seen_pairs = BTreeSet::new();
        for link in &links {
            if link.a == link.b {
                return Err(Error::InvalidTopology(format!(
                    "self-link on device {}",
                    link.a
                )));
            }
            if !(link.latency_ms > 0.0 && link.latency_ms.is_finite()) {
                return Err(Error::InvalidTopology(format!(
                    "link {}-{} must have positive latency",
                    link.a, link.b
                )));
            }
            for id in [link.a, link.b] {
                if !device_map.contains_key(&id) {
                    return Err(Error::InvalidTopology(format!(
                        "link references unknown device {id}"
                    )));
                }
            }
            let key = (link.a.min(link.b), link.a.max(link.b));
            if !seen_pairs.insert(key) {
                return Err(Error::InvalidTopology(format!(
                    "duplicate link {}-{}",
                    key.0, key.1
                )));
            }
            adjacency
                .get_mut(&link.a)
                .unwrap()
                .push((link.b, link.latency_ms));
            adjacency
                .get_mut(&link.b)
                .unwrap()
                .push((link.a, link.latency_ms));
        }
        for neighbors in adjacency.values_mut() {
            neighbors.sort_by_key(|(id, _)| *id);
        }

        let mut gateway_set = BTreeSet::new();
        for gateway in gateways {
            if !device_map.contains_key(&gateway) {
                return Err(Error::InvalidTopology(format!(
                    "gateway {gateway} is not a device"
                )));
            }
            if gateway == cloud {
                return Err(Error::InvalidTopology(
                    "the cloud cannot be a gateway".into(),
                ));
            }
            gateway_set.insert(gateway);
        }

        let dist_to_cloud = dijkstra(&adjacency, cloud);
        for id in device_map.keys() {
            if !dist_to_cloud.contains_key(id) {
                return Err(Error::CloudUnreachable(*id));
            }
        }

        // Greedy next-hop walk over the distance field. Each step picks the
        // smallest-id neighbor that lies on some shortest path, which yields
        // the lexicographically smallest shortest path overall.
        let mut paths = BTreeMap::new();
        for id in device_map.keys() {
            let mut path = Vec::new();
            let mut at = *id;
            while at != cloud {
                let next = adjacency[&at]
                    .iter()
                    .find(|(n, w)| dist_to_cloud[n] + w == dist_to_cloud[&at])
                    .map(|(n, _)| *n)
                    .expect("finite distance implies a tight neighbor");
                path.push(next);
                at = next;
            }
            paths.insert(*id, path);
        }

        // Levels are derived from gateway paths: a gateway is level 1, each
        // hop toward the cloud adds one.
        let mut levels: BTreeMap<DeviceId, u32> = BTreeMap::new();
        for gateway in &gateway_set {
            let mut hop = 1u32;
            let mut note = |d: DeviceId, hop: u32| {
                levels
                    .entry(d)
                    .and_modify(|cur| *cur = (*cur).min(hop))
                    .or_insert(hop);
            };
            note(*gateway, hop);
            for d in &paths[gateway] {
                hop += 1;
                note(*d, hop);
            }
        }
        for (id, device) in device_map.iter_mut() {
            device.level = levels.get(id).copied().unwrap_or(0);
        }

        Ok(Self {
            devices: device_map,
            links,
            adjacency,
            cloud,
            gateways: gateway_set,
            paths,
            dist_to_cloud,
        })
    }

    /// Build a complete k-ary tree of fog devices: `levels` fog levels with
    /// the gateways as leaves and the cloud above the top fog level. The
    /// cloud is device 0; fog devices are numbered level by level from the
    /// top, left to right, so gateway ids form the last contiguous block.
    pub fn build_tree(levels: u32, children: u32, cfg: &TreeLinkConfig) -> Result<Self> {
        if levels < 1 || children < 1 {
            return Err(Error::InvalidConfig(
                "tree topology needs at least 1 level and 1 child per device".into(),
            ));
        }
        let mut devices = vec![Device {
            id: DeviceId(0),
            cpu: CpuCapacity::Unlimited,
            ram_mb: f64::INFINITY,
            uplink_latency_ms: 0.0,
            is_cloud: true,
            level: levels + 1,
        }];
        let mut links = Vec::new();
        let mut gateways = Vec::new();

        // depth counts down from the cloud: depth 1 is the top fog row.
        let mut row_start = 1u32;
        let mut prev_row_start = 0u32;
        let mut row_len = 1u32;
        for depth in 1..=levels {
            row_len = row_len.saturating_mul(children);
            let latency = if depth == 1 {
                cfg.cloud_link_latency_ms
            } else {
                cfg.fog_link_latency_ms
            };
            for i in 0..row_len {
                let id = DeviceId(row_start + i);
                let parent = if depth == 1 {
                    DeviceId(0)
                } else {
                    DeviceId(prev_row_start + i / children)
                };
                devices.push(Device {
                    id,
                    cpu: CpuCapacity::Finite(cfg.fog_cpu_mips),
                    ram_mb: cfg.fog_ram_mb,
                    uplink_latency_ms: latency,
                    is_cloud: false,
                    level: levels - depth + 1,
                });
                links.push(Link {
                    a: id,
                    b: parent,
                    latency_ms: latency,
                });
                if depth == levels {
                    gateways.push(id);
                }
            }
            prev_row_start = row_start;
            row_start += row_len;
        }

        Self::new(devices, links, gateways)
    }

    pub fn cloud(&self) -> DeviceId {
        self.cloud
    }

    pub fn gateways(&self) -> &BTreeSet<DeviceId> {
        &self.gateways
    }

    pub fn device(&self, id: DeviceId) -> Option<&Device> {
        self.devices.get(&id)
    }

    pub fn devices(&self) -> impl Iterator<Item = &Device> {
        self.devices.values()
    }

    pub fn device_count(&self) -> usize {
        self.devices.len()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn contains(&self, id: DeviceId) -> bool {
        self.devices.contains_key(&id)
    }

    /// Highest level in the topology (the cloud's level on tree topologies).
    pub fn max_level(&self) -> u32 {
        self.devices.values().map(|d| d.level).max().unwrap_or(0)
    }

    /// Latency of the direct link between two adjacent devices.
    pub fn link_latency(&self, a: DeviceId, b: DeviceId) -> Option<f64> {
        self.adjacency
            .get(&a)?
            .iter()
            .find(|(n, _)| *n == b)
            .map(|(_, w)| *w)
    }

    /// Minimal-latency path from `device` (exclusive) to the cloud
    /// (inclusive). The cloud itself yields an empty path. Ties are broken
    /// toward the lexicographically smallest device-id sequence.
    pub fn shortest_path_to_cloud(&self, device: DeviceId) -> Result<&[DeviceId]> {
        self.paths
            .get(&device)
            .map(|p| p.as_slice())
            .ok_or(Error::UnknownDevice(device))
    }

    /// The next device on `device`'s shortest path to the cloud.
    pub fn father(&self, device: DeviceId) -> Result<DeviceId> {
        if device == self.cloud {
            return Err(Error::FatherOfCloud);
        }
        Ok(self.shortest_path_to_cloud(device)?[0])
    }

    pub fn latency_to_cloud(&self, device: DeviceId) -> Result<f64> {
        self.dist_to_cloud
            .get(&device)
            .copied()
            .ok_or(Error::UnknownDevice(device))
    }

    /// Minimal-latency route between two devices, endpoints included, with
    /// the same lexicographic tie-break as cloud paths.
    pub fn route(&self, from: DeviceId, to: DeviceId) -> Result<Vec<DeviceId>> {
        if !self.contains(from) {
            return Err(Error::UnknownDevice(from));
        }
        if !self.contains(to) {
            return Err(Error::UnknownDevice(to));
        }
        if from == to {
            return Ok(vec![from]);
        }
        let dist = dijkstra(&self.adjacency, to);
        if !dist.contains_key(&from) {
            return Err(Error::InvalidTopology(format!(
                "no route between {from} and {to}"
            )));
        }
        let mut path = vec![from];
        let mut at = from;
        while at != to {
            let next = self.adjacency[&at]
                .iter()
                .find(|(n, w)| dist.get(n).is_some_and(|d| d + w == dist[&at]))
                .map(|(n, _)| *n)
                .expect("finite distance implies a tight neighbor");
            path.push(next);
            at = next;
        }
        Ok(path)
    }

    /// Total latency along [`Topology::route`].
    pub fn route_latency(&self, from: DeviceId, to: DeviceId) -> Result<f64> {
        let route = self.route(from, to)?;
        Ok(route
            .windows(2)
            .map(|pair| self.link_latency(pair[0], pair[1]).unwrap())
            .sum())
    }

    /// Backfill uplink latencies once fathers are known (explicit topologies
    /// are loaded before their shortest paths exist).
    pub(crate) fn with_uplinks(mut self, uplinks: &[(DeviceId, f64)]) -> Self {
        for (id, latency) in uplinks {
            if let Some(device) = self.devices.get_mut(id) {
                device.uplink_latency_ms = *latency;
            }
        }
        self
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: DeviceId,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Reversed: BinaryHeap is a max-heap, we want the smallest distance
        // (then smallest id) on top.
        other
            .dist
            .total_cmp(&self.dist)
            .then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(
    adjacency: &BTreeMap<DeviceId, Vec<(DeviceId, f64)>>,
    source: DeviceId,
) -> BTreeMap<DeviceId, f64> {
    let mut dist = BTreeMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(source, 0.0);
    heap.push(HeapEntry {
        dist: 0.0,
        node: source,
    });
    while let Some(HeapEntry { dist: d, node }) = heap.pop() {
        if dist[&node] < d {
            continue;
        }
        for (next, weight) in &adjacency[&node] {
            let candidate = d + weight;
            if dist.get(next).is_none_or(|cur| candidate < *cur) {
                dist.insert(*next, candidate);
                heap.push(HeapEntry {
                    dist: candidate,
                    node: *next,
                });
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_gateway_tree() {
        let topo = Topology::build_tree(1, 1, &TreeLinkConfig::default()).unwrap();
        assert_eq!(topo.device_count(), 2);
        let gateway = *topo.gateways().iter().next().unwrap();
        let device = topo.device(gateway).unwrap();
        assert_eq!(device.cpu.mips(), 2800.0);
        assert_eq!(device.uplink_latency_ms, 100.0);
        assert_eq!(topo.father(gateway).unwrap(), topo.cloud());
    }

    #[test]
    fn two_level_binary_tree() {
        let topo = Topology::build_tree(2, 2, &TreeLinkConfig::default()).unwrap();
        assert_eq!(topo.device_count(), 7);
        assert_eq!(topo.gateways().len(), 4);
        // Gateways are the last id block.
        let ids: Vec<u32> = topo.gateways().iter().map(|g| g.0).collect();
        assert_eq!(ids, vec![3, 4, 5, 6]);
        for gateway in topo.gateways() {
            let path = topo.shortest_path_to_cloud(*gateway).unwrap();
            assert_eq!(path.len(), 2);
            assert_eq!(*path.last().unwrap(), topo.cloud());
            assert_eq!(topo.device(*gateway).unwrap().level, 1);
        }
        assert_eq!(topo.device(topo.cloud()).unwrap().level, 3);
        assert_eq!(topo.max_level(), 3);
    }

    #[test]
    fn five_level_tree_size_is_a_geometric_series() {
        let topo = Topology::build_tree(5, 5, &TreeLinkConfig::default()).unwrap();
        let fog: u32 = (1..=5).map(|i| 5u32.pow(i)).sum();
        assert_eq!(topo.device_count() as u32, fog + 1);
        assert_eq!(topo.gateways().len() as u32, 5u32.pow(5));
    }

    #[test]
    fn cloud_path_is_empty() {
        let topo = Topology::build_tree(2, 2, &TreeLinkConfig::default()).unwrap();
        assert!(topo
            .shortest_path_to_cloud(topo.cloud())
            .unwrap()
            .is_empty());
        assert!(matches!(
            topo.father(topo.cloud()),
            Err(Error::FatherOfCloud)
        ));
    }

    #[test]
    fn tree_path_equals_parent_chain() {
        let topo = Topology::build_tree(3, 2, &TreeLinkConfig::default()).unwrap();
        for device in topo.devices() {
            if device.is_cloud {
                continue;
            }
            let path = topo.shortest_path_to_cloud(device.id).unwrap();
            let mut at = device.id;
            for hop in path {
                assert_eq!(topo.father(at).unwrap(), *hop);
                at = *hop;
            }
            assert_eq!(at, topo.cloud());
        }
    }

    fn diamond(lat_a: f64, lat_b: f64, lat_a_cloud: f64, lat_b_cloud: f64) -> Topology {
        let device = |id: u32| Device {
            id: DeviceId(id),
            cpu: CpuCapacity::Finite(1000.0),
            ram_mb: 100.0,
            uplink_latency_ms: 0.0,
            is_cloud: false,
            level: 0,
        };
        let cloud = Device {
            id: DeviceId(0),
            cpu: CpuCapacity::Unlimited,
            ram_mb: 0.0,
            uplink_latency_ms: 0.0,
            is_cloud: true,
            level: 0,
        };
        Topology::new(
            vec![cloud, device(1), device(2), device(3)],
            vec![
                Link {
                    a: DeviceId(3),
                    b: DeviceId(1),
                    latency_ms: lat_a,
                },
                Link {
                    a: DeviceId(3),
                    b: DeviceId(2),
                    latency_ms: lat_b,
                },
                Link {
                    a: DeviceId(1),
                    b: DeviceId(0),
                    latency_ms: lat_a_cloud,
                },
                Link {
                    a: DeviceId(2),
                    b: DeviceId(0),
                    latency_ms: lat_b_cloud,
                },
            ],
            vec![DeviceId(3)],
        )
        .unwrap()
    }

    #[test]
    fn diamond_prefers_lower_latency_branch() {
        let topo = diamond(5.0, 2.0, 1.0, 3.0);
        // via 1: 6 total, via 2: 5 total
        let path = topo.shortest_path_to_cloud(DeviceId(3)).unwrap();
        assert_eq!(path, &[DeviceId(2), DeviceId(0)]);
        assert_eq!(topo.father(DeviceId(3)).unwrap(), DeviceId(2));
    }

    #[test]
    fn diamond_tie_breaks_to_smaller_id() {
        let topo = diamond(2.0, 2.0, 2.0, 2.0);
        let path = topo.shortest_path_to_cloud(DeviceId(3)).unwrap();
        assert_eq!(path, &[DeviceId(1), DeviceId(0)]);
        assert_eq!(topo.father(DeviceId(3)).unwrap(), DeviceId(1));
    }

    #[test]
    fn unreachable_cloud_is_rejected() {
        let cloud = Device {
            id: DeviceId(0),
            cpu: CpuCapacity::Unlimited,
            ram_mb: 0.0,
            uplink_latency_ms: 0.0,
            is_cloud: true,
            level: 0,
        };
        let lone = Device {
            id: DeviceId(1),
            cpu: CpuCapacity::Finite(100.0),
            ram_mb: 0.0,
            uplink_latency_ms: 0.0,
            is_cloud: false,
            level: 0,
        };
        let err = Topology::new(vec![cloud, lone], vec![], vec![DeviceId(1)]).unwrap_err();
        assert!(matches!(err, Error::CloudUnreachable(DeviceId(1))));
    }

    #[test]
    fn route_between_siblings_goes_through_the_father() {
        let topo = Topology::build_tree(2, 2, &TreeLinkConfig::default()).unwrap();
        let route = topo.route(DeviceId(3), DeviceId(4)).unwrap();
        assert_eq!(route, vec![DeviceId(3), DeviceId(1), DeviceId(4)]);
        assert_eq!(topo.route_latency(DeviceId(3), DeviceId(4)).unwrap(), 4.0);
        assert_eq!(
            topo.route(DeviceId(3), DeviceId(3)).unwrap(),
            vec![DeviceId(3)]
        );
    }
}
