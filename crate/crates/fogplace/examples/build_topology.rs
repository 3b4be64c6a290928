//! Build tree topologies and inspect paths, fathers, and levels.
//!
//! ```bash
//! cargo run -p fogplace --example build_topology
//! ```

use fogplace::model::{Topology, TreeLinkConfig};

fn main() {
    let config = TreeLinkConfig::default();
    let topology = Topology::build_tree(2, 2, &config).unwrap();

    println!(
        "2x2 tree: {} devices, cloud = {}, gateways = {:?}",
        topology.device_count(),
        topology.cloud(),
        topology.gateways()
    );

    for device in topology.devices() {
        let path = topology.shortest_path_to_cloud(device.id).unwrap();
        let father = topology
            .father(device.id)
            .map(|f| f.to_string())
            .unwrap_or_else(|_| "-".into());
        println!(
            "  device {} level {} capacity {:>8} uplink {:>5.1} ms father {father} path {:?}",
            device.id,
            device.level,
            if device.cpu.is_unlimited() {
                "inf".to_string()
            } else {
                format!("{}", device.cpu.mips())
            },
            device.uplink_latency_ms,
            path,
        );
    }

    // Sizes grow geometrically with depth and fan-out.
    for (levels, children) in [(1, 1), (2, 2), (3, 3), (5, 5)] {
        let t = Topology::build_tree(levels, children, &config).unwrap();
        println!(
            "tree levels={levels} children={children}: {} fog devices + cloud, {} gateways",
            t.device_count() - 1,
            t.gateways().len()
        );
    }

    // Routes between arbitrary devices follow the lowest-latency path.
    let topology = Topology::build_tree(2, 2, &config).unwrap();
    let gateways: Vec<_> = topology.gateways().iter().copied().collect();
    let route = topology.route(gateways[0], gateways[1]).unwrap();
    println!(
        "route {} -> {}: {:?} ({} ms)",
        gateways[0],
        gateways[1],
        route,
        topology.route_latency(gateways[0], gateways[1]).unwrap()
    );
}
